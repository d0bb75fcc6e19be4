//! Outer search over rotation `theta`, dilation `alpha` and reflection `eta`
//! for the continuous-acceleration case, and the top-level [`solve`]
//! dispatcher.
//!
//! For fixed `(theta, alpha, eta)` the velocity constraints fix the dilated
//! time span and the integration constants, so the arc's displacement is a
//! function of the three parameters. The search looks for parameters whose
//! displacement equals the normalized target.
//!
//! Newton runs in `z = (ln mu_u, asinh mu_v)`, which stays well scaled both
//! for small arcs and for the large-`alpha` arcs that approach a bang-bang
//! profile. Roots are accepted on the physical displacement error
//! `R(theta) mu / alpha^2 - delta`; the unscaled form `mu - alpha^2 R^-1
//! delta` is exposed as [`residual`] but vanishes spuriously as `alpha -> 0`.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::canonical::{
    asinh, eval_fg, CanonicalArc, CanonicalParams, Rotation2, Sign, Trajectory, Vec2,
};
use crate::classify::{
    bang_bang_gap, classify, min_time_1d, solve_case1, solve_case2_1d, solve_case3, AlignedProblem,
    ClassificationResult,
};
use crate::error::{ensure_finite, Error, Result};
use crate::normalize::{
    denormalize_solution, normalize, BoundaryConditions, NormalizationRecord, NormalizedProblem,
};
use crate::tausolve::{lambda_max, solve_tau, time_upper_bound, MuPair};

/// Inset of the rotation grid from `+-pi/2`.
const THETA_INSET: f64 = 1e-3;
/// Ratios between segment durations tried when seeding near-bang-bang arcs.
const BANG_BANG_FRACTIONS: [f64; 3] = [1e-2, 1e-4, 1e-6];
const BANG_BANG_ALPHA_RANGE: (f64, f64) = (10.0, 1e12);
const BANG_BANG_ALPHA_STEPS: usize = 160;
// Valleys near the bang-bang manifold are long and thin, Newton crawls there.
const BANG_BANG_ITER_FACTOR: usize = 10;
/// Stalled Newton runs retried with the fold solver when nothing converged.
const FOLD_POLISH_TRIES: usize = 12;
/// Endpoint residual (relative) a returned solution must meet.
const ENDPOINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub theta_grid: usize,
    pub alpha_grid: usize,
    pub newton_max_iter: usize,
    pub residual_tol: f64,
    pub tau_tol: f64,
    pub tmax_safety: f64,
    pub dedupe_radius: f64,
    /// Relative tolerance of the case-equality tests.
    pub classify_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            theta_grid: 64,
            alpha_grid: 64,
            newton_max_iter: 40,
            residual_tol: 1e-10,
            tau_tol: 1e-12,
            tmax_safety: 1.05,
            dedupe_radius: 1e-5,
            classify_tol: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.theta_grid >= 2
            && self.alpha_grid >= 2
            && self.newton_max_iter >= 1
            && self.residual_tol > 0.0
            && self.tau_tol > 0.0
            && self.tmax_safety >= 1.0
            && self.dedupe_radius > 0.0
            && self.classify_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid search config: {self:?}"
            )))
        }
    }
}

/// One converged stationary arc of the normalized problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub theta: f64,
    pub alpha: f64,
    pub eta: Sign,
    pub total_time: f64,
    /// Displacement error relative to `max(1, |delta|)`.
    pub residual_norm: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub mu_u: f64,
    pub mu_v: f64,
    pub u0: f64,
    pub v0: f64,
}

impl RootRecord {
    pub fn params(&self) -> CanonicalParams {
        CanonicalParams {
            alpha: self.alpha,
            theta: self.theta,
            eta: self.eta,
            tau1: self.tau1,
            tau2: self.tau2,
            u0: self.u0,
            v0: self.v0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub roots_found: Vec<RootRecord>,
    pub grid_cells_scanned: usize,
    pub newton_iterations_total: usize,
    pub seeds_tried: usize,
    /// The grid was doubled after the first pass found nothing.
    pub refined: bool,
    /// Data within `1e3 * classify_tol` of the bang-bang manifold; both
    /// candidates were evaluated.
    pub near_boundary: bool,
    /// The bang-bang candidate was returned because the search failed.
    pub boundary_fallback: bool,
    pub bang_bang_time: Option<f64>,
    pub continuous_time: Option<f64>,
    /// Relative endpoint residual of the returned trajectory.
    pub endpoint_residual: f64,
}

/// Output of [`displacement_map`], all in the dilated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementMap {
    pub mu_x: f64,
    pub mu_y: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub u0: f64,
    pub v0: f64,
    pub total_time: f64,
}

fn check_params(alpha: f64, theta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) || !(theta.abs() < FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!(
            "need alpha > 0 and |theta| < pi/2, got alpha={alpha}, theta={theta}"
        )));
    }
    Ok(())
}

pub fn displacement_map(
    np: &NormalizedProblem,
    theta: f64,
    alpha: f64,
    eta: Sign,
    tau_tol: f64,
) -> Result<DisplacementMap> {
    check_params(alpha, theta)?;
    let mu = MuPair::from_polar(alpha, theta, eta)?;
    map_in_frame(np, mu, alpha, Rotation2::new(theta), eta, tau_tol)
}

fn map_in_frame(
    np: &NormalizedProblem,
    mu: MuPair,
    alpha: f64,
    rot: Rotation2,
    eta: Sign,
    tau_tol: f64,
) -> Result<DisplacementMap> {
    let (tau1, tau2) = solve_tau(mu, tau_tol)?;
    let w = rot.apply_inverse(np.initial_velocity()) * alpha;
    let u0 = w.x - asinh(tau1);
    let v0 = w.y - eta.apply(tau1.hypot(1.0));
    let (a, b) = (eval_fg(tau1), eval_fg(tau2));
    let dt = tau2 - tau1;
    let map = DisplacementMap {
        mu_x: b.f - a.f + u0 * dt,
        mu_y: eta.apply(b.g - a.g) + v0 * dt,
        tau1,
        tau2,
        u0,
        v0,
        total_time: dt / alpha,
    };
    ensure_finite(&[map.mu_x, map.mu_y, map.total_time], "displacement map")?;
    Ok(map)
}

/// `(mu_x, mu_y) - alpha^2 R(theta)^-1 (dx, dy)`.
pub fn residual(np: &NormalizedProblem, theta: f64, alpha: f64, eta: Sign) -> Result<Vec2> {
    let m = displacement_map(np, theta, alpha, eta, SearchConfig::default().tau_tol)?;
    let target = Rotation2::new(theta).apply_inverse(np.displacement()) * (alpha * alpha);
    Ok(Vec2::new(m.mu_x, m.mu_y) - target)
}

/// One evaluation of the search residual at `z = (ln mu_u, asinh mu_v)`.
#[derive(Debug, Clone, Copy)]
struct Probe {
    error: Vec2,
    map: DisplacementMap,
    theta: f64,
    alpha: f64,
    mu: MuPair,
}

fn probe(np: &NormalizedProblem, z: [f64; 2], eta: Sign, tau_tol: f64) -> Result<Probe> {
    let mu = MuPair::new(z[0].exp(), z[1].sinh())?;
    let alpha = mu.mu_u.hypot(mu.mu_v);
    let rot = Rotation2::from_cos_sin(mu.mu_u / alpha, -eta.apply(mu.mu_v) / alpha);
    let map = map_in_frame(np, mu, alpha, rot, eta, tau_tol)?;
    let error = rot.apply(Vec2::new(map.mu_x, map.mu_y)) / (alpha * alpha) - np.displacement();
    if !error.is_finite() {
        return Err(Error::NonFinite("search residual"));
    }
    Ok(Probe {
        error,
        map,
        theta: rot.angle(),
        alpha,
        mu,
    })
}

fn z_of(theta: f64, alpha: f64, eta: Sign) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [(alpha * c).ln(), asinh(-eta.apply(alpha * s))]
}

/// z-box outside which probes are not attempted; `exp(mu_u)` enters the
/// tau bracket.
fn z_admissible(z: [f64; 2]) -> bool {
    z[0] < 700f64.ln() && z[1].abs() < 40.0 && z[0].is_finite() && z[1].is_finite()
}

struct NewtonOutcome {
    root: Option<(Probe, f64)>,
    iterations: usize,
    /// Where a failed run stopped and its residual norm there.
    stalled: Option<([f64; 2], f64)>,
}

/// Central-difference Jacobian of the search residual in `z`.
fn jacobian(
    np: &NormalizedProblem,
    z: [f64; 2],
    eta: Sign,
    cfg: &SearchConfig,
) -> Option<[Vec2; 2]> {
    const H: f64 = 1e-6;
    let mut cols = [Vec2::ZERO; 2];
    for (j, col) in cols.iter_mut().enumerate() {
        let (mut zp, mut zm) = (z, z);
        zp[j] += H;
        zm[j] -= H;
        let p = probe(np, zp, eta, cfg.tau_tol).ok()?;
        let m = probe(np, zm, eta, cfg.tau_tol).ok()?;
        *col = (p.error - m.error) / (2.0 * H);
    }
    Some(cols)
}

/// Newton with a central-difference Jacobian, damped Levenberg-Marquardt
/// style when the full step does not reduce the residual.
fn newton(
    np: &NormalizedProblem,
    start: [f64; 2],
    eta: Sign,
    cfg: &SearchConfig,
    accept: f64,
    max_iter: usize,
) -> NewtonOutcome {
    let none = NewtonOutcome {
        root: None,
        iterations: 0,
        stalled: None,
    };
    let mut z = start;
    if !z_admissible(z) {
        return none;
    }
    let Ok(mut cur) = probe(np, z, eta, cfg.tau_tol) else {
        return none;
    };
    let mut lambda = 0.0_f64;
    for k in 0..max_iter {
        let n = cur.error.norm();
        if n <= accept {
            return NewtonOutcome {
                root: Some((cur, n)),
                iterations: k,
                stalled: None,
            };
        }
        let fail = NewtonOutcome {
            root: None,
            iterations: k + 1,
            stalled: Some((z, n)),
        };
        let Some([c0, c1]) = jacobian(np, z, eta, cfg) else {
            return fail;
        };
        // 2x2 normal equations, diagonal scaled by (1 + lambda)
        let r = -cur.error;
        let g = [c0.dot(r), c1.dot(r)];
        let (a11, a12, a22) = (c0.dot(c0), c0.dot(c1), c1.dot(c1));
        let mut next = None;
        while lambda <= 1e12 {
            let (b11, b22) = (a11 * (1.0 + lambda), a22 * (1.0 + lambda));
            let det = b11 * b22 - a12 * a12;
            let d = [
                (g[0] * b22 - a12 * g[1]) / det,
                (b11 * g[1] - a12 * g[0]) / det,
            ];
            let y = [z[0] + d[0], z[1] + d[1]];
            if d[0].is_finite() && d[1].is_finite() && z_admissible(y) {
                if let Ok(p) = probe(np, y, eta, cfg.tau_tol) {
                    if p.error.norm() < n {
                        next = Some((y, p));
                        break;
                    }
                }
            }
            lambda = if lambda == 0.0 { 1e-6 } else { 10.0 * lambda };
        }
        let Some((y, p)) = next else {
            return fail;
        };
        z = y;
        cur = p;
        lambda = if lambda <= 1e-5 { 0.0 } else { 0.1 * lambda };
    }
    let n = cur.error.norm();
    NewtonOutcome {
        root: (n <= accept).then_some((cur, n)),
        iterations: max_iter,
        stalled: (n > accept).then_some((z, n)),
    }
}

/// Fallback for runs that stall where the Jacobian is nearly rank one, as
/// happens next to the bang-bang manifold. For each offset `s` along the
/// soft direction the stiff residual component is zeroed by a chord
/// iteration; the remaining scalar is then bracketed and bisected in `s`.
fn fold_polish(
    np: &NormalizedProblem,
    start: [f64; 2],
    eta: Sign,
    cfg: &SearchConfig,
    accept: f64,
) -> Option<(Probe, f64)> {
    let [c0, c1] = jacobian(np, start, eta, cfg)?;
    let big = if c0.norm() >= c1.norm() { c0 } else { c1 };
    let ur = big / big.norm();
    let (g0, g1) = (ur.dot(c0), ur.dot(c1));
    let slope = g0.hypot(g1);
    if slope == 0.0 || !slope.is_finite() {
        return None;
    }
    // stiff direction is the gradient of the range component, soft is normal to it
    let stiff = [g0 / slope, g1 / slope];
    let soft = [-stiff[1], stiff[0]];
    let at = |s: f64, t: f64| {
        let z = [
            start[0] + s * soft[0] + t * stiff[0],
            start[1] + s * soft[1] + t * stiff[1],
        ];
        if !z_admissible(z) {
            return None;
        }
        probe(np, z, eta, cfg.tau_tol).ok()
    };
    // zero the stiff component at fixed s; returns (t, probe)
    let inner = |s: f64, t0: f64| -> Option<(f64, Probe)> {
        let mut t = t0;
        let mut p = at(s, t)?;
        for _ in 0..60 {
            let h = p.error.dot(ur);
            if h.abs() <= 0.01 * accept {
                break;
            }
            t -= h / slope;
            p = at(s, t)?;
        }
        Some((t, p))
    };
    let perp = |p: &Probe| p.error.cross(ur);
    let (t_start, p0) = inner(0.0, 0.0)?;
    if p0.error.norm() <= accept {
        let n = p0.error.norm();
        return Some((p0, n));
    }
    let f0 = perp(&p0);
    // expand outward in both directions until the scalar changes sign
    let mut bracket = None;
    'outer: for dir in [1.0, -1.0] {
        let (mut s_prev, mut t_prev, mut f_prev) = (0.0, t_start, f0);
        let mut step = 1e-7;
        while step <= 2.0 {
            let s = dir * step;
            let Some((t, p)) = inner(s, t_prev) else {
                break;
            };
            let f = perp(&p);
            if f.signum() != f_prev.signum() {
                bracket = Some(((s_prev, t_prev, f_prev), (s, t)));
                break 'outer;
            }
            (s_prev, t_prev, f_prev) = (s, t, f);
            step *= 2.0;
        }
    }
    let ((mut lo, mut t_lo, f_lo), (mut hi, _)) = bracket?;
    let mut best: Option<(Probe, f64)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (t, p) = inner(mid, t_lo)?;
        let n = p.error.norm();
        let f = perp(&p);
        if best.as_ref().is_none_or(|b| n < b.1) {
            best = Some((p, n));
        }
        if n <= accept {
            break;
        }
        if f.signum() == f_lo.signum() {
            (lo, t_lo) = (mid, t);
        } else {
            hi = mid;
        }
    }
    best.filter(|b| b.1 <= accept)
}

/// Rotation samples clustered toward `+-(pi/2 - inset)`, where the
/// admissible dilation range is widest.
fn theta_grid(n: usize) -> Vec<f64> {
    let h = FRAC_PI_2 - THETA_INSET;
    (0..n)
        .map(|i| {
            let s = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let a = s.abs();
            h * s.signum() * (1.0 - (1.0 - a) * (1.0 - a))
        })
        .collect()
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|j| (a + (b - a) * j as f64 / (n - 1) as f64).exp())
        .collect()
}

struct SearchState<'a> {
    np: &'a NormalizedProblem,
    cfg: &'a SearchConfig,
    accept: f64,
    scale: f64,
    roots: Vec<RootRecord>,
    cells: usize,
    iterations: usize,
    seeds: usize,
    stalled: Vec<([f64; 2], Sign, f64)>,
}

impl SearchState<'_> {
    fn run_seed(&mut self, z: [f64; 2], eta: Sign, max_iter: usize) {
        self.seeds += 1;
        let out = newton(self.np, z, eta, self.cfg, self.accept, max_iter);
        self.iterations += out.iterations;
        if let Some((p, n)) = out.root {
            self.push_root(p, n, eta);
        } else if let Some((z, n)) = out.stalled {
            self.stalled.push((z, eta, n));
        }
    }

    fn push_root(&mut self, p: Probe, n: f64, eta: Sign) {
        self.roots.push(RootRecord {
            theta: p.theta,
            alpha: p.alpha,
            eta,
            total_time: p.map.total_time,
            residual_norm: n / self.scale,
            tau1: p.map.tau1,
            tau2: p.map.tau2,
            mu_u: p.mu.mu_u,
            mu_v: p.mu.mu_v,
            u0: p.map.u0,
            v0: p.map.v0,
        });
    }

    /// Retry the closest stalled Newton runs with [`fold_polish`].
    fn polish_stalled(&mut self) {
        let mut stalled = std::mem::take(&mut self.stalled);
        stalled.sort_by(|a, b| a.2.total_cmp(&b.2));
        let mut tried: Vec<([f64; 2], Sign)> = Vec::new();
        for (z, eta, _) in stalled {
            if tried.len() >= FOLD_POLISH_TRIES {
                break;
            }
            let seen = tried.iter().any(|(w, e)| {
                *e == eta && (w[0] - z[0]).abs() < 1e-3 && (w[1] - z[1]).abs() < 1e-3
            });
            if seen {
                continue;
            }
            tried.push((z, eta));
            if let Some((p, n)) = fold_polish(self.np, z, eta, self.cfg, self.accept) {
                self.push_root(p, n, eta);
            }
        }
    }

    fn grid_pass(&mut self, n_theta: usize, n_alpha: usize, tmax: f64) {
        let thetas = theta_grid(n_theta);
        let ceilings: Vec<f64> = thetas
            .iter()
            .map(|&th| lambda_max(self.cfg.tmax_safety * tmax, th, 1e-12).unwrap_or(f64::NAN))
            .collect();
        for eta in [Sign::Plus, Sign::Minus] {
            let mut zs = vec![[0.0; 2]; n_theta * n_alpha];
            let mut errs: Vec<Option<Vec2>> = vec![None; n_theta * n_alpha];
            for (i, (&th, &ceil)) in thetas.iter().zip(&ceilings).enumerate() {
                if !ceil.is_finite() {
                    continue;
                }
                let lo = (1e-2f64).min(ceil * 1e-3);
                for (j, alpha) in geometric(lo, ceil, n_alpha).into_iter().enumerate() {
                    let z = z_of(th, alpha, eta);
                    zs[i * n_alpha + j] = z;
                    errs[i * n_alpha + j] = probe(self.np, z, eta, self.cfg.tau_tol)
                        .ok()
                        .map(|p| p.error);
                }
            }
            let at = |i: usize, j: usize| errs[i * n_alpha + j];
            let mut seeds = Vec::new();
            for i in 0..n_theta - 1 {
                for j in 0..n_alpha - 1 {
                    self.cells += 1;
                    let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
                    if corners.iter().any(Option::is_none) {
                        continue;
                    }
                    let c: Vec<Vec2> = corners.iter().map(|e| e.unwrap()).collect();
                    let straddles = |f: fn(&Vec2) -> f64| {
                        let lo = c.iter().map(f).fold(f64::INFINITY, f64::min);
                        let hi = c.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
                        lo <= 0.0 && hi >= 0.0
                    };
                    if straddles(|e| e.x) && straddles(|e| e.y) {
                        let idx = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
                        let mut z = [0.0; 2];
                        for (a, b) in idx {
                            z[0] += 0.25 * zs[a * n_alpha + b][0];
                            z[1] += 0.25 * zs[a * n_alpha + b][1];
                        }
                        seeds.push(z);
                    }
                }
            }
            // Local minima of the residual norm catch tangential roots that
            // produce no sign change.
            let norm = |i: usize, j: usize| at(i, j).map_or(f64::INFINITY, |e| e.norm());
            for i in 0..n_theta {
                for j in 0..n_alpha {
                    let n0 = norm(i, j);
                    if !n0.is_finite() {
                        continue;
                    }
                    let mut is_min = true;
                    for di in -1i64..=1 {
                        for dj in -1i64..=1 {
                            let (a, b) = (i as i64 + di, j as i64 + dj);
                            if (di, dj) == (0, 0)
                                || a < 0
                                || b < 0
                                || a >= n_theta as i64
                                || b >= n_alpha as i64
                            {
                                continue;
                            }
                            if norm(a as usize, b as usize) < n0 {
                                is_min = false;
                            }
                        }
                    }
                    if is_min {
                        seeds.push(zs[i * n_alpha + j]);
                    }
                }
            }
            for z in seeds {
                self.run_seed(z, eta, self.cfg.newton_max_iter);
            }
        }
    }

    /// Seeds along the large-`alpha` asymptote of arcs that approximate a
    /// horizontal bang-bang profile with phase durations `t1`, `t2`:
    /// `mu_u ~ ln(4 alpha^2 t1 t2)`.
    fn bang_bang_pass(&mut self) {
        let (_, t1, t2) = min_time_1d(self.np.u, self.np.u + 1.0, self.np.dx);
        let total = t1 + t2;
        let pairs: Vec<(f64, f64)> = if t1.min(t2) > 1e-3 * total {
            vec![(t1, t2)]
        } else {
            BANG_BANG_FRACTIONS
                .iter()
                .map(|&f| (t1.max(f * total), t2.max(f * total)))
                .collect()
        };
        let alphas = geometric(
            BANG_BANG_ALPHA_RANGE.0,
            BANG_BANG_ALPHA_RANGE.1,
            BANG_BANG_ALPHA_STEPS,
        );
        for (a, b) in pairs {
            for eta in [Sign::Plus, Sign::Minus] {
                for side in [Sign::Plus, Sign::Minus] {
                    // walk the curve with cheap probes, Newton only from the dips
                    let curve: Vec<([f64; 2], f64)> = alphas
                        .iter()
                        .filter_map(|&alpha| {
                            let mu_u = (4.0 * alpha * alpha * a * b).ln();
                            if !(mu_u > 0.0 && mu_u < alpha) {
                                return None;
                            }
                            let mu_v = side.apply((alpha * alpha - mu_u * mu_u).sqrt());
                            let z = [mu_u.ln(), asinh(mu_v)];
                            let p = probe(self.np, z, eta, self.cfg.tau_tol).ok()?;
                            Some((z, p.error.norm()))
                        })
                        .collect();
                    self.cells += curve.len();
                    for k in 0..curve.len() {
                        let here = curve[k].1;
                        let left = k.checked_sub(1).map_or(f64::INFINITY, |j| curve[j].1);
                        let right = curve.get(k + 1).map_or(f64::INFINITY, |c| c.1);
                        if here <= left && here <= right {
                            self.run_seed(
                                curve[k].0,
                                eta,
                                BANG_BANG_ITER_FACTOR * self.cfg.newton_max_iter,
                            );
                        }
                    }
                }
            }
        }
    }
}

fn cmp_roots(a: &RootRecord, b: &RootRecord) -> Ordering {
    a.total_time
        .total_cmp(&b.total_time)
        .then(a.theta.total_cmp(&b.theta))
        .then(a.alpha.total_cmp(&b.alpha))
        .then(a.eta.cmp(&b.eta))
}

fn dedupe(mut roots: Vec<RootRecord>, radius: f64) -> Vec<RootRecord> {
    roots.sort_by(cmp_roots);
    let mut out: Vec<RootRecord> = Vec::new();
    for r in roots {
        let dup = out.iter().any(|k| {
            k.eta == r.eta
                && (k.theta - r.theta).abs() <= radius
                && (k.alpha - r.alpha).abs() <= radius * k.alpha.max(1.0)
        });
        if !dup {
            out.push(r);
        }
    }
    out
}

/// Find the minimum-time canonical arc of a normalized problem.
pub fn solve_continuous(
    np: &NormalizedProblem,
    cfg: &SearchConfig,
) -> Result<(CanonicalParams, f64, SearchDiagnostics)> {
    cfg.validate()?;
    ensure_finite(&[np.u, np.v, np.dx, np.dy], "normalized problem")?;
    let tmax = time_upper_bound(np.u, np.v, np.u + 1.0, np.v, np.dx, np.dy);
    let scale = np.displacement().norm().max(1.0);
    let mut st = SearchState {
        np,
        cfg,
        accept: cfg.residual_tol * scale,
        scale,
        roots: Vec::new(),
        cells: 0,
        iterations: 0,
        seeds: 0,
        stalled: Vec::new(),
    };
    st.grid_pass(cfg.theta_grid, cfg.alpha_grid, tmax);
    st.bang_bang_pass();
    let mut refined = false;
    if st.roots.is_empty() {
        st.polish_stalled();
    }
    if st.roots.is_empty() {
        refined = true;
        st.grid_pass(2 * cfg.theta_grid, 2 * cfg.alpha_grid, tmax);
        if st.roots.is_empty() {
            st.polish_stalled();
        }
    }
    let roots = dedupe(st.roots, cfg.dedupe_radius);
    let diagnostics = SearchDiagnostics {
        roots_found: roots.clone(),
        grid_cells_scanned: st.cells,
        newton_iterations_total: st.iterations,
        seeds_tried: st.seeds,
        refined,
        continuous_time: roots.first().map(|r| r.total_time),
        ..Default::default()
    };
    match roots.first() {
        Some(best) => Ok((best.params(), best.total_time, diagnostics)),
        None => Err(Error::NoSolutionFound(Box::new(diagnostics))),
    }
}

/// Shape of the returned minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    Zero,
    Constant,
    BangBang,
    Canonical,
}

impl SolutionKind {
    pub fn of(traj: &Trajectory) -> SolutionKind {
        match traj {
            Trajectory::Zero { .. } => SolutionKind::Zero,
            Trajectory::ConstantChain(c) if c.segments.len() <= 1 => SolutionKind::Constant,
            Trajectory::ConstantChain(_) => SolutionKind::BangBang,
            Trajectory::CanonicalArc(_) => SolutionKind::Canonical,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolutionKind::Zero => "zero",
            SolutionKind::Constant => "constant",
            SolutionKind::BangBang => "bang-bang",
            SolutionKind::Canonical => "canonical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// In original units, starting at the origin.
    pub trajectory: Trajectory,
    pub total_time: f64,
    pub kind: SolutionKind,
    pub classification: ClassificationResult,
    pub record: NormalizationRecord,
    pub diagnostics: SearchDiagnostics,
}

/// Endpoint error of `traj` against `bc`, relative to the problem's natural
/// position and velocity scales.
pub fn endpoint_residuals(bc: &BoundaryConditions, traj: &Trajectory) -> (f64, f64) {
    let t = traj.duration();
    let a = bc.accel_bound;
    let (w1, w2) = (bc.initial_velocity(), bc.final_velocity());
    let pos_scale = bc
        .displacement()
        .norm()
        .max(w1.norm() * t)
        .max(w2.norm() * t)
        .max(a * t * t)
        .max(f64::MIN_POSITIVE);
    let vel_scale = w1.norm().max(w2.norm()).max(a * t).max(f64::MIN_POSITIVE);
    let s0 = traj.start_state();
    let s1 = traj.end_state();
    let pos = (s1.position - s0.position - bc.displacement()).norm() / pos_scale;
    let vel = (s0.velocity - w1).norm().max((s1.velocity - w2).norm()) / vel_scale;
    (pos, vel)
}

fn canonical_trajectory(params: CanonicalParams) -> Trajectory {
    Trajectory::CanonicalArc(CanonicalArc {
        params,
        frame: NormalizationRecord::identity(),
    })
}

/// Solve the minimum-time problem for arbitrary boundary data.
/// Classification of raw boundary data, with the frame it was made in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classified {
    pub classification: ClassificationResult,
    pub record: NormalizationRecord,
    /// `None` for equal velocities, which cannot be normalized.
    pub normalized: Option<NormalizedProblem>,
    pub aligned: AlignedProblem,
}

/// Runs the case tests on raw data. Equal velocities (within `tol`) are
/// tested in a scale-only frame; everything else after normalization.
pub fn classify_boundary(bc: &BoundaryConditions, tol: f64) -> Result<Classified> {
    bc.validate()?;
    let a = bc.accel_bound;
    let (w1, w2, delta) = (
        bc.initial_velocity() / a,
        bc.final_velocity() / a,
        bc.displacement() / a,
    );
    let raw = AlignedProblem::new(w1.x, w2.x, w1.y, delta.x, delta.y);
    let raw_scale = raw.scale().max(w2.y.abs());
    if (w2 - w1).norm() <= tol * raw_scale {
        let aligned = AlignedProblem::equal_velocities(w1, delta);
        return Ok(Classified {
            classification: classify(&aligned, tol)?,
            record: NormalizationRecord::scale_only(a),
            normalized: None,
            aligned,
        });
    }
    let (np, record) = normalize(bc)?;
    let aligned = AlignedProblem::from(np);
    Ok(Classified {
        classification: classify(&aligned, tol)?,
        record,
        normalized: Some(np),
        aligned,
    })
}

pub fn solve(bc: &BoundaryConditions, cfg: &SearchConfig) -> Result<Solution> {
    cfg.validate()?;
    let c = classify_boundary(bc, cfg.classify_tol)?;
    let (class, record, ap) = (c.classification, c.record, c.aligned);
    let mut diagnostics = SearchDiagnostics::default();
    let normalized = match (c.normalized, class) {
        (None, ClassificationResult::ZeroTime) => Trajectory::Zero {
            position: Vec2::ZERO,
            velocity: bc.initial_velocity() / bc.accel_bound,
        },
        (None, _) => solve_case1(
            bc.initial_velocity() / bc.accel_bound,
            bc.displacement() / bc.accel_bound,
        )?,
        (Some(_), ClassificationResult::Case2OneDimensional) => {
            solve_case2_1d(ap.u1, ap.u2, ap.dx)?
        }
        (
            Some(np),
            ClassificationResult::Case3BangBang { .. } | ClassificationResult::Continuous,
        ) => solve_two_sided(&np, &ap, class, cfg, &mut diagnostics)?,
        (Some(_), _) => {
            return Err(Error::ClassificationMismatch(format!(
                "normalized problem classified as {}",
                class.name()
            )))
        }
    };
    let classification = class;

    let span = (0.0, normalized.duration());
    let (trajectory, _) = denormalize_solution(&normalized, span, &record)?;
    let (pos, vel) = endpoint_residuals(bc, &trajectory);
    diagnostics.endpoint_residual = pos.max(vel);
    if !(diagnostics.endpoint_residual <= ENDPOINT_TOL) {
        return Err(Error::NoSolutionFound(Box::new(diagnostics)));
    }
    Ok(Solution {
        total_time: trajectory.duration(),
        kind: SolutionKind::of(&trajectory),
        trajectory,
        classification,
        record,
        diagnostics,
    })
}

/// Bang-bang or continuous, evaluating both near the manifold that separates
/// them.
fn solve_two_sided(
    np: &NormalizedProblem,
    ap: &AlignedProblem,
    class: ClassificationResult,
    cfg: &SearchConfig,
    diagnostics: &mut SearchDiagnostics,
) -> Result<Trajectory> {
    let tol = cfg.classify_tol;
    let gap = bang_bang_gap(ap, tol);
    let is_bb = matches!(class, ClassificationResult::Case3BangBang { .. });
    let near = gap.is_some_and(|g| g.relative_gap <= 1e3 * tol);
    diagnostics.near_boundary = near;

    let bang_bang = if is_bb || near {
        solve_case3(ap.u1, ap.u2, ap.v, ap.dx, ap.dy)
            .ok()
            .filter(|t| {
                let (p, v) = endpoint_residuals(&np.as_boundary_conditions(), t);
                p.max(v) <= ENDPOINT_TOL
            })
    } else {
        None
    };
    diagnostics.bang_bang_time = bang_bang.as_ref().map(Trajectory::duration);
    if is_bb && !near {
        return bang_bang
            .ok_or_else(|| Error::ClassificationMismatch("bang-bang construction failed".into()));
    }

    let continuous = solve_continuous(np, cfg);
    let (arc, search_diag) = match continuous {
        Ok((params, _, d)) => (Some(canonical_trajectory(params)), d),
        Err(Error::NoSolutionFound(d)) => (None, *d),
        Err(e) => return Err(e),
    };
    let keep = SearchDiagnostics {
        near_boundary: diagnostics.near_boundary,
        bang_bang_time: diagnostics.bang_bang_time,
        ..search_diag
    };
    *diagnostics = keep;

    match (bang_bang, arc) {
        (Some(bb), Some(arc)) => {
            if bb.duration() <= arc.duration() + 1e-9 {
                Ok(bb)
            } else {
                Ok(arc)
            }
        }
        (None, Some(arc)) => Ok(arc),
        (Some(bb), None) => {
            diagnostics.boundary_fallback = true;
            Ok(bb)
        }
        (None, None) => Err(Error::NoSolutionFound(Box::new(diagnostics.clone()))),
    }
}
