//! Independent checks of solver output: endpoint residuals, the acceleration
//! bound, a least-squares fit of the acceleration direction to
//! `(A t + B) / |A t + B|`, and a direct-transcription estimate of the
//! minimum time.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::canonical::{Trajectory, Vec2};
use crate::error::{Error, Result};
use crate::normalize::BoundaryConditions;
use crate::search::{endpoint_residuals, Solution};
use crate::tausolve::time_upper_bound;

/// Minimum number of interior samples taken by [`verify_solution`].
pub const MIN_SAMPLES: usize = 1000;
/// Largest acceptable angle between sampled accelerations and the fit.
pub const STATIONARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityFit {
    #[serde(rename = "A")]
    pub a: Vec2,
    #[serde(rename = "B")]
    pub b: Vec2,
    pub max_angle_error: f64,
    /// Zero of `A t + B` when it falls inside the time span (bang-bang
    /// switch).
    pub switch_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub endpoint_pos_residual: f64,
    pub endpoint_vel_residual: f64,
    pub max_accel_violation: f64,
    pub stationarity: StationarityFit,
    pub samples: usize,
    pub passed: bool,
}

pub fn verify_solution(bc: &BoundaryConditions, sol: &Solution, tol: f64) -> VerificationReport {
    verify_trajectory(bc, &sol.trajectory, tol)
}

/// `tol` bounds the relative endpoint residuals and `max_accel_violation /
/// accel_bound`.
pub fn verify_trajectory(
    bc: &BoundaryConditions,
    traj: &Trajectory,
    tol: f64,
) -> VerificationReport {
    let (pos, vel) = endpoint_residuals(bc, traj);
    let samples = traj.interior_samples(MIN_SAMPLES);
    let max_accel_violation = samples
        .iter()
        .map(|(_, s)| (s.acceleration.norm() - bc.accel_bound).abs())
        .fold(0.0, f64::max);
    let points: Vec<(f64, Vec2)> = samples.iter().map(|(t, s)| (*t, s.acceleration)).collect();
    let stationarity = fit_stationarity(&points, traj.duration());
    let passed = pos <= tol
        && vel <= tol
        && max_accel_violation <= tol * bc.accel_bound
        && stationarity.max_angle_error <= STATIONARITY_TOL;
    VerificationReport {
        endpoint_pos_residual: pos,
        endpoint_vel_residual: vel,
        max_accel_violation,
        stationarity,
        samples: samples.len(),
        passed,
    }
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs()
}

fn max_angle_error(points: &[(f64, Vec2)], a: Vec2, b: Vec2) -> f64 {
    let size = a.norm() * points.last().map_or(1.0, |p| p.0.abs()) + b.norm();
    points
        .iter()
        .filter_map(|&(t, acc)| {
            let d = a * t + b;
            (d.norm() > 1e-9 * size).then(|| angle_between(acc, d))
        })
        .fold(0.0, f64::max)
}

/// Fit the direction law to sampled accelerations. `span` sets the time
/// unit used internally for conditioning.
pub fn fit_stationarity(points: &[(f64, Vec2)], span: f64) -> StationarityFit {
    let empty = StationarityFit {
        a: Vec2::ZERO,
        b: Vec2::ZERO,
        max_angle_error: 0.0,
        switch_time: None,
    };
    if points.is_empty() {
        return empty;
    }
    let unit = if span > 0.0 { span } else { 1.0 };
    // (A t + B) parallel to a  <=>  a x (A t + B) = 0, linear in (A, B).
    let mut m = Matrix4::<f64>::zeros();
    for &(t, acc) in points {
        let a = acc / acc.norm().max(f64::MIN_POSITIVE);
        let s = t / unit;
        let phi = Vector4::new(-a.y * s, a.x * s, -a.y, a.x);
        m += phi * phi.transpose();
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let trace = eig
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);

    let (a, b) = if eig.eigenvalues[order[1]].abs() <= 1e-10 * trace {
        // Two-dimensional null space: every sample is parallel to one line.
        fit_parallel(points, unit)
    } else {
        let v = eig.eigenvectors.column(order[0]);
        let (mut a, mut b) = (Vec2::new(v[0], v[1]) / unit, Vec2::new(v[2], v[3]));
        let agreement: f64 = points.iter().map(|&(t, acc)| acc.dot(a * t + b)).sum();
        if agreement < 0.0 {
            a = -a;
            b = -b;
        }
        (a, b)
    };
    let switch_time = (a.norm() > 0.0)
        .then(|| -a.dot(b) / a.dot(a))
        .filter(|&ts| {
            let residual = (a * ts + b).norm();
            ts > 0.0 && ts < span && residual <= 1e-9 * (b.norm() + a.norm() * span)
        });
    StationarityFit {
        a,
        b,
        max_angle_error: max_angle_error(points, a, b),
        switch_time,
    }
}

/// All accelerations lie along `+-w`: `A t + B = s0 w (t_s - t)` for one
/// sign change, or `B = w` for none.
fn fit_parallel(points: &[(f64, Vec2)], unit: f64) -> (Vec2, Vec2) {
    let w = points[0].1 / points[0].1.norm().max(f64::MIN_POSITIVE);
    let signs: Vec<f64> = points.iter().map(|&(_, acc)| acc.dot(w).signum()).collect();
    match signs.windows(2).position(|p| p[0] != p[1]) {
        None => (Vec2::ZERO, w),
        Some(k) => {
            let ts = 0.5 * (points[k].0 + points[k + 1].0);
            let scale = 1.0 / unit;
            (-w * scale, w * (ts * scale))
        }
    }
}

/// Upper bound on the minimum time by direct transcription.
///
/// The control is piecewise constant over `segments` equal intervals with
/// `|a_k| <= accel_bound`. For a trial duration, feasibility of the four
/// linear endpoint equations is decided by block coordinate descent on the
/// squared mismatch, with an early infeasibility certificate from the
/// separating hyperplane through the current residual. The smallest
/// feasible duration is located by a geometric scan followed by bisection;
/// each refinement round doubles the segment count.
pub fn brute_force_min_time(
    bc: &BoundaryConditions,
    segments: usize,
    refine_rounds: usize,
) -> Result<f64> {
    bc.validate()?;
    if segments < 4 {
        return Err(Error::InvalidArgument(format!(
            "segments must be >= 4, got {segments}"
        )));
    }
    let acc = bc.accel_bound;
    let p = Transcription {
        w1: bc.initial_velocity() / acc,
        w2: bc.final_velocity() / acc,
        delta: bc.displacement() / acc,
    };
    let lower = (p.w2 - p.w1).norm();
    let tmax = time_upper_bound(p.w1.x, p.w1.y, p.w2.x, p.w2.y, p.delta.x, p.delta.y);
    if tmax == 0.0 {
        return Ok(0.0);
    }
    let floor = lower.max(1e-6 * tmax);

    let mut controls = vec![Vec2::ZERO; segments];
    let mut best: Option<f64> = None;
    for round in 0..=refine_rounds {
        if round > 0 {
            controls = controls.iter().flat_map(|&c| [c, c]).collect();
        }
        let ceiling = match best {
            Some(t) => t,
            None => {
                let mut hi = tmax;
                let mut tries = 0;
                while !p.feasible(hi, &mut controls) {
                    hi *= 1.25;
                    tries += 1;
                    if tries > 20 {
                        return Err(Error::OracleInconclusive(format!(
                            "no feasible duration up to {hi}"
                        )));
                    }
                }
                hi
            }
        };
        let found = p.first_feasible(floor, ceiling, &mut controls);
        best = Some(found.min(ceiling));
    }
    // The feasibility test accepts a mismatch of MISMATCH_TOL; inflate by a
    // matching relative margin so the result stays an upper bound.
    let t = best.unwrap_or(tmax) * (1.0 + 10.0 * MISMATCH_TOL);
    Ok(t.max(lower))
}

struct Transcription {
    w1: Vec2,
    w2: Vec2,
    delta: Vec2,
}

/// Feasibility threshold on the nondimensional endpoint mismatch.
const MISMATCH_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 20_000;
const SCAN_POINTS: usize = 120;

impl Transcription {
    /// Smallest feasible duration in `[lo, hi]`, assuming `hi` is feasible.
    fn first_feasible(&self, lo: f64, hi: f64, controls: &mut Vec<Vec2>) -> f64 {
        if lo >= hi {
            return hi;
        }
        let ratio = (hi / lo).powf(1.0 / SCAN_POINTS as f64);
        let mut prev = lo;
        let mut upper = hi;
        if self.feasible(lo, controls) {
            return lo;
        }
        let mut t = lo;
        for _ in 0..SCAN_POINTS {
            t = (t * ratio).min(hi);
            if self.feasible(t, controls) {
                upper = t;
                break;
            }
            prev = t;
        }
        // Bisect between the last infeasible and first feasible scan point.
        let mut lo = prev;
        let mut feasible_controls = controls.clone();
        while upper - lo > 1e-11 * upper {
            let mid = 0.5 * (lo + upper);
            if self.feasible(mid, controls) {
                upper = mid;
                feasible_controls.clone_from(controls);
            } else {
                lo = mid;
            }
        }
        *controls = feasible_controls;
        upper
    }

    /// Whether the endpoint equations can be met at duration `t`. On return
    /// `controls` holds the last iterate, reused as a warm start.
    fn feasible(&self, t: f64, controls: &mut [Vec2]) -> bool {
        let n = controls.len();
        let nf = n as f64;
        let wv = 1.0 / nf;
        let weight = |k: usize| (nf - k as f64 - 0.5) / (nf * nf);
        let target_v = (self.w2 - self.w1) / t;
        let target_p = (self.delta - self.w1 * t) / (t * t);
        let mut rv = -target_v;
        let mut rp = -target_p;
        for (k, c) in controls.iter().enumerate() {
            rv += *c * wv;
            rp += *c * weight(k);
        }
        let mismatch =
            |rv: Vec2, rp: Vec2| rv.x.abs().max(rv.y.abs()).max(rp.x.abs()).max(rp.y.abs());
        for _ in 0..MAX_SWEEPS {
            if mismatch(rv, rp) <= MISMATCH_TOL {
                return true;
            }
            // Separating hyperplane: lambda = -r certifies infeasibility when
            // lambda . b exceeds the support function of the reachable set.
            let (lv, lp) = (-rv, -rp);
            let support: f64 = (0..n).map(|k| (lv * wv + lp * weight(k)).norm()).sum();
            let lb = lv.dot(target_v) + lp.dot(target_p);
            if lb > support * (1.0 + 1e-12) + 1e-300 {
                return false;
            }
            for (k, c) in controls.iter_mut().enumerate() {
                let ck = weight(k);
                let ev = rv - *c * wv;
                let ep = rp - *c * ck;
                let mut a = -(ev * wv + ep * ck) / (wv * wv + ck * ck);
                let na = a.norm();
                if na > 1.0 {
                    a = a / na;
                }
                rv = ev + a * wv;
                rp = ep + a * ck;
                *c = a;
            }
        }
        mismatch(rv, rp) <= MISMATCH_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{ConstantChain, Segment};
    use crate::search::{solve, SearchConfig};

    #[test]
    fn constant_solution_verifies() {
        let bc = BoundaryConditions::new(0.0, 0.0, 1.0, 0.0, 0.5, 0.0);
        let sol = solve(&bc, &SearchConfig::default()).unwrap();
        let r = verify_solution(&bc, &sol, 1e-9);
        assert!(r.passed, "{r:?}");
        assert!(r.samples >= 1000);
        let fit = r.stationarity;
        // Constant direction: either B = 0 with A along x, or A = 0.
        assert!(fit.a.cross(Vec2::new(1.0, 0.0)).abs() < 1e-12);
        assert!(fit.b.cross(Vec2::new(1.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn corrupted_duration_fails() {
        let bc = BoundaryConditions::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let traj = Trajectory::ConstantChain(ConstantChain {
            start_position: Vec2::ZERO,
            start_velocity: Vec2::ZERO,
            segments: vec![
                Segment {
                    accel: Vec2::new(1.0, 0.0),
                    duration: 1.01,
                },
                Segment {
                    accel: Vec2::new(-1.0, 0.0),
                    duration: 1.01,
                },
            ],
        });
        let r = verify_trajectory(&bc, &traj, 1e-9);
        assert!(!r.passed);
        assert!(r.endpoint_pos_residual > 1e-9);
    }

    #[test]
    fn bang_bang_fit_reports_switch() {
        let bc = BoundaryConditions::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let sol = solve(&bc, &SearchConfig::default()).unwrap();
        let r = verify_solution(&bc, &sol, 1e-9);
        assert!(r.passed, "{r:?}");
        let ts = r.stationarity.switch_time.unwrap();
        assert!((ts - 1.0).abs() < 2e-3);
        assert!(r.stationarity.a.cross(Vec2::new(1.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn canonical_fit_is_tight() {
        let (s, c) = (1f64.sinh(), 1f64.cosh());
        let bc = BoundaryConditions::new(0.0, 0.0, 1.0, 0.0, s / 2.0, (1.0 - s * c) / 4.0);
        let sol = solve(&bc, &SearchConfig::default()).unwrap();
        let r = verify_solution(&bc, &sol, 1e-8);
        assert!(r.passed, "{r:?}");
        assert!(r.stationarity.max_angle_error <= 1e-6);
    }

    #[test]
    fn transcription_rest_to_rest() {
        let bc = BoundaryConditions::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let t = brute_force_min_time(&bc, 16, 0).unwrap();
        assert!((2.0..=2.02).contains(&t), "{t}");
    }

    #[test]
    fn transcription_constant_case() {
        let bc = BoundaryConditions::new(0.0, 0.0, 1.0, 0.0, 0.5, 0.0);
        let t = brute_force_min_time(&bc, 16, 0).unwrap();
        assert!((1.0..=1.01).contains(&t), "{t}");
    }

    #[test]
    fn transcription_continuous_instance() {
        let (s, c) = (1f64.sinh(), 1f64.cosh());
        let bc = BoundaryConditions::new(0.0, 0.0, 1.0, 0.0, s / 2.0, (1.0 - s * c) / 4.0);
        let t = brute_force_min_time(&bc, 64, 0).unwrap();
        assert!(t >= s - 1e-6 && t <= s * 1.01, "{t}");
    }

    #[test]
    fn transcription_rejects_few_segments() {
        let bc = BoundaryConditions::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert!(brute_force_min_time(&bc, 3, 0).is_err());
    }
}
