//! Detection and closed-form construction of the minimizers whose
//! acceleration is piecewise constant: zero time, equal endpoint velocities,
//! one-dimensional motion, and two-segment horizontal bang-bang.
//!
//! All tests run in an aligned frame where both endpoint velocities share the
//! vertical component `v`, which holds for the normalized problem and for raw
//! data with equal velocities.

use serde::{Deserialize, Serialize};

use crate::canonical::{ConstantChain, Segment, Sign, Trajectory, Vec2};
use crate::error::{ensure_finite, Error, Result};
use crate::normalize::NormalizedProblem;

/// Boundary data whose endpoint velocities are `(u1, v)` and `(u2, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedProblem {
    pub u1: f64,
    pub u2: f64,
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
}

impl AlignedProblem {
    pub fn new(u1: f64, u2: f64, v: f64, dx: f64, dy: f64) -> Self {
        AlignedProblem { u1, u2, v, dx, dy }
    }

    /// Both endpoints share `velocity`.
    pub fn equal_velocities(velocity: Vec2, delta: Vec2) -> Self {
        Self::new(velocity.x, velocity.x, velocity.y, delta.x, delta.y)
    }

    /// Characteristic speed; displacements are compared against its square.
    pub fn scale(&self) -> f64 {
        self.u1
            .abs()
            .max(self.u2.abs())
            .max(self.v.abs())
            .max(self.dx.abs().sqrt())
            .max(self.dy.abs().sqrt())
    }

    fn check_finite(&self) -> Result<()> {
        ensure_finite(&[self.u1, self.u2, self.v, self.dx, self.dy], "classify")
    }

    /// Horizontal displacement of the two-segment bang-bang profile of total
    /// time `t` whose first acceleration is `order * (1, 0)`.
    fn bang_bang_dx(&self, order: Sign, t: f64) -> f64 {
        let d = self.u2 - self.u1;
        0.5 * t * (self.u1 + self.u2) + order.apply(0.25 * (t * t - d * d))
    }
}

impl From<NormalizedProblem> for AlignedProblem {
    fn from(np: NormalizedProblem) -> Self {
        AlignedProblem::new(np.u, np.u + 1.0, np.v, np.dx, np.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ClassificationResult {
    ZeroTime,
    Case1EqualVelocities,
    Case2OneDimensional,
    Case3BangBang { order: Sign, t1: f64, t2: f64 },
    Continuous,
}

impl ClassificationResult {
    pub fn name(&self) -> &'static str {
        match self {
            ClassificationResult::ZeroTime => "zero",
            ClassificationResult::Case1EqualVelocities => "equal-velocities",
            ClassificationResult::Case2OneDimensional => "one-dimensional",
            ClassificationResult::Case3BangBang { .. } => "bang-bang",
            ClassificationResult::Continuous => "continuous",
        }
    }
}

/// Distance of a problem from the two-segment bang-bang manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldGap {
    /// `|dx - predicted dx| / scale^2` for the closer order.
    pub relative_gap: f64,
    pub order: Sign,
    pub total_time: f64,
}

/// `None` when the feasibility conditions `dy/v > 0`, `(dy/v) >= |u2-u1|`
/// fail (beyond `tol`), so that no bang-bang profile can match.
pub fn bang_bang_gap(p: &AlignedProblem, tol: f64) -> Option<ManifoldGap> {
    let scale = p.scale();
    if p.v == 0.0 || p.v.abs() <= tol * scale {
        return None;
    }
    let t = p.dy / p.v;
    let d = (p.u2 - p.u1).abs();
    if !(t > 0.0) || t < d - tol * scale.max(1.0) || !t.is_finite() {
        return None;
    }
    let s2 = (scale * scale).max(f64::MIN_POSITIVE);
    let gap = |order| (p.dx - p.bang_bang_dx(order, t)).abs() / s2;
    let (gp, gm) = (gap(Sign::Plus), gap(Sign::Minus));
    let (relative_gap, order) = if gp <= gm {
        (gp, Sign::Plus)
    } else {
        (gm, Sign::Minus)
    };
    Some(ManifoldGap {
        relative_gap,
        order,
        total_time: t,
    })
}

pub fn classify(p: &AlignedProblem, tol: f64) -> Result<ClassificationResult> {
    p.check_finite()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let scale = p.scale();
    let d = p.u2 - p.u1;
    if d.abs() <= tol * scale {
        let delta = Vec2::new(p.dx, p.dy).norm();
        return Ok(if delta <= tol * scale * scale {
            ClassificationResult::ZeroTime
        } else {
            ClassificationResult::Case1EqualVelocities
        });
    }
    if p.v.abs() <= tol * scale && p.dy.abs() <= tol * scale * scale {
        return Ok(ClassificationResult::Case2OneDimensional);
    }
    if let Some(gap) = bang_bang_gap(p, tol) {
        if gap.relative_gap <= tol {
            let (t1, t2) = bang_bang_durations(gap.order, gap.total_time, d);
            return Ok(ClassificationResult::Case3BangBang {
                order: gap.order,
                t1,
                t2,
            });
        }
    }
    Ok(ClassificationResult::Continuous)
}

fn bang_bang_durations(order: Sign, t: f64, d: f64) -> (f64, f64) {
    let t1 = 0.5 * (t + order.apply(d));
    let t2 = 0.5 * (t - order.apply(d));
    (t1.max(0.0), t2.max(0.0))
}

/// Two horizontal segments `order*(1,0)` for `t1`, `-order*(1,0)` for `t2`,
/// dropping any segment of zero duration.
fn horizontal_chain(u1: f64, v: f64, order: Sign, t1: f64, t2: f64) -> Trajectory {
    let a = Vec2::new(order.value(), 0.0);
    let segments = [(a, t1), (-a, t2)]
        .into_iter()
        .filter(|&(_, dt)| dt > 0.0)
        .map(|(accel, duration)| Segment { accel, duration })
        .collect();
    Trajectory::ConstantChain(ConstantChain {
        start_position: Vec2::ZERO,
        start_velocity: Vec2::new(u1, v),
        segments,
    })
}

/// Equal endpoint velocities: accelerate along `w` for half the time, then
/// along `-w`, with `|delta - v T| = T^2 / 4` at the smallest `T > 0`.
pub fn solve_case1(v: Vec2, delta: Vec2) -> Result<Trajectory> {
    ensure_finite(&[v.x, v.y, delta.x, delta.y], "solve_case1")?;
    if delta == Vec2::ZERO {
        return Err(Error::InvalidArgument(
            "zero displacement with equal velocities is the zero-time case".into(),
        ));
    }
    let t = case1_time(v, delta);
    let mut w = (delta - v * t) * (4.0 / (t * t));
    let n = w.norm();
    if n > 0.0 {
        w = w / n;
    }
    Ok(Trajectory::ConstantChain(ConstantChain {
        start_position: Vec2::ZERO,
        start_velocity: v,
        segments: vec![
            Segment {
                accel: w,
                duration: 0.5 * t,
            },
            Segment {
                accel: -w,
                duration: 0.5 * t,
            },
        ],
    }))
}

/// Smallest positive root of `T^2/4 = |delta - v T|`.
fn case1_time(v: Vec2, delta: Vec2) -> f64 {
    let vv = v.dot(v);
    let dv = delta.dot(v);
    let dd = delta.dot(delta);
    if vv == 0.0 {
        return 2.0 * dd.sqrt().sqrt();
    }
    // Sign-equivalent to the quartic q(T) = T^4/16 - |delta - vT|^2, but
    // without squaring.
    let h = |t: f64| 0.25 * t * t - (delta - v * t).norm();
    let upper = 2.0 * vv.sqrt() + 2.0 * (vv + dd.sqrt()).sqrt();
    // q' vanishes where T^3 - 8|v|^2 T + 8 (delta.v) = 0; q is monotone in
    // between, so the first sign change lies in the first subinterval whose
    // right end is non-negative.
    let mut knots: Vec<f64> = depressed_cubic_roots(-8.0 * vv, 8.0 * dv)
        .into_iter()
        .filter(|&c| c > 0.0 && c < upper)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.push(upper);
    let scale4 = (vv + dd.sqrt()).powi(2);
    let mut lo = 0.0;
    for &c in &knots {
        let hc = h(c);
        if hc >= 0.0 {
            return bisect(h, lo, c);
        }
        let q = (0.25 * c * c).powi(2) - (delta - v * c).dot(delta - v * c);
        if q.abs() <= 1e-12 * scale4 {
            return c;
        }
        lo = c;
    }
    upper
}

/// Real roots of `t^3 + p t + q = 0`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    if p == 0.0 {
        return vec![-q.cbrt()];
    }
    let disc = (q * q) / 4.0 + (p * p * p) / 27.0;
    if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else {
        // Three real roots (p < 0).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    }
}

/// Bisect a function with `h(lo) < 0 <= h(hi)` to full precision.
fn bisect(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Minimum-time 1-D profile: `(order, t1, t2)` with first acceleration
/// `order` for `t1`, then `-order` for `t2`.
pub fn min_time_1d(u1: f64, u2: f64, dx: f64) -> (Sign, f64, f64) {
    let d = u2 - u1;
    let s = u1 + u2;
    let mut best: Option<(f64, Sign)> = None;
    for order in [Sign::Plus, Sign::Minus] {
        // T^2 + 2 order (u1+u2) T - (D^2 + 4 order dx) = 0
        let b = order.apply(2.0 * s);
        let c = -(d * d + order.apply(4.0 * dx));
        let disc = b * b - 4.0 * c;
        if disc < 0.0 {
            continue;
        }
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * disc.sqrt());
        let mut roots = vec![q];
        if q != 0.0 {
            roots.push(c / q);
        }
        for t in roots {
            let t = if t < d.abs() && t >= d.abs() * (1.0 - 1e-12) - 1e-300 {
                d.abs()
            } else {
                t
            };
            if t >= d.abs() && t.is_finite() && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, order));
            }
        }
    }
    let (t, order) = best.unwrap_or((d.abs(), Sign::of(d)));
    let (t1, t2) = bang_bang_durations(order, t, d);
    (order, t1, t2)
}

/// One-dimensional problem (`v = dy = 0`): at most two horizontal segments.
pub fn solve_case2_1d(u1: f64, u2: f64, dx: f64) -> Result<Trajectory> {
    ensure_finite(&[u1, u2, dx], "solve_case2_1d")?;
    let (order, t1, t2) = min_time_1d(u1, u2, dx);
    Ok(horizontal_chain(u1, 0.0, order, t1, t2))
}

/// Two-segment horizontal bang-bang with `t1 + t2 = dy/v`.
pub fn solve_case3(u1: f64, u2: f64, v: f64, dx: f64, dy: f64) -> Result<Trajectory> {
    ensure_finite(&[u1, u2, v, dx, dy], "solve_case3")?;
    let p = AlignedProblem::new(u1, u2, v, dx, dy);
    if v == 0.0 {
        return Err(Error::ClassificationMismatch(
            "vertical velocity is zero".into(),
        ));
    }
    let t = dy / v;
    let d = u2 - u1;
    let tol = 1e-9 * p.scale().max(1.0);
    if !(t > 0.0) {
        return Err(Error::ClassificationMismatch(format!(
            "dy/v = {t} is not a positive duration"
        )));
    }
    let order = if (dx - p.bang_bang_dx(Sign::Plus, t)).abs()
        <= (dx - p.bang_bang_dx(Sign::Minus, t)).abs()
    {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let t1 = 0.5 * (t + order.apply(d));
    let t2 = 0.5 * (t - order.apply(d));
    if t1 < -tol || t2 < -tol {
        return Err(Error::ClassificationMismatch(format!(
            "negative bang-bang duration ({t1}, {t2})"
        )));
    }
    Ok(horizontal_chain(u1, v, order, t1.max(0.0), t2.max(0.0)))
}
