//! Canonical arc functions and trajectory evaluation.
//!
//! Every continuous-acceleration minimizer is, after a rotation, a vertical
//! reflection and a spatiotemporal dilation, a piece of the curve whose
//! acceleration is `(1, t) / sqrt(1 + t^2)`. Its antiderivatives are
//!
//! ```text
//! f''(t) = 1 / sqrt(1+t^2)       g''(t) = t / sqrt(1+t^2)
//! f'(t)  = asinh(t)              g'(t)  = sqrt(1+t^2)
//! f(t)   = t asinh(t) - sqrt(1+t^2)
//! g(t)   = (t sqrt(1+t^2) + asinh(t)) / 2
//! ```
//!
//! Bang-bang and constant solutions are stored as chains of constant
//! acceleration segments. Both kinds live in [`Trajectory`].

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::NormalizationRecord;

/// A planar vector: position, velocity or acceleration depending on context.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Reflection `diag(sx, sy)`.
    pub fn reflect(self, sx: Sign, sy: Sign) -> Vec2 {
        Vec2::new(sx.apply(self.x), sy.apply(self.y))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

/// A reflection sign, `+1` or `-1`. Serialized as the integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Sign, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

/// Counter-clockwise planar rotation by `angle` radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation2 {
    angle: f64,
    cos: f64,
    sin: f64,
}

impl Rotation2 {
    pub fn new(angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Rotation2 { angle, cos, sin }
    }

    /// Build from a known cosine/sine pair, avoiding the round trip through
    /// the angle. The pair must lie on the unit circle.
    pub fn from_cos_sin(cos: f64, sin: f64) -> Self {
        Rotation2 {
            angle: sin.atan2(cos),
            cos,
            sin,
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            self.cos * p.x - self.sin * p.y,
            self.sin * p.x + self.cos * p.y,
        )
    }

    pub fn apply_inverse(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            self.cos * p.x + self.sin * p.y,
            -self.sin * p.x + self.cos * p.y,
        )
    }

    pub fn inverse(&self) -> Rotation2 {
        Rotation2 {
            angle: -self.angle,
            cos: self.cos,
            sin: -self.sin,
        }
    }
}

/// `asinh` through the logarithm, evaluated on `|z|` so that large negative
/// arguments do not cancel.
pub fn asinh(z: f64) -> f64 {
    if z < 0.0 {
        -asinh(-z)
    } else if z > 1e150 {
        // z + sqrt(1+z^2) overflows long before asinh does.
        std::f64::consts::LN_2 + z.ln()
    } else {
        (z + z.mul_add(z, 1.0).sqrt()).ln_1p_shifted()
    }
}

trait LnShifted {
    fn ln_1p_shifted(self) -> f64;
}

impl LnShifted for f64 {
    // ln(w) for w = z + sqrt(1+z^2) >= 1, computed as ln_1p(w - 1) so that
    // small z keeps full relative precision.
    fn ln_1p_shifted(self) -> f64 {
        (self - 1.0).ln_1p()
    }
}

/// The six closed-form canonical values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgValues {
    pub f: f64,
    pub g: f64,
    pub df: f64,
    pub dg: f64,
    pub ddf: f64,
    pub ddg: f64,
}

pub fn eval_fg(t: f64) -> FgValues {
    let root = t.hypot(1.0);
    let ash = asinh(t);
    FgValues {
        f: t * ash - root,
        g: 0.5 * (t * root + ash),
        df: ash,
        dg: root,
        ddf: 1.0 / root,
        ddg: t / root,
    }
}

/// Parameters of one canonical arc in the normalized frame.
///
/// The arc lives on physical time `[tau1/alpha, tau2/alpha]`; the time shift
/// is absorbed so that dilated time is `tau = alpha * t`. The horizontal
/// reflection is always `+1` and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub alpha: f64,
    pub theta: f64,
    pub eta: Sign,
    pub tau1: f64,
    pub tau2: f64,
    pub u0: f64,
    pub v0: f64,
}

impl CanonicalParams {
    pub fn start_time(&self) -> f64 {
        self.tau1 / self.alpha
    }

    pub fn end_time(&self) -> f64 {
        self.tau2 / self.alpha
    }

    pub fn duration(&self) -> f64 {
        (self.tau2 - self.tau1) / self.alpha
    }

    fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha.is_finite()
            && self.theta.abs() < std::f64::consts::FRAC_PI_2
            && self.tau2 > self.tau1
            && self.tau1.is_finite()
            && self.tau2.is_finite()
            && self.u0.is_finite()
            && self.v0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "canonical parameters out of range: {self:?}"
            )))
        }
    }
}

/// Position, velocity and acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KinematicState {
    pub position: Vec2,
    pub velocity: Vec2,
    pub acceleration: Vec2,
}

/// Evaluate a canonical arc at physical (normalized-frame) time `t`.
///
/// ```text
/// position = R_theta (f(a t) + u0 a t, eta g(a t) + v0 a t) / a^2
/// ```
pub fn eval_canonical_state(params: &CanonicalParams, t: f64) -> Result<KinematicState> {
    params.validate()?;
    let (lo, hi) = (params.start_time(), params.end_time());
    let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(Error::OutOfDomain { t, lo, hi });
    }
    Ok(canonical_state_unchecked(params, t))
}

pub(crate) fn canonical_state_unchecked(params: &CanonicalParams, t: f64) -> KinematicState {
    let alpha = params.alpha;
    let rot = Rotation2::new(params.theta);
    let eta = params.eta;
    let tau = alpha * t;
    let fg = eval_fg(tau);
    let pos = Vec2::new(fg.f + params.u0 * tau, eta.apply(fg.g) + params.v0 * tau);
    let vel = Vec2::new(fg.df + params.u0, eta.apply(fg.dg) + params.v0);
    let acc = Vec2::new(fg.ddf, eta.apply(fg.ddg));
    KinematicState {
        position: rot.apply(pos) / (alpha * alpha),
        velocity: rot.apply(vel) / alpha,
        acceleration: rot.apply(acc),
    }
}

/// One constant-acceleration piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub accel: Vec2,
    pub duration: f64,
}

/// A chain of constant-acceleration segments with its initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    pub start_position: Vec2,
    pub start_velocity: Vec2,
    pub segments: Vec<Segment>,
}

impl ConstantChain {
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn state_at(&self, s: f64) -> KinematicState {
        let mut pos = self.start_position;
        let mut vel = self.start_velocity;
        let mut elapsed = 0.0;
        let last = self.segments.len().saturating_sub(1);
        for (i, seg) in self.segments.iter().enumerate() {
            let remaining = s - elapsed;
            if remaining <= seg.duration || i == last {
                let dt = remaining.clamp(0.0, seg.duration);
                return KinematicState {
                    position: pos + vel * dt + seg.accel * (0.5 * dt * dt),
                    velocity: vel + seg.accel * dt,
                    acceleration: seg.accel,
                };
            }
            pos += vel * seg.duration + seg.accel * (0.5 * seg.duration * seg.duration);
            vel += seg.accel * seg.duration;
            elapsed += seg.duration;
        }
        KinematicState {
            position: pos,
            velocity: vel,
            acceleration: Vec2::ZERO,
        }
    }
}

/// A canonical arc together with the frame it should be reported in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalArc {
    pub params: CanonicalParams,
    pub frame: NormalizationRecord,
}

impl CanonicalArc {
    pub fn duration(&self) -> f64 {
        self.frame.time_to_original(self.params.duration())
    }

    fn state_at(&self, s: f64) -> KinematicState {
        let p = &self.params;
        let t0 = p.start_time();
        let t = (t0 + self.frame.time_to_normalized(s)).clamp(t0, p.end_time());
        let start = canonical_state_unchecked(p, t0);
        let here = canonical_state_unchecked(p, t);
        KinematicState {
            position: self
                .frame
                .displacement_to_original(here.position - start.position),
            velocity: self.frame.velocity_to_original(here.velocity),
            acceleration: self.frame.acceleration_to_original(here.acceleration),
        }
    }
}

/// A complete minimum-time trajectory. Elapsed time runs over
/// `[0, duration()]`; canonical arcs are anchored at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Trajectory {
    Zero { position: Vec2, velocity: Vec2 },
    ConstantChain(ConstantChain),
    CanonicalArc(CanonicalArc),
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        match self {
            Trajectory::Zero { .. } => 0.0,
            Trajectory::ConstantChain(c) => c.duration(),
            Trajectory::CanonicalArc(a) => a.duration(),
        }
    }

    /// State at elapsed time `s`, clamped to `[0, duration()]`.
    pub fn state_at(&self, s: f64) -> KinematicState {
        let s = s.clamp(0.0, self.duration());
        match self {
            Trajectory::Zero { position, velocity } => KinematicState {
                position: *position,
                velocity: *velocity,
                acceleration: Vec2::ZERO,
            },
            Trajectory::ConstantChain(c) => c.state_at(s),
            Trajectory::CanonicalArc(a) => a.state_at(s),
        }
    }

    pub fn start_state(&self) -> KinematicState {
        self.state_at(0.0)
    }

    pub fn end_state(&self) -> KinematicState {
        self.state_at(self.duration())
    }

    /// `count` states at uniform times covering `[0, duration()]`.
    pub fn sample(&self, count: usize) -> Vec<(f64, KinematicState)> {
        let total = self.duration();
        match count {
            0 => Vec::new(),
            1 => vec![(0.0, self.state_at(0.0))],
            n => (0..n)
                .map(|i| {
                    let t = if i + 1 == n {
                        total
                    } else {
                        total * i as f64 / (n - 1) as f64
                    };
                    (t, self.state_at(t))
                })
                .collect(),
        }
    }

    /// `count` states strictly inside the time span, at midpoints of a
    /// uniform partition. Empty for zero-time trajectories.
    pub fn interior_samples(&self, count: usize) -> Vec<(f64, KinematicState)> {
        let total = self.duration();
        if total <= 0.0 {
            return Vec::new();
        }
        (0..count)
            .map(|i| {
                let t = total * (i as f64 + 0.5) / count as f64;
                (t, self.state_at(t))
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        let e = self.end_state();
        self.duration().is_finite() && e.position.is_finite() && e.velocity.is_finite()
    }
}
