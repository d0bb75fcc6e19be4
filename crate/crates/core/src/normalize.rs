//! Reduction of arbitrary boundary data to the normalized problem, in which
//! the acceleration bound is 1 and the endpoint velocity difference is
//! exactly `(1, 0)`, and the inverse map for solutions.
//!
//! Forward transform, after dividing space by the acceleration bound `a`:
//!
//! ```text
//! velocity     v  ->  R(-phi) S v / beta
//! displacement d  ->  R(-phi) S d / beta^2
//! time         t  ->  t / beta
//! ```
//!
//! where `S = diag(sigma, 1)`, `sigma = sgn(du)` and `phi` is the polar angle
//! of `(sigma du, dv)`.

use serde::{Deserialize, Serialize};

use crate::canonical::{ConstantChain, Rotation2, Segment, Sign, Trajectory, Vec2};
use crate::error::{ensure_finite, Error, Result};

/// Raw endpoint data in user units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    pub dx: f64,
    pub dy: f64,
    #[serde(default = "default_accel_bound")]
    pub accel_bound: f64,
}

fn default_accel_bound() -> f64 {
    1.0
}

impl BoundaryConditions {
    /// Unit acceleration bound.
    pub fn new(u1: f64, v1: f64, u2: f64, v2: f64, dx: f64, dy: f64) -> Self {
        BoundaryConditions {
            u1,
            v1,
            u2,
            v2,
            dx,
            dy,
            accel_bound: 1.0,
        }
    }

    pub fn with_accel_bound(self, accel_bound: f64) -> Self {
        BoundaryConditions {
            accel_bound,
            ..self
        }
    }

    pub fn initial_velocity(&self) -> Vec2 {
        Vec2::new(self.u1, self.v1)
    }

    pub fn final_velocity(&self) -> Vec2 {
        Vec2::new(self.u2, self.v2)
    }

    pub fn displacement(&self) -> Vec2 {
        Vec2::new(self.dx, self.dy)
    }

    pub fn velocity_change(&self) -> Vec2 {
        self.final_velocity() - self.initial_velocity()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            &[
                self.u1,
                self.v1,
                self.u2,
                self.v2,
                self.dx,
                self.dy,
                self.accel_bound,
            ],
            "boundary conditions",
        )?;
        if self.accel_bound <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "accel_bound must be positive, got {}",
                self.accel_bound
            )));
        }
        Ok(())
    }

    /// Apply a rotation to every vector of the problem.
    pub fn rotated(&self, angle: f64) -> Self {
        let r = Rotation2::new(angle);
        let (w1, w2, d) = (
            r.apply(self.initial_velocity()),
            r.apply(self.final_velocity()),
            r.apply(self.displacement()),
        );
        BoundaryConditions {
            u1: w1.x,
            v1: w1.y,
            u2: w2.x,
            v2: w2.y,
            dx: d.x,
            dy: d.y,
            accel_bound: self.accel_bound,
        }
    }

    /// Scale velocities by `c` and displacements by `c^2`, keeping the bound.
    pub fn dilated(&self, c: f64) -> Self {
        BoundaryConditions {
            u1: self.u1 * c,
            v1: self.v1 * c,
            u2: self.u2 * c,
            v2: self.v2 * c,
            dx: self.dx * c * c,
            dy: self.dy * c * c,
            accel_bound: self.accel_bound,
        }
    }
}

/// The invertible transform that produced a normalized problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub beta: f64,
    pub phi: f64,
    pub sigma: Sign,
    pub eta_norm: Sign,
    pub accel_scale: f64,
}

impl NormalizationRecord {
    pub fn identity() -> Self {
        Self::scale_only(1.0)
    }

    /// Only folds out the acceleration bound.
    pub fn scale_only(accel_scale: f64) -> Self {
        NormalizationRecord {
            beta: 1.0,
            phi: 0.0,
            sigma: Sign::Plus,
            eta_norm: Sign::Plus,
            accel_scale,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    fn rotation(&self) -> Rotation2 {
        Rotation2::new(self.phi)
    }

    fn frame_in(&self, p: Vec2) -> Vec2 {
        self.rotation()
            .apply_inverse(p.reflect(self.sigma, self.eta_norm))
    }

    fn frame_out(&self, p: Vec2) -> Vec2 {
        self.rotation().apply(p).reflect(self.sigma, self.eta_norm)
    }

    pub fn velocity_to_normalized(&self, v: Vec2) -> Vec2 {
        self.frame_in(v / self.accel_scale) / self.beta
    }

    pub fn displacement_to_normalized(&self, d: Vec2) -> Vec2 {
        self.frame_in(d / self.accel_scale) / (self.beta * self.beta)
    }

    pub fn time_to_normalized(&self, t: f64) -> f64 {
        t / self.beta
    }

    pub fn velocity_to_original(&self, v: Vec2) -> Vec2 {
        self.frame_out(v) * (self.accel_scale * self.beta)
    }

    pub fn displacement_to_original(&self, d: Vec2) -> Vec2 {
        self.frame_out(d) * (self.accel_scale * self.beta * self.beta)
    }

    pub fn acceleration_to_original(&self, a: Vec2) -> Vec2 {
        self.frame_out(a) * self.accel_scale
    }

    pub fn time_to_original(&self, t: f64) -> f64 {
        t * self.beta
    }
}

/// Boundary data with unit acceleration bound and velocity change `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedProblem {
    pub u: f64,
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
}

impl NormalizedProblem {
    pub fn initial_velocity(&self) -> Vec2 {
        Vec2::new(self.u, self.v)
    }

    pub fn final_velocity(&self) -> Vec2 {
        Vec2::new(self.u + 1.0, self.v)
    }

    pub fn displacement(&self) -> Vec2 {
        Vec2::new(self.dx, self.dy)
    }

    pub fn as_boundary_conditions(&self) -> BoundaryConditions {
        BoundaryConditions::new(self.u, self.v, self.u + 1.0, self.v, self.dx, self.dy)
    }
}

pub fn normalize(bc: &BoundaryConditions) -> Result<(NormalizedProblem, NormalizationRecord)> {
    bc.validate()?;
    let a = bc.accel_bound;
    let du = bc.u2 / a - bc.u1 / a;
    let dv = bc.v2 / a - bc.v1 / a;
    if du == 0.0 && dv == 0.0 {
        return Err(Error::DegenerateEqualVelocities);
    }
    let beta = du.hypot(dv);
    let sigma = Sign::of(du);
    let phi = dv.atan2(sigma.apply(du));
    let record = NormalizationRecord {
        beta,
        phi,
        sigma,
        eta_norm: Sign::Plus,
        accel_scale: a,
    };
    let w = record.velocity_to_normalized(bc.initial_velocity());
    let d = record.displacement_to_normalized(bc.displacement());
    let np = NormalizedProblem {
        u: w.x,
        v: w.y,
        dx: d.x,
        dy: d.y,
    };
    ensure_finite(&[np.u, np.v, np.dx, np.dy, beta], "normalize")?;
    Ok((np, record))
}

/// Map a trajectory of the normalized problem back to original units.
/// `time_span` is scaled alongside.
pub fn denormalize_solution(
    traj: &Trajectory,
    time_span: (f64, f64),
    record: &NormalizationRecord,
) -> Result<(Trajectory, (f64, f64))> {
    let out = match traj {
        Trajectory::Zero { position, velocity } => Trajectory::Zero {
            position: record.displacement_to_original(*position),
            velocity: record.velocity_to_original(*velocity),
        },
        Trajectory::ConstantChain(c) => Trajectory::ConstantChain(ConstantChain {
            start_position: record.displacement_to_original(c.start_position),
            start_velocity: record.velocity_to_original(c.start_velocity),
            segments: c
                .segments
                .iter()
                .map(|s| Segment {
                    accel: record.acceleration_to_original(s.accel),
                    duration: record.time_to_original(s.duration),
                })
                .collect(),
        }),
        Trajectory::CanonicalArc(arc) => {
            if !arc.frame.is_identity() {
                return Err(Error::InvalidArgument(
                    "canonical arc is already attached to a non-identity frame".into(),
                ));
            }
            let mut arc = *arc;
            arc.frame = *record;
            Trajectory::CanonicalArc(arc)
        }
    };
    let span = (
        record.time_to_original(time_span.0),
        record.time_to_original(time_span.1),
    );
    ensure_finite(&[span.0, span.1, out.duration()], "denormalize")?;
    if !out.is_finite() {
        return Err(Error::NonFinite("denormalized trajectory"));
    }
    Ok((out, span))
}
