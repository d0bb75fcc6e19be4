//! Dilated-time endpoints of a canonical arc from its velocity change, plus
//! the a-priori bounds that box the outer search.
//!
//! With `mu = alpha R(theta)^-1 (1, 0)` (the reflection already folded into
//! `mu_v`), the arc endpoints satisfy
//!
//! ```text
//! asinh(tau2) - asinh(tau1)             = mu_u
//! sqrt(1 + tau2^2) - sqrt(1 + tau1^2)   = mu_v
//! ```
//!
//! Eliminating `tau2` leaves a residual in `tau1` that is strictly
//! increasing, so bisection inside a known bracket finds the unique root.

use serde::{Deserialize, Serialize};

use crate::canonical::asinh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuPair {
    pub mu_u: f64,
    pub mu_v: f64,
}

impl MuPair {
    pub fn new(mu_u: f64, mu_v: f64) -> Result<Self> {
        if !(mu_u > 0.0) || !mu_u.is_finite() {
            return Err(Error::InvalidMu(mu_u));
        }
        if !mu_v.is_finite() {
            return Err(Error::NonFinite("mu_v"));
        }
        Ok(MuPair { mu_u, mu_v })
    }

    /// `mu = (alpha cos theta, -eta alpha sin theta)`.
    pub fn from_polar(alpha: f64, theta: f64, eta: crate::canonical::Sign) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::new(alpha * c, -eta.apply(alpha * s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauBracket {
    pub t_lo: f64,
    pub t_hi: f64,
}

pub fn tau_bracket(mu: MuPair) -> Result<TauBracket> {
    let MuPair { mu_u, mu_v } = MuPair::new(mu.mu_u, mu.mu_v)?;
    let t_lo = -mu_u.exp() * f64::max(0.5, (1.0 - mu_v) / mu_u);
    let t_hi = f64::max(0.0, (1.0 + mu_v) / mu_u);
    if !t_lo.is_finite() {
        return Err(Error::NonFinite("tau bracket"));
    }
    Ok(TauBracket { t_lo, t_hi })
}

/// `tau2` paired with `tau1`.
pub fn tau2_of(mu_u: f64, tau1: f64) -> f64 {
    (asinh(tau1) + mu_u).sinh()
}

/// Velocity-difference residual as a function of `tau1`, in the form
/// `2 sinh(mu_u/2) sinh(asinh(tau1) + mu_u/2) - mu_v`, which equals
/// `sqrt(1+tau2^2) - sqrt(1+tau1^2) - mu_v` without the subtraction of two
/// nearly equal square roots.
pub fn tau_residual(mu: MuPair, tau1: f64) -> f64 {
    let h = 0.5 * mu.mu_u;
    2.0 * h.sinh() * (asinh(tau1) + h).sinh() - mu.mu_v
}

/// Derivative of [`tau_residual`] with respect to `tau1`.
fn tau_residual_slope(mu: MuPair, tau1: f64) -> f64 {
    (tau2_of(mu.mu_u, tau1) - tau1) / tau1.hypot(1.0)
}

const MAX_BISECTIONS: usize = 400;

/// Solve for `(tau1, tau2)`. Bisection runs until the bracket width falls
/// below `tol * max(1, |tau1|)`, then two Newton steps polish the root.
pub fn solve_tau(mu: MuPair, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let br = tau_bracket(mu)?;
    let (mut lo, mut hi) = (br.t_lo, br.t_hi);
    let (r_lo, r_hi) = (tau_residual(mu, lo), tau_residual(mu, hi));
    if !(r_lo <= 0.0 && r_hi >= 0.0) {
        return Err(Error::BracketFailure { lo, hi, r_lo, r_hi });
    }
    if r_lo == 0.0 {
        return Ok((lo, tau2_of(mu.mu_u, lo)));
    }
    if r_hi == 0.0 {
        return Ok((hi, tau2_of(mu.mu_u, hi)));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = tau_residual(mu, mid);
        if r == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if r > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol * mid.abs().max(1.0) {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    if lo == hi {
        t = mid;
    }
    for _ in 0..2 {
        let r = tau_residual(mu, t);
        let slope = tau_residual_slope(mu, t);
        if r == 0.0 || !(slope > 0.0) {
            break;
        }
        let next = t - r / slope;
        if next >= lo && next <= hi && tau_residual(mu, next).abs() <= r.abs() {
            t = next;
        } else {
            break;
        }
    }
    let t2 = tau2_of(mu.mu_u, t);
    if !(t.is_finite() && t2.is_finite()) {
        return Err(Error::NonFinite("solve_tau"));
    }
    Ok((t, t2))
}

/// Supremum of `{alpha > 0 : alpha T > exp(alpha cos(theta) / 2) - 1}`.
pub fn lambda_max(t: f64, theta: f64, tol: f64) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::OutOfDomain {
            t,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if !(theta.abs() < std::f64::consts::FRAC_PI_2) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_max needs |theta| < pi/2 and tol > 0, got theta={theta}, tol={tol}"
        )));
    }
    let c = theta.cos();
    let member = |a: f64| a * t > (0.5 * a * c).exp_m1();
    let mut lo = tol;
    if !member(lo) {
        return Err(Error::InvalidArgument(format!(
            "tol {tol} is already outside the admissible dilation set"
        )));
    }
    let mut hi = 2.0 * lo.max(0.5);
    while member(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonFinite("lambda_max"));
        }
    }
    while hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if member(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zigzag bound: decelerate to rest, cross the remaining gap rest-to-rest,
/// accelerate to the final velocity.
pub fn time_upper_bound(u1: f64, v1: f64, u2: f64, v2: f64, dx: f64, dy: f64) -> f64 {
    let m1 = u1.hypot(v1);
    let m2 = u2.hypot(v2);
    let gx = 2.0 * dx - m1 * u1 - m2 * u2;
    let gy = 2.0 * dy - m1 * v1 - m2 * v2;
    m1 + m2 + std::f64::consts::SQRT_2 * gx.hypot(gy).sqrt()
}
