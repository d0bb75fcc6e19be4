//! Minimum-time planar trajectories under a bounded acceleration magnitude.
//!
//! Given endpoint velocities, a displacement and an acceleration bound,
//! [`solve`] returns the fastest trajectory. Bang-bang and constant
//! minimizers are detected and built in closed form; every other minimizer
//! is a single canonical arc found by a two-parameter search.
//!
//! ```
//! use mintime::{solve, BoundaryConditions, SearchConfig};
//!
//! let bc = BoundaryConditions::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
//! let sol = solve(&bc, &SearchConfig::default()).unwrap();
//! assert_eq!(sol.total_time, 2.0);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod classify;
pub mod error;
pub mod normalize;
pub mod oracle;
pub mod search;
pub mod tausolve;

pub use canonical::{
    eval_canonical_state, eval_fg, CanonicalArc, CanonicalParams, ConstantChain, FgValues,
    KinematicState, Rotation2, Segment, Sign, Trajectory, Vec2,
};
pub use classify::{classify, AlignedProblem, ClassificationResult};
pub use error::{Error, Result};
pub use normalize::{
    denormalize_solution, normalize, BoundaryConditions, NormalizationRecord, NormalizedProblem,
};
pub use oracle::{brute_force_min_time, verify_solution, StationarityFit, VerificationReport};
pub use search::{
    classify_boundary, displacement_map, residual, solve, solve_continuous, Classified, RootRecord,
    SearchConfig, SearchDiagnostics, Solution, SolutionKind,
};
pub use tausolve::{lambda_max, solve_tau, tau_bracket, time_upper_bound, MuPair, TauBracket};
