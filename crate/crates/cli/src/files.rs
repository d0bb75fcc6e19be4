//! On-disk formats: problem and solution JSON, batch CSV rows.

use std::fmt;

use mintime::{
    BoundaryConditions, ClassificationResult, NormalizationRecord, SearchDiagnostics, Solution,
    SolutionKind, Trajectory,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    pub dx: f64,
    pub dy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accel_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvalidProblem(pub String);

impl fmt::Display for InvalidProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl ProblemFile {
    pub fn parse_json(text: &str) -> Result<Self, InvalidProblem> {
        let p: ProblemFile =
            serde_json::from_str(text).map_err(|e| InvalidProblem(format!("problem file: {e}")))?;
        p.boundary_conditions()?;
        Ok(p)
    }

    pub fn boundary_conditions(&self) -> Result<BoundaryConditions, InvalidProblem> {
        let named = [
            ("u1", self.u1),
            ("v1", self.v1),
            ("u2", self.u2),
            ("v2", self.v2),
            ("dx", self.dx),
            ("dy", self.dy),
        ];
        if let Some((name, x)) = named.iter().find(|(_, x)| !x.is_finite()) {
            return Err(InvalidProblem(format!("{name} is not finite ({x})")));
        }
        let a = self.accel_bound.unwrap_or(1.0);
        if !(a > 0.0 && a.is_finite()) {
            return Err(InvalidProblem(format!(
                "accel_bound must be positive and finite, got {a}"
            )));
        }
        Ok(
            BoundaryConditions::new(self.u1, self.v1, self.u2, self.v2, self.dx, self.dy)
                .with_accel_bound(a),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub kind: SolutionKind,
    pub total_time: f64,
    pub frame: NormalizationRecord,
    pub classification: ClassificationResult,
    pub trajectory: Trajectory,
    pub diagnostics: SearchDiagnostics,
}

impl SolutionFile {
    pub fn new(id: Option<String>, sol: Solution) -> Self {
        SolutionFile {
            id,
            kind: sol.kind,
            total_time: sol.total_time,
            frame: sol.record,
            classification: sol.classification,
            trajectory: sol.trajectory,
            diagnostics: sol.diagnostics,
        }
    }

    pub fn parse_json(text: &str) -> Result<Self, InvalidProblem> {
        let s: SolutionFile = serde_json::from_str(text)
            .map_err(|e| InvalidProblem(format!("solution file: {e}")))?;
        if !s.trajectory.is_finite() || !s.total_time.is_finite() {
            return Err(InvalidProblem("solution file has non-finite values".into()));
        }
        Ok(s)
    }
}

/// One output row of `batch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub id: String,
    pub kind: Option<SolutionKind>,
    pub total_time: Option<f64>,
    pub status: BatchStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStatus {
    Ok,
    ParseError,
    NoSolution,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaRow {
    pub theta: f64,
    pub lambda: f64,
}
