use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use mintime::oracle::verify_trajectory;
use mintime::{classify_boundary, lambda_max, solve, ClassificationResult, Error, SearchConfig};
use rayon::prelude::*;
use serde_json::json;

use crate::files::{BatchRow, BatchStatus, LambdaRow, ProblemFile, SampleRow, SolutionFile};

/// Tolerance `verify` applies to endpoint residuals and the acceleration bound.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad arguments, I/O failure.
    Input(String),
    /// The solver ran but could not produce or confirm a result.
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Inconclusive(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Inconclusive(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(input)
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, CliError> {
    ProblemFile::parse_json(&read(path)?).map_err(input)
}

pub fn load_solution(path: &Path) -> Result<SolutionFile, CliError> {
    SolutionFile::parse_json(&read(path)?).map_err(input)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub theta_grid: Option<usize>,
    pub alpha_grid: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn config(&self) -> SearchConfig {
        let mut cfg = SearchConfig::default();
        if let Some(n) = self.theta_grid {
            cfg.theta_grid = n;
        }
        if let Some(n) = self.alpha_grid {
            cfg.alpha_grid = n;
        }
        if let Some(t) = self.tol {
            cfg.residual_tol = t;
        }
        cfg
    }
}

pub fn cmd_solve(
    input_path: &Path,
    output: Option<&Path>,
    overrides: Overrides,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let problem = load_problem(input_path)?;
    let bc = problem.boundary_conditions().map_err(input)?;
    let cfg = overrides.config();
    cfg.validate().map_err(input)?;
    let sol = match solve(&bc, &cfg) {
        Ok(sol) => sol,
        Err(Error::NoSolutionFound(diag)) => {
            return Err(CliError::Inconclusive(format!(
                "no solution found. The data may be a bang-bang case just outside the \
                 classification tolerance, or the grid too coarse (try --theta-grid/--alpha-grid).\n{}",
                to_json(&diag)
            )))
        }
        Err(e) => return Err(input(e)),
    };
    let text = to_json(&SolutionFile::new(problem.id, sol));
    match output {
        Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => emit(stdout, &text),
    }
}

pub fn cmd_classify(input_path: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let problem = load_problem(input_path)?;
    let bc = problem.boundary_conditions().map_err(input)?;
    let c = classify_boundary(&bc, SearchConfig::default().classify_tol).map_err(input)?;
    let mut report = json!({
        "case": c.classification.name(),
        "frame": c.record,
    });
    if let ClassificationResult::Case3BangBang { order, t1, t2 } = c.classification {
        report["order"] = json!(order);
        report["T1"] = json!(c.record.time_to_original(t1));
        report["T2"] = json!(c.record.time_to_original(t2));
    }
    if let Some(id) = problem.id {
        report["id"] = json!(id);
    }
    emit(stdout, &to_json(&report))
}

pub fn cmd_verify(
    problem_path: &Path,
    solution_path: &Path,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let bc = load_problem(problem_path)?
        .boundary_conditions()
        .map_err(input)?;
    let sol = load_solution(solution_path)?;
    let report = verify_trajectory(&bc, &sol.trajectory, VERIFY_TOL);
    emit(stdout, &to_json(&report))?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Inconclusive("verification failed".into()))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SampleSpacing {
    Dt(f64),
    Count(usize),
}

pub fn sample_times(total: f64, spacing: SampleSpacing) -> Result<Vec<f64>, CliError> {
    match spacing {
        SampleSpacing::Count(0) => Err(CliError::Input("--count must be at least 1".into())),
        SampleSpacing::Count(1) => Ok(vec![0.0]),
        SampleSpacing::Count(n) => Ok((0..n)
            .map(|i| {
                if i + 1 == n {
                    total
                } else {
                    total * i as f64 / (n - 1) as f64
                }
            })
            .collect()),
        SampleSpacing::Dt(dt) if !(dt > 0.0 && dt.is_finite()) => {
            Err(CliError::Input(format!("--dt must be positive, got {dt}")))
        }
        SampleSpacing::Dt(dt) => {
            let steps = (total / dt).floor() as usize;
            let mut ts: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
            // close the span exactly, dropping a last step that lands within rounding of T
            if let Some(last) = ts.last_mut() {
                if total - *last <= 1e-12 * total.max(1.0) {
                    *last = total;
                } else {
                    ts.push(total);
                }
            }
            Ok(ts)
        }
    }
}

pub fn cmd_sample(
    solution_path: &Path,
    spacing: SampleSpacing,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let sol = load_solution(solution_path)?;
    let traj = &sol.trajectory;
    let mut w = csv::Writer::from_writer(stdout);
    for t in sample_times(traj.duration(), spacing)? {
        let s = traj.state_at(t);
        w.serialize(SampleRow {
            t,
            x: s.position.x,
            y: s.position.y,
            vx: s.velocity.x,
            vy: s.velocity.y,
            ax: s.acceleration.x,
            ay: s.acceleration.y,
        })
        .map_err(input)?;
    }
    w.flush().map_err(input)
}

fn solve_row(id: String, problem: Result<ProblemFile, String>, cfg: &SearchConfig) -> BatchRow {
    let failed = |id, status| BatchRow {
        id,
        kind: None,
        total_time: None,
        status,
    };
    let bc = match problem.map(|p| p.boundary_conditions()) {
        Ok(Ok(bc)) => bc,
        _ => return failed(id, BatchStatus::ParseError),
    };
    match solve(&bc, cfg) {
        Ok(sol) => BatchRow {
            id,
            kind: Some(sol.kind),
            total_time: Some(sol.total_time),
            status: BatchStatus::Ok,
        },
        Err(Error::NoSolutionFound(_)) => failed(id, BatchStatus::NoSolution),
        Err(_) => failed(id, BatchStatus::Error),
    }
}

/// Rows are solved in parallel; output keeps input order.
pub fn cmd_batch(input_path: &Path, output_path: &Path) -> Result<usize, CliError> {
    let text = read(input_path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(input)?.clone();
    let mut jobs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let job = match record {
            Ok(rec) => {
                let id = headers
                    .iter()
                    .position(|h| h == "id")
                    .and_then(|k| rec.get(k))
                    .filter(|s| !s.is_empty())
                    .map_or_else(|| row.to_string(), str::to_string);
                let problem = rec
                    .deserialize::<ProblemFile>(Some(&headers))
                    .map_err(|e| e.to_string());
                (id, problem)
            }
            Err(e) => (row.to_string(), Err(e.to_string())),
        };
        jobs.push(job);
    }
    let cfg = SearchConfig::default();
    let rows: Vec<BatchRow> = jobs
        .into_par_iter()
        .map(|(id, problem)| solve_row(id, problem, &cfg))
        .collect();
    let mut w = csv::Writer::from_path(output_path)
        .map_err(|e| input(format!("{}: {e}", output_path.display())))?;
    for row in &rows {
        w.serialize(row).map_err(input)?;
    }
    w.flush().map_err(input)?;
    Ok(rows.len())
}

/// `steps` rotations spread over the open interval `(-pi/2, pi/2)`; an odd
/// count includes `theta = 0`.
pub fn lambda_rows(t: f64, steps: usize) -> Result<Vec<LambdaRow>, CliError> {
    if steps == 0 {
        return Err(CliError::Input("--steps must be at least 1".into()));
    }
    (0..steps)
        .map(|i| {
            let theta = PI * (i + 1) as f64 / (steps + 1) as f64 - PI / 2.0;
            let theta = if 2 * (i + 1) == steps + 1 { 0.0 } else { theta };
            lambda_max(t, theta, 1e-12)
                .map(|lambda| LambdaRow { theta, lambda })
                .map_err(input)
        })
        .collect()
}

pub fn cmd_lambda(t: f64, steps: usize, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = lambda_rows(t, steps)?;
    let mut w = csv::Writer::from_writer(stdout);
    for row in rows {
        w.serialize(row).map_err(input)?;
    }
    w.flush().map_err(input)
}
