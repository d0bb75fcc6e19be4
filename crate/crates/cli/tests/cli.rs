use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mintime::{solve, SearchConfig};
use mintime_cli::files::{ProblemFile, SolutionFile};
use serde_json::Value;
use tempfile::TempDir;

const CONSTANT: &str = r#"{"u1":0,"v1":0,"u2":1,"v2":0,"dx":0.5,"dy":0}"#;
const REST: &str = r#"{"u1":0,"v1":0,"u2":0,"v2":0,"dx":1,"dy":0}"#;
const CANONICAL: &str = r#"{"u1":0,"v1":0,"u2":1,"v2":0,"dx":0.587600,"dy":-0.203358}"#;
const CASE3: &str = r#"{"u1":0,"v1":1,"u2":1,"v2":1,"dx":1.75,"dy":2}"#;

fn mintime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mintime"))
        .args(args)
        .output()
        .expect("run mintime")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn solve_to_file(dir: &TempDir, name: &str, problem: &str) -> (PathBuf, Value) {
    let input = write(dir, &format!("{name}.json"), problem);
    let output = dir.path().join(format!("{name}.sol.json"));
    let out = mintime(&["solve", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    (output, v)
}

fn sample_rows(solution: &Path, args: &[&str]) -> Vec<Vec<f64>> {
    let mut all = vec!["sample", "--solution", s(solution)];
    all.extend_from_slice(args);
    let out = mintime(&all);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,vx,vy,ax,ay"));
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn solve_examples() {
    let dir = TempDir::new().unwrap();
    let (_, c) = solve_to_file(&dir, "c", CONSTANT);
    assert_eq!(c["kind"], "constant");
    assert_eq!(c["total_time"], 1.0);
    let (_, r) = solve_to_file(&dir, "r", REST);
    assert_eq!(r["kind"], "bang-bang");
    assert_eq!(r["total_time"], 2.0);
    let (_, k) = solve_to_file(&dir, "k", CANONICAL);
    assert_eq!(k["kind"], "canonical");
    assert!((k["total_time"].as_f64().unwrap() - 1.175201).abs() < 1e-5);
    assert_eq!(k["trajectory"]["type"], "canonical_arc");
}

#[test]
fn solve_writes_stdout_without_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", REST);
    let out = mintime(&["solve", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total_time"], 2.0);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        mintime(&["solve", "--input", "/nonexistent/p.json"])
            .status
            .code(),
        Some(1)
    );
    let missing = write(&dir, "m.json", r#"{"u1":0,"v1":0,"u2":1}"#);
    assert_eq!(
        mintime(&["solve", "--input", s(&missing)]).status.code(),
        Some(1)
    );
    let bad_bound = write(
        &dir,
        "a.json",
        r#"{"u1":0,"v1":0,"u2":1,"v2":0,"dx":1,"dy":0,"accel_bound":-1}"#,
    );
    assert_eq!(
        mintime(&["solve", "--input", s(&bad_bound)]).status.code(),
        Some(1)
    );
    // a residual tolerance no iterate can meet forces the inconclusive path
    let input = write(
        &dir,
        "g.json",
        r#"{"u1":0.3,"v1":-0.7,"u2":1.1,"v2":0.4,"dx":2.3,"dy":-1.7}"#,
    );
    let out = mintime(&["solve", "--input", s(&input), "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid_cells_scanned"), "{err}");
    assert!(err.contains("bang-bang"), "{err}");
}

#[test]
fn sample_constant_rows() {
    let dir = TempDir::new().unwrap();
    let (sol, _) = solve_to_file(&dir, "c", CONSTANT);
    let rows = sample_rows(&sol, &["--count", "3"]);
    assert_eq!(rows.len(), 3);
    for (row, t) in rows.iter().zip([0.0, 0.5, 1.0]) {
        assert!((row[0] - t).abs() < 1e-15);
        assert!((row[1] - t * t / 2.0).abs() < 1e-12);
    }
}

#[test]
fn sample_rest_to_rest_ends_at_target() {
    let dir = TempDir::new().unwrap();
    let (sol, _) = solve_to_file(&dir, "r", REST);
    let rows = sample_rows(&sol, &["--dt", "0.3"]);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 2.0);
    assert!((last[1] - 1.0).abs() < 1e-9);
    assert!(last[3].abs() < 1e-9);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
}

#[test]
fn sample_canonical_unit_acceleration() {
    let dir = TempDir::new().unwrap();
    let (sol, _) = solve_to_file(&dir, "k", CANONICAL);
    let rows = sample_rows(&sol, &["--count", "101"]);
    assert_eq!(rows.len(), 101);
    for r in rows {
        assert!((r[5] * r[5] + r[6] * r[6] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn sample_needs_spacing() {
    let dir = TempDir::new().unwrap();
    let (sol, _) = solve_to_file(&dir, "c", CONSTANT);
    assert_ne!(
        mintime(&["sample", "--solution", s(&sol)]).status.code(),
        Some(0)
    );
    let junk = write(&dir, "junk.json", "{}");
    assert_eq!(
        mintime(&["sample", "--solution", s(&junk), "--count", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn classify_case3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.json", CASE3);
    let out = mintime(&["classify", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["case"], "bang-bang");
    assert!((v["T1"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!((v["T2"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["order"], 1);
}

#[test]
fn classify_other_cases() {
    let dir = TempDir::new().unwrap();
    for (problem, case) in [
        (REST, "equal-velocities"),
        (CONSTANT, "one-dimensional"),
        (CANONICAL, "continuous"),
        (r#"{"u1":1,"v1":2,"u2":1,"v2":2,"dx":0,"dy":0}"#, "zero"),
    ] {
        let input = write(&dir, "p.json", problem);
        let out = mintime(&["classify", "--input", s(&input)]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["case"], case, "{problem}");
    }
}

#[test]
fn verify_round_trip_and_mismatch() {
    let dir = TempDir::new().unwrap();
    for (name, problem) in [("c", CONSTANT), ("r", REST), ("k", CANONICAL), ("b", CASE3)] {
        let (sol, _) = solve_to_file(&dir, name, problem);
        let p = dir.path().join(format!("{name}.json"));
        let out = mintime(&["verify", "--problem", s(&p), "--solution", s(&sol)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["passed"], true);
    }
    let p = dir.path().join("r.json");
    let wrong = dir.path().join("k.sol.json");
    let out = mintime(&["verify", "--problem", s(&p), "--solution", s(&wrong)]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn batch_isolates_bad_rows_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.csv",
        "id,u1,v1,u2,v2,dx,dy\n\
         a,0,0,1,0,0.5,0\n\
         b,0,0,0,0,1,0\n\
         c,0,0,1,0,0.5876,-0.203358\n\
         d,0,oops,1\n",
    );
    let out1 = dir.path().join("out1.csv");
    let out2 = dir.path().join("out2.csv");
    for out in [&out1, &out2] {
        let r = mintime(&["batch", "--input", s(&input), "--output", s(out)]);
        assert_eq!(r.status.code(), Some(0));
    }
    let text = fs::read_to_string(&out1).unwrap();
    assert_eq!(text, fs::read_to_string(&out2).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,kind,total_time,status");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "a,constant,1.0,ok");
    assert_eq!(lines[2], "b,bang-bang,2.0,ok");
    assert!(lines[3].starts_with("c,canonical,1.1752"));
    assert_eq!(lines[4], "d,,,parse_error");
}

#[test]
fn batch_fails_only_on_io() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    let r = mintime(&["batch", "--input", "/nonexistent.csv", "--output", s(&out)]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn lambda_table() {
    let out = mintime(&["lambda", "--T", "2", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,lambda"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    let zero = rows.iter().find(|r| r.0 == 0.0).unwrap();
    assert!((zero.1 - 4.6733259645).abs() < 1e-8);
    // even in theta, smallest at theta = 0
    assert!((rows[0].1 - rows[4].1).abs() < 1e-9);
    assert!(rows.iter().all(|r| r.1 >= zero.1));
}

#[test]
fn solution_file_reloads_losslessly() {
    let problem = ProblemFile::parse_json(CANONICAL).unwrap();
    let bc = problem.boundary_conditions().unwrap();
    let sol = solve(&bc, &SearchConfig::default()).unwrap();
    let file = SolutionFile::new(Some("k".into()), sol.clone());
    let text = serde_json::to_string(&file).unwrap();
    let back = SolutionFile::parse_json(&text).unwrap();
    assert_eq!(back, file);
    for t in [0.0, 0.3, 0.9, sol.total_time] {
        let (a, b) = (sol.trajectory.state_at(t), back.trajectory.state_at(t));
        assert!((a.position - b.position).norm() <= 1e-12);
        assert!((a.velocity - b.velocity).norm() <= 1e-12);
    }
}

#[test]
fn problem_file_validation() {
    assert!(ProblemFile::parse_json(r#"{"u1":0,"v1":0,"u2":1,"v2":0,"dx":1}"#).is_err());
    assert!(ProblemFile::parse_json(
        r#"{"u1":0,"v1":0,"u2":1,"v2":0,"dx":1,"dy":0,"accel_bound":0}"#
    )
    .is_err());
    let p = ProblemFile::parse_json(
        r#"{"id":"x","u1":0,"v1":0,"u2":1,"v2":0,"dx":1,"dy":0,"accel_bound":2}"#,
    )
    .unwrap();
    assert_eq!(p.id.as_deref(), Some("x"));
    assert_eq!(p.boundary_conditions().unwrap().accel_bound, 2.0);
}
