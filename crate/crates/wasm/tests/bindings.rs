use mintime_wasm::{lambda_curve, residual_field, solve_json};
use serde_json::Value;

#[test]
fn solve_json_rest_to_rest() {
    let v: Value = serde_json::from_str(&solve_json(
        r#"{"u1":0,"v1":0,"u2":0,"v2":0,"dx":1,"dy":0}"#,
    ))
    .unwrap();
    assert_eq!(v["kind"], "bang-bang");
    assert_eq!(v["total_time"], 2.0);
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 200);
    let last = samples.last().unwrap().as_array().unwrap();
    assert!((last[1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn solve_json_continuous_has_unit_acceleration() {
    let v: Value = serde_json::from_str(&solve_json(
        r#"{"u1":0.3,"v1":-0.7,"u2":1.1,"v2":0.4,"dx":2.3,"dy":-1.7,"accel_bound":2}"#,
    ))
    .unwrap();
    assert_eq!(v["kind"], "canonical");
    for row in v["samples"].as_array().unwrap() {
        let r: Vec<f64> = row
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!((r[3].hypot(r[4]) - 2.0).abs() < 1e-9);
    }
}

#[test]
fn solve_json_reports_errors() {
    let v: Value = serde_json::from_str(&solve_json("{")).unwrap();
    assert!(v["error"].is_string());
    let v: Value = serde_json::from_str(&solve_json(
        r#"{"u1":0,"v1":0,"u2":0,"v2":0,"dx":1,"dy":0,"accel_bound":-1}"#,
    ))
    .unwrap();
    assert!(v["error"].as_str().unwrap().contains("accel_bound"));
}

#[test]
fn lambda_curve_is_even_with_minimum_at_zero() {
    let c = lambda_curve(2.0, 5);
    assert_eq!(c.len(), 10);
    assert!(c[4].abs() < 1e-15);
    assert!((c[5] - 4.6733259645).abs() < 1e-7);
    assert!((c[1] - c[9]).abs() < 1e-9);
    assert!(c[1] > c[5]);
}

#[test]
fn residual_field_dips_at_known_root() {
    // forward instance with root (theta, alpha, eta) = (0, 2, +)
    let (s, c) = (1f64.sinh(), 1f64.cosh());
    let p = format!(
        r#"{{"u1":0,"v1":0,"u2":1,"v2":0,"dx":{},"dy":{}}}"#,
        2.0 * s / 4.0,
        (1.0 - s * c) / 4.0
    );
    let f = residual_field(&p, 1, 3, 3, 0.5, 8.0);
    assert_eq!(f.len(), 9);
    // theta = 0 row, alpha = 2 column
    let at_root = f[4];
    assert!(at_root < -8.0, "{f:?}");
    assert!(f.iter().enumerate().all(|(k, &x)| k == 4 || x > at_root));
    assert!(residual_field("nope", 1, 3, 3, 0.5, 8.0).is_empty());
    assert!(residual_field(&p, 1, 1, 3, 0.5, 8.0).is_empty());
}
