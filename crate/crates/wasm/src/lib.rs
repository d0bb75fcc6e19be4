//! wasm-bindgen exports for the static demo page in `www/`.

use mintime::search::residual;
use mintime::{lambda_max, normalize, solve, BoundaryConditions, SearchConfig, Sign};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

/// Points per solution handed back for drawing.
const PLOT_SAMPLES: usize = 200;

#[derive(Serialize)]
struct Plot {
    kind: &'static str,
    case: &'static str,
    total_time: f64,
    /// `[t, x, y, ax, ay]` rows.
    samples: Vec<[f64; 5]>,
    roots: usize,
}

/// Solves one problem given as JSON (`u1, v1, u2, v2, dx, dy` and an
/// optional `accel_bound`). Returns JSON with either the sampled path or an
/// `error` field.
#[wasm_bindgen]
pub fn solve_json(problem: &str) -> String {
    let out = serde_json::from_str::<BoundaryConditions>(problem)
        .map_err(|e| e.to_string())
        .and_then(|bc| solve(&bc, &SearchConfig::default()).map_err(|e| e.to_string()))
        .map(|sol| Plot {
            kind: sol.kind.name(),
            case: sol.classification.name(),
            total_time: sol.total_time,
            samples: sol
                .trajectory
                .sample(PLOT_SAMPLES)
                .into_iter()
                .map(|(t, s)| {
                    [
                        t,
                        s.position.x,
                        s.position.y,
                        s.acceleration.x,
                        s.acceleration.y,
                    ]
                })
                .collect(),
            roots: sol.diagnostics.roots_found.len(),
        });
    match out {
        Ok(plot) => serde_json::to_string(&plot).unwrap_or_default(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// `[theta0, lambda0, theta1, lambda1, ...]` over `(-pi/2, pi/2)`. Failed
/// points come back as NaN.
#[wasm_bindgen]
pub fn lambda_curve(t: f64, steps: usize) -> Vec<f64> {
    let h = std::f64::consts::FRAC_PI_2;
    (0..steps)
        .flat_map(|i| {
            let theta = -h + 2.0 * h * (i + 1) as f64 / (steps + 1) as f64;
            [theta, lambda_max(t, theta, 1e-10).unwrap_or(f64::NAN)]
        })
        .collect()
}

/// log10 of the scaled search residual on an `n_theta x n_alpha` grid (row
/// major, theta outer) for the normalized form of the given problem. Alpha
/// is geometric on `[alpha_min, alpha_max]`. Empty if the problem cannot be
/// normalized.
#[wasm_bindgen]
pub fn residual_field(
    problem: &str,
    eta: i32,
    n_theta: usize,
    n_alpha: usize,
    alpha_min: f64,
    alpha_max: f64,
) -> Vec<f64> {
    let Ok(bc) = serde_json::from_str::<BoundaryConditions>(problem) else {
        return Vec::new();
    };
    let Ok((np, _)) = normalize(&bc) else {
        return Vec::new();
    };
    if n_theta < 2 || n_alpha < 2 || !(alpha_min > 0.0 && alpha_max > alpha_min) {
        return Vec::new();
    }
    let eta = if eta < 0 { Sign::Minus } else { Sign::Plus };
    let h = std::f64::consts::FRAC_PI_2 - 1e-3;
    let ratio = (alpha_max / alpha_min).ln();
    let mut out = Vec::with_capacity(n_theta * n_alpha);
    for i in 0..n_theta {
        let theta = -h + 2.0 * h * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_alpha {
            let alpha = alpha_min * (ratio * j as f64 / (n_alpha - 1) as f64).exp();
            // divided by alpha^2 so the field reads as a displacement error
            let r =
                residual(&np, theta, alpha, eta).map_or(f64::NAN, |r| r.norm() / (alpha * alpha));
            out.push(r.max(1e-300).log10());
        }
    }
    out
}
