//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain Rust function of the same name
//! with a `_values` or `_report` suffix, so the numerics can be tested
//! natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use s2r_core::packing::{search_tau, ConstraintSet, TauSample};
use s2r_core::volume::ball_volume;
use s2r_core::{BallSpec, FiberedPoint, QuadratureConfig};

/// Demo curves do not need the library's default precision.
fn demo_quadrature() -> QuadratureConfig {
    QuadratureConfig::default().scaled(1e2)
}

/// `samples` ball volumes on `[0, rho_max]`, flattened as `(rho, volume)`
/// pairs. Radii at or past π are skipped.
pub fn volume_curve_values(rho_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(rho_max > 0.0) || samples < 2 {
        return Err("need rho_max > 0 and at least two samples".into());
    }
    let quad = demo_quadrature();
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let rho = rho_max * i as f64 / (samples - 1) as f64;
        let Ok(ball) = BallSpec::new(rho) else {
            continue;
        };
        let v = ball_volume(ball, &quad).map_err(|e| e.to_string())?;
        out.extend([rho, v]);
    }
    Ok(out)
}

/// Packing density of 4q.I.2 at kernel `(phi, theta, 0)` for `samples`
/// glide values on `[tau_min, tau_max]`, flattened as `(tau, radius,
/// density)` triples. Density is 0 where the ball would not be embedded.
pub fn density_curve_values(
    q: u32,
    phi: f64,
    theta: f64,
    tau_min: f64,
    tau_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    if !(tau_min > 0.0 && tau_max > tau_min) || samples < 2 {
        return Err("need 0 < tau_min < tau_max and at least two samples".into());
    }
    let cs =
        ConstraintSet::new(q, &FiberedPoint::new(phi, theta, 0.0)).map_err(|e| e.to_string())?;
    let quad = demo_quadrature();
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let tau = tau_min + (tau_max - tau_min) * i as f64 / (samples - 1) as f64;
        out.extend([tau, cs.radius(tau), cs.density(tau, &quad).unwrap_or(0.0)]);
    }
    Ok(out)
}

#[derive(Serialize)]
struct GlideReport {
    stabilizer_order: usize,
    best: TauSample,
    at_embedding_limit: bool,
    local_maxima: Vec<TauSample>,
    tau_limit: f64,
    binding: Vec<String>,
}

/// Best glide parameter at kernel `(phi, theta, 0)` as a JSON document.
pub fn glide_search_report(q: u32, phi: f64, theta: f64) -> Result<String, String> {
    let cs =
        ConstraintSet::new(q, &FiberedPoint::new(phi, theta, 0.0)).map_err(|e| e.to_string())?;
    let s = search_tau(&cs, &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    let report = GlideReport {
        stabilizer_order: cs.stabilizer_order(),
        binding: cs
            .binding(s.best.tau)
            .iter()
            .map(|c| c.label.clone())
            .collect(),
        best: s.best,
        at_embedding_limit: s.at_embedding_limit,
        local_maxima: s.local_maxima,
        tau_limit: cs.tau_limit().0,
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn volume_curve(rho_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    volume_curve_values(rho_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn density_curve(
    q: u32,
    phi: f64,
    theta: f64,
    tau_min: f64,
    tau_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    density_curve_values(q, phi, theta, tau_min, tau_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn glide_search(q: u32, phi: f64, theta: f64) -> Result<String, JsError> {
    glide_search_report(q, phi, theta).map_err(|e| JsError::new(&e))
}
