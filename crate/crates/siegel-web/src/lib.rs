//! wasm-bindgen entry points for the demo page in `www/`. Each export takes
//! plain numbers and returns a JSON string; the same computations are
//! available natively through the `*_value` functions.

use serde_json::{json, Value};
use siegel::clark::clark_1d;
use siegel::nevanlinna::nevanlinna_extract_1d;
use siegel::quadrature::QuadratureSpec;
use siegel::worked::{curve_limits, spin_f, spin_fiber_measure};
use siegel::C64;
use wasm_bindgen::prelude::*;

fn disc_map(name: &str) -> Result<fn(C64) -> C64, String> {
    match name {
        "cayley" => Ok(|w| (w - C64::new(0.0, 1.0)) / (w + C64::new(0.0, 1.0))),
        "exponential" => Ok(|w| (C64::new(0.0, 1.0) * w).exp()),
        "half-cayley" => Ok(|w| 0.5 * (w - C64::new(0.0, 1.0)) / (w + C64::new(0.0, 1.0))),
        other => Err(format!("unknown map '{other}'")),
    }
}

/// Clark measure of a half-plane map at α = e^{iθ}: slope, atoms and the
/// density on the grid.
pub fn clark_value(map: &str, angle: f64) -> Result<Value, String> {
    let phi = disc_map(map)?;
    // period-2π maps need a cut between atoms and a finer grid
    let quad = if map == "exponential" {
        QuadratureSpec { radius: 21.0 * std::f64::consts::PI, nodes: 1024, ..QuadratureSpec::default() }
    } else {
        QuadratureSpec::default()
    };
    let d = clark_1d(phi, C64::from_polar(1.0, angle), &quad).map_err(|e| e.to_string())?;
    Ok(json!({ "slope": d.slope_a, "atoms": d.atoms, "nodes": d.nodes, "values": d.values }))
}

/// Limits of w₁/(w₁+w₂) at (−1, −1) of the bidisc along the diagonal and
/// along the curve with direction (a, b), evaluated 2^{−k} from the corner.
pub fn curve_limits_value(a: f64, b: f64, k: i32) -> Result<Value, String> {
    if !(a > 0.0 && b > 0.0) || !(1..=40).contains(&k) {
        return Err("need a, b > 0 and 1 ≤ k ≤ 40".into());
    }
    let (diag, curve, ratio) = curve_limits(a, b, 1.0 - 2f64.powi(-k)).map_err(|e| e.to_string())?;
    Ok(json!({
        "diagonal": [diag.re, diag.im],
        "curve": [curve.re, curve.im],
        "expected_diagonal": 0.5,
        "expected_curve": a / (a + b),
        "gap_ratio": ratio,
    }))
}

/// Closed-form and extracted boundary atoms of the spin function on the
/// fiber through (a, −a, c).
pub fn spin_fiber_value(a: f64, c: f64) -> Result<Value, String> {
    let exact = spin_fiber_measure(a, &[c]);
    let got = nevanlinna_extract_1d(|w| spin_f(&[w + a, w - a, C64::new(c, 0.0)]).re, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    Ok(json!({ "closed_form": exact.atoms, "extracted": got.atoms, "slope": got.slope_a }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn clark(map: &str, angle: f64) -> Result<String, JsValue> {
    to_js(clark_value(map, angle))
}

#[wasm_bindgen]
pub fn limits(a: f64, b: f64, k: i32) -> Result<String, JsValue> {
    to_js(curve_limits_value(a, b, k))
}

#[wasm_bindgen]
pub fn spin_fiber(a: f64, c: f64) -> Result<String, JsValue> {
    to_js(spin_fiber_value(a, c))
}
