//! Browser bindings. Every export takes plain numbers and returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qdm_core::gauge::depolarizing;
use qdm_core::linalg::{self, random_unitary};
use qdm_core::projections::projection_set_pi_qpt;
use qdm_core::random::{random_channel, random_model, rng_from_seed, RandomModelOptions};
use qdm_core::uniqueness::{eigenphases, snd_approximant, super_non_degenerate};
use qdm_core::{
    apply_gauge, check_physical, collect_dataset, distributions_equal, gauge_fix, lgst_reconstruct,
    max_depolarizing_f, DensityMatrix, Effect, FiducialFrame, ModelRepresentation,
};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Sweep F over `[1, 1.5 F_max]` for a random full-rank model and report
/// where the depolarized counterpart `D_{1/F}(model)` stops being physical.
pub fn window_scan(dim: usize, seed: u64, steps: usize) -> Result<Value, String> {
    let rep = random_model(dim, dim * dim, 2, dim * dim, seed, &RandomModelOptions::default()).map_err(err)?;
    let (f_max, lambda) = max_depolarizing_f(&rep).map_err(err)?;
    let top = if f_max.value().is_finite() { 1.0 + 1.5 * (f_max.value() - 1.0) } else { 2.0 };
    let steps = steps.clamp(2, 400);
    let mut points = Vec::with_capacity(steps);
    for s in 0..steps {
        let f = 1.0 + (top - 1.0) * s as f64 / (steps - 1) as f64;
        let moved = apply_gauge(&rep, &depolarizing(1.0 / f, dim).map_err(err)?).map_err(err)?;
        let state_min = moved.states.iter().map(|s| linalg::min_eigenvalue(&s.mat)).fold(f64::INFINITY, f64::min);
        let choi_min = moved.maps.iter().map(|m| m.choi_min_eigenvalue()).fold(f64::INFINITY, f64::min);
        let dev = distributions_equal(&rep, &moved, 1, 1e-9).map_err(err)?.max_dev;
        points.push(json!({
            "f": f,
            "state_min": state_min,
            "choi_min": choi_min,
            "physical": check_physical(&moved).pass,
            "max_dev": dev,
        }));
    }
    Ok(json!({ "dim": dim, "seed": seed, "lambda_min": lambda, "f_max": f_max.value(), "points": points }))
}

/// Eigenphases of a random unitary and of its super-non-degenerate approximant of order `n`.
pub fn snd_phases(dim: usize, seed: u64, n: u32) -> Result<Value, String> {
    if !(2..=6).contains(&dim) {
        return Err(format!("dim {dim} outside 2..=6"));
    }
    let u = random_unitary(&mut rng_from_seed(seed), dim);
    let approx = snd_approximant(&u, n).map_err(err)?;
    let (before, _) = eigenphases(&u).map_err(err)?;
    let (after, _) = eigenphases(&approx).map_err(err)?;
    Ok(json!({
        "dim": dim,
        "order": n,
        "phases": before,
        "approx_phases": after,
        "snd_before": super_non_degenerate(&u).map_err(err)?,
        "snd_after": super_non_degenerate(&approx).map_err(err)?,
        "distance": linalg::operator_norm(&(&approx - &u)),
        "bound": std::f64::consts::TAU * (10f64.powi(-(n as i32)) + 10f64.powi(-3 * n as i32)),
    }))
}

fn pair_projection_model(dim: usize, seed: u64) -> Result<ModelRepresentation, String> {
    let set = projection_set_pi_qpt(dim).map_err(err)?;
    let states = set.projections.iter().map(|p| DensityMatrix::new(p.mat.clone(), p.label.clone())).collect();
    let effects = set.projections.iter().map(|p| Effect::new(p.mat.clone(), p.label.clone())).collect();
    let mut rng = rng_from_seed(seed);
    let maps = (0..2)
        .map(|j| random_channel(&mut rng, dim, dim * dim).map(|m| m.with_label(format!("M{j}"))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    ModelRepresentation::new(dim, states, maps, effects).map_err(err)
}

/// Linear-inversion tomography of a hidden model from sampled data, gauge
/// fixed with the true fiducial states, for each shot count.
pub fn lgst_error(dim: usize, seed: u64, shots: &[u64]) -> Result<Value, String> {
    let hidden = pair_projection_model(dim, seed)?;
    let idx: Vec<usize> = (0..dim * dim).collect();
    let exact = collect_dataset(&hidden, &idx, &idx).map_err(err)?;
    let truth = FiducialFrame::from_model(&hidden, &idx, &idx).map_err(err)?;
    let mut rows = Vec::new();
    for (k, &n) in shots.iter().enumerate() {
        let ds = exact.sampled(n, seed.wrapping_add(k as u64)).map_err(err)?;
        match lgst_reconstruct(&ds).and_then(|r| Ok((gauge_fix(&r.model, &truth)?, r.condition_number))) {
            Ok((fixed, cond)) => {
                rows.push(json!({ "shots": n, "max_dev": fixed.max_deviation(&hidden), "condition_number": cond }))
            }
            Err(e) => rows.push(json!({ "shots": n, "error": e.to_string() })),
        }
    }
    Ok(json!({ "dim": dim, "seed": seed, "rows": rows }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = windowScan)]
pub fn window_scan_js(dim: usize, seed: u32, steps: usize) -> Result<String, JsValue> {
    to_js(window_scan(dim, seed as u64, steps))
}

#[wasm_bindgen(js_name = sndPhases)]
pub fn snd_phases_js(dim: usize, seed: u32, order: u32) -> Result<String, JsValue> {
    to_js(snd_phases(dim, seed as u64, order))
}

#[wasm_bindgen(js_name = lgstError)]
pub fn lgst_error_js(dim: usize, seed: u32, shots: Vec<u32>) -> Result<String, JsValue> {
    let shots: Vec<u64> = shots.into_iter().map(u64::from).collect();
    to_js(lgst_error(dim, seed as u64, &shots))
}
