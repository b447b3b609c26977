//! Browser bindings: spectra, quench traces and the order-parameter curve.
//! Results are flat `Float64Array`s so the page can plot them directly.

use lmg_otoc::analysis::{quench_sweep, AveragingConfig};
use lmg_otoc::eigen::eigh;
use lmg_otoc::lmg::{critical_lambda as lambda_c, hamiltonian, LmgParams, QuenchSpec};
use lmg_otoc::otoc::{OtocProbe, TimeGrid};
use lmg_otoc::spin::Basis;
use wasm_bindgen::prelude::*;

fn js(e: lmg_otoc::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `E_n / N` for every level of `H(alpha)`, ascending.
#[wasm_bindgen]
pub fn spectrum(n: u32, alpha: f64) -> Result<Vec<f64>, JsError> {
    let params = LmgParams::new(alpha, n).map_err(js)?;
    let dec = eigh(&hamiltonian(params, Basis::X)).map_err(js)?;
    Ok(dec.values().iter().map(|e| e / f64::from(n)).collect())
}

/// `[t, Re F, Im F, C]` per sample, flattened, after the quench with field `lambda`.
#[wasm_bindgen]
pub fn quench_trace(n: u32, alpha: f64, lambda: f64, t_max: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    let spec = QuenchSpec::new(LmgParams::new(alpha, n).map_err(js)?, lambda).map_err(js)?;
    let grid = TimeGrid::uniform(t_max, dt).map_err(js)?;
    let probe = OtocProbe::quench(spec).map_err(js)?;
    Ok(probe
        .evaluate(grid.times())
        .iter()
        .flat_map(|p| [p.t, p.f.re, p.f.im, p.c])
        .collect())
}

/// Normalized long-time average at each field in `lambdas`.
#[wasm_bindgen]
pub fn order_parameter(n: u32, alpha: f64, lambdas: Vec<f64>, t_avg: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    let cfg = AveragingConfig {
        total_time: t_avg,
        dt,
    };
    let grid = quench_sweep(&[alpha], &lambdas, n, cfg).map_err(js)?;
    let row = &grid.rows[0];
    if let Some(e) = &row.error {
        return Err(JsError::new(e));
    }
    Ok(row.cells.iter().map(|c| c.average.value).collect())
}

/// `(4 - 5 alpha) / 2`, or NaN where it is undefined.
#[wasm_bindgen]
pub fn critical_lambda(alpha: f64) -> f64 {
    lambda_c(alpha).unwrap_or(f64::NAN)
}
