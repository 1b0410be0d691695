//! WebAssembly entry points for the static page in `www/`.
//!
//! Each export returns a JSON document. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use ltlab::arith::WittCtx;
use ltlab::ring::Ring;
use ltlab::stabilizer::StabElt;
use ltlab::verdicts;

const MAX_P: u64 = 13;

fn check_p(p: u64) -> Result<(), String> {
    if p > MAX_P || !ltlab::ring::is_prime(p) {
        return Err(format!("p must be a prime at most {MAX_P}"));
    }
    Ok(())
}

pub fn shifts_json(p: u64, n: u32, k: u32) -> Result<String, String> {
    check_p(p)?;
    let s = verdicts::duality_shifts(p, n, k).map_err(|e| e.to_string())?;
    Ok(json!({ "schema": ltlab::SCHEMA, "shifts": s }).to_string())
}

/// Determinant and zeta of `g`; zeta is omitted for non-units.
pub fn det_json(p: u64, n: u32, k: u32, g: &str) -> Result<String, String> {
    check_p(p)?;
    if !(1..=3).contains(&n) {
        return Err("n must lie in 1..=3".into());
    }
    let ctx = WittCtx::new(p, n as usize, k).map_err(|e| e.to_string())?;
    let g = StabElt::parse(ctx, g).map_err(|e| e.to_string())?;
    let det = g.det().map_err(|e| e.to_string())?;
    let zeta = if g.is_unit() && p > 2 && k >= 3 { g.zeta().ok() } else { None };
    Ok(json!({
        "schema": ltlab::SCHEMA,
        "g": g.to_string(),
        "det": ctx.format(&det),
        "zeta": zeta,
    })
    .to_string())
}

pub fn hyp_json(p: u64, n: u32) -> Result<String, String> {
    check_p(p)?;
    let v = verdicts::hyp_check(p, n).map_err(|e| e.to_string())?;
    Ok(json!({ "schema": ltlab::SCHEMA, "holds": v.passed(), "verdict": v }).to_string())
}

#[wasm_bindgen]
pub fn shifts(p: u32, n: u32, k: u32) -> Result<String, JsValue> {
    shifts_json(p.into(), n, k).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn det(p: u32, n: u32, k: u32, g: &str) -> Result<String, JsValue> {
    det_json(p.into(), n, k, g).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn hyp(p: u32, n: u32) -> Result<String, JsValue> {
    hyp_json(p.into(), n).map_err(|e| JsValue::from_str(&e))
}
