//! wasm bindings for the browser demo. Each entry point returns a JSON string;
//! errors come back as thrown strings.

use num_rational::BigRational;
use serde_json::json;
use wasm_bindgen::prelude::*;

use unitdist_core::arith::parse_rational;
use unitdist_core::construct::{
    build_pointset, conjugate_free_primes, pigeonhole_units, select_translate, theorem_parameters, SearchParams, WindowConfig,
};
use unitdist_core::numberfield::preset;
use unitdist_core::unitdist::{erdos_grid, float_unit_pairs};

/// Point counts above this are refused so the page stays responsive.
pub const MAX_POINTS: usize = 5000;

fn q(s: &str) -> Result<BigRational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("not a rational: {s:?}"))
}

/// Window construction: pigeonhole units for `prime^k`, lattice window of
/// radius `r`, best of `translates` Halton offsets.
pub fn window(field: &str, prime: u64, k: u32, r: &str, translates: u32) -> Result<String, String> {
    let field = preset(field).map_err(|e| e.to_string())?;
    let r = q(r)?;
    if r < BigRational::from_integer(2.into()) {
        return Err("R must be at least 2".into());
    }
    let scale = BigRational::from_integer(1.into());
    let mut primes = Vec::new();
    if k > 0 && prime > 1 {
        for pr in conjugate_free_primes(&field, prime).map_err(|e| e.to_string())? {
            primes.push((pr, k));
        }
    }
    let units = pigeonhole_units(&field, &primes, &SearchParams::default()).map_err(|e| e.to_string())?;
    let translate = if translates > 0 {
        Some(select_translate(&field, &scale, &r, translates).map_err(|e| e.to_string())?.0)
    } else {
        None
    };
    let cfg = WindowConfig { r, translate, scale, projection: 0 };
    let (ps, report) = build_pointset(&field, &units, &cfg).map_err(|e| e.to_string())?;
    if ps.len() > MAX_POINTS {
        return Err(format!("{} points; the demo stops at {MAX_POINTS}", ps.len()));
    }
    let pts = ps.approx();
    let pairs = float_unit_pairs(&pts, 1e-6).map_err(|e| e.to_string())?;
    Ok(json!({ "report": report, "points": pts, "pairs": pairs }).to_string())
}

/// Square grid of `n` points rescaled to its most frequent distance.
pub fn grid(n: u64) -> Result<String, String> {
    if n as usize > MAX_POINTS {
        return Err(format!("the demo stops at {MAX_POINTS} points"));
    }
    let g = erdos_grid(n).map_err(|e| e.to_string())?;
    let pairs = float_unit_pairs(&g.points, 1e-9).map_err(|e| e.to_string())?;
    Ok(json!({
        "side": g.side,
        "m": g.m,
        "representations": g.representations,
        "predicted_pairs": g.predicted_pairs,
        "measured_pairs": pairs.len(),
        "points": g.points,
        "pairs": pairs,
    })
    .to_string())
}

/// Exponent ledger for a comma-separated prime set and split prime `p`.
pub fn exponent(t: &str, p: u64) -> Result<String, String> {
    let t = t
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("not a prime: {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let ledger = theorem_parameters(&t, p, 256).map_err(|e| e.to_string())?;
    Ok(ledger.to_json().to_string())
}

#[wasm_bindgen]
pub fn window_demo(field: &str, prime: u32, k: u32, r: &str, translates: u32) -> Result<String, JsValue> {
    window(field, prime as u64, k, r, translates).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn grid_demo(n: u32) -> Result<String, JsValue> {
    grid(n as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn exponent_demo(t: &str, p: u32) -> Result<String, JsValue> {
    exponent(t, p as u64).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn gaussian_window() {
        let v = parse(&window("gaussian", 5, 2, "2", 0).unwrap());
        assert_eq!(v["points"].as_array().unwrap().len(), 13);
        assert_eq!(v["pairs"].as_array().unwrap().len(), 16);
        assert_eq!(v["report"]["measured_unit_pairs"], 16);
    }

    #[test]
    fn small_grid() {
        let v = parse(&grid(25).unwrap());
        assert_eq!(v["m"], 5);
        assert_eq!(v["measured_pairs"], v["predicted_pairs"]);
        assert!(grid(24).is_err());
        assert!(grid(10_000).is_err());
    }

    #[test]
    fn exponent_ledger() {
        let v = parse(&exponent("3", 13).unwrap());
        assert_eq!(v["k"], "1237");
        assert!(exponent("x", 13).is_err());
    }

    #[test]
    fn rejects_small_windows() {
        assert!(window("gaussian", 5, 1, "3/2", 0).is_err());
        assert!(window("nope", 5, 1, "2", 0).is_err());
    }
}
