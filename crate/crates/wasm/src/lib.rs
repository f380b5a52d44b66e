//! Browser bindings for the demo page. Every export takes plain strings and
//! integers and returns a JSON string: the result, or `{"error": {kind,
//! message}}`.

use serde_json::{json, Value};
use tubular::algebra::build_c4;
use tubular::error::{Error, Result};
use tubular::irrational::QuadIrrational;
use tubular::lattice::DimVector;
use tubular::omega::enumerate_omega;
use tubular::rational::parse_q;
use tubular::search::{gap_vector, verify_gap_certificate};
use wasm_bindgen::prelude::*;

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string(),
    }
}

fn gap(lambda: &str, r: &str, eps: &str, k: u32) -> Result<Value> {
    let lat = build_c4(parse_q(lambda)?)?.lattice()?;
    let cert = gap_vector(&lat, &QuadIrrational::parse(r)?, &parse_q(eps)?, i64::from(k))?;
    let verified = verify_gap_certificate(&lat, &cert).is_ok();
    Ok(json!({
        "r": cert.r.to_string(),
        "a": cert.a,
        "b": cert.b,
        "slope": cert.slope.to_string(),
        "mu": cert.mu,
        "budget": cert.competitor_scan_budget,
        "nearest_competitor": {
            "a": cert.nearest_competitor.a,
            "b": cert.nearest_competitor.b,
            "slope": cert.nearest_competitor.slope.to_string(),
            "mu": cert.nearest_competitor.mu,
        },
        "witness_count": cert.witnesses.len(),
        "verified": verified,
    }))
}

fn omega(lambda: &str) -> Result<Value> {
    let spec = build_c4(parse_q(lambda)?)?;
    let lat = spec.lattice()?;
    let set = enumerate_omega(&spec)?;
    // Elements with ⟨h∞, y⟩ = 0 and ⟨h0, y⟩ ≤ 0 have no slope; they list as null.
    let rows: Vec<Value> = set
        .elements
        .iter()
        .map(|y| json!({ "y": y.0, "slope": lat.slope(y).ok().map(|s| s.to_string()), "mu": lat.mu(y) }))
        .collect();
    Ok(json!({ "bound": set.bound, "count": set.count, "elements": rows }))
}

fn slope_of(lambda: &str, a: i32, b: i32, vector: &str) -> Result<Value> {
    let lat = build_c4(parse_q(lambda)?)?.lattice()?;
    let y = if vector.trim().is_empty() {
        DimVector::zero(lat.rank())
    } else {
        DimVector(serde_json::from_str(vector).map_err(|e| Error::Parse(e.to_string()))?)
    };
    let x = &lat.combine(i64::from(a), i64::from(b)) + &y;
    Ok(json!({
        "x": x.0,
        "chi": lat.quadratic(&x)?,
        "mu": lat.mu(&x),
        "h0_pairing": lat.bilinear(lat.h0(), &x)?,
        "hinf_pairing": lat.bilinear(lat.hinf(), &x)?,
        "slope": lat.slope(&x)?.to_string(),
    }))
}

/// Certified gap vector for `r` (e.g. `"sqrt:2"`), window `eps` and slack `k`.
#[wasm_bindgen]
pub fn gap_search(lambda: &str, r: &str, eps: &str, k: u32) -> String {
    respond(gap(lambda, r, eps, k))
}

/// Ω with the slope and total dimension of each element.
#[wasm_bindgen]
pub fn omega_listing(lambda: &str) -> String {
    respond(omega(lambda))
}

/// Invariants of `a·h0 + b·h∞ + y`, with `y` a JSON integer array or empty.
#[wasm_bindgen]
pub fn slope_explorer(lambda: &str, a: i32, b: i32, y: &str) -> String {
    respond(slope_of(lambda, a, b, y))
}
