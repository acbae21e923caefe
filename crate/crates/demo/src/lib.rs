//! Browser bindings: three operations on p-adic ultra triples over `{0, ..., n-1}`,
//! each returning a JSON string for the page in `www/`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ultragreedoid::greedoid::{check_greedoid_axioms, max_perimeter_sets, FAMILY_CAP};
use ultragreedoid::io::{axiom_report_json, max_family_json, rats_json, seq_json};
use ultragreedoid::padic::{legendre_nu_factorial, padic_triple, PadicSpec};
use ultragreedoid::{greedy_order, UltraTriple};

/// Largest ground set the page may request for orderings and heatmaps.
pub const MAX_POINTS: u32 = 64;

fn natural_triple(p: u32, h: u32, n: u32, cap: u32) -> Result<UltraTriple, String> {
    if n == 0 || n > cap {
        return Err(format!("n must be between 1 and {cap}"));
    }
    padic_triple(&PadicSpec::new(p.into(), h, (0..i64::from(n)).collect()))
        .map_err(|e| e.to_string())
}

/// Greedy ordering of `{0, ..., n-1}` with its increments and, for comparison,
/// `-nu_p(k!)` from Legendre's formula.
pub fn signature_report(p: u32, h: u32, n: u32, r: u32) -> Result<Value, String> {
    let t = natural_triple(p, h, n, MAX_POINTS)?;
    let tr = greedy_order(&t, t.ground(), t.len(), r as usize).map_err(|e| e.to_string())?;
    let legendre: Vec<String> = (0..u64::from(n))
        .map(|k| (-(legendre_nu_factorial(k, p.into()) as i64)).to_string())
        .collect();
    Ok(json!({
        "perm": seq_json(&t, &tr.perm),
        "increments": rats_json(&tr.increments),
        "legendre": legendre,
    }))
}

/// The distance matrix as rows of canonical rational strings.
pub fn distance_report(p: u32, h: u32, n: u32) -> Result<Value, String> {
    let t = natural_triple(p, h, n, MAX_POINTS)?;
    let rows: Vec<Vec<String>> = t
        .points()
        .map(|a| {
            t.points()
                .map(|b| {
                    if a == b {
                        String::new()
                    } else {
                        t.d(a, b).to_string()
                    }
                })
                .collect()
        })
        .collect();
    Ok(json!({"labels": t.labels(), "rows": rows}))
}

/// Maximum-perimeter sets of every size and the greedoid axiom check.
pub fn greedoid_report(p: u32, h: u32, n: u32, r: u32) -> Result<Value, String> {
    let t = natural_triple(p, h, n, FAMILY_CAP as u32)?;
    let fam = max_perimeter_sets(&t, r as usize, t.len(), FAMILY_CAP).map_err(|e| e.to_string())?;
    let axioms = check_greedoid_axioms(&fam.family);
    Ok(json!({
        "sizes": max_family_json(&t, &fam),
        "report": axiom_report_json(&t, &axioms),
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn signature(p: u32, h: u32, n: u32, r: u32) -> Result<String, JsValue> {
    to_js(signature_report(p, h, n, r))
}

#[wasm_bindgen]
pub fn distances(p: u32, h: u32, n: u32) -> Result<String, JsValue> {
    to_js(distance_report(p, h, n))
}

#[wasm_bindgen]
pub fn greedoid(p: u32, h: u32, n: u32, r: u32) -> Result<String, JsValue> {
    to_js(greedoid_report(p, h, n, r))
}
