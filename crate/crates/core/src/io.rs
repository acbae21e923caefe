//! JSON file formats and report fragments.
//!
//! Triple files come in two flavours, told apart by `"type"`:
//!
//! ```json
//! {"type": "explicit", "points": ["a", "b"], "weights": {"a": "0", "b": "1/2"},
//!  "distances": [["a", "b", "-1"]]}
//! {"type": "padic", "p": 2, "h": 0, "elements": [0, 1, 2], "weights": {"1": "3"}}
//! ```
//!
//! `"type"` may be omitted for explicit files. Rationals are strings (`"p/q"`
//! or an integer); JSON integers are tolerated, other JSON numbers are
//! rejected as float literals.
//!
//! Family files hold the level tables of a monotone family:
//! `{"depth": 2, "tables": [[["-1", "0"], ["0", "1"]], [["-1", "-1"], ["0", "0"]]]}`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::greedoid::{AxiomReport, MaxPerFamily};
use crate::greedy::GreedyTrace;
use crate::padic::{padic_triple, PadicSpec};
use crate::perimeter::MonotoneFamily;
use crate::point::{Point, PointSet};
use crate::property_s::{ReconstructedFamily, ReconstructionMismatch, SCounterexample};
use crate::rat::Rat;
use crate::triple::{build_triple, MonotoneTable, UltraTriple};

/// A parsed triple file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TripleSpec {
    Explicit {
        points: Vec<String>,
        weights: BTreeMap<String, Rat>,
        distances: Vec<(String, String, Rat)>,
    },
    Padic(PadicSpec),
}

impl TripleSpec {
    pub fn build(&self) -> Result<UltraTriple> {
        match self {
            TripleSpec::Explicit {
                points,
                weights,
                distances,
            } => build_triple(points, weights, distances),
            TripleSpec::Padic(spec) => padic_triple(spec),
        }
    }
}

/// Parses and validates a triple file's contents.
pub fn parse_triple(text: &str) -> Result<UltraTriple> {
    parse_triple_spec(text)?.build()
}

pub fn parse_triple_spec(text: &str) -> Result<TripleSpec> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::spec("$", "expected a JSON object"))?;
    match obj.get("type") {
        None => parse_explicit(obj),
        Some(Value::String(s)) if s == "explicit" => parse_explicit(obj),
        Some(Value::String(s)) if s == "padic" => parse_padic(obj).map(TripleSpec::Padic),
        Some(other) => Err(Error::spec(
            "type",
            format!("expected \"explicit\" or \"padic\", got {other}"),
        )),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::spec(name, "missing field"))
}

/// A rational from a string or JSON integer.
pub fn parse_rat_value(v: &Value, at: &str) -> Result<Rat> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|e: crate::rat::ParseRatError| Error::spec(at, e.0)),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rat::from_int(i)),
            None => Err(Error::spec(
                at,
                format!("float literal {n} is not exact; write it as a \"p/q\" string"),
            )),
        },
        other => Err(Error::spec(
            at,
            format!("expected a rational string, got {other}"),
        )),
    }
}

fn parse_explicit(obj: &Map<String, Value>) -> Result<TripleSpec> {
    let points = field(obj, "points")?
        .as_array()
        .ok_or_else(|| Error::spec("points", "expected an array of strings"))?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::spec(format!("points[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;

    let weights = field(obj, "weights")?
        .as_object()
        .ok_or_else(|| Error::spec("weights", "expected an object"))?
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_rat_value(v, &format!("weights.{k}"))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;

    let distances = field(obj, "distances")?
        .as_array()
        .ok_or_else(|| Error::spec("distances", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let at = format!("distances[{i}]");
            let arr = e
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::spec(&at, "expected [pointA, pointB, rational]"))?;
            let a = arr[0]
                .as_str()
                .ok_or_else(|| Error::spec(format!("{at}[0]"), "expected a point label"))?;
            let b = arr[1]
                .as_str()
                .ok_or_else(|| Error::spec(format!("{at}[1]"), "expected a point label"))?;
            let v = parse_rat_value(&arr[2], &format!("{at}[2]"))?;
            Ok((a.to_string(), b.to_string(), v))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TripleSpec::Explicit {
        points,
        weights,
        distances,
    })
}

fn as_int(v: &Value, at: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::spec(at, format!("expected an integer, got {v}")))
}

fn parse_padic(obj: &Map<String, Value>) -> Result<PadicSpec> {
    let p = as_int(field(obj, "p")?, "p")?;
    let p = u64::try_from(p).map_err(|_| Error::spec("p", "must be a positive prime"))?;
    let h = match obj.get("h") {
        None => 0,
        Some(v) => {
            u32::try_from(as_int(v, "h")?).map_err(|_| Error::spec("h", "must be non-negative"))?
        }
    };
    let elements = field(obj, "elements")?
        .as_array()
        .ok_or_else(|| Error::spec("elements", "expected an array of integers"))?
        .iter()
        .enumerate()
        .map(|(i, v)| as_int(v, &format!("elements[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut weights = BTreeMap::new();
    if let Some(w) = obj.get("weights") {
        let w = w
            .as_object()
            .ok_or_else(|| Error::spec("weights", "expected an object"))?;
        for (k, v) in w {
            let at = format!("weights.{k}");
            let e: i64 = k
                .parse()
                .map_err(|_| Error::spec(&at, "key must be an integer element"))?;
            weights.insert(e, parse_rat_value(v, &at)?);
        }
    }
    Ok(PadicSpec::new(p, h, elements).with_weights(weights))
}

/// Parses a monotone family file; decreasing or unsorted tables are errors.
pub fn parse_family(text: &str) -> Result<MonotoneFamily> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::spec("$", "expected a JSON object"))?;
    let depth = as_int(field(obj, "depth")?, "depth")?;
    let tables = field(obj, "tables")?
        .as_array()
        .ok_or_else(|| Error::spec("tables", "expected an array of tables"))?;
    if depth < 1 || tables.len() as i64 != depth {
        return Err(Error::spec(
            "depth",
            format!("depth {depth} does not match {} tables", tables.len()),
        ));
    }
    let mut out = Vec::with_capacity(tables.len());
    for (j, table) in tables.iter().enumerate() {
        let at = format!("tables[{j}]");
        let rows = table
            .as_array()
            .ok_or_else(|| Error::spec(&at, "expected an array of [distance, value] pairs"))?;
        let mut entries: Vec<(Rat, Rat)> = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let at = format!("{at}[{i}]");
            let pair = row
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::spec(&at, "expected [distance, value]"))?;
            let d = parse_rat_value(&pair[0], &format!("{at}[0]"))?;
            let v = parse_rat_value(&pair[1], &format!("{at}[1]"))?;
            if let Some((prev, _)) = entries.last() {
                if *prev >= d {
                    return Err(Error::spec(&at, "distances must be strictly increasing"));
                }
            }
            entries.push((d, v));
        }
        let t = MonotoneTable::new(entries).map_err(|e| Error::spec(&at, e.to_string()))?;
        out.push(t);
    }
    MonotoneFamily::new(out)
}

pub fn family_to_json(f: &MonotoneFamily) -> Value {
    json!({
        "depth": f.depth(),
        "tables": f.tables().iter().map(|t| {
            t.entries().map(|(d, v)| json!([d.to_string(), v.to_string()])).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
    })
}

/// The generic (explicit) form of a triple.
pub fn triple_to_json(t: &UltraTriple) -> Value {
    let mut distances = Vec::new();
    for a in t.points() {
        for b in t.points().filter(|b| *b > a) {
            distances.push(json!([t.label(a), t.label(b), t.d(a, b).to_string()]));
        }
    }
    json!({
        "type": "explicit",
        "points": t.labels(),
        "weights": t.points().map(|p| (t.label(p).to_string(), Value::String(t.weight(p).to_string()))).collect::<Map<_, _>>(),
        "distances": distances,
    })
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn rats_json(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat_json).collect())
}

pub fn seq_json(t: &UltraTriple, seq: &[Point]) -> Value {
    Value::Array(
        seq.iter()
            .map(|&p| Value::String(t.label(p).to_string()))
            .collect(),
    )
}

pub fn set_json(t: &UltraTriple, s: PointSet) -> Value {
    seq_json(t, &s.to_vec())
}

/// Sets as index lists in lexicographic order.
pub fn sorted_members<'a>(sets: impl IntoIterator<Item = &'a PointSet>) -> Vec<Vec<Point>> {
    let mut out: Vec<Vec<Point>> = sets.into_iter().map(|s| s.to_vec()).collect();
    out.sort();
    out
}

pub fn trace_json(t: &UltraTriple, tr: &GreedyTrace) -> Value {
    json!({
        "perm": seq_json(t, &tr.perm),
        "increments": rats_json(&tr.increments),
    })
}

pub fn max_family_json(t: &UltraTriple, fam: &MaxPerFamily) -> Value {
    let by_size: Vec<Value> = fam
        .family
        .by_size
        .iter()
        .zip(&fam.max_value)
        .enumerate()
        .map(|(k, (sets, v))| {
            json!({
                "k": k,
                "max_value": rat_json(v),
                "sets": sorted_members(sets).iter().map(|s| seq_json(t, s)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(by_size)
}

/// `{"axioms": {"i": .., "ii": .., "iii": .., "iv": ..}, "counterexample": ..}`.
pub fn axiom_report_json(t: &UltraTriple, rep: &AxiomReport) -> Value {
    let counterexample = match &rep.counterexample {
        None => Value::Null,
        Some(f) => json!({
            "axiom": f.axiom,
            "A": set_json(t, f.a),
            "B": f.b.map(|b| set_json(t, b)).unwrap_or(Value::Null),
            "details": f.details,
        }),
    };
    json!({
        "axioms": {
            "i": rep.axiom_i,
            "ii": rep.axiom_ii,
            "iii": rep.axiom_iii,
            "iv": rep.axiom_iv,
        },
        "counterexample": counterexample,
    })
}

pub fn s_counterexample_json(t: &UltraTriple, ex: &SCounterexample) -> Value {
    json!({
        "C": set_json(t, ex.c),
        "x": t.label(ex.x),
        "y": t.label(ex.y),
        "lhs": rat_json(&ex.lhs),
        "rhs": rat_json(&ex.rhs),
    })
}

/// `{"tables", "monotone", "verified_to_depth", "counterexample"}`.
pub fn reconstruction_json(
    fam: &ReconstructedFamily,
    verified_to_depth: usize,
    mismatch: Option<&ReconstructionMismatch>,
) -> Value {
    let tables: Vec<Value> = fam
        .tables
        .iter()
        .map(|t| {
            Value::Array(
                t.iter()
                    .map(|(d, v)| json!([d.to_string(), v.to_string()]))
                    .collect(),
            )
        })
        .collect();
    let counterexample = match mismatch {
        Some(m) => json!({
            "profile": m.profile,
            "functional": rat_json(&m.functional),
            "family": rat_json(&m.family),
        }),
        None => match fam.first_decrease {
            Some((m, lo, hi)) => json!({"decreasing_level": m, "lo": lo, "hi": hi}),
            None => Value::Null,
        },
    };
    json!({
        "tables": tables,
        "monotone": fam.monotone,
        "verified_to_depth": verified_to_depth,
        "counterexample": counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NEG_NU2: &str = r#"{"type": "padic", "p": 2, "h": 0, "elements": [0, 1, 2, 3, 4]}"#;

    #[test]
    fn padic_file_matches_hand_table() {
        let t = parse_triple(NEG_NU2).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.distance("0", "4").unwrap(), Rat::from_int(-2));
        assert_eq!(t.distance("1", "2").unwrap(), Rat::zero());
        let again = parse_triple(&triple_to_json(&t).to_string()).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn explicit_file() {
        let text = r#"{"points": ["a", "b", "c"], "weights": {"a": "1/2", "b": 0, "c": "-3"},
            "distances": [["a", "b", "0"], ["a", "c", "0"], ["b", "c", "-1/3"]]}"#;
        let t = parse_triple(text).unwrap();
        assert_eq!(t.weight(Point(0)), &Rat::new(1, 2));
        assert_eq!(t.distance("c", "b").unwrap(), Rat::new(-1, 3));
    }

    #[test]
    fn violation_in_file() {
        let text = r#"{"type": "explicit", "points": ["a", "b", "c"], "weights": {"a": "0", "b": "0", "c": "0"},
            "distances": [["a", "b", "1"], ["a", "c", "0"], ["b", "c", "0"]]}"#;
        let err = parse_triple(text).unwrap_err();
        assert!(
            matches!(err, Error::NotUltrametric(ref v) if v.len() == 1),
            "{err}"
        );
    }

    #[test]
    fn float_literals_name_their_field() {
        let text = r#"{"points": ["a", "b"], "weights": {"a": 0.5, "b": "0"}, "distances": [["a", "b", "0"]]}"#;
        let msg = parse_triple(text).unwrap_err().to_string();
        assert!(msg.contains("weights.a") && msg.contains("float"), "{msg}");
        let text = r#"{"points": ["a", "b"], "weights": {"a": "0", "b": "0"}, "distances": [["a", "b", "1.25"]]}"#;
        let msg = parse_triple(text).unwrap_err().to_string();
        assert!(msg.contains("distances[0][2]"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_location() {
        let msg = parse_triple("{\"points\": [\n  \"a\",,\n]}")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn family_files() {
        let text =
            r#"{"depth": 2, "tables": [[["-1", "0"], ["0", "1"]], [["-1", "-1"], ["0", "0"]]]}"#;
        let f = parse_family(text).unwrap();
        assert_eq!(f.depth(), 2);
        assert_eq!(parse_family(&family_to_json(&f).to_string()).unwrap(), f);
        let decreasing = r#"{"depth": 1, "tables": [[["-1", "2"], ["0", "1"]]]}"#;
        assert!(parse_family(decreasing).is_err());
        let unsorted = r#"{"depth": 1, "tables": [[["0", "1"], ["-1", "1"]]]}"#;
        assert!(parse_family(unsorted).is_err());
        let wrong_depth = r#"{"depth": 2, "tables": [[["0", "1"]]]}"#;
        assert!(parse_family(wrong_depth).is_err());
    }
}
