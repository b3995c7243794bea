//! Conversions between validated JSON documents and engine types, and the
//! canonical text form of every JSON output.

use coulomb_core::affine::AffineWeight;
use coulomb_core::enumeration::GoodnessReport;
use coulomb_core::gauge::{FramedTheory, Grading};
use coulomb_core::quiver::Quiver;
use coulomb_core::weights::WeightVector;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::schema::Schema;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Vertex ids may be written as strings or integers; integers become their
/// decimal string.
pub fn vertex_id(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        other => Err(bad(format!("vertex id must be a string or an integer, got {other}"))),
    }
}

fn int_array(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| bad(format!("{what} entries must be integers"))))
        .collect()
}

/// Quiver from a quiver or theory document (already validated).
pub fn quiver_from(doc: &Value) -> Result<Quiver> {
    let vertices = doc["vertices"]
        .as_array()
        .ok_or_else(|| bad("missing vertices"))?
        .iter()
        .map(vertex_id)
        .collect::<Result<Vec<_>>>()?;
    let arrows = doc["arrows"]
        .as_array()
        .ok_or_else(|| bad("missing arrows"))?
        .iter()
        .map(|a| Ok((vertex_id(&a[0])?, vertex_id(&a[1])?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Quiver::new(&vertices, &arrows)?)
}

pub fn parse_quiver(doc: &Value) -> Result<Quiver> {
    Schema::Quiver.validate(doc)?;
    quiver_from(doc)
}

/// A theory document together with its optional extending vertex.
pub fn parse_theory(doc: &Value) -> Result<(FramedTheory, Option<String>)> {
    Schema::Theory.validate(doc)?;
    let quiver = quiver_from(doc)?;
    let dim_v = int_array(&doc["dimV"], "dimV")?;
    let dim_w = int_array(&doc["dimW"], "dimW")?;
    let splitting = match doc.get("splitting") {
        None => None,
        Some(Value::Array(parts)) => Some(
            parts
                .iter()
                .map(|p| int_array(p, "splitting"))
                .collect::<Result<Vec<_>>>()?,
        ),
        Some(_) => return Err(bad("splitting must be an array")),
    };
    let node = doc.get("affine_node").map(vertex_id).transpose()?;
    Ok((FramedTheory::new(quiver, dim_v, dim_w, splitting)?, node))
}

/// The `dimV` of a quiver-or-theory document, if present.
pub fn dim_v_of(doc: &Value) -> Result<Option<Vec<i64>>> {
    doc.get("dimV").map(|v| int_array(v, "dimV")).transpose()
}

pub fn weight_from(doc: &Value) -> Result<WeightVector> {
    let coords = int_array(&doc["coords"], "coords")?;
    match doc["basis"].as_str() {
        Some("fundamental") => Ok(WeightVector::Fundamental(coords)),
        Some("coroot") => Ok(WeightVector::Coroot(coords)),
        _ => Err(bad("basis must be `fundamental` or `coroot`")),
    }
}

pub fn parse_weight(doc: &Value) -> Result<WeightVector> {
    Schema::Weight.validate(doc)?;
    weight_from(doc)
}

pub fn affine_weight_from(doc: &Value) -> Result<AffineWeight> {
    let level = doc["level"].as_i64().ok_or_else(|| bad("level must be an integer"))?;
    let energy = doc["energy"].as_i64().ok_or_else(|| bad("energy must be an integer"))?;
    Ok(AffineWeight::new(level, weight_from(&doc["finite"])?, energy))
}

pub fn parse_affine_weight(doc: &Value) -> Result<AffineWeight> {
    Schema::AffineWeight.validate(doc)?;
    affine_weight_from(doc)
}

pub fn weight_json(w: &WeightVector) -> Value {
    let basis = match w {
        WeightVector::Fundamental(_) => "fundamental",
        WeightVector::Coroot(_) => "coroot",
    };
    json!({ "basis": basis, "coords": w.coords() })
}

pub fn affine_weight_json(w: &AffineWeight) -> Value {
    json!({ "level": w.level, "finite": weight_json(&w.finite), "energy": w.energy })
}

pub fn quiver_json(q: &Quiver) -> Value {
    let ids = q.vertices();
    json!({
        "vertices": ids,
        "arrows": q.arrows().iter().map(|&(t, h)| json!([ids[t], ids[h]])).collect::<Vec<_>>(),
    })
}

pub fn theory_json(t: &FramedTheory) -> Value {
    let mut doc = quiver_json(t.quiver());
    doc["dimV"] = json!(t.dim_v());
    doc["dimW"] = json!(t.dim_w());
    if let Some(parts) = t.splitting() {
        doc["splitting"] = json!(parts);
    }
    doc
}

pub fn grading_json(g: &Grading) -> Value {
    let mut doc = json!({ "name": g.name() });
    if let Some(alpha) = g.alpha() {
        doc["alpha"] = json!(alpha);
    }
    doc
}

/// Witness entries are JSON integers when they fit in 64 bits and decimal
/// strings otherwise. The slope is an exact rational in half-units.
pub fn report_json(r: &GoodnessReport) -> Value {
    let witness = r.witness.as_ref().map(|w| {
        w.iter()
            .map(|x| x.to_i64().map_or_else(|| json!(x.to_string()), |v| json!(v)))
            .collect::<Vec<_>>()
    });
    json!({
        "verdict": r.verdict.name(),
        "witness": witness,
        "cones_checked": r.cones_checked,
        "slope": r.slope.as_ref().map(|s| s.to_string()),
        "proxy": r.proxy,
    })
}

fn sorted(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, sorted(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// Pretty-printed, key-sorted, ASCII-only JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let pretty = serde_json::to_string_pretty(&sorted(v.clone())).expect("JSON values serialise");
    let mut out = String::with_capacity(pretty.len() + 1);
    for c in pretty.chars() {
        if c.is_ascii() {
            out.push(c);
        } else {
            let mut buf = [0u16; 2];
            for unit in c.encode_utf16(&mut buf) {
                out.push_str(&format!("\\u{unit:04x}"));
            }
        }
    }
    out.push('\n');
    out
}

/// Compact canonical form used for hashing.
pub fn to_canonical(v: &Value) -> String {
    serde_json::to_string(&sorted(v.clone())).expect("JSON values serialise")
}

pub fn parse_text(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("{what} is not valid JSON: {e}")))
}
