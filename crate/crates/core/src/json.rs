//! JSON encodings of the core objects. Rationals always serialize as
//! explicit `p/q` strings; maps and lists keep deterministic ordering.

use serde_json::{json, Map, Value};

use crate::edgespace::EdgeVector;
use crate::error::{Error, Result};
use crate::graphs::{Family, FiniteMetricSpace, RecursiveGraph};
use crate::rational::{parse_rat, rat_f64, rat_str};
use crate::spaces::OrthoBasis;
use crate::transport::{TransportPlan, TransportProblem};

pub fn graph_to_json(g: &RecursiveGraph) -> Value {
    let mut obj = Map::new();
    match g.family() {
        Family::Laakso => {
            obj.insert("kind".into(), json!("laakso"));
        }
        Family::Diamond { k } => {
            obj.insert("kind".into(), json!("diamond"));
            obj.insert("k".into(), json!(k));
        }
    }
    obj.insert("n".into(), json!(g.level()));
    obj.insert("vertices".into(), json!(g.vertex_count()));
    obj.insert(
        "edges".into(),
        Value::Array(g.edges().iter().map(|&(u, v)| json!([u, v])).collect()),
    );
    obj.insert("bottom".into(), json!(g.bottom()));
    obj.insert("top".into(), json!(g.top()));
    Value::Object(obj)
}

pub fn metric_to_json(m: &FiniteMetricSpace) -> Value {
    let dist: Vec<Value> = (0..m.len())
        .map(|u| Value::Array((0..m.len()).map(|v| json!(rat_str(m.dist(u, v)))).collect()))
        .collect();
    json!({ "points": m.labels(), "dist": dist })
}

pub fn metric_from_json(v: &Value) -> Result<FiniteMetricSpace> {
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("space document needs a `points` array".into()))?;
    let labels: Vec<String> = points
        .iter()
        .map(|p| {
            p.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse("point labels must be strings".into()))
        })
        .collect::<Result<_>>()?;
    let dist_rows = v
        .get("dist")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("space document needs a `dist` matrix".into()))?;
    if dist_rows.len() != labels.len() {
        return Err(Error::Parse(
            "dist matrix size does not match points".into(),
        ));
    }
    let mut dist = Vec::with_capacity(labels.len());
    for row in dist_rows {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::Parse("dist rows must be arrays".into()))?;
        if cells.len() != labels.len() {
            return Err(Error::Parse("dist matrix must be square".into()));
        }
        dist.push(
            cells
                .iter()
                .map(parse_rat_value)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let space = FiniteMetricSpace::new(labels, dist);
    space.verify_metric()?;
    Ok(space)
}

fn parse_rat_value(v: &Value) -> Result<crate::rational::Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::rational::int(i))
            } else {
                Err(Error::Parse(format!(
                    "non-integer numeric literal {n}; use \"p/q\""
                )))
            }
        }
        other => Err(Error::Parse(format!("cannot read a rational from {other}"))),
    }
}

pub fn problem_from_json(space: &FiniteMetricSpace, v: &Value) -> Result<TransportProblem> {
    let values = v
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("problem document needs a `values` object".into()))?;
    let mut entries = Vec::with_capacity(values.len());
    for (label, val) in values {
        let point = space
            .index_of(label)
            .ok_or_else(|| Error::Parse(format!("unknown point {label:?}")))?;
        entries.push((point, parse_rat_value(val)?));
    }
    TransportProblem::new(space.len(), entries)
}

pub fn plan_to_json(space: &FiniteMetricSpace, plan: &TransportPlan) -> Value {
    Value::Array(
        plan.moves
            .iter()
            .map(|(u, v, a)| json!([space.labels()[*u], space.labels()[*v], rat_str(a)]))
            .collect(),
    )
}

pub fn vector_to_json(x: &EdgeVector) -> Value {
    let mut obj = Map::new();
    for (e, c) in x.support() {
        obj.insert(e.to_string(), json!(rat_str(c)));
    }
    Value::Object(obj)
}

pub fn vector_from_json(edges: usize, v: &Value) -> Result<EdgeVector> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("vector document must be an object".into()))?;
    let mut out = EdgeVector::zero(edges);
    for (key, val) in obj {
        let e: usize = key
            .parse()
            .map_err(|_| Error::Parse(format!("bad edge index {key:?}")))?;
        if e >= edges {
            return Err(Error::Parse(format!(
                "edge index {e} out of range (0..{edges})"
            )));
        }
        out.set(e, parse_rat_value(val)?);
    }
    Ok(out)
}

pub fn basis_to_json(basis: &OrthoBasis) -> Value {
    let elements: Vec<Value> = basis
        .elements()
        .iter()
        .map(|el| {
            json!({
                "class": el.class.label(),
                "level": el.level,
                "address": el.address.to_string(),
                "l1": rat_str(&el.l1),
                "l2_sq": rat_str(&el.l2_sq),
                "coefficients": vector_to_json(&el.vector),
            })
        })
        .collect();
    json!({
        "n": basis.n(),
        "cycle_count": basis.cycle_count(),
        "cut_count": basis.cut_count(),
        "elements": elements,
    })
}

/// A rational together with a decimal convenience field.
pub fn rat_json(r: &crate::rational::Rat) -> Value {
    json!({ "exact": rat_str(r), "decimal": rat_f64(r) })
}
