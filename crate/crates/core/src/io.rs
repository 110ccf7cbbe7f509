//! JSON and DOT serialisation.
//!
//! Rationals serialise as `"p/q"` (or `"n"` for integers) and all
//! integers as decimal strings, so nothing depends on machine word
//! sizes. Vertex keys serialise as their canonical text (`"(1,0)"` for
//! tuples); integer arrays are also accepted on input. Output ordering
//! follows the deterministic orders of the underlying maps, so repeated
//! runs produce byte-identical documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::extension::{ExtTruncation, ExtVertex};
use crate::graph::{ExplicitGraph, Truncation, VertexId, VertexKey};
use crate::group::GroupElement;
use crate::harmonic::{CoherentSystem, ExtendedHarmonic};
use crate::k0::K0Element;
use crate::link::{Link, WeightSystem};
use crate::ratio::Ratio;
use crate::report::Report;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(format!("{what} must be an array")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(format!("{what} must be an object")))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| schema(format!("missing field {name:?}")))
}

fn key_from_json(v: &Value) -> Result<VertexKey> {
    match v {
        Value::String(s) => VertexKey::parse(s),
        Value::Array(parts) => {
            let parts = parts
                .iter()
                .map(|p| {
                    p.as_i64()
                        .ok_or_else(|| schema("tuple key entries must be integers"))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok(VertexKey::tuple(parts))
        }
        other => Err(schema(format!("vertex key must be a string or array, got {other}"))),
    }
}

fn natural_from_json(v: &Value, what: &str) -> Result<BigUint> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(schema(format!("{what} must be an integer, got {other}"))),
    };
    text.parse::<BigUint>()
        .map_err(|_| schema(format!("{what} must be a non-negative integer, got {text:?}")))
}

fn ratio_from_json(v: &Value, what: &str) -> Result<Ratio> {
    match v {
        Value::String(s) => Ratio::from_str(s),
        Value::Number(n) if n.is_i64() => Ok(Ratio::from_int(n.as_i64().unwrap())),
        other => Err(schema(format!("{what} must be a rational string, got {other}"))),
    }
}

/// Resolves keys to vertices of a truncation; keys must be unique
/// across levels for key-only addressing to be sound.
fn key_index(t: &Truncation) -> Result<BTreeMap<VertexKey, VertexId>> {
    let mut index = BTreeMap::new();
    for v in t.vertices() {
        if index.insert(v.key.clone(), v.clone()).is_some() {
            return Err(schema(format!(
                "key {} appears on several levels; key-only addressing is ambiguous",
                v.key
            )));
        }
    }
    Ok(index)
}

// ---------------------------------------------------------------------
// graphs

/// `{"levels": [[key, ...], ...], "edges": [{"child","parent","m"}, ...]}`
pub fn truncation_to_json(t: &Truncation) -> Value {
    let levels: Vec<Value> = (0..=t.top_level())
        .map(|n| {
            Value::Array(
                t.level(n)
                    .iter()
                    .map(|v| Value::String(v.key.to_string()))
                    .collect(),
            )
        })
        .collect();
    let edges: Vec<Value> = t
        .edges()
        .map(|((child, parent), m)| {
            json!({
                "child": child.key.to_string(),
                "parent": parent.key.to_string(),
                "m": m.to_string(),
            })
        })
        .collect();
    json!({ "levels": levels, "edges": edges })
}

pub fn graph_from_json(v: &Value) -> Result<ExplicitGraph> {
    let obj = as_object(v, "graph")?;
    let mut levels = Vec::new();
    for level in as_array(field(obj, "levels")?, "levels")? {
        let keys = as_array(level, "level")?
            .iter()
            .map(key_from_json)
            .collect::<Result<Vec<VertexKey>>>()?;
        levels.push(keys);
    }
    let mut edges = Vec::new();
    for edge in as_array(field(obj, "edges")?, "edges")? {
        let edge = as_object(edge, "edge")?;
        let child = key_from_json(field(edge, "child")?)?;
        let parent = key_from_json(field(edge, "parent")?)?;
        let m = match edge.get("m") {
            Some(m) => natural_from_json(m, "m")?,
            None => BigUint::from(1u32),
        };
        edges.push((child, parent, m));
    }
    ExplicitGraph::new(levels, edges)
}

// ---------------------------------------------------------------------
// links and weight systems

/// `{"edges": [{"child","parent","kappa"}, ...]}`
pub fn link_to_json(k: &Link) -> Value {
    let edges: Vec<Value> = k
        .entries()
        .map(|((child, parent), value)| {
            json!({
                "child": child.key.to_string(),
                "parent": parent.key.to_string(),
                "kappa": value.to_string(),
            })
        })
        .collect();
    json!({ "edges": edges })
}

pub fn link_from_json(t: &Truncation, v: &Value) -> Result<Link> {
    let index = key_index(t)?;
    let obj = as_object(v, "link")?;
    let mut kernel = BTreeMap::new();
    for edge in as_array(field(obj, "edges")?, "edges")? {
        let edge = as_object(edge, "edge")?;
        let child_key = key_from_json(field(edge, "child")?)?;
        let parent_key = key_from_json(field(edge, "parent")?)?;
        let child = index
            .get(&child_key)
            .ok_or_else(|| schema(format!("unknown child key {child_key}")))?;
        let parent = index
            .get(&parent_key)
            .ok_or_else(|| schema(format!("unknown parent key {parent_key}")))?;
        let kappa = ratio_from_json(field(edge, "kappa")?, "kappa")?;
        kernel.insert((child.clone(), parent.clone()), kappa);
    }
    Ok(Link::new(kernel))
}

pub fn weight_system_to_json(ws: &WeightSystem) -> Value {
    let vertex_entries = |iter: &mut dyn Iterator<Item = (&VertexId, &Ratio)>| -> Vec<Value> {
        iter.map(|(v, value)| {
            json!({
                "level": v.level,
                "vertex": v.key.to_string(),
                "value": value.to_string(),
            })
        })
        .collect()
    };
    let rho: Vec<Value> = ws
        .rho_entries()
        .map(|((child, parent), value)| {
            json!({
                "child": child.key.to_string(),
                "parent": parent.key.to_string(),
                "value": value.to_string(),
            })
        })
        .collect();
    json!({
        "kdim": vertex_entries(&mut ws.kdim_entries()),
        "kdim_sq": vertex_entries(&mut ws.kdim_sq_entries()),
        "rho": rho,
        "generators": ws.generators().iter().map(|g| g.to_string()).collect::<Vec<String>>(),
        "base": ws.base().map(|b| Value::String(b.to_string())).unwrap_or(Value::Null),
    })
}

// ---------------------------------------------------------------------
// extended objects

fn ext_vertex_to_json(v: &ExtVertex, base: Option<&GroupElement>) -> Value {
    let mut obj = Map::new();
    obj.insert("z".into(), Value::String(v.z.key.to_string()));
    obj.insert("level".into(), json!(v.level()));
    obj.insert("gamma".into(), Value::String(v.gamma.value().to_string()));
    if let Some(base) = base {
        if let Some(grade) = v.gamma.grade_in(base) {
            obj.insert("grade".into(), json!(grade));
        }
    }
    Value::Object(obj)
}

fn base_element(ws: &WeightSystem) -> Option<GroupElement> {
    ws.base().map(|b| GroupElement::from_ratio(b).expect("base is positive"))
}

pub fn ext_truncation_to_json(x: &ExtTruncation) -> Value {
    let base = base_element(x.weight_system());
    let levels: Vec<Value> = (0..=x.top_level())
        .map(|n| {
            Value::Array(
                x.level(n)
                    .iter()
                    .map(|v| ext_vertex_to_json(v, base.as_ref()))
                    .collect(),
            )
        })
        .collect();
    let edges: Vec<Value> = x
        .edges()
        .map(|(child, parent)| {
            json!({
                "child": ext_vertex_to_json(child, base.as_ref()),
                "parent": ext_vertex_to_json(parent, base.as_ref()),
            })
        })
        .collect();
    json!({ "levels": levels, "edges": edges })
}

/// `{"depth": N, "levels": [{key: "p/q", ...}, ...]}`
pub fn coherent_to_json(nu: &CoherentSystem) -> Value {
    let levels: Vec<Value> = (0..=nu.depth())
        .map(|n| {
            let mut obj = Map::new();
            for (v, value) in nu.level_support(n) {
                obj.insert(v.key.to_string(), Value::String(value.to_string()));
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "depth": nu.depth(), "levels": levels })
}

pub fn coherent_from_json(v: &Value) -> Result<CoherentSystem> {
    let obj = as_object(v, "coherent system")?;
    let depth = field(obj, "depth")?
        .as_u64()
        .ok_or_else(|| schema("depth must be a non-negative integer"))? as usize;
    let levels_json = as_array(field(obj, "levels")?, "levels")?;
    if levels_json.len() != depth + 1 {
        return Err(schema(format!(
            "expected {} levels, got {}",
            depth + 1,
            levels_json.len()
        )));
    }
    let mut levels = Vec::new();
    for (n, level) in levels_json.iter().enumerate() {
        let mut map = BTreeMap::new();
        for (key, value) in as_object(level, "level")? {
            let key = VertexKey::parse(key)?;
            map.insert(VertexId::new(n, key), ratio_from_json(value, "value")?);
        }
        levels.push(map);
    }
    CoherentSystem::new(levels)
}

pub fn extended_to_json(nu: &ExtendedHarmonic, ws: &WeightSystem) -> Value {
    let base = base_element(ws);
    let levels: Vec<Value> = (0..=nu.depth())
        .map(|n| {
            Value::Array(
                nu.level_support(n)
                    .iter()
                    .map(|(v, value)| {
                        let mut obj = ext_vertex_to_json(v, base.as_ref());
                        obj.as_object_mut()
                            .unwrap()
                            .insert("value".into(), Value::String(value.to_string()));
                        obj
                    })
                    .collect(),
            )
        })
        .collect();
    json!({ "depth": nu.depth(), "beta": nu.beta(), "levels": levels })
}

pub fn k0_to_json(f: &K0Element, ws: &WeightSystem) -> Value {
    let base = base_element(ws);
    let values: Vec<Value> = f
        .support()
        .map(|(v, value)| {
            let mut obj = ext_vertex_to_json(v, base.as_ref());
            obj.as_object_mut()
                .unwrap()
                .insert("value".into(), Value::String(value.to_string()));
            obj
        })
        .collect();
    json!({ "level": f.level(), "values": values })
}

pub fn report_to_json(r: &Report) -> Value {
    let items: Vec<Value> = r
        .items
        .iter()
        .map(|item| {
            json!({
                "check": item.check,
                "status": item.status.as_str(),
                "location": item.location.clone().map(Value::String).unwrap_or(Value::Null),
                "detail": item.detail,
            })
        })
        .collect();
    json!({ "ok": r.ok(), "items": items })
}

// ---------------------------------------------------------------------
// DOT

fn dot_escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// DOT digraph with one rank per level; edges point child -> parent.
pub fn truncation_to_dot(t: &Truncation) -> String {
    let mut out = String::new();
    out.push_str("digraph truncation {\n  rankdir=BT;\n  node [shape=box];\n");
    for n in 0..=t.top_level() {
        let _ = write!(out, "  {{ rank=same;");
        for v in t.level(n) {
            let _ = write!(out, " \"{}\";", dot_escape(&format!("{}:{}", n, v.key)));
        }
        out.push_str(" }\n");
    }
    for n in 0..=t.top_level() {
        for v in t.level(n) {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\"];",
                dot_escape(&format!("{}:{}", n, v.key)),
                dot_escape(&v.key.to_string())
            );
        }
    }
    for ((child, parent), m) in t.edges() {
        let label = if num_traits::One::is_one(m) {
            String::new()
        } else {
            format!(" [label=\"{m}\"]")
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\"{};",
            dot_escape(&format!("{}:{}", parent.level, parent.key)),
            dot_escape(&format!("{}:{}", child.level, child.key)),
            label
        );
    }
    out.push_str("}\n");
    out
}

pub fn ext_truncation_to_dot(x: &ExtTruncation) -> String {
    let base = base_element(x.weight_system());
    let name = |v: &ExtVertex| format!("{}:{}:{}", v.level(), v.z.key, v.gamma.value());
    let label = |v: &ExtVertex| match &base {
        Some(b) => match v.gamma.grade_in(b) {
            Some(grade) => format!("{} @ b^{}", v.z.key, grade),
            None => format!("{} @ {}", v.z.key, v.gamma.value()),
        },
        None => format!("{} @ {}", v.z.key, v.gamma.value()),
    };
    let mut out = String::new();
    out.push_str("digraph extension {\n  rankdir=BT;\n  node [shape=box];\n");
    for n in 0..=x.top_level() {
        let _ = write!(out, "  {{ rank=same;");
        for v in x.level(n) {
            let _ = write!(out, " \"{}\";", dot_escape(&name(v)));
        }
        out.push_str(" }\n");
    }
    for n in 0..=x.top_level() {
        for v in x.level(n) {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\"];",
                dot_escape(&name(v)),
                dot_escape(&label(v))
            );
        }
    }
    for (child, parent) in x.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            dot_escape(&name(parent)),
            dot_escape(&name(child))
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{truncate, GraphProvider, LevelSeed, PascalGraph};
    use crate::link::{kappa_dim, standard_link, validate_link, weights};

    fn pascal(depth: usize) -> Truncation {
        let g = PascalGraph;
        let LevelSeed::Finite(seeds) = g.level_seed(depth) else {
            unreachable!()
        };
        truncate(&g, &seeds).unwrap()
    }

    #[test]
    fn truncation_round_trips_through_json() {
        let t = pascal(3);
        let doc = truncation_to_json(&t);
        let g = graph_from_json(&doc).unwrap();
        let LevelSeed::Finite(seeds) = g.level_seed(3) else {
            unreachable!()
        };
        let t2 = truncate(&g, &seeds).unwrap();
        assert_eq!(truncation_to_json(&t2), doc);
    }

    #[test]
    fn link_round_trips_through_json() {
        let t = pascal(3);
        let k = standard_link(&t);
        let doc = link_to_json(&k);
        let k2 = link_from_json(&t, &doc).unwrap();
        assert!(validate_link(&t, &k2).ok());
        assert_eq!(link_to_json(&k2), doc);
    }

    #[test]
    fn malformed_documents_are_schema_errors() {
        for text in [
            "[]",
            "{\"levels\": [[\"a\"],[\"b\"]]}",
            "{\"levels\": [[\"a\"]], \"edges\": [{\"child\": \"x\"}]}",
        ] {
            let value: Value = serde_json::from_str(text).unwrap();
            assert!(matches!(graph_from_json(&value), Err(Error::Schema(_))), "{text}");
        }
    }

    #[test]
    fn weight_system_and_dot_render() {
        let t = pascal(2);
        let k = standard_link(&t);
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        let doc = weight_system_to_json(&ws);
        assert_eq!(doc["base"], Value::Null);
        assert_eq!(doc["generators"], json!(["1"]));
        let dot = truncation_to_dot(&t);
        assert!(dot.contains("digraph"));
        assert!(dot.contains("(2,1)"));
    }

    #[test]
    fn coherent_system_round_trips() {
        use crate::harmonic::pullback;
        let t = pascal(3);
        let k = standard_link(&t);
        let top: std::collections::BTreeMap<_, _> = t
            .level(3)
            .iter()
            .map(|v| (v.clone(), Ratio::new(1, 4)))
            .collect();
        let nu = pullback(&t, &k, &top).unwrap();
        let doc = coherent_to_json(&nu);
        let back = coherent_from_json(&doc).unwrap();
        assert_eq!(back, nu);
        assert!(coherent_from_json(&json!({"depth": 2, "levels": []})).is_err());
    }

    #[test]
    fn emitted_rationals_parse_back() {
        let t = pascal(4);
        let k = standard_link(&t);
        let doc = link_to_json(&k);
        for edge in doc["edges"].as_array().unwrap() {
            let s = edge["kappa"].as_str().unwrap();
            let parsed: Ratio = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
    }
}
