//! JSON schemas for the shared artifact formats.
//!
//! Rationals travel as strings (`"3/10"`, `"0.25"`, `"2"`); a float mode
//! renders them as JSON numbers for downstream plotting. Object key order
//! and list order are preserved, so identical inputs serialize to
//! byte-identical outputs.

use serde_json::{json, Map, Value};

use crate::coupling::Coupling;
use crate::dominance::{Certificate, DominanceVerdict, Lattice};
use crate::flow::{Flow, PathMeasure};
use crate::graph::{Digraph, DirectedPath, PartialOrderRelation};
use crate::measure::Measure;
use crate::num::{parse_rat, rat_to_f64, rat_to_string, Rat};
use crate::transport::{TransportResult, WeightedDigraph};
use crate::truncate::TruncatedInstance;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at {path}: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

impl JsonError {
    fn new(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        JsonError { path: path.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumFormat {
    #[default]
    Exact,
    Float,
}

pub fn rat_value(r: &Rat, fmt: NumFormat) -> Value {
    match fmt {
        NumFormat::Exact => Value::String(rat_to_string(r)),
        NumFormat::Float => json!(rat_to_f64(r)),
    }
}

fn rat_at(v: &Value, path: &str) -> Result<Rat, JsonError> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|e| JsonError::new(path, e)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::num::rat(i))
            } else {
                Err(JsonError::new(
                    path,
                    "non-integer numeric literals are ambiguous; pass rationals as strings",
                ))
            }
        }
        other => Err(JsonError::new(path, format!("expected a rational, got {other}"))),
    }
}

fn str_at(v: &Value, path: &str) -> Result<String, JsonError> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| JsonError::new(path, format!("expected a string, got {v}")))
}

fn arr_at<'a>(v: &'a Value, path: &str) -> Result<&'a [Value], JsonError> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| JsonError::new(path, format!("expected an array, got {v}")))
}

fn obj_at<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or_else(|| JsonError::new(path, format!("expected an object, got {v}")))
}

fn field<'a>(v: &'a Value, name: &str, path: &str) -> Result<&'a Value, JsonError> {
    obj_at(v, path)?
        .get(name)
        .ok_or_else(|| JsonError::new(format!("{path}.{name}"), "missing field"))
}

/// `{"vertices": ["a", ...], "edges": [["a", "b"], ...]}`
pub fn digraph_from_json(v: &Value) -> Result<Digraph, JsonError> {
    let vertices: Vec<String> = arr_at(field(v, "vertices", "$")?, "$.vertices")?
        .iter()
        .enumerate()
        .map(|(k, x)| str_at(x, &format!("$.vertices[{k}]")))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for (k, e) in arr_at(field(v, "edges", "$")?, "$.edges")?.iter().enumerate() {
        let path = format!("$.edges[{k}]");
        let pair = arr_at(e, &path)?;
        if pair.len() != 2 {
            return Err(JsonError::new(path, "expected [tail, head]"));
        }
        edges.push((
            str_at(&pair[0], &format!("{path}[0]"))?,
            str_at(&pair[1], &format!("{path}[1]"))?,
        ));
    }
    Digraph::new(vertices, edges).map_err(|e| JsonError::new("$", e))
}

pub fn digraph_to_json(g: &Digraph) -> Value {
    json!({
        "vertices": g.vertices(),
        "edges": g
            .edges()
            .iter()
            .map(|&(i, j)| json!([g.vertex_name(i), g.vertex_name(j)]))
            .collect::<Vec<_>>(),
    })
}

/// `{"pairs": [["a", "b"], ...]}`; reflexive pairs may be omitted.
pub fn relation_from_json(v: &Value) -> Result<PartialOrderRelation, JsonError> {
    let mut pairs = Vec::new();
    for (k, e) in arr_at(field(v, "pairs", "$")?, "$.pairs")?.iter().enumerate() {
        let path = format!("$.pairs[{k}]");
        let pair = arr_at(e, &path)?;
        if pair.len() != 2 {
            return Err(JsonError::new(path, "expected [low, high]"));
        }
        pairs.push((
            str_at(&pair[0], &format!("{path}[0]"))?,
            str_at(&pair[1], &format!("{path}[1]"))?,
        ));
    }
    PartialOrderRelation::from_pairs(pairs).map_err(|e| JsonError::new("$", e))
}

/// Bare object `{"a": "0.5", ...}`; key order is the vertex order.
pub fn sparse_measure_from_json(v: &Value) -> Result<Vec<(String, Rat)>, JsonError> {
    obj_at(v, "$")?
        .iter()
        .map(|(k, w)| Ok((k.clone(), rat_at(w, &format!("$.{k}"))?)))
        .collect()
}

pub fn measure_from_json(v: &Value) -> Result<Measure, JsonError> {
    Measure::new(sparse_measure_from_json(v)?).map_err(|e| JsonError::new("$", e))
}

pub fn measure_to_json(m: &Measure, fmt: NumFormat) -> Value {
    let mut out = Map::new();
    for (v, w) in m.iter() {
        out.insert(v.to_owned(), rat_value(w, fmt));
    }
    Value::Object(out)
}

/// `{"edges": [["a", "b", "0.5"], ...]}`; the digraph is implied by the
/// edge list, vertices in first-appearance order.
pub fn flow_from_json(v: &Value) -> Result<Flow, JsonError> {
    let mut edges = Vec::new();
    let mut values = Vec::new();
    for (k, e) in arr_at(field(v, "edges", "$")?, "$.edges")?.iter().enumerate() {
        let path = format!("$.edges[{k}]");
        let triple = arr_at(e, &path)?;
        if triple.len() != 3 {
            return Err(JsonError::new(path, "expected [tail, head, value]"));
        }
        let a = str_at(&triple[0], &format!("{path}[0]"))?;
        let b = str_at(&triple[1], &format!("{path}[1]"))?;
        let w = rat_at(&triple[2], &format!("{path}[2]"))?;
        edges.push((a.clone(), b.clone()));
        values.push((a, b, w));
    }
    let dg = Digraph::from_edge_list(edges).map_err(|e| JsonError::new("$.edges", e))?;
    Flow::new(dg, values).map_err(|e| JsonError::new("$.edges", e))
}

pub fn flow_to_json(q: &Flow, fmt: NumFormat) -> Value {
    json!({
        "edges": q
            .iter_named()
            .map(|(a, b, w)| json!([a, b, rat_value(w, fmt)]))
            .collect::<Vec<_>>(),
    })
}

/// `{"vertices": [...], "edges": [["a", "b", "1.5"], ...]}`
pub fn weighted_digraph_from_json(v: &Value) -> Result<WeightedDigraph, JsonError> {
    let vertices: Vec<String> = arr_at(field(v, "vertices", "$")?, "$.vertices")?
        .iter()
        .enumerate()
        .map(|(k, x)| str_at(x, &format!("$.vertices[{k}]")))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (k, e) in arr_at(field(v, "edges", "$")?, "$.edges")?.iter().enumerate() {
        let path = format!("$.edges[{k}]");
        let triple = arr_at(e, &path)?;
        if triple.len() != 3 {
            return Err(JsonError::new(path, "expected [tail, head, weight]"));
        }
        let a = str_at(&triple[0], &format!("{path}[0]"))?;
        let b = str_at(&triple[1], &format!("{path}[1]"))?;
        let w = rat_at(&triple[2], &format!("{path}[2]"))?;
        edges.push((a.clone(), b.clone()));
        weights.push((a, b, w));
    }
    let dg = Digraph::new(vertices, edges).map_err(|e| JsonError::new("$", e))?;
    WeightedDigraph::new(dg, weights).map_err(|e| JsonError::new("$", e))
}

pub fn weighted_digraph_to_json(wg: &WeightedDigraph, fmt: NumFormat) -> Value {
    json!({
        "vertices": wg.digraph().vertices(),
        "edges": wg
            .iter_named()
            .map(|(a, b, w)| json!([a, b, rat_value(w, fmt)]))
            .collect::<Vec<_>>(),
    })
}

/// `{"paths": [{"vertices": ["a", "b"], "weight": "1/3"}, ...]}`
pub fn path_measure_from_json(v: &Value) -> Result<PathMeasure, JsonError> {
    let mut entries = Vec::new();
    for (k, e) in arr_at(field(v, "paths", "$")?, "$.paths")?.iter().enumerate() {
        let path = format!("$.paths[{k}]");
        let vertices: Vec<String> =
            arr_at(field(e, "vertices", &path)?, &format!("{path}.vertices"))?
                .iter()
                .enumerate()
                .map(|(i, x)| str_at(x, &format!("{path}.vertices[{i}]")))
                .collect::<Result<_, _>>()?;
        let weight = rat_at(field(e, "weight", &path)?, &format!("{path}.weight"))?;
        let p = DirectedPath::from_vertices(vertices)
            .map_err(|err| JsonError::new(format!("{path}.vertices"), err))?;
        entries.push((p, weight));
    }
    PathMeasure::new(entries).map_err(|e| JsonError::new("$.paths", e))
}

pub fn path_measure_to_json(pm: &PathMeasure, fmt: NumFormat) -> Value {
    json!({
        "paths": pm
            .entries()
            .iter()
            .map(|(p, w)| json!({"vertices": p.vertices(), "weight": rat_value(w, fmt)}))
            .collect::<Vec<_>>(),
    })
}

/// `{"pairs": [["a", "b", "0.25"], ...]}`; vertices in first-appearance
/// order unless the caller supplies a domain.
pub fn coupling_from_json(v: &Value, domain: Option<&[String]>) -> Result<Coupling, JsonError> {
    let mut entries = Vec::new();
    let mut vertices: Vec<String> = domain.map(<[String]>::to_vec).unwrap_or_default();
    let mut seen: std::collections::HashSet<String> = vertices.iter().cloned().collect();
    for (k, e) in arr_at(field(v, "pairs", "$")?, "$.pairs")?.iter().enumerate() {
        let path = format!("$.pairs[{k}]");
        let triple = arr_at(e, &path)?;
        if triple.len() != 3 {
            return Err(JsonError::new(path, "expected [row, column, mass]"));
        }
        let a = str_at(&triple[0], &format!("{path}[0]"))?;
        let b = str_at(&triple[1], &format!("{path}[1]"))?;
        let w = rat_at(&triple[2], &format!("{path}[2]"))?;
        if domain.is_none() {
            for name in [&a, &b] {
                if seen.insert(name.clone()) {
                    vertices.push(name.clone());
                }
            }
        }
        entries.push((a, b, w));
    }
    Coupling::new(vertices, entries).map_err(|e| JsonError::new("$.pairs", e))
}

pub fn coupling_to_json(c: &Coupling, fmt: NumFormat) -> Value {
    json!({
        "pairs": c
            .iter_named()
            .map(|(a, b, w)| json!([a, b, rat_value(w, fmt)]))
            .collect::<Vec<_>>(),
    })
}

/// `{"elements": [...], "join": [[...]], "meet": [[...]]}` with row-major
/// tables of element names.
pub fn lattice_from_json(v: &Value) -> Result<Lattice, JsonError> {
    let elements: Vec<String> = arr_at(field(v, "elements", "$")?, "$.elements")?
        .iter()
        .enumerate()
        .map(|(k, x)| str_at(x, &format!("$.elements[{k}]")))
        .collect::<Result<_, _>>()?;
    let table = |name: &str| -> Result<Vec<Vec<String>>, JsonError> {
        arr_at(field(v, name, "$")?, &format!("$.{name}"))?
            .iter()
            .enumerate()
            .map(|(r, row)| {
                arr_at(row, &format!("$.{name}[{r}]"))?
                    .iter()
                    .enumerate()
                    .map(|(c, x)| str_at(x, &format!("$.{name}[{r}][{c}]")))
                    .collect()
            })
            .collect()
    };
    let join = table("join")?;
    let meet = table("meet")?;
    Lattice::new(elements, &join, &meet).map_err(|e| JsonError::new("$", e))
}

pub fn verdict_to_json(v: &DominanceVerdict, fmt: NumFormat) -> Value {
    let certificate = match &v.certificate {
        Certificate::FeasibleFlow(q) => json!({
            "kind": "flow",
            "flow": flow_to_json(q, fmt),
        }),
        Certificate::ViolatingUpSet(u) => json!({
            "kind": "violating_up_set",
            "up_set": u,
        }),
        Certificate::UpSetsExhausted { checked } => json!({
            "kind": "up_sets_exhausted",
            "checked": checked,
        }),
    };
    json!({"dominates": v.dominates, "certificate": certificate})
}

pub fn transport_result_to_json(r: &TransportResult, fmt: NumFormat) -> Value {
    json!({
        "value": rat_value(&r.optimal_value, fmt),
        "flow": flow_to_json(&r.optimal_flow, fmt),
        "coupling": coupling_to_json(&r.optimal_coupling, fmt),
    })
}

pub fn truncation_to_json(t: &TruncatedInstance, fmt: NumFormat) -> Value {
    let mut defect = Map::new();
    for (v, w) in t.boundary_defect.iter() {
        defect.insert(v.to_owned(), rat_value(w, fmt));
    }
    json!({
        "inner_vertices": t.inner_vertices,
        "mode": match t.mode {
            crate::truncate::GhostMode::Single => "single",
            crate::truncate::GhostMode::Split => "split",
        },
        "flow": flow_to_json(&t.truncated_flow, fmt),
        "boundary_defect": Value::Object(defect),
        "mu1_inner": measure_to_json(&t.mu1_inner, fmt),
        "mu2_inner": measure_to_json(&t.mu2_inner, fmt),
    })
}

/// Integer-keyed measure for chain instances: `{"-1": "1/2", "3": "1/2"}`.
pub fn z_measure_from_json(v: &Value) -> Result<std::collections::BTreeMap<i64, Rat>, JsonError> {
    let mut out = std::collections::BTreeMap::new();
    for (k, w) in obj_at(v, "$")? {
        let z: i64 = k
            .parse()
            .map_err(|_| JsonError::new(format!("$.{k}"), "expected an integer key"))?;
        out.insert(z, rat_at(w, &format!("$.{k}"))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, ratio};
    use serde_json::json;

    #[test]
    fn digraph_round_trip() {
        let v = json!({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]});
        let g = digraph_from_json(&v).unwrap();
        assert_eq!(digraph_to_json(&g), v);
        // byte-identical re-serialization
        let s1 = serde_json::to_string(&digraph_to_json(&g)).unwrap();
        let s2 = serde_json::to_string(&digraph_to_json(&digraph_from_json(&v).unwrap())).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn measure_accepts_decimals_and_fractions() {
        let v = json!({"a": "0.5", "b": "1/3", "c": "1/6"});
        let m = measure_from_json(&v).unwrap();
        assert_eq!(m.get("a"), ratio(1, 2));
        assert_eq!(m.get("b"), ratio(1, 3));
        assert!(m.is_probability());
        // exact mode re-serializes canonically
        assert_eq!(
            measure_to_json(&m, NumFormat::Exact),
            json!({"a": "1/2", "b": "1/3", "c": "1/6"})
        );
    }

    #[test]
    fn flow_round_trip_and_float_mode() {
        let v = json!({"edges": [["a", "b", "1/2"], ["b", "c", "2"]]});
        let q = flow_from_json(&v).unwrap();
        assert_eq!(q.value_named("a", "b"), ratio(1, 2));
        assert_eq!(flow_to_json(&q, NumFormat::Exact), json!({"edges": [["a", "b", "1/2"], ["b", "c", "2"]]}));
        let f = flow_to_json(&q, NumFormat::Float);
        assert_eq!(f["edges"][0][2], json!(0.5));
    }

    #[test]
    fn errors_carry_schema_paths() {
        let bad = json!({"edges": [["a", "b"]]});
        let err = flow_from_json(&bad).unwrap_err();
        assert_eq!(err.path, "$.edges[0]");
        let bad = json!({"vertices": ["a"], "edges": [["a", 3]]});
        let err = digraph_from_json(&bad).unwrap_err();
        assert_eq!(err.path, "$.edges[0][1]");
        let bad = json!({"a": "1/0"});
        assert!(measure_from_json(&bad).is_err());
    }

    #[test]
    fn coupling_and_path_measure_round_trip() {
        let v = json!({"pairs": [["a", "a", "1/4"], ["a", "b", "3/4"]]});
        let c = coupling_from_json(&v, None).unwrap();
        assert_eq!(c.total_mass(), rat(1));
        assert_eq!(coupling_to_json(&c, NumFormat::Exact), v);

        let v = json!({"paths": [{"vertices": ["a", "b", "c"], "weight": "1/3"}]});
        let pm = path_measure_from_json(&v).unwrap();
        assert_eq!(pm.total_weight(), ratio(1, 3));
        assert_eq!(path_measure_to_json(&pm, NumFormat::Exact), v);
    }

    #[test]
    fn lattice_parses_and_validates() {
        let v = json!({
            "elements": ["0", "1"],
            "join": [["0", "1"], ["1", "1"]],
            "meet": [["0", "0"], ["0", "1"]],
        });
        let lat = lattice_from_json(&v).unwrap();
        assert_eq!(lat.join_named("0", "1"), Some("1"));
        let bad = json!({
            "elements": ["0", "1"],
            "join": [["0", "1"], ["0", "1"]],
            "meet": [["0", "0"], ["0", "1"]],
        });
        assert!(lattice_from_json(&bad).is_err());
    }
}
