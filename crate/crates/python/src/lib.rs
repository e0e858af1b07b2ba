//! Python bindings. Rationals cross the boundary as strings ("3/10",
//! "0.25", "2") so nothing is ever rounded.

// the pymethods macro inserts identity conversions on fallible returns
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coupflow_core::coupling as ccoupling;
use coupflow_core::dominance as cdom;
use coupflow_core::flow as cflow;
use coupflow_core::graph as cgraph;
use coupflow_core::measure as cmeasure;
use coupflow_core::num::{parse_rat, rat_to_string, Rat};
use coupflow_core::transport as ctransport;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rat_from_py(v: &Bound<'_, PyAny>) -> PyResult<Rat> {
    if let Ok(s) = v.extract::<String>() {
        return parse_rat(&s).map_err(err);
    }
    if let Ok(i) = v.extract::<i64>() {
        return Ok(coupflow_core::num::rat(i));
    }
    Err(PyValueError::new_err(
        "rationals must be strings like \"3/10\" or integers; floats are ambiguous",
    ))
}

fn weights_from_dict(d: &Bound<'_, PyDict>) -> PyResult<Vec<(String, Rat)>> {
    let mut out = Vec::new();
    for (k, v) in d.iter() {
        out.push((k.extract::<String>()?, rat_from_py(&v)?));
    }
    Ok(out)
}

#[pyclass(name = "Digraph")]
#[derive(Clone)]
struct PyDigraph(cgraph::Digraph);

#[pymethods]
impl PyDigraph {
    #[new]
    fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> PyResult<Self> {
        Ok(PyDigraph(cgraph::Digraph::new(vertices, edges).map_err(err)?))
    }

    fn vertices(&self) -> Vec<String> {
        self.0.vertices().to_vec()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.0
            .edges()
            .iter()
            .map(|&(i, j)| {
                (
                    self.0.vertex_name(i).to_owned(),
                    self.0.vertex_name(j).to_owned(),
                )
            })
            .collect()
    }

    fn is_acyclic(&self) -> bool {
        self.0.is_acyclic()
    }

    fn transitive_closure(&self) -> PyDigraph {
        PyDigraph(self.0.transitive_closure())
    }

    fn transitive_reduction(&self) -> PyResult<PyDigraph> {
        Ok(PyDigraph(self.0.transitive_reduction().map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Digraph({} vertices, {} edges)",
            self.0.vertex_count(),
            self.0.edge_count()
        )
    }
}

#[pyclass(name = "Measure")]
#[derive(Clone)]
struct PyMeasure(cmeasure::Measure);

#[pymethods]
impl PyMeasure {
    /// Measure(weights, domain=None): weights is a dict of rational
    /// strings; the optional domain fixes the vertex set and order.
    #[new]
    #[pyo3(signature = (weights, domain=None))]
    fn new(weights: &Bound<'_, PyDict>, domain: Option<Vec<String>>) -> PyResult<Self> {
        let entries = weights_from_dict(weights)?;
        let m = match domain {
            Some(domain) => cmeasure::Measure::on_vertices(&domain, entries).map_err(err)?,
            None => cmeasure::Measure::new(entries).map_err(err)?,
        };
        Ok(PyMeasure(m))
    }

    fn get(&self, vertex: &str) -> String {
        rat_to_string(&self.0.get(vertex))
    }

    fn total(&self) -> String {
        rat_to_string(&self.0.total())
    }

    fn is_probability(&self) -> bool {
        self.0.is_probability()
    }

    fn items(&self) -> Vec<(String, String)> {
        self.0
            .iter()
            .map(|(v, w)| (v.to_owned(), rat_to_string(w)))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Measure(total={})", self.0.total())
    }
}

#[pyclass(name = "Flow")]
#[derive(Clone)]
struct PyFlow(cflow::Flow);

#[pymethods]
impl PyFlow {
    /// Flow(edges): triples (tail, head, value); the digraph is implied by
    /// the edge list.
    #[new]
    fn new(edges: Vec<(String, String, String)>) -> PyResult<Self> {
        let pairs: Vec<(String, String)> =
            edges.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        let dg = cgraph::Digraph::from_edge_list(pairs).map_err(err)?;
        let mut values = Vec::new();
        for (a, b, w) in edges {
            let w = parse_rat(&w).map_err(err)?;
            values.push((a, b, w));
        }
        Ok(PyFlow(cflow::Flow::new(dg, values).map_err(err)?))
    }

    fn edges(&self) -> Vec<(String, String, String)> {
        self.0
            .iter_named()
            .map(|(a, b, w)| (a.to_owned(), b.to_owned(), rat_to_string(w)))
            .collect()
    }

    fn value(&self, tail: &str, head: &str) -> String {
        rat_to_string(&self.0.value_named(tail, head))
    }

    fn divergence<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new_bound(py);
        for (v, w) in self.0.divergence().iter() {
            out.set_item(v, rat_to_string(w))?;
        }
        Ok(out)
    }

    fn total_mass(&self) -> String {
        rat_to_string(&self.0.total_mass())
    }

    fn has_acyclic_support(&self) -> bool {
        self.0.has_acyclic_support()
    }

    fn remove_cycles(&self) -> PyFlow {
        PyFlow(cflow::remove_cycles(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("Flow(total_mass={})", self.0.total_mass())
    }
}

#[pyclass(name = "PathMeasure")]
#[derive(Clone)]
struct PyPathMeasure(cflow::PathMeasure);

#[pymethods]
impl PyPathMeasure {
    #[new]
    fn new(entries: Vec<(Vec<String>, String)>) -> PyResult<Self> {
        let mut parsed = Vec::new();
        for (vertices, w) in entries {
            let p = cgraph::DirectedPath::from_vertices(vertices).map_err(err)?;
            parsed.push((p, parse_rat(&w).map_err(err)?));
        }
        Ok(PyPathMeasure(cflow::PathMeasure::new(parsed).map_err(err)?))
    }

    fn entries(&self) -> Vec<(Vec<String>, String)> {
        self.0
            .entries()
            .iter()
            .map(|(p, w)| (p.vertices().to_vec(), rat_to_string(w)))
            .collect()
    }

    fn total_weight(&self) -> String {
        rat_to_string(&self.0.total_weight())
    }

    fn is_stable(&self) -> bool {
        cflow::is_stable(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("PathMeasure({} paths)", self.0.len())
    }
}

#[pyclass(name = "Coupling")]
#[derive(Clone)]
struct PyCoupling(ccoupling::Coupling);

#[pymethods]
impl PyCoupling {
    #[new]
    #[pyo3(signature = (pairs, vertices=None))]
    fn new(
        pairs: Vec<(String, String, String)>,
        vertices: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let vertices = vertices.unwrap_or_else(|| {
            let mut out = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for (a, b, _) in &pairs {
                for v in [a, b] {
                    if seen.insert(v.clone()) {
                        out.push(v.clone());
                    }
                }
            }
            out
        });
        let mut entries = Vec::new();
        for (a, b, w) in pairs {
            let w = parse_rat(&w).map_err(err)?;
            entries.push((a, b, w));
        }
        Ok(PyCoupling(ccoupling::Coupling::new(vertices, entries).map_err(err)?))
    }

    fn pairs(&self) -> Vec<(String, String, String)> {
        self.0
            .iter_named()
            .map(|(a, b, w)| (a.to_owned(), b.to_owned(), rat_to_string(w)))
            .collect()
    }

    fn get(&self, row: &str, column: &str) -> String {
        rat_to_string(&self.0.get(row, column))
    }

    fn marginals(&self) -> (PyMeasure, PyMeasure) {
        let (a, b) = self.0.marginals();
        (PyMeasure(a), PyMeasure(b))
    }

    fn total_mass(&self) -> String {
        rat_to_string(&self.0.total_mass())
    }

    fn off_diagonal_mass(&self) -> String {
        rat_to_string(&self.0.off_diagonal_mass())
    }

    fn is_economic(&self) -> bool {
        self.0.is_economic()
    }

    fn __repr__(&self) -> String {
        format!("Coupling(total_mass={})", self.0.total_mass())
    }
}

#[pyclass(name = "DominanceVerdict")]
struct PyVerdict {
    #[pyo3(get)]
    dominates: bool,
    #[pyo3(get)]
    certificate_kind: String,
    flow: Option<PyFlow>,
    up_set: Option<Vec<String>>,
}

#[pymethods]
impl PyVerdict {
    fn flow(&self) -> Option<PyFlow> {
        self.flow.clone()
    }

    fn violating_up_set(&self) -> Option<Vec<String>> {
        self.up_set.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "DominanceVerdict(dominates={}, certificate={})",
            self.dominates, self.certificate_kind
        )
    }
}

fn wrap_verdict(v: cdom::DominanceVerdict) -> PyVerdict {
    let (kind, flow, up_set) = match v.certificate {
        cdom::Certificate::FeasibleFlow(q) => ("flow".to_owned(), Some(PyFlow(q)), None),
        cdom::Certificate::ViolatingUpSet(u) => {
            ("violating_up_set".to_owned(), None, Some(u))
        }
        cdom::Certificate::UpSetsExhausted { .. } => {
            ("up_sets_exhausted".to_owned(), None, None)
        }
    };
    PyVerdict { dominates: v.dominates, certificate_kind: kind, flow, up_set }
}

/// Hasse digraph of the partial order given as a list of (low, high) pairs.
#[pyfunction]
fn hasse_digraph(pairs: Vec<(String, String)>) -> PyResult<PyDigraph> {
    let rel = cgraph::PartialOrderRelation::from_pairs(pairs).map_err(err)?;
    Ok(PyDigraph(cgraph::hasse_digraph(&rel)))
}

/// Stochastic dominance by flow feasibility on the Hasse digraph.
#[pyfunction]
fn dominates(
    pairs: Vec<(String, String)>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<PyVerdict> {
    let rel = cgraph::PartialOrderRelation::from_pairs(pairs).map_err(err)?;
    let hasse = cgraph::hasse_digraph(&rel);
    Ok(wrap_verdict(
        cdom::dominates_via_flow(&mu1.0, &mu2.0, &hasse).map_err(err)?,
    ))
}

/// Brute-force dominance by up-set enumeration (vertex count at most 24).
#[pyfunction]
fn dominates_oracle(
    pairs: Vec<(String, String)>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<PyVerdict> {
    let rel = cgraph::PartialOrderRelation::from_pairs(pairs).map_err(err)?;
    Ok(wrap_verdict(
        cdom::dominates_oracle(&mu1.0, &mu2.0, &rel).map_err(err)?,
    ))
}

/// A coupling of (mu1, mu2) compatible with the partial order.
#[pyfunction]
fn build_compatible_coupling(
    pairs: Vec<(String, String)>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<PyCoupling> {
    let rel = cgraph::PartialOrderRelation::from_pairs(pairs).map_err(err)?;
    let hasse = cgraph::hasse_digraph(&rel);
    Ok(PyCoupling(
        cdom::build_compatible_coupling(&mu1.0, &mu2.0, &hasse).map_err(err)?,
    ))
}

/// Total-order dominance via distribution functions.
#[pyfunction]
fn chain_condition(
    chain: Vec<String>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<PyVerdict> {
    Ok(wrap_verdict(
        cdom::chain_condition(&mu1.0, &mu2.0, &chain).map_err(err)?,
    ))
}

#[pyfunction]
fn path_decompose(flow: &PyFlow) -> PyResult<PyPathMeasure> {
    Ok(PyPathMeasure(cflow::path_decompose(&flow.0).map_err(err)?))
}

#[pyfunction]
fn stabilize_decomposition(pm: &PyPathMeasure) -> PyResult<PyPathMeasure> {
    Ok(PyPathMeasure(
        cflow::stabilize_decomposition(&pm.0).map_err(err)?,
    ))
}

/// Coupling from an acyclic flow; method is "ledger" or "decomposition".
#[pyfunction]
#[pyo3(signature = (flow, mu1, method="decomposition"))]
fn couple(flow: &PyFlow, mu1: &PyMeasure, method: &str) -> PyResult<PyCoupling> {
    let rekeyed = cmeasure::Measure::on_vertices(
        flow.0.digraph().vertices(),
        mu1.0.iter().map(|(v, w)| (v.to_owned(), w.clone())),
    )
    .map_err(err)?;
    match method {
        "ledger" => Ok(PyCoupling(
            ccoupling::coupling_from_flow_ledger(&flow.0, &rekeyed)
                .map_err(err)?
                .coupling,
        )),
        "decomposition" => Ok(PyCoupling(
            ccoupling::coupling_from_flow_decomposition(&flow.0, &rekeyed).map_err(err)?,
        )),
        other => Err(PyValueError::new_err(format!(
            "method must be \"ledger\" or \"decomposition\", got {other:?}"
        ))),
    }
}

/// Minimal-flow transport on a weighted digraph; returns
/// (value, Flow, Coupling).
#[pyfunction]
fn wasserstein(
    vertices: Vec<String>,
    weighted_edges: Vec<(String, String, String)>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<(String, PyFlow, PyCoupling)> {
    let pairs: Vec<(String, String)> = weighted_edges
        .iter()
        .map(|(a, b, _)| (a.clone(), b.clone()))
        .collect();
    let dg = cgraph::Digraph::new(vertices, pairs).map_err(err)?;
    let mut weights = Vec::new();
    for (a, b, w) in weighted_edges {
        weights.push((a, b, parse_rat(&w).map_err(err)?));
    }
    let wg = ctransport::WeightedDigraph::new(dg, weights).map_err(err)?;
    let out = ctransport::beckmann_min(&wg, &mu1.0, &mu2.0).map_err(err)?;
    Ok((
        rat_to_string(&out.optimal_value),
        PyFlow(out.optimal_flow),
        PyCoupling(out.optimal_coupling),
    ))
}

/// Closed-form chain transport cost with per-direction weights.
#[pyfunction]
fn chain_wasserstein(
    chain: Vec<String>,
    forward_weights: Vec<String>,
    backward_weights: Vec<String>,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<String> {
    let fw: Vec<Rat> = forward_weights
        .iter()
        .map(|w| parse_rat(w).map_err(err))
        .collect::<PyResult<_>>()?;
    let bw: Vec<Rat> = backward_weights
        .iter()
        .map(|w| parse_rat(w).map_err(err))
        .collect::<PyResult<_>>()?;
    Ok(rat_to_string(
        &ctransport::chain_wasserstein(&chain, &fw, &bw, &mu1.0, &mu2.0).map_err(err)?,
    ))
}

/// Shortest-path cost between two vertices of a weighted digraph.
#[pyfunction]
fn geodesic_cost(
    vertices: Vec<String>,
    weighted_edges: Vec<(String, String, String)>,
    from: String,
    to: String,
) -> PyResult<String> {
    let pairs: Vec<(String, String)> = weighted_edges
        .iter()
        .map(|(a, b, _)| (a.clone(), b.clone()))
        .collect();
    let dg = cgraph::Digraph::new(vertices, pairs).map_err(err)?;
    let mut weights = Vec::new();
    for (a, b, w) in weighted_edges {
        weights.push((a, b, parse_rat(&w).map_err(err)?));
    }
    let wg = ctransport::WeightedDigraph::new(dg, weights).map_err(err)?;
    Ok(rat_to_string(
        &ctransport::geodesic_cost(&wg, &from, &to).map_err(err)?,
    ))
}

/// Holley product criterion on the Boolean lattice {0,1}^bits; returns
/// (holds, violating_pair_or_None).
#[pyfunction]
fn holley_hypercube(
    bits: u32,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
) -> PyResult<(bool, Option<(String, String)>)> {
    let lattice = cdom::Lattice::hypercube(bits);
    let v = cdom::holley_condition(&mu1.0, &mu2.0, &lattice).map_err(err)?;
    Ok((v.holds, v.violation))
}

/// Probes random feasible Hasse flows on {0,1}^bits; true when all have
/// the same total mass as the optimal transport value.
#[pyfunction]
#[pyo3(signature = (bits, mu1, mu2, probes=30, seed=0))]
fn lattice_all_flows_optimal(
    bits: u32,
    mu1: &PyMeasure,
    mu2: &PyMeasure,
    probes: usize,
    seed: u64,
) -> PyResult<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ctransport::lattice_all_flows_optimal(bits, &mu1.0, &mu2.0, probes, &mut rng).map_err(err)
}

#[pymodule]
fn coupflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDigraph>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyFlow>()?;
    m.add_class::<PyPathMeasure>()?;
    m.add_class::<PyCoupling>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(hasse_digraph, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(dominates_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(build_compatible_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(chain_condition, m)?)?;
    m.add_function(wrap_pyfunction!(path_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(stabilize_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(couple, m)?)?;
    m.add_function(wrap_pyfunction!(wasserstein, m)?)?;
    m.add_function(wrap_pyfunction!(chain_wasserstein, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_cost, m)?)?;
    m.add_function(wrap_pyfunction!(holley_hypercube, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_all_flows_optimal, m)?)?;
    Ok(())
}
