//! Couplings between measures and the two constructive flow-to-coupling
//! algorithms.
//!
//! The ledger builder peels source vertices of the support digraph and moves
//! typed mass parcels along support edges, recording every parcel's route so
//! the original flow can be reproduced from the coupling. The decomposition
//! builder assembles the coupling directly from a path decomposition, which
//! pins the off-diagonal mass to `1/2 sum |mu1 - mu2|` exactly.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};

use crate::flow::{path_decompose, Flow, FlowError};
use crate::graph::{Digraph, DirectedPath, GraphError, PartialOrderRelation};
use crate::measure::{Measure, MeasureError};
use crate::num::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CouplingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("flow support contains a directed cycle")]
    CyclicSupport,
    #[error("mu1 - div Q is negative at {0:?}")]
    NegativeTarget(String),
    #[error("ledger step at {0:?} cannot be funded")]
    InsufficientMass(String),
    #[error("no path supplied for pair ({0:?}, {1:?})")]
    MissingPath(String, String),
    #[error("path weights for pair ({0:?}, {1:?}) do not sum to the coupling mass")]
    WeightMismatch(String, String),
    #[error("negative coupling weight on ({0:?}, {1:?})")]
    NegativeWeight(String, String),
}

impl From<FlowError> for CouplingError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::CyclicSupport => CouplingError::CyclicSupport,
            FlowError::Graph(g) => CouplingError::Graph(g),
            other => CouplingError::Graph(GraphError::NotAPath(vec![other.to_string()])),
        }
    }
}

/// A nonnegative weighting of ordered vertex pairs; row sums give the first
/// marginal, column sums the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    weights: BTreeMap<(usize, usize), Rat>,
}

impl Coupling {
    pub fn new<I>(vertices: Vec<String>, entries: I) -> Result<Self, CouplingError>
    where
        I: IntoIterator<Item = (String, String, Rat)>,
    {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()).into());
            }
        }
        let mut weights = BTreeMap::new();
        for (a, b, w) in entries {
            if w.is_negative() {
                return Err(CouplingError::NegativeWeight(a, b));
            }
            if w.is_zero() {
                continue;
            }
            let i = *index
                .get(&a)
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let j = *index
                .get(&b)
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            *weights.entry((i, j)).or_insert_with(Rat::zero) += w;
        }
        Ok(Coupling { vertices, index, weights })
    }

    /// The coupling concentrated on the diagonal of `m`.
    pub fn diagonal(m: &Measure) -> Coupling {
        let vertices = m.vertices().to_vec();
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let weights = m
            .iter()
            .enumerate()
            .filter(|(_, (_, w))| w.is_positive())
            .map(|(i, (_, w))| ((i, i), w.clone()))
            .collect();
        Coupling { vertices, index, weights }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn get(&self, a: &str, b: &str) -> Rat {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self
                .weights
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(Rat::zero),
            _ => Rat::zero(),
        }
    }

    /// Positive entries in row-major vertex order.
    pub fn iter_named(&self) -> impl Iterator<Item = (&str, &str, &Rat)> {
        self.weights
            .iter()
            .map(|(&(i, j), w)| (self.vertices[i].as_str(), self.vertices[j].as_str(), w))
    }

    pub fn total_mass(&self) -> Rat {
        self.weights.values().sum()
    }

    pub fn off_diagonal_mass(&self) -> Rat {
        self.weights
            .iter()
            .filter(|(&(i, j), _)| i != j)
            .map(|(_, w)| w)
            .sum()
    }

    /// `(row sums, column sums)` over the full vertex domain.
    pub fn marginals(&self) -> (Measure, Measure) {
        let n = self.vertices.len();
        let mut rows = vec![Rat::zero(); n];
        let mut cols = vec![Rat::zero(); n];
        for (&(i, j), w) in &self.weights {
            rows[i] += w;
            cols[j] += w;
        }
        let make = |vals: Vec<Rat>| {
            Measure::new(self.vertices.iter().cloned().zip(vals))
                .expect("coupling weights are nonnegative")
        };
        (make(rows), make(cols))
    }

    /// True iff all positive mass sits on pairs `x <= y` of the relation.
    pub fn is_compatible(&self, rel: &PartialOrderRelation) -> bool {
        self.iter_named()
            .all(|(a, b, _)| rel.le(a, b) == Some(true))
    }

    /// The one-step flow: each off-diagonal pair becomes a single edge.
    pub fn one_step_flow(&self) -> Flow {
        let edges: Vec<(String, String)> = self
            .weights
            .keys()
            .filter(|&&(i, j)| i != j)
            .map(|&(i, j)| (self.vertices[i].clone(), self.vertices[j].clone()))
            .collect();
        let dg = Digraph::new(self.vertices.clone(), edges).expect("pairs are valid edges");
        Flow::new(
            dg,
            self.weights
                .iter()
                .filter(|(&(i, j), _)| i != j)
                .map(|(&(i, j), w)| {
                    (
                        self.vertices[i].clone(),
                        self.vertices[j].clone(),
                        w.clone(),
                    )
                }),
        )
        .expect("coupling weights are nonnegative")
    }

    /// Economic in the unconstrained-path sense: the one-step flow has
    /// acyclic support.
    pub fn is_economic(&self) -> bool {
        self.one_step_flow().has_acyclic_support()
    }
}

/// Per-pair families of paths with weights, as used to turn a coupling into
/// a flow. Entries for the same pair and path are merged.
#[derive(Debug, Clone, Default)]
pub struct PathChoice {
    entries: HashMap<(String, String), Vec<(DirectedPath, Rat)>>,
}

impl PathChoice {
    pub fn new() -> Self {
        PathChoice::default()
    }

    pub fn add(&mut self, from: &str, to: &str, path: DirectedPath, weight: Rat) {
        let family = self
            .entries
            .entry((from.to_owned(), to.to_owned()))
            .or_default();
        if let Some(slot) = family.iter_mut().find(|(p, _)| p == &path) {
            slot.1 += weight;
        } else {
            family.push((path, weight));
        }
    }

    pub fn family(&self, from: &str, to: &str) -> Option<&[(DirectedPath, Rat)]> {
        self.entries
            .get(&(from.to_owned(), to.to_owned()))
            .map(Vec::as_slice)
    }

    /// One BFS shortest path (smallest-index tie-break) per positive
    /// off-diagonal pair of `c`.
    pub fn shortest_paths(c: &Coupling, digraph: &Digraph) -> Result<PathChoice, CouplingError> {
        let mut choice = PathChoice::new();
        for (a, b, w) in c.iter_named() {
            if a == b {
                continue;
            }
            let path = bfs_path(digraph, a, b)
                .ok_or_else(|| CouplingError::MissingPath(a.to_owned(), b.to_owned()))?;
            choice.add(a, b, path, w.clone());
        }
        Ok(choice)
    }
}

fn bfs_path(g: &Digraph, from: &str, to: &str) -> Option<DirectedPath> {
    let s = g.vertex_index(from)?;
    let t = g.vertex_index(to)?;
    if s == t {
        return None;
    }
    let mut prev = vec![usize::MAX; g.vertex_count()];
    let mut queue = std::collections::VecDeque::from([s]);
    prev[s] = s;
    while let Some(v) = queue.pop_front() {
        if v == t {
            break;
        }
        let mut next: Vec<usize> = g.out_neighbors(v).to_vec();
        next.sort_unstable();
        for w in next {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    if prev[t] == usize::MAX {
        return None;
    }
    let mut chain = vec![t];
    let mut at = t;
    while at != s {
        at = prev[at];
        chain.push(at);
    }
    chain.reverse();
    let names: Vec<String> = chain
        .into_iter()
        .map(|v| g.vertex_name(v).to_owned())
        .collect();
    DirectedPath::new(g, names).ok()
}

/// `Q = sum_i rho^i(x, y) Q_{gamma^i}`; the supplied families must run from
/// `x` to `y` inside `digraph` and their weights must sum to `rho(x, y)`.
pub fn flow_from_coupling(
    c: &Coupling,
    digraph: &Digraph,
    paths: &PathChoice,
) -> Result<Flow, CouplingError> {
    let mut flow = Flow::zero(digraph.clone());
    for (a, b, w) in c.iter_named() {
        if a == b {
            continue;
        }
        let family = paths
            .family(a, b)
            .ok_or_else(|| CouplingError::MissingPath(a.to_owned(), b.to_owned()))?;
        let mut covered = Rat::zero();
        for (p, pw) in family {
            if p.start() != a || p.end() != b || !p.lies_in(digraph) {
                return Err(CouplingError::MissingPath(a.to_owned(), b.to_owned()));
            }
            covered += pw;
            for (x, y) in p.edges_named() {
                let current = flow.value_named(x, y);
                let (x, y) = (x.to_owned(), y.to_owned());
                flow.set_named(&x, &y, current + pw).unwrap();
            }
        }
        if covered != *w {
            return Err(CouplingError::WeightMismatch(a.to_owned(), b.to_owned()));
        }
    }
    Ok(flow)
}

fn check_builder_inputs(q: &Flow, mu1: &Measure) -> Result<Measure, CouplingError> {
    if !q.has_acyclic_support() {
        return Err(CouplingError::CyclicSupport);
    }
    for (v, _) in mu1.iter() {
        if q.digraph().vertex_index(v).is_none() {
            return Err(MeasureError::VertexMismatch(format!(
                "measure vertex {v:?} not in the digraph"
            ))
            .into());
        }
    }
    let div = q.divergence();
    let mut mu2_entries = Vec::new();
    for v in q.digraph().vertices() {
        let m = mu1.get(v) - div.get(v);
        if m.is_negative() {
            return Err(CouplingError::NegativeTarget(v.clone()));
        }
        mu2_entries.push((v.clone(), m));
    }
    Ok(Measure::new(mu2_entries).expect("checked nonnegative"))
}

/// Ledger builder output: the coupling plus the route every mass parcel
/// took, sufficient to reproduce the flow via [`flow_from_coupling`].
#[derive(Debug, Clone)]
pub struct LedgerCoupling {
    pub coupling: Coupling,
    pub recorded_paths: PathChoice,
    pub mu2: Measure,
}

#[derive(Debug, Clone)]
struct Parcel {
    origin: usize,
    route: Vec<usize>,
    amount: Rat,
}

/// Constructive coupling from an acyclic flow by typed-mass bookkeeping.
///
/// Source vertices of the support digraph are peeled smallest-index first.
/// The outgoing demand `Q(v, y)` is served in increasing `y`-order,
/// consuming the typed mass present at `v` in increasing type order, FIFO
/// within a type. `rho(x, y)` is the final amount of type-`x` mass at `y`.
pub fn coupling_from_flow_ledger(
    q: &Flow,
    mu1: &Measure,
) -> Result<LedgerCoupling, CouplingError> {
    let mu2 = check_builder_inputs(q, mu1)?;
    let g = q.digraph();
    let n = g.vertex_count();

    let mut remaining_in = vec![0usize; n];
    let mut support_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &id in &q.support() {
        let (i, j) = g.edges()[id];
        remaining_in[j] += 1;
        support_out[i].push(j);
    }
    for adj in &mut support_out {
        adj.sort_unstable();
    }

    let mut parcels: Vec<Vec<Parcel>> = (0..n)
        .map(|v| {
            let m = mu1.get(g.vertex_name(v));
            if m.is_positive() {
                vec![Parcel { origin: v, route: vec![v], amount: m }]
            } else {
                Vec::new()
            }
        })
        .collect();

    let mut processed = vec![false; n];
    for _ in 0..n {
        let v = (0..n)
            .find(|&v| !processed[v] && remaining_in[v] == 0)
            .ok_or(CouplingError::CyclicSupport)?;
        processed[v] = true;
        for &w in &support_out[v].clone() {
            let mut need = q.value(v, w);
            let mut moved: Vec<Parcel> = Vec::new();
            for origin in 0..n {
                if need.is_zero() {
                    break;
                }
                for parcel in parcels[v].iter_mut() {
                    if parcel.origin != origin || parcel.amount.is_zero() {
                        continue;
                    }
                    if need.is_zero() {
                        break;
                    }
                    let take = parcel.amount.clone().min(need.clone());
                    parcel.amount -= &take;
                    need -= &take;
                    let mut route = parcel.route.clone();
                    route.push(w);
                    moved.push(Parcel { origin, route, amount: take });
                }
            }
            if !need.is_zero() {
                return Err(CouplingError::InsufficientMass(
                    g.vertex_name(v).to_owned(),
                ));
            }
            parcels[v].retain(|p| !p.amount.is_zero());
            parcels[w].extend(moved);
            remaining_in[w] -= 1;
        }
    }

    let mut entries = Vec::new();
    let mut recorded = PathChoice::new();
    for (v, bucket) in parcels.iter().enumerate() {
        for parcel in bucket {
            if parcel.amount.is_zero() {
                continue;
            }
            let from = g.vertex_name(parcel.origin).to_owned();
            let to = g.vertex_name(v).to_owned();
            entries.push((from.clone(), to.clone(), parcel.amount.clone()));
            if parcel.origin != v {
                let named: Vec<String> = parcel
                    .route
                    .iter()
                    .map(|&u| g.vertex_name(u).to_owned())
                    .collect();
                let path = DirectedPath::new(g, named).expect("parcel routes follow edges");
                recorded.add(&from, &to, path, parcel.amount.clone());
            }
        }
    }
    let coupling = Coupling::new(g.vertices().to_vec(), entries)?;
    Ok(LedgerCoupling { coupling, recorded_paths: recorded, mu2 })
}

/// Constructive coupling through the endpoint-normalized path
/// decomposition: diagonal `min(mu1, mu2)` pointwise, off-diagonal the
/// decomposition weights grouped by endpoints. The off-diagonal mass equals
/// `1/2 sum |mu1 - mu2|` exactly.
pub fn coupling_from_flow_decomposition(
    q: &Flow,
    mu1: &Measure,
) -> Result<Coupling, CouplingError> {
    let mu2 = check_builder_inputs(q, mu1)?;
    let g = q.digraph();
    let pm = path_decompose(q)?;

    let mut entries: Vec<(String, String, Rat)> = Vec::new();
    for v in g.vertices() {
        let d = mu1.get(v).min(mu2.get(v));
        if d.is_positive() {
            entries.push((v.clone(), v.clone(), d));
        }
    }
    for (p, w) in pm.entries() {
        entries.push((p.start().to_owned(), p.end().to_owned(), w.clone()));
    }
    Coupling::new(g.vertices().to_vec(), entries)
}
