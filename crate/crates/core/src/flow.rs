//! Flows on digraphs, discrete vector fields, and path decompositions.
//!
//! The decomposition machinery peels an acyclic flow into weighted
//! self-avoiding paths running from the excess set `V_-` to the deficit set
//! `V_+`, and can rebalance an arbitrary decomposition into a stable one
//! (no vertex both starts and ends paths) by concatenation.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use crate::graph::{Digraph, DirectedPath, GraphError};
use crate::measure::SignedMeasure;
use crate::num::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("negative flow value on ({0:?}, {1:?})")]
    NegativeValue(String, String),
    #[error("flow value keyed by non-edge ({0:?}, {1:?})")]
    NotAnEdge(String, String),
    #[error("flow support contains a directed cycle")]
    CyclicSupport,
    #[error("field has positive part on ({0:?}, {1:?}), which is not a digraph edge")]
    UnrepresentableField(String, String),
    #[error("field and digraph vertex sets differ: {0}")]
    FieldGraphMismatch(String),
    #[error("negative weight in path measure")]
    NegativeWeight,
    #[error("path-measure path is not self-avoiding: {0:?}")]
    NotSelfAvoiding(Vec<String>),
}

/// A nonnegative edge weighting of a digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    digraph: Digraph,
    values: Vec<Rat>,
}

impl Flow {
    pub fn zero(digraph: Digraph) -> Flow {
        let values = vec![Rat::zero(); digraph.edge_count()];
        Flow { digraph, values }
    }

    /// Values keyed by named edges; unlisted edges carry zero.
    pub fn new<I>(digraph: Digraph, values: I) -> Result<Flow, FlowError>
    where
        I: IntoIterator<Item = (String, String, Rat)>,
    {
        let mut flow = Flow::zero(digraph);
        for (a, b, v) in values {
            flow.set_named(&a, &b, v)?;
        }
        Ok(flow)
    }

    pub fn set_named(&mut self, a: &str, b: &str, v: Rat) -> Result<(), FlowError> {
        if v.is_negative() {
            return Err(FlowError::NegativeValue(a.to_owned(), b.to_owned()));
        }
        let i = self
            .digraph
            .vertex_index(a)
            .ok_or_else(|| FlowError::NotAnEdge(a.to_owned(), b.to_owned()))?;
        let j = self
            .digraph
            .vertex_index(b)
            .ok_or_else(|| FlowError::NotAnEdge(a.to_owned(), b.to_owned()))?;
        let id = self
            .digraph
            .edge_id(i, j)
            .ok_or_else(|| FlowError::NotAnEdge(a.to_owned(), b.to_owned()))?;
        self.values[id] = v;
        Ok(())
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn edge_value(&self, id: usize) -> &Rat {
        &self.values[id]
    }

    pub fn value(&self, i: usize, j: usize) -> Rat {
        self.digraph
            .edge_id(i, j)
            .map(|id| self.values[id].clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn value_named(&self, a: &str, b: &str) -> Rat {
        match (self.digraph.vertex_index(a), self.digraph.vertex_index(b)) {
            (Some(i), Some(j)) => self.value(i, j),
            _ => Rat::zero(),
        }
    }

    /// Edge ids of `E(Q)`, the positive-value support.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&id| self.values[id].is_positive())
            .collect()
    }

    /// The digraph `(V, E(Q))`.
    pub fn support_digraph(&self) -> Digraph {
        let edges: Vec<(String, String)> = self
            .support()
            .into_iter()
            .map(|id| {
                let (a, b) = self.digraph.edge_named(id);
                (a.to_owned(), b.to_owned())
            })
            .collect();
        Digraph::new(self.digraph.vertices().to_vec(), edges).expect("support edges are valid")
    }

    pub fn has_acyclic_support(&self) -> bool {
        self.support_digraph().is_acyclic()
    }

    /// Out-minus-in divergence at every vertex; always sums to zero.
    pub fn divergence(&self) -> SignedMeasure {
        let n = self.digraph.vertex_count();
        let mut div = vec![Rat::zero(); n];
        for (id, &(i, j)) in self.digraph.edges().iter().enumerate() {
            div[i] += &self.values[id];
            div[j] -= &self.values[id];
        }
        SignedMeasure::new(
            self.digraph
                .vertices()
                .iter()
                .cloned()
                .zip(div),
        )
        .expect("digraph vertices are unique")
    }

    pub fn total_mass(&self) -> Rat {
        self.values.iter().sum()
    }

    /// Edgewise `self <= other` (same digraph required).
    pub fn dominated_by(&self, other: &Flow) -> bool {
        self.digraph == other.digraph
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn iter_named(&self) -> impl Iterator<Item = (&str, &str, &Rat)> {
        self.digraph
            .edges()
            .iter()
            .enumerate()
            .map(|(id, &(i, j))| {
                (
                    self.digraph.vertex_name(i),
                    self.digraph.vertex_name(j),
                    &self.values[id],
                )
            })
    }

    fn add_on_edge(&mut self, i: usize, j: usize, amount: &Rat) {
        let id = self.digraph.edge_id(i, j).expect("edge exists");
        self.values[id] += amount;
    }

    /// Smallest-index-first DFS for a directed cycle in the support; returns
    /// the cycle's vertex indices when found.
    fn find_support_cycle(&self) -> Option<Vec<usize>> {
        let n = self.digraph.vertex_count();
        let mut sorted_out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (id, &(i, j)) in self.digraph.edges().iter().enumerate() {
            if self.values[id].is_positive() {
                sorted_out[i].push(j);
            }
        }
        for adj in &mut sorted_out {
            adj.sort_unstable();
        }
        let mut state = vec![0u8; n]; // 0 fresh, 1 on path, 2 done
        let mut path = Vec::new();
        fn visit(
            v: usize,
            out: &[Vec<usize>],
            state: &mut [u8],
            path: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            state[v] = 1;
            path.push(v);
            for &w in &out[v] {
                if state[w] == 1 {
                    let at = path.iter().position(|&x| x == w).unwrap();
                    return Some(path[at..].to_vec());
                }
                if state[w] == 0 {
                    if let Some(c) = visit(w, out, state, path) {
                        return Some(c);
                    }
                }
            }
            path.pop();
            state[v] = 2;
            None
        }
        for v in 0..n {
            if state[v] == 0 {
                if let Some(c) = visit(v, &sorted_out, &mut state, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }
}

/// Indicator flow `Q_gamma` of a path, on the path's ambient digraph.
pub fn flow_from_path(g: &Digraph, p: &DirectedPath) -> Result<Flow, FlowError> {
    if !p.lies_in(g) {
        return Err(GraphError::NotAPath(p.vertices().to_vec()).into());
    }
    let mut flow = Flow::zero(g.clone());
    for (a, b) in p.edges_named() {
        let i = g.vertex_index(a).unwrap();
        let j = g.vertex_index(b).unwrap();
        let id = g.edge_id(i, j).unwrap();
        flow.values[id] = Rat::from_integer(1.into());
    }
    Ok(flow)
}

/// An antisymmetric function on the oriented edges of an undirected graph,
/// stored once per edge in the canonical orientation (smaller vertex index
/// first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteVectorField {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_ids: HashMap<(usize, usize), usize>,
    values: Vec<Rat>,
}

impl DiscreteVectorField {
    /// `entries` assign `phi(x, y)`; the reverse orientation is implied.
    pub fn new<I>(vertices: Vec<String>, entries: I) -> Result<Self, FlowError>
    where
        I: IntoIterator<Item = (String, String, Rat)>,
    {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()).into());
            }
        }
        let mut field = DiscreteVectorField {
            vertices,
            index,
            edges: Vec::new(),
            edge_ids: HashMap::new(),
            values: Vec::new(),
        };
        for (a, b, v) in entries {
            let i = *field
                .index
                .get(&a)
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let j = *field
                .index
                .get(&b)
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            if i == j {
                return Err(GraphError::SelfLoop(a).into());
            }
            field.set_oriented(i, j, v);
        }
        Ok(field)
    }

    fn set_oriented(&mut self, i: usize, j: usize, v: Rat) {
        let (key, stored) = if i < j { ((i, j), v) } else { ((j, i), -v) };
        match self.edge_ids.get(&key) {
            Some(&id) => self.values[id] = stored,
            None => {
                self.edge_ids.insert(key, self.edges.len());
                self.edges.push(key);
                self.values.push(stored);
            }
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Undirected edges in canonical orientation, with their stored value.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &Rat)> {
        self.edges.iter().copied().zip(self.values.iter())
    }

    pub fn value(&self, i: usize, j: usize) -> Rat {
        let key = (i.min(j), i.max(j));
        match self.edge_ids.get(&key) {
            Some(&id) if i < j => self.values[id].clone(),
            Some(&id) => -self.values[id].clone(),
            None => Rat::zero(),
        }
    }

    pub fn value_named(&self, a: &str, b: &str) -> Rat {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.value(i, j),
            _ => Rat::zero(),
        }
    }

    /// `div phi(x) = sum_y phi(x, y)`; equals the divergence of any flow
    /// projecting to `phi`.
    pub fn divergence(&self) -> SignedMeasure {
        let mut div = vec![Rat::zero(); self.vertices.len()];
        for (id, &(i, j)) in self.edges.iter().enumerate() {
            div[i] += &self.values[id];
            div[j] -= &self.values[id];
        }
        SignedMeasure::new(self.vertices.iter().cloned().zip(div))
            .expect("field vertices are unique")
    }
}

/// `phi^Q(x, y) = Q(x, y) - Q(y, x)` on the undirected shadow.
pub fn project_to_field(q: &Flow) -> DiscreteVectorField {
    let g = q.digraph();
    let entries: Vec<(String, String, Rat)> = g
        .shadow_edges()
        .into_iter()
        .map(|(i, j)| {
            (
                g.vertex_name(i).to_owned(),
                g.vertex_name(j).to_owned(),
                q.value(i, j) - q.value(j, i),
            )
        })
        .collect();
    DiscreteVectorField::new(g.vertices().to_vec(), entries).expect("shadow edges are valid")
}

/// The minimal flow `Q^phi(x, y) = [phi(x, y)]_+` on `digraph`; errors when
/// `phi` needs flow on an oriented edge the digraph lacks.
pub fn minimal_flow_from_field(
    phi: &DiscreteVectorField,
    digraph: &Digraph,
) -> Result<Flow, FlowError> {
    for v in phi.vertices() {
        if digraph.vertex_index(v).is_none() {
            return Err(FlowError::FieldGraphMismatch(format!(
                "vertex {v:?} missing from the digraph"
            )));
        }
    }
    let mut flow = Flow::zero(digraph.clone());
    for ((i, j), val) in phi.edges() {
        if val.is_zero() {
            continue;
        }
        let (a, b) = (&phi.vertices()[i], &phi.vertices()[j]);
        let (from, to, amount) = if val.is_positive() {
            (a, b, val.clone())
        } else {
            (b, a, -val.clone())
        };
        let fi = digraph.vertex_index(from).unwrap();
        let ti = digraph.vertex_index(to).unwrap();
        match digraph.edge_id(fi, ti) {
            Some(id) => flow.values[id] = amount,
            None => {
                return Err(FlowError::UnrepresentableField(from.clone(), to.clone()));
            }
        }
    }
    Ok(flow)
}

/// Subtracts `m * Q_C` along support cycles (smallest-index DFS order, `m`
/// the minimum edge value) until the support is acyclic. Divergence is
/// preserved and the result is edgewise at most the input.
pub fn remove_cycles(q: &Flow) -> Flow {
    let mut out = q.clone();
    while let Some(cycle) = out.find_support_cycle() {
        let mut m: Option<Rat> = None;
        for k in 0..cycle.len() {
            let v = out.value(cycle[k], cycle[(k + 1) % cycle.len()]);
            m = Some(match m {
                Some(cur) => cur.min(v),
                None => v,
            });
        }
        let m = m.expect("cycle is nonempty");
        for k in 0..cycle.len() {
            let id = out
                .digraph
                .edge_id(cycle[k], cycle[(k + 1) % cycle.len()])
                .unwrap();
            out.values[id] -= &m;
        }
    }
    out
}

/// A finite positive measure on self-avoiding paths. Entries with equal
/// paths are merged; order is first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMeasure {
    entries: Vec<(DirectedPath, Rat)>,
}

impl PathMeasure {
    pub fn new<I>(entries: I) -> Result<Self, FlowError>
    where
        I: IntoIterator<Item = (DirectedPath, Rat)>,
    {
        let mut merged: Vec<(DirectedPath, Rat)> = Vec::new();
        let mut by_key: HashMap<Vec<String>, usize> = HashMap::new();
        for (p, w) in entries {
            if w.is_negative() {
                return Err(FlowError::NegativeWeight);
            }
            if w.is_zero() {
                continue;
            }
            if !p.is_self_avoiding() {
                return Err(FlowError::NotSelfAvoiding(p.vertices().to_vec()));
            }
            match by_key.get(p.vertices()) {
                Some(&at) => merged[at].1 += w,
                None => {
                    by_key.insert(p.vertices().to_vec(), merged.len());
                    merged.push((p, w));
                }
            }
        }
        Ok(PathMeasure { entries: merged })
    }

    pub fn empty() -> Self {
        PathMeasure { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(DirectedPath, Rat)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum_n q_n`.
    pub fn total_weight(&self) -> Rat {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    /// Endpoint divergence per the path picture: paths contribute `+q` at
    /// their start and `-q` at their end.
    pub fn endpoint_divergence(&self, domain: &[String]) -> SignedMeasure {
        let mut acc: HashMap<&str, Rat> = HashMap::new();
        for (p, w) in &self.entries {
            *acc.entry(p.start()).or_insert_with(Rat::zero) += w;
            *acc.entry(p.end()).or_insert_with(Rat::zero) -= w;
        }
        SignedMeasure::new(domain.iter().map(|v| {
            (
                v.clone(),
                acc.get(v.as_str()).cloned().unwrap_or_else(Rat::zero),
            )
        }))
        .expect("domain vertices are unique")
    }

    /// Union of all path edges as a digraph over `domain`.
    fn union_digraph(&self, domain: &[String]) -> Result<Digraph, GraphError> {
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (p, _) in &self.entries {
            for (a, b) in p.edges_named() {
                if seen.insert((a.to_owned(), b.to_owned())) {
                    edges.push((a.to_owned(), b.to_owned()));
                }
            }
        }
        Digraph::new(domain.to_vec(), edges)
    }

    fn domain(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (p, _) in &self.entries {
            for v in p.vertices() {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// `Q = sum_n q_n Q_{gamma_n}` on `digraph`; every path must lie in it.
pub fn flow_from_decomposition(pm: &PathMeasure, digraph: &Digraph) -> Result<Flow, FlowError> {
    let mut flow = Flow::zero(digraph.clone());
    for (p, w) in pm.entries() {
        if !p.lies_in(digraph) {
            return Err(GraphError::NotAPath(p.vertices().to_vec()).into());
        }
        for (a, b) in p.edges_named() {
            let i = digraph.vertex_index(a).unwrap();
            let j = digraph.vertex_index(b).unwrap();
            flow.add_on_edge(i, j, w);
        }
    }
    Ok(flow)
}

/// Greedy peeling decomposition of an acyclic-support flow.
///
/// Repeatedly starts at the smallest-index vertex with positive residual
/// divergence, follows the smallest-index positive-residual out-edge until
/// a vertex of negative residual divergence, and peels
/// `min(edge bottleneck, residual at both endpoints)`. Every path therefore
/// starts in `V_-` and ends in `V_+`, and the weights sum to
/// `1/2 sum |div Q|`.
pub fn path_decompose(q: &Flow) -> Result<PathMeasure, FlowError> {
    if !q.has_acyclic_support() {
        return Err(FlowError::CyclicSupport);
    }
    let g = q.digraph();
    let n = g.vertex_count();
    let mut residual = q.values.clone();
    let mut div = vec![Rat::zero(); n];
    for (id, &(i, j)) in g.edges().iter().enumerate() {
        div[i] += &residual[id];
        div[j] -= &residual[id];
    }

    let mut entries = Vec::new();
    while let Some(start) = (0..n).find(|&v| div[v].is_positive()) {
        // walk to the first vertex with negative residual divergence
        let mut path = vec![start];
        let mut edge_ids = Vec::new();
        let mut at = start;
        loop {
            if at != start && div[at].is_negative() {
                break;
            }
            let next = g
                .out_neighbors(at)
                .iter()
                .copied()
                .filter(|&w| {
                    let id = g.edge_id(at, w).unwrap();
                    residual[id].is_positive()
                })
                .min()
                .expect("conservation: positive residual divergence has a positive out-edge");
            edge_ids.push(g.edge_id(at, next).unwrap());
            path.push(next);
            at = next;
        }
        let end = at;
        let mut amount = div[start].clone().min(-div[end].clone());
        for &id in &edge_ids {
            amount = amount.min(residual[id].clone());
        }
        debug_assert!(amount.is_positive());
        for &id in &edge_ids {
            residual[id] -= &amount;
        }
        div[start] -= &amount;
        div[end] += &amount;
        let named: Vec<String> = path.iter().map(|&v| g.vertex_name(v).to_owned()).collect();
        entries.push((DirectedPath::new(g, named).expect("walked edges form a path"), amount));
    }
    debug_assert!(residual.iter().all(|v| v.is_zero()), "decomposition incomplete");
    PathMeasure::new(entries)
}

/// Per-insertion record from [`stabilize_decomposition_with_report`].
#[derive(Debug, Clone)]
pub struct StabilizeStep {
    pub inserted_weight: Rat,
    pub l1_drift: Rat,
}

/// Rebalances a decomposition into a stable one (no vertex both starts and
/// ends paths) without changing the induced flow. Paths are inserted one by
/// one; conflicts at the new path's endpoints are resolved by weighted
/// concatenation.
pub fn stabilize_decomposition(pm: &PathMeasure) -> Result<PathMeasure, FlowError> {
    stabilize_decomposition_with_report(pm).map(|(out, _)| out)
}

pub fn stabilize_decomposition_with_report(
    pm: &PathMeasure,
) -> Result<(PathMeasure, Vec<StabilizeStep>), FlowError> {
    let domain = pm.domain();
    let union = pm.union_digraph(&domain)?;
    if !union.is_acyclic() {
        return Err(FlowError::CyclicSupport);
    }

    // mutable working collection keyed by the vertex sequence
    let mut paths: Vec<Vec<String>> = Vec::new();
    let mut weights: Vec<Rat> = Vec::new();
    let mut by_key: HashMap<Vec<String>, usize> = HashMap::new();
    let mut starters: HashMap<String, Vec<usize>> = HashMap::new();
    let mut enders: HashMap<String, Vec<usize>> = HashMap::new();
    let mut report = Vec::new();

    let add_entry = |paths: &mut Vec<Vec<String>>,
                         weights: &mut Vec<Rat>,
                         by_key: &mut HashMap<Vec<String>, usize>,
                         starters: &mut HashMap<String, Vec<usize>>,
                         enders: &mut HashMap<String, Vec<usize>>,
                         key: Vec<String>,
                         w: Rat| {
        if let Some(&at) = by_key.get(&key) {
            weights[at] += w;
            return;
        }
        let id = paths.len();
        starters.entry(key.first().unwrap().clone()).or_default().push(id);
        enders.entry(key.last().unwrap().clone()).or_default().push(id);
        by_key.insert(key.clone(), id);
        paths.push(key);
        weights.push(w);
    };

    for (gamma, q) in pm.entries() {
        let before: HashMap<Vec<String>, Rat> = paths
            .iter()
            .cloned()
            .zip(weights.iter().cloned())
            .filter(|(_, w)| !w.is_zero())
            .collect();

        let s = gamma.start().to_owned();
        let t = gamma.end().to_owned();
        let gamma_key = gamma.vertices().to_vec();

        // stage 1: absorb paths ending at the new start by concatenation
        let mut fragments: Vec<(Vec<String>, Rat)> = Vec::new();
        let mut q_rem = q.clone();
        let ender_ids: Vec<usize> = enders.get(&s).cloned().unwrap_or_default();
        for id in ender_ids {
            if q_rem.is_zero() {
                break;
            }
            if weights[id].is_zero() {
                continue;
            }
            let take = weights[id].clone().min(q_rem.clone());
            weights[id] -= &take;
            q_rem -= &take;
            let mut key = paths[id].clone();
            key.extend(gamma_key[1..].iter().cloned());
            fragments.push((key, take));
        }
        if !q_rem.is_zero() {
            fragments.push((gamma_key.clone(), q_rem));
        }

        // stage 2: absorb paths starting at the new end
        let starter_ids: Vec<usize> = starters.get(&t).cloned().unwrap_or_default();
        for (frag, frag_w) in fragments {
            let mut rem = frag_w;
            for &id in &starter_ids {
                if rem.is_zero() {
                    break;
                }
                if weights[id].is_zero() {
                    continue;
                }
                let take = weights[id].clone().min(rem.clone());
                weights[id] -= &take;
                rem -= &take;
                let mut key = frag.clone();
                key.extend(paths[id][1..].iter().cloned());
                add_entry(
                    &mut paths,
                    &mut weights,
                    &mut by_key,
                    &mut starters,
                    &mut enders,
                    key,
                    take,
                );
            }
            if !rem.is_zero() {
                add_entry(
                    &mut paths,
                    &mut weights,
                    &mut by_key,
                    &mut starters,
                    &mut enders,
                    frag,
                    rem,
                );
            }
        }

        let mut drift = Rat::zero();
        let mut keys: HashSet<&Vec<String>> = before.keys().collect();
        keys.extend(paths.iter());
        for key in keys {
            let old = before.get(key).cloned().unwrap_or_else(Rat::zero);
            let new = by_key
                .get(key)
                .map(|&at| weights[at].clone())
                .unwrap_or_else(Rat::zero);
            drift += (old - new).abs();
        }
        report.push(StabilizeStep { inserted_weight: q.clone(), l1_drift: drift });
    }

    let out = PathMeasure::new(paths.into_iter().zip(weights).filter_map(|(key, w)| {
        if w.is_zero() {
            None
        } else {
            Some((
                DirectedPath::from_vertices(key).expect("stabilized paths have length >= 1"),
                w,
            ))
        }
    }))?;
    debug_assert!(is_stable(&out));
    Ok((out, report))
}

/// No vertex both starts and ends paths of the collection.
pub fn is_stable(pm: &PathMeasure) -> bool {
    let starts: HashSet<&str> = pm.entries().iter().map(|(p, _)| p.start()).collect();
    pm.entries().iter().all(|(p, _)| !starts.contains(p.end()))
}
