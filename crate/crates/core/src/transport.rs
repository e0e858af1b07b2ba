//! Discrete mass transportation: geodesic costs from weighted digraphs, the
//! minimal-flow (Beckmann) problem, the coupling-side Kantorovich problem
//! used as its independent cross-check, and the closed forms for chains,
//! rings and the Boolean lattice.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::coupling::{coupling_from_flow_decomposition, Coupling, CouplingError};
use crate::dominance::{dominates_via_flow, ring_structure, DominanceError, Lattice};
use crate::flow::{project_to_field, remove_cycles, Flow, FlowError};
use crate::graph::{fundamental_cycle_basis, hasse_digraph, CycleBasis, Digraph, GraphError};
use crate::measure::{difference, distribution_function, Measure, MeasureError};
use crate::netflow::Network;
use crate::num::{pos_part, rat, Rat};
use crate::sample::random_feasible_flow;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Dominance(#[from] DominanceError),
    #[error("no directed path from {0:?} to {1:?}")]
    Unreachable(String, String),
    #[error("transport instance is infeasible: {0}")]
    Infeasible(String),
    #[error("edge ({0:?}, {1:?}) has no weight")]
    MissingWeight(String, String),
    #[error("not a single cycle: {0}")]
    NotASingleCycle(String),
    #[error("flow is not in minimal form: both ({0:?}, {1:?}) and the reverse are positive")]
    NotMinimalForm(String, String),
    #[error("mu1 does not dominate mu2; violating up-set {0:?}")]
    NotDominated(Vec<String>),
}

/// A digraph with a nonnegative rational weight on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    digraph: Digraph,
    weights: Vec<Rat>,
}

impl WeightedDigraph {
    pub fn new<I>(digraph: Digraph, weights: I) -> Result<Self, TransportError>
    where
        I: IntoIterator<Item = (String, String, Rat)>,
    {
        let mut per_edge: Vec<Option<Rat>> = vec![None; digraph.edge_count()];
        for (a, b, w) in weights {
            if w.is_negative() {
                return Err(FlowError::NegativeValue(a, b).into());
            }
            let i = digraph
                .vertex_index(&a)
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let j = digraph
                .vertex_index(&b)
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            let id = digraph.edge_id(i, j).ok_or(FlowError::NotAnEdge(a, b))?;
            per_edge[id] = Some(w);
        }
        let mut weights = Vec::with_capacity(per_edge.len());
        for (id, w) in per_edge.into_iter().enumerate() {
            match w {
                Some(w) => weights.push(w),
                None => {
                    let (a, b) = digraph.edge_named(id);
                    return Err(TransportError::MissingWeight(a.to_owned(), b.to_owned()));
                }
            }
        }
        Ok(WeightedDigraph { digraph, weights })
    }

    /// Unit weight on every edge.
    pub fn unit(digraph: Digraph) -> Self {
        let weights = vec![rat(1); digraph.edge_count()];
        WeightedDigraph { digraph, weights }
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn weight(&self, edge_id: usize) -> &Rat {
        &self.weights[edge_id]
    }

    pub fn weight_named(&self, a: &str, b: &str) -> Option<Rat> {
        let i = self.digraph.vertex_index(a)?;
        let j = self.digraph.vertex_index(b)?;
        self.digraph.edge_id(i, j).map(|id| self.weights[id].clone())
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
                    &self.weights[id],
                )
            })
    }

    /// `<Q, w>_E`, the weighted mass of a flow on the same digraph.
    pub fn pairing(&self, q: &Flow) -> Rat {
        (0..self.digraph.edge_count())
            .map(|id| q.edge_value(id) * &self.weights[id])
            .sum()
    }

    /// Exact Dijkstra distances from `from` (ties by vertex input order).
    fn dijkstra(&self, from: usize) -> Vec<Option<Rat>> {
        let n = self.digraph.vertex_count();
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        dist[from] = Some(Rat::zero());
        let mut heap: BinaryHeap<Reverse<(Rat, usize)>> = BinaryHeap::new();
        heap.push(Reverse((Rat::zero(), from)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].as_ref() != Some(&d) {
                continue;
            }
            for &v in self.digraph.out_neighbors(u) {
                let id = self.digraph.edge_id(u, v).unwrap();
                let cand = &d + &self.weights[id];
                let better = match &dist[v] {
                    None => true,
                    Some(cur) => cand < *cur,
                };
                if better {
                    dist[v] = Some(cand.clone());
                    heap.push(Reverse((cand, v)));
                }
            }
        }
        dist
    }
}

/// Shortest-path cost `c(x, y)` under the edge weights; zero on the
/// diagonal.
pub fn geodesic_cost(wg: &WeightedDigraph, x: &str, y: &str) -> Result<Rat, TransportError> {
    let i = wg
        .digraph
        .vertex_index(x)
        .ok_or_else(|| GraphError::UnknownVertex(x.to_owned()))?;
    let j = wg
        .digraph
        .vertex_index(y)
        .ok_or_else(|| GraphError::UnknownVertex(y.to_owned()))?;
    if i == j {
        return Ok(Rat::zero());
    }
    wg.dijkstra(i)[j]
        .clone()
        .ok_or_else(|| TransportError::Unreachable(x.to_owned(), y.to_owned()))
}

/// A cost matrix with possibly missing (infinite) entries.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    entries: HashMap<(usize, usize), Rat>,
}

impl CostMatrix {
    pub fn new<I>(vertices: Vec<String>, entries: I) -> Result<Self, TransportError>
    where
        I: IntoIterator<Item = (String, String, Rat)>,
    {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()).into());
            }
        }
        let mut map = HashMap::new();
        for (a, b, c) in entries {
            if c.is_negative() {
                return Err(FlowError::NegativeValue(a, b).into());
            }
            let i = *index
                .get(&a)
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let j = *index
                .get(&b)
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            map.insert((i, j), c);
        }
        Ok(CostMatrix { vertices, index, entries: map })
    }

    /// All-pairs geodesic costs of a weighted digraph; unreachable pairs are
    /// left infinite.
    pub fn from_geodesic(wg: &WeightedDigraph) -> CostMatrix {
        let n = wg.digraph.vertex_count();
        let mut entries = HashMap::new();
        for i in 0..n {
            let dist = wg.dijkstra(i);
            for (j, d) in dist.iter().enumerate() {
                if i == j {
                    entries.insert((i, j), Rat::zero());
                } else if let Some(d) = d {
                    entries.insert((i, j), d.clone());
                }
            }
        }
        CostMatrix {
            vertices: wg.digraph.vertices().to_vec(),
            index: wg
                .digraph
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i))
                .collect(),
            entries,
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn get(&self, a: &str, b: &str) -> Option<Rat> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        self.entries.get(&(i, j)).cloned()
    }

    /// `E_rho(c)`; `None` when the coupling charges an infinite-cost pair.
    pub fn expectation(&self, c: &Coupling) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (a, b, w) in c.iter_named() {
            acc += self.get(a, b)? * w;
        }
        Some(acc)
    }
}

/// Optimal value, an optimal flow, and an optimal coupling extracted from
/// it (or from the pair weights in the Kantorovich route).
#[derive(Debug, Clone)]
pub struct TransportResult {
    pub optimal_value: Rat,
    pub optimal_flow: Flow,
    pub optimal_coupling: Coupling,
}

fn rekey_probability_pair(
    domain: &[String],
    mu1: &Measure,
    mu2: &Measure,
) -> Result<(Measure, Measure), TransportError> {
    let m1 = Measure::on_vertices(domain, mu1.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    let m2 = Measure::on_vertices(domain, mu2.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    m1.require_probability()?;
    m2.require_probability()?;
    Ok((m1, m2))
}

/// Minimal-flow transport: minimize `<Q, w>` over flows with
/// `div Q = mu1 - mu2`, by successive shortest paths; zero-cost support
/// cycles are then removed so the optimal flow decomposes into a coupling.
pub fn beckmann_min(
    wg: &WeightedDigraph,
    mu1: &Measure,
    mu2: &Measure,
) -> Result<TransportResult, TransportError> {
    let g = &wg.digraph;
    let n = g.vertex_count();
    let (m1, m2) = rekey_probability_pair(g.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;

    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    let mut supply = Rat::zero();
    for (i, v) in g.vertices().iter().enumerate() {
        let dv = d.get(v);
        if dv.is_positive() {
            supply += &dv;
            net.arc(s, i, Some(dv), Rat::zero());
        } else if dv.is_negative() {
            net.arc(i, t, Some(-dv), Rat::zero());
        }
    }
    let mut edge_arcs = Vec::with_capacity(g.edge_count());
    for (id, &(i, j)) in g.edges().iter().enumerate() {
        edge_arcs.push(net.arc(i, j, None, wg.weights[id].clone()));
    }
    let (value, cost) = net.min_cost_flow(s, t);
    if value != supply {
        return Err(TransportError::Infeasible(
            "some demand is unreachable from the supplies".into(),
        ));
    }
    let mut raw = Flow::zero(g.clone());
    for (edge_id, &arc) in edge_arcs.iter().enumerate() {
        let v = net.flow_on(arc).clone();
        if v.is_positive() {
            let (a, b) = g.edge_named(edge_id);
            let (a, b) = (a.to_owned(), b.to_owned());
            raw.set_named(&a, &b, v).unwrap();
        }
    }
    // only zero-cost cycles can survive in an optimal flow, so this keeps
    // the value while making the support acyclic
    let q = remove_cycles(&raw);
    let optimal_value = wg.pairing(&q);
    debug_assert_eq!(optimal_value, cost);
    let optimal_coupling = coupling_from_flow_decomposition(&q, &m1)?;
    Ok(TransportResult { optimal_value, optimal_flow: q, optimal_coupling })
}

/// Coupling-side transport: minimize `E_rho(c)` over couplings of
/// `(mu1, mu2)` by min-cost bipartite flow on the finite-cost pairs.
pub fn kantorovich_min(
    costs: &CostMatrix,
    mu1: &Measure,
    mu2: &Measure,
) -> Result<TransportResult, TransportError> {
    let n = costs.vertices.len();
    let (m1, m2) = rekey_probability_pair(&costs.vertices.to_vec(), mu1, mu2)?;
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    for (i, v) in costs.vertices.iter().enumerate() {
        let w = m1.get(v);
        if w.is_positive() {
            net.arc(s, i, Some(w), Rat::zero());
        }
    }
    let mut pair_arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(c) = costs.entries.get(&(i, j)) {
                pair_arcs.push(((i, j), net.arc(i, n + j, None, c.clone())));
            }
        }
    }
    for (j, v) in costs.vertices.iter().enumerate() {
        let w = m2.get(v);
        if w.is_positive() {
            net.arc(n + j, t, Some(w), Rat::zero());
        }
    }
    let (value, cost) = net.min_cost_flow(s, t);
    if value != m1.total() {
        return Err(TransportError::Infeasible(
            "finite-cost pairs do not admit a coupling".into(),
        ));
    }
    let entries: Vec<(String, String, Rat)> = pair_arcs
        .iter()
        .filter(|(_, arc)| net.flow_on(*arc).is_positive())
        .map(|((i, j), arc)| {
            (
                costs.vertices[*i].clone(),
                costs.vertices[*j].clone(),
                net.flow_on(*arc).clone(),
            )
        })
        .collect();
    let coupling = Coupling::new(costs.vertices.to_vec(), entries)?;
    let optimal_flow = coupling.one_step_flow();
    Ok(TransportResult { optimal_value: cost, optimal_flow, optimal_coupling: coupling })
}

/// Closed-form transport cost on a chain with per-direction weights:
/// `sum_x (w(x, x+1) [F1 - F2]_+(x) + w(x+1, x) [F2 - F1]_+(x))`.
pub fn chain_wasserstein(
    chain_order: &[String],
    forward_weights: &[Rat],
    backward_weights: &[Rat],
    mu1: &Measure,
    mu2: &Measure,
) -> Result<Rat, TransportError> {
    let steps = chain_order.len().saturating_sub(1);
    if forward_weights.len() != steps || backward_weights.len() != steps {
        return Err(TransportError::Infeasible(format!(
            "expected {steps} weights per direction"
        )));
    }
    if forward_weights
        .iter()
        .chain(backward_weights)
        .any(|w| w.is_negative())
    {
        return Err(TransportError::Infeasible("negative chain weight".into()));
    }
    let chain = chain_order.to_vec();
    let m1 = Measure::on_vertices(&chain, mu1.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    let m2 = Measure::on_vertices(&chain, mu2.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    if m1.total() != m2.total() {
        return Err(MeasureError::MassMismatch(
            m1.total().to_string(),
            m2.total().to_string(),
        )
        .into());
    }
    let f1 = distribution_function(&m1, &chain)?;
    let f2 = distribution_function(&m2, &chain)?;
    let mut acc = Rat::zero();
    for x in 0..steps {
        let gap = &f1[x].1 - &f2[x].1;
        acc += pos_part(&gap) * &forward_weights[x];
        acc += pos_part(&-gap.clone()) * &backward_weights[x];
    }
    Ok(acc)
}

/// Optimal circulation interval on a weighted ring.
#[derive(Debug, Clone)]
pub struct RingOptimal {
    /// Argmin interval endpoints of the circulation parameter; `None` means
    /// unbounded on that side (possible only with zero weights).
    pub alpha_min: Option<Rat>,
    pub alpha_max: Option<Rat>,
    /// Transport output for the interval midpoint.
    pub result: TransportResult,
}

struct RingCost {
    phi_star: Vec<Rat>,
    forward_w: Vec<Option<Rat>>, // None = direction absent (infinite weight)
    backward_w: Vec<Option<Rat>>,
}

impl RingCost {
    /// `g(alpha)`; `None` when some needed direction is absent.
    fn eval(&self, alpha: &Rat) -> Option<Rat> {
        let mut acc = Rat::zero();
        for t in 0..self.phi_star.len() {
            let v = &self.phi_star[t] + alpha;
            if v.is_positive() {
                acc += v * self.forward_w[t].as_ref()?;
            } else if v.is_negative() {
                acc += -v * self.backward_w[t].as_ref()?;
            }
        }
        Some(acc)
    }
}

fn ring_cost_structure(
    wg: &WeightedDigraph,
    d: &crate::measure::SignedMeasure,
) -> Result<(Vec<usize>, RingCost), TransportError> {
    let g = &wg.digraph;
    let basis = fundamental_cycle_basis(g)?;
    if basis.cycles.len() != 1 {
        return Err(TransportError::NotASingleCycle(format!(
            "{} independent cycles",
            basis.cycles.len()
        )));
    }
    let ring = ring_structure(g, &basis.cycles[0], d).map_err(|e| match e {
        DominanceError::NotASingleCycle(msg) => TransportError::NotASingleCycle(msg),
        other => TransportError::Dominance(other),
    })?;
    let n = ring.order.len();
    let name = |i: usize| g.vertex_name(ring.order[i]).to_owned();
    let cost = RingCost {
        phi_star: ring.phi_star.clone(),
        forward_w: (0..n)
            .map(|t| wg.weight_named(&name(t), &name((t + 1) % n)))
            .collect(),
        backward_w: (0..n)
            .map(|t| wg.weight_named(&name((t + 1) % n), &name(t)))
            .collect(),
    };
    Ok((ring.order, cost))
}

/// Solves ring transport by scanning the breakpoints of the piecewise
/// linear circulation cost; returns the whole optimal parameter interval
/// and the transport result at its midpoint.
pub fn ring_optimal(
    wg: &WeightedDigraph,
    mu1: &Measure,
    mu2: &Measure,
) -> Result<RingOptimal, TransportError> {
    let g = &wg.digraph;
    let (m1, m2) = rekey_probability_pair(g.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    let (order, cost) = ring_cost_structure(wg, &d)?;
    let n = order.len();
    let name = |i: usize| g.vertex_name(order[i]).to_owned();

    // feasibility window from absent directions
    let mut window_lo: Option<Rat> = None;
    let mut window_hi: Option<Rat> = None;
    for t in 0..n {
        let b = -cost.phi_star[t].clone();
        if cost.backward_w[t].is_none() && window_lo.as_ref().is_none_or(|cur| b > *cur) {
            window_lo = Some(b.clone());
        }
        if cost.forward_w[t].is_none() && window_hi.as_ref().is_none_or(|cur| b < *cur) {
            window_hi = Some(b);
        }
    }
    if let (Some(lo), Some(hi)) = (&window_lo, &window_hi) {
        if lo > hi {
            return Err(TransportError::Infeasible(
                "absent ring directions admit no flow".into(),
            ));
        }
    }

    // candidates: breakpoints clamped into the window, plus the window ends
    let mut candidates: Vec<Rat> = (0..n).map(|t| -cost.phi_star[t].clone()).collect();
    candidates.extend(window_lo.iter().cloned());
    candidates.extend(window_hi.iter().cloned());
    candidates.retain(|a| {
        window_lo.as_ref().is_none_or(|lo| a >= lo)
            && window_hi.as_ref().is_none_or(|hi| a <= hi)
    });
    if candidates.is_empty() {
        candidates.push(
            window_lo
                .clone()
                .or_else(|| window_hi.clone())
                .ok_or_else(|| TransportError::Infeasible("ring without breakpoints".into()))?,
        );
    }
    candidates.sort();
    candidates.dedup();
    let values: Vec<Rat> = candidates
        .iter()
        .map(|a| {
            cost.eval(a).ok_or_else(|| {
                TransportError::Infeasible("candidate leaves the feasible window".into())
            })
        })
        .collect::<Result<_, _>>()?;
    let best = values.iter().min().expect("candidates nonempty").clone();
    let first = candidates
        .iter()
        .zip(&values)
        .find(|(_, v)| **v == best)
        .map(|(a, _)| a.clone())
        .unwrap();
    let last = candidates
        .iter()
        .zip(&values)
        .rev()
        .find(|(_, v)| **v == best)
        .map(|(a, _)| a.clone())
        .unwrap();

    // flat tails reach infinity only when an entire direction is free
    let backward_total_zero = cost
        .backward_w
        .iter()
        .all(|w| w.as_ref().is_some_and(|w| w.is_zero()));
    let forward_total_zero = cost
        .forward_w
        .iter()
        .all(|w| w.as_ref().is_some_and(|w| w.is_zero()));
    let alpha_min = if backward_total_zero && window_lo.is_none() {
        None
    } else {
        Some(first)
    };
    let alpha_max = if forward_total_zero && window_hi.is_none() {
        None
    } else {
        Some(last)
    };

    let mid = match (&alpha_min, &alpha_max) {
        (Some(a), Some(b)) => (a + b) / rat(2),
        (Some(a), None) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => Rat::zero(),
    };
    let mut q = Flow::zero(g.clone());
    for t in 0..n {
        let v = &cost.phi_star[t] + &mid;
        if v.is_positive() {
            let (a, b) = (name(t), name((t + 1) % n));
            q.set_named(&a, &b, v).map_err(|_| {
                TransportError::Infeasible("midpoint flow needs an absent direction".into())
            })?;
        } else if v.is_negative() {
            let (a, b) = (name((t + 1) % n), name(t));
            q.set_named(&a, &b, -v).map_err(|_| {
                TransportError::Infeasible("midpoint flow needs an absent direction".into())
            })?;
        }
    }
    let optimal_value = wg.pairing(&q);
    let acyclic = remove_cycles(&q);
    let optimal_coupling = coupling_from_flow_decomposition(&acyclic, &m1)?;
    Ok(RingOptimal {
        alpha_min,
        alpha_max,
        result: TransportResult { optimal_value, optimal_flow: q, optimal_coupling },
    })
}

/// The ring flow `Q^{phi^alpha}` itself; `None` when that parameter needs
/// an absent direction.
pub fn ring_flow_at(
    wg: &WeightedDigraph,
    mu1: &Measure,
    mu2: &Measure,
    alpha: &Rat,
) -> Result<Option<Flow>, TransportError> {
    let g = &wg.digraph;
    let (m1, m2) = rekey_probability_pair(g.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    let (order, cost) = ring_cost_structure(wg, &d)?;
    let n = order.len();
    let name = |i: usize| g.vertex_name(order[i]).to_owned();
    let mut q = Flow::zero(g.clone());
    for t in 0..n {
        let v = &cost.phi_star[t] + alpha;
        if v.is_positive() {
            let (a, b) = (name(t), name((t + 1) % n));
            if q.set_named(&a, &b, v).is_err() {
                return Ok(None);
            }
        } else if v.is_negative() {
            let (a, b) = (name((t + 1) % n), name(t));
            if q.set_named(&a, &b, -v).is_err() {
                return Ok(None);
            }
        }
    }
    Ok(Some(q))
}

/// Evaluates `<Q^{phi^alpha}, w>` for a given ring circulation parameter;
/// `None` when that parameter needs an absent direction.
pub fn ring_cost_at(
    wg: &WeightedDigraph,
    mu1: &Measure,
    mu2: &Measure,
    alpha: &Rat,
) -> Result<Option<Rat>, TransportError> {
    let g = &wg.digraph;
    let (m1, m2) = rekey_probability_pair(g.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    let (_, cost) = ring_cost_structure(wg, &d)?;
    Ok(cost.eval(alpha))
}

fn one_sided_derivatives(
    phi: &crate::flow::DiscreteVectorField,
    direction: &crate::flow::DiscreteVectorField,
    wg: &WeightedDigraph,
) -> (Option<Rat>, Option<Rat>) {
    // right derivative (None = +infinity), left derivative (None = -infinity)
    let mut right: Option<Rat> = Some(Rat::zero());
    let mut left: Option<Rat> = Some(Rat::zero());
    for ((i, j), _) in direction.edges() {
        let a = direction.vertices()[i].clone();
        let b = direction.vertices()[j].clone();
        for (u, v) in [(a.clone(), b.clone()), (b, a)] {
            let dv = direction.value_named(&u, &v);
            if dv.is_zero() {
                continue;
            }
            let pv = phi.value_named(&u, &v);
            let w = wg.weight_named(&u, &v);
            if pv.is_positive() {
                // a used direction contributes its slope on both sides;
                // flows on the digraph never use absent directions
                if let Some(w) = &w {
                    if let Some(r) = &mut right {
                        *r += &dv * w;
                    }
                    if let Some(l) = &mut left {
                        *l += &dv * w;
                    }
                }
            } else if pv.is_zero() {
                if dv.is_positive() {
                    match &w {
                        Some(w) => {
                            if let Some(r) = &mut right {
                                *r += &dv * w;
                            }
                        }
                        None => right = None, // +infinity
                    }
                } else {
                    match &w {
                        Some(w) => {
                            if let Some(l) = &mut left {
                                *l += &dv * w;
                            }
                        }
                        None => left = None, // -infinity
                    }
                }
            }
        }
    }
    (right, left)
}

/// Optimality test for a minimal-form flow: along every fundamental-cycle
/// perturbation the one-sided derivatives must bracket zero.
pub fn subdifferential_optimality_check(
    wg: &WeightedDigraph,
    flow: &Flow,
    basis: &CycleBasis,
) -> Result<bool, TransportError> {
    for (i, j) in flow.digraph().shadow_edges() {
        if flow.value(i, j).is_positive() && flow.value(j, i).is_positive() {
            return Err(TransportError::NotMinimalForm(
                flow.digraph().vertex_name(i).to_owned(),
                flow.digraph().vertex_name(j).to_owned(),
            ));
        }
    }
    let phi = project_to_field(flow);
    for cycle in &basis.cycles {
        let entries: Vec<(String, String, Rat)> = cycle
            .edges_named()
            .map(|(a, b)| (a.to_owned(), b.to_owned(), rat(1)))
            .collect();
        let direction =
            crate::flow::DiscreteVectorField::new(flow.digraph().vertices().to_vec(), entries)?;
        let (right, left) = one_sided_derivatives(&phi, &direction, wg);
        let right_ok = right.is_none_or(|r| !r.is_negative());
        let left_ok = left.is_none_or(|l| !l.is_positive());
        if !(right_ok && left_ok) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// On the Boolean lattice with unit weights every feasible Hasse flow costs
/// the same; probes `probe_count` random feasible flows and compares their
/// total mass with the optimal transport value.
pub fn lattice_all_flows_optimal<R: Rng>(
    bits: u32,
    mu1: &Measure,
    mu2: &Measure,
    probe_count: usize,
    rng: &mut R,
) -> Result<bool, TransportError> {
    assert!(bits <= 4, "desk-scale guard");
    let lattice = Lattice::hypercube(bits);
    let hasse = hasse_digraph(&lattice.order());
    let (m1, m2) = rekey_probability_pair(hasse.vertices(), mu1, mu2)?;
    let verdict = dominates_via_flow(&m1, &m2, &hasse)?;
    if !verdict.dominates {
        return Err(TransportError::NotDominated(
            verdict.violating_up_set().unwrap_or_default().to_vec(),
        ));
    }
    let bidirected = WeightedDigraph::unit(hasse.bidirected_shadow());
    let optimum = beckmann_min(&bidirected, &m1, &m2)?.optimal_value;
    let d = difference(&m1, &m2)?;
    for _ in 0..probe_count {
        let q = random_feasible_flow(&hasse, &d, rng)
            .expect("dominated pairs always admit a feasible flow");
        if q.total_mass() != optimum {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{flow_from_coupling, PathChoice};
    use crate::num::ratio;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(vertices: &[&str], edges: &[(&str, &str)]) -> Digraph {
        Digraph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap()
    }

    fn wdg(vertices: &[&str], edges: &[(&str, &str, Rat)]) -> WeightedDigraph {
        let dg = g(
            vertices,
            &edges.iter().map(|(a, b, _)| (*a, *b)).collect::<Vec<_>>(),
        );
        WeightedDigraph::new(
            dg,
            edges
                .iter()
                .map(|(a, b, w)| (a.to_string(), b.to_string(), w.clone())),
        )
        .unwrap()
    }

    fn measure(domain: &[&str], weights: &[(&str, Rat)]) -> Measure {
        let d: Vec<String> = domain.iter().map(|s| s.to_string()).collect();
        Measure::on_vertices(&d, weights.iter().map(|(v, w)| (v.to_string(), w.clone())))
            .unwrap()
    }

    /// Bellman-Ford oracle for geodesics.
    fn bellman_ford(wg: &WeightedDigraph, from: usize) -> Vec<Option<Rat>> {
        let n = wg.digraph().vertex_count();
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        dist[from] = Some(Rat::zero());
        for _ in 0..n {
            for (id, &(i, j)) in wg.digraph().edges().iter().enumerate() {
                if let Some(di) = dist[i].clone() {
                    let cand = di + wg.weight(id);
                    if dist[j].as_ref().is_none_or(|dj| cand < *dj) {
                        dist[j] = Some(cand);
                    }
                }
            }
        }
        dist
    }

    fn random_weighted(rng: &mut impl rand::Rng, n: usize, p: f64) -> WeightedDigraph {
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(p) {
                    edges.push((
                        vs[i].clone(),
                        vs[j].clone(),
                        ratio(rng.gen_range(0..=6), rng.gen_range(1..=3)),
                    ));
                }
            }
        }
        let dg = Digraph::new(
            vs,
            edges
                .iter()
                .map(|(a, b, _)| (a.clone(), b.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        WeightedDigraph::new(dg, edges).unwrap()
    }

    /// Random weighted digraph where every ordered pair is connected.
    fn random_connected_weighted(rng: &mut impl rand::Rng, n: usize) -> WeightedDigraph {
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        // a bidirected ring guarantees strong connectivity
        for i in 0..n {
            let j = (i + 1) % n;
            edges.push((
                vs[i].clone(),
                vs[j].clone(),
                ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)),
            ));
            edges.push((
                vs[j].clone(),
                vs[i].clone(),
                ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let adjacent = j == (i + 1) % n || i == (j + 1) % n;
                if i != j && !adjacent && rng.gen_bool(0.3) {
                    edges.push((
                        vs[i].clone(),
                        vs[j].clone(),
                        ratio(rng.gen_range(1..=6), rng.gen_range(1..=3)),
                    ));
                }
            }
        }
        let dg = Digraph::new(
            vs,
            edges
                .iter()
                .map(|(a, b, _)| (a.clone(), b.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        WeightedDigraph::new(dg, edges).unwrap()
    }

    #[test]
    fn geodesic_basics() {
        let wg = wdg(&["a", "b"], &[("a", "b", ratio(3, 2))]);
        assert_eq!(geodesic_cost(&wg, "a", "a").unwrap(), rat(0));
        assert_eq!(geodesic_cost(&wg, "a", "b").unwrap(), ratio(3, 2));
        assert!(matches!(
            geodesic_cost(&wg, "b", "a"),
            Err(TransportError::Unreachable(_, _))
        ));
    }

    #[test]
    fn geodesic_matches_bellman_ford_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for _ in 0..30 {
            let wg = random_weighted(&mut rng, 8, 0.35);
            for i in 0..8 {
                let fast = wg.dijkstra(i);
                let slow = bellman_ford(&wg, i);
                assert_eq!(fast, slow);
            }
            // triangle inequality on sampled triples
            let costs = CostMatrix::from_geodesic(&wg);
            let vs = wg.digraph().vertices();
            for _ in 0..50 {
                let x = &vs[rng.gen_range(0..8)];
                let y = &vs[rng.gen_range(0..8)];
                let z = &vs[rng.gen_range(0..8)];
                if let (Some(xz), Some(xy), Some(yz)) =
                    (costs.get(x, z), costs.get(x, y), costs.get(y, z))
                {
                    assert!(xz <= xy + yz);
                }
            }
        }
    }

    #[test]
    fn symmetric_weights_give_symmetric_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let wg = {
            let vs: Vec<String> = (0..6).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..6 {
                for j in (i + 1)..6 {
                    if rng.gen_bool(0.6) {
                        let w = ratio(rng.gen_range(1..=5), rng.gen_range(1..=2));
                        edges.push((vs[i].clone(), vs[j].clone(), w.clone()));
                        edges.push((vs[j].clone(), vs[i].clone(), w));
                    }
                }
            }
            let dg = Digraph::new(
                vs,
                edges
                    .iter()
                    .map(|(a, b, _)| (a.clone(), b.clone()))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            WeightedDigraph::new(dg, edges).unwrap()
        };
        let costs = CostMatrix::from_geodesic(&wg);
        for a in wg.digraph().vertices() {
            for b in wg.digraph().vertices() {
                assert_eq!(costs.get(a, b), costs.get(b, a));
            }
        }
    }

    #[test]
    fn beckmann_trivial_cases() {
        let wg = wdg(&["0", "1"], &[("0", "1", rat(3))]);
        let m = measure(&["0", "1"], &[("0", ratio(1, 2)), ("1", ratio(1, 2))]);
        let r = beckmann_min(&wg, &m, &m).unwrap();
        assert_eq!(r.optimal_value, rat(0));
        assert_eq!(r.optimal_flow.total_mass(), rat(0));
        assert_eq!(r.optimal_coupling, Coupling::diagonal(&m));

        let d0 = measure(&["0", "1"], &[("0", rat(1))]);
        let d1 = measure(&["0", "1"], &[("1", rat(1))]);
        let r = beckmann_min(&wg, &d0, &d1).unwrap();
        assert_eq!(r.optimal_value, rat(3));
        assert_eq!(r.optimal_flow.value_named("0", "1"), rat(1));
        assert!(matches!(
            beckmann_min(&wg, &d1, &d0),
            Err(TransportError::Infeasible(_))
        ));
    }

    #[test]
    fn kantorovich_trivial_and_northwest() {
        let vs: Vec<String> = vec!["a".into(), "b".into()];
        let zero = CostMatrix::new(
            vs.clone(),
            vs.iter()
                .flat_map(|a| vs.iter().map(move |b| (a.clone(), b.clone(), rat(0))))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let m1 = measure(&["a", "b"], &[("a", ratio(3, 4)), ("b", ratio(1, 4))]);
        let m2 = measure(&["a", "b"], &[("a", ratio(1, 4)), ("b", ratio(3, 4))]);
        let r = kantorovich_min(&zero, &m1, &m2).unwrap();
        assert_eq!(r.optimal_value, rat(0));
        // northwest corner: serve (a,a) first, then spill into (a,b)
        assert_eq!(r.optimal_coupling.get("a", "a"), ratio(1, 4));
        assert_eq!(r.optimal_coupling.get("a", "b"), ratio(1, 2));
        assert_eq!(r.optimal_coupling.get("b", "b"), ratio(1, 4));

        let da = measure(&["a", "b"], &[("a", rat(1))]);
        let db = measure(&["a", "b"], &[("b", rat(1))]);
        let costs = CostMatrix::new(
            vs.clone(),
            vec![
                ("a".into(), "a".into(), rat(0)),
                ("b".into(), "b".into(), rat(0)),
                ("a".into(), "b".into(), ratio(7, 2)),
            ],
        )
        .unwrap();
        let r = kantorovich_min(&costs, &da, &db).unwrap();
        assert_eq!(r.optimal_value, ratio(7, 2));
        assert_eq!(r.optimal_coupling.get("a", "b"), rat(1));
    }

    #[test]
    fn beckmann_equals_kantorovich_under_geodesic_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..25 {
            let wg = random_connected_weighted(&mut rng, 6);
            let domain = wg.digraph().vertices().to_vec();
            let m1 = sample::random_probability_measure(&mut rng, &domain);
            let m2 = sample::random_probability_measure(&mut rng, &domain);
            let b = beckmann_min(&wg, &m1, &m2).unwrap();
            let costs = CostMatrix::from_geodesic(&wg);
            let k = kantorovich_min(&costs, &m1, &m2).unwrap();
            assert_eq!(b.optimal_value, k.optimal_value);
            // extracted couplings have exact marginals and matching cost
            let (bm1, bm2) = b.optimal_coupling.marginals();
            assert_eq!(
                bm1,
                Measure::on_vertices(&domain, m1.iter().map(|(v, w)| (v.to_owned(), w.clone())))
                    .unwrap()
            );
            assert_eq!(
                bm2,
                Measure::on_vertices(&domain, m2.iter().map(|(v, w)| (v.to_owned(), w.clone())))
                    .unwrap()
            );
            assert_eq!(
                costs.expectation(&b.optimal_coupling).unwrap(),
                b.optimal_value
            );
        }
    }

    #[test]
    fn coupling_route_never_beats_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        for _ in 0..25 {
            let wg = random_connected_weighted(&mut rng, 5);
            let costs = CostMatrix::from_geodesic(&wg);
            let domain = wg.digraph().vertices().to_vec();
            // random coupling: random entries, marginals implied
            let entries: Vec<(String, String, Rat)> = (0..rng.gen_range(1..8))
                .map(|_| {
                    (
                        domain[rng.gen_range(0..5)].clone(),
                        domain[rng.gen_range(0..5)].clone(),
                        ratio(1, rng.gen_range(1..5)),
                    )
                })
                .collect();
            let c = Coupling::new(domain.clone(), entries).unwrap();
            let paths = PathChoice::shortest_paths(&c, wg.digraph()).unwrap();
            let q = flow_from_coupling(&c, wg.digraph(), &paths).unwrap();
            let lhs = wg.pairing(&q);
            let rhs = costs.expectation(&c).unwrap();
            assert!(lhs >= rhs, "path-induced cost must dominate E_rho(c)");
        }
    }

    #[test]
    fn projection_is_monotone_for_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        for _ in 0..25 {
            let wg = random_connected_weighted(&mut rng, 5);
            let values: Vec<(String, String, Rat)> = wg
                .iter_named()
                .map(|(a, b, _)| {
                    (
                        a.to_owned(),
                        b.to_owned(),
                        ratio(rng.gen_range(0..=4), rng.gen_range(1..=3)),
                    )
                })
                .collect();
            let q = Flow::new(wg.digraph().clone(), values).unwrap();
            let minimal =
                crate::flow::minimal_flow_from_field(&project_to_field(&q), wg.digraph())
                    .unwrap();
            assert!(wg.pairing(&minimal) <= wg.pairing(&q));
        }
    }

    #[test]
    fn chain_wasserstein_closed_form() {
        let chain: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let unit = vec![rat(1); 4];
        let d0 = measure(&["0", "1", "2", "3", "4"], &[("0", rat(1))]);
        let d3 = measure(&["0", "1", "2", "3", "4"], &[("3", rat(1))]);
        assert_eq!(
            chain_wasserstein(&chain, &unit, &unit, &d0, &d3).unwrap(),
            rat(3)
        );
        assert_eq!(
            chain_wasserstein(&chain, &unit, &unit, &d0, &d0).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn chain_wasserstein_matches_beckmann() {
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        for _ in 0..25 {
            let n = 10;
            let chain: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let fw: Vec<Rat> = (0..n - 1)
                .map(|_| ratio(rng.gen_range(0..=5), rng.gen_range(1..=3)))
                .collect();
            let bw: Vec<Rat> = (0..n - 1)
                .map(|_| ratio(rng.gen_range(0..=5), rng.gen_range(1..=3)))
                .collect();
            let mut edges = Vec::new();
            for i in 0..n - 1 {
                edges.push((chain[i].clone(), chain[i + 1].clone(), fw[i].clone()));
                edges.push((chain[i + 1].clone(), chain[i].clone(), bw[i].clone()));
            }
            let dg = Digraph::new(
                chain.clone(),
                edges
                    .iter()
                    .map(|(a, b, _)| (a.clone(), b.clone()))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let wg = WeightedDigraph::new(dg, edges).unwrap();
            let m1 = sample::random_probability_measure(&mut rng, &chain);
            let m2 = sample::random_probability_measure(&mut rng, &chain);
            let closed = chain_wasserstein(&chain, &fw, &bw, &m1, &m2).unwrap();
            let solved = beckmann_min(&wg, &m1, &m2).unwrap().optimal_value;
            assert_eq!(closed, solved);
        }
    }

    fn random_ring(rng: &mut impl rand::Rng, n: usize) -> WeightedDigraph {
        let vs: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            edges.push((
                vs[i].clone(),
                vs[j].clone(),
                ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)),
            ));
            edges.push((
                vs[j].clone(),
                vs[i].clone(),
                ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)),
            ));
        }
        let dg = Digraph::new(
            vs,
            edges
                .iter()
                .map(|(a, b, _)| (a.clone(), b.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        WeightedDigraph::new(dg, edges).unwrap()
    }

    #[test]
    fn ring_symmetric_two_step() {
        // unit 4-ring: moving delta_1 to delta_3 costs two steps either way
        let vs: Vec<String> = (0..4).map(|i| format!("r{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..4 {
            let j = (i + 1) % 4;
            edges.push((vs[i].clone(), vs[j].clone(), rat(1)));
            edges.push((vs[j].clone(), vs[i].clone(), rat(1)));
        }
        let dg = Digraph::new(
            vs.clone(),
            edges
                .iter()
                .map(|(a, b, _)| (a.clone(), b.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let wg = WeightedDigraph::new(dg, edges).unwrap();
        let d1 = measure(&["r0", "r1", "r2", "r3"], &[("r1", rat(1))]);
        let d3 = measure(&["r0", "r1", "r2", "r3"], &[("r3", rat(1))]);
        let out = ring_optimal(&wg, &d1, &d3).unwrap();
        assert_eq!(out.result.optimal_value, rat(2));

        let m = measure(
            &["r0", "r1", "r2", "r3"],
            &[
                ("r0", ratio(1, 4)),
                ("r1", ratio(1, 4)),
                ("r2", ratio(1, 4)),
                ("r3", ratio(1, 4)),
            ],
        );
        let out = ring_optimal(&wg, &m, &m).unwrap();
        assert_eq!(out.result.optimal_value, rat(0));
        assert!(out.alpha_min.unwrap() <= rat(0));
        assert!(out.alpha_max.unwrap() >= rat(0));
    }

    #[test]
    fn ring_interval_matches_beckmann_and_outside_is_worse() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for _ in 0..20 {
            let n = rng.gen_range(3..=8);
            let wg = random_ring(&mut rng, n);
            let domain = wg.digraph().vertices().to_vec();
            let m1 = sample::random_probability_measure(&mut rng, &domain);
            let m2 = sample::random_probability_measure(&mut rng, &domain);
            let out = ring_optimal(&wg, &m1, &m2).unwrap();
            let opt = beckmann_min(&wg, &m1, &m2).unwrap().optimal_value;
            assert_eq!(out.result.optimal_value, opt);
            let lo = out.alpha_min.clone().unwrap();
            let hi = out.alpha_max.clone().unwrap();
            assert!(lo <= hi);
            // endpoints and midpoint achieve the optimum; just outside does not
            for alpha in [lo.clone(), hi.clone(), (&lo + &hi) / rat(2)] {
                assert_eq!(
                    ring_cost_at(&wg, &m1, &m2, &alpha).unwrap().unwrap(),
                    opt
                );
            }
            let eps = ratio(1, 1000);
            let below = ring_cost_at(&wg, &m1, &m2, &(&lo - &eps))
                .unwrap()
                .unwrap();
            let above = ring_cost_at(&wg, &m1, &m2, &(&hi + &eps))
                .unwrap()
                .unwrap();
            assert!(below > opt);
            assert!(above > opt);
        }
    }

    #[test]
    fn subdifferential_accepts_optima() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..15 {
            let wg = random_connected_weighted(&mut rng, 5);
            let domain = wg.digraph().vertices().to_vec();
            let m1 = sample::random_probability_measure(&mut rng, &domain);
            let m2 = sample::random_probability_measure(&mut rng, &domain);
            let basis = fundamental_cycle_basis(wg.digraph()).unwrap();
            let best = beckmann_min(&wg, &m1, &m2).unwrap();
            assert!(
                subdifferential_optimality_check(&wg, &best.optimal_flow, &basis).unwrap()
            );
        }
    }

    #[test]
    fn subdifferential_matches_global_optimality_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..15 {
            // a fully bidirected shadow so every perturbed field stays
            // representable
            let base = random_connected_weighted(&mut rng, 5);
            let shadow = base.digraph().bidirected_shadow();
            let weights: Vec<(String, String, Rat)> = shadow
                .edges()
                .iter()
                .map(|&(i, j)| {
                    (
                        shadow.vertex_name(i).to_owned(),
                        shadow.vertex_name(j).to_owned(),
                        base.weight_named(shadow.vertex_name(i), shadow.vertex_name(j))
                            .unwrap_or_else(|| ratio(rng.gen_range(1..=5), 2)),
                    )
                })
                .collect();
            let wg = WeightedDigraph::new(shadow.clone(), weights).unwrap();
            let domain = wg.digraph().vertices().to_vec();
            let m1 = sample::random_probability_measure(&mut rng, &domain);
            let m2 = sample::random_probability_measure(&mut rng, &domain);
            let basis = fundamental_cycle_basis(wg.digraph()).unwrap();
            let best = beckmann_min(&wg, &m1, &m2).unwrap();
            let opt = best.optimal_value.clone();
            // perturb along each basis cycle in both directions; the local
            // test must accept exactly the flows that stay optimal
            let phi = project_to_field(&best.optimal_flow);
            for cycle in &basis.cycles {
                for sign in [rat(1), rat(-1)] {
                    let eps = ratio(1, 100) * &sign;
                    let entries: Vec<(String, String, Rat)> = wg
                        .digraph()
                        .shadow_edges()
                        .into_iter()
                        .map(|(i, j)| {
                            let a = wg.digraph().vertex_name(i).to_owned();
                            let b = wg.digraph().vertex_name(j).to_owned();
                            let mut v = phi.value_named(&a, &b);
                            let on_cycle: Vec<(String, String)> = cycle
                                .edges_named()
                                .map(|(x, y)| (x.to_owned(), y.to_owned()))
                                .collect();
                            if on_cycle.contains(&(a.clone(), b.clone())) {
                                v += &eps;
                            } else if on_cycle.contains(&(b.clone(), a.clone())) {
                                v -= &eps;
                            }
                            (a, b, v)
                        })
                        .collect();
                    let perturbed_field =
                        crate::flow::DiscreteVectorField::new(domain.clone(), entries)
                            .unwrap();
                    let perturbed =
                        crate::flow::minimal_flow_from_field(&perturbed_field, wg.digraph())
                            .unwrap();
                    let cost = wg.pairing(&perturbed);
                    assert!(cost >= opt);
                    let accepted =
                        subdifferential_optimality_check(&wg, &perturbed, &basis).unwrap();
                    assert_eq!(
                        accepted,
                        cost == opt,
                        "local test must accept exactly the optimal flows"
                    );
                }
            }
        }
    }

    #[test]
    fn subdifferential_vacuous_on_trees() {
        let wg = wdg(&["a", "b", "c"], &[("a", "b", rat(1)), ("a", "c", rat(2))]);
        let basis = fundamental_cycle_basis(wg.digraph()).unwrap();
        assert!(basis.cycles.is_empty());
        let q = Flow::zero(wg.digraph().clone());
        assert!(subdifferential_optimality_check(&wg, &q, &basis).unwrap());
    }

    #[test]
    fn lattice_probe_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let names: Vec<String> = vec!["00".into(), "01".into(), "10".into(), "11".into()];
        let bottom = Measure::dirac(&names, "00").unwrap();
        let top = Measure::dirac(&names, "11").unwrap();
        assert!(lattice_all_flows_optimal(2, &bottom, &top, 10, &mut rng).unwrap());
        let u = Measure::new(names.iter().map(|v| (v.clone(), ratio(1, 4)))).unwrap();
        assert!(lattice_all_flows_optimal(2, &u, &u, 10, &mut rng).unwrap());
        assert!(matches!(
            lattice_all_flows_optimal(2, &top, &bottom, 5, &mut rng),
            Err(TransportError::NotDominated(_))
        ));
    }
}
