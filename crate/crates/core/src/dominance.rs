//! Stochastic dominance on finite posets, decided three ways: up-set
//! enumeration (the oracle), flow feasibility on the Hasse digraph (the
//! executable direction of the equivalence), and closed forms for chains,
//! trees, rings, the elementary lattice, and the Holley criterion.

use num_traits::{Signed, Zero};

use crate::coupling::{coupling_from_flow_decomposition, Coupling, CouplingError};
use crate::flow::Flow;
use crate::graph::{
    hasse_digraph, Digraph, DirectedCycle, GraphError, PartialOrderRelation,
};
use crate::measure::{difference, Measure, MeasureError, SignedMeasure};
use crate::netflow::Network;
use crate::num::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DominanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("vertex count {0} exceeds the up-set enumeration guard (24)")]
    TooLarge(usize),
    #[error("input digraph has a directed cycle")]
    CyclicInput,
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("not a single cycle: {0}")]
    NotASingleCycle(String),
    #[error("wrong vertex shape: {0}")]
    WrongShape(String),
    #[error("measure is not strictly positive at {0:?}")]
    NotStrictlyPositive(String),
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("mu1 does not dominate mu2; violating up-set {0:?}")]
    NotDominated(Vec<String>),
}

/// Witness attached to a dominance verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A flow on the Hasse digraph with divergence `mu1 - mu2`.
    FeasibleFlow(Flow),
    /// An up-set `U` with `mu1(U) > mu2(U)`.
    ViolatingUpSet(Vec<String>),
    /// Oracle yes-case: every up-set was enumerated and none violates.
    UpSetsExhausted { checked: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceVerdict {
    pub dominates: bool,
    pub certificate: Certificate,
}

impl DominanceVerdict {
    fn yes_flow(flow: Flow) -> Self {
        DominanceVerdict { dominates: true, certificate: Certificate::FeasibleFlow(flow) }
    }

    fn no(up_set: Vec<String>) -> Self {
        DominanceVerdict { dominates: false, certificate: Certificate::ViolatingUpSet(up_set) }
    }

    pub fn flow(&self) -> Option<&Flow> {
        match &self.certificate {
            Certificate::FeasibleFlow(q) => Some(q),
            _ => None,
        }
    }

    pub fn violating_up_set(&self) -> Option<&[String]> {
        match &self.certificate {
            Certificate::ViolatingUpSet(u) => Some(u),
            _ => None,
        }
    }
}

fn rekey_pair(
    domain: &[String],
    mu1: &Measure,
    mu2: &Measure,
) -> Result<(Measure, Measure), DominanceError> {
    let m1 = Measure::on_vertices(domain, mu1.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    let m2 = Measure::on_vertices(domain, mu2.iter().map(|(v, w)| (v.to_owned(), w.clone())))?;
    if m1.total() != m2.total() {
        return Err(MeasureError::MassMismatch(
            m1.total().to_string(),
            m2.total().to_string(),
        )
        .into());
    }
    Ok((m1, m2))
}

/// Brute-force dominance by enumerating every up-set of the poset;
/// `mu1` dominates iff `mu1(U) <= mu2(U)` for all up-sets `U`.
pub fn dominates_oracle(
    mu1: &Measure,
    mu2: &Measure,
    rel: &PartialOrderRelation,
) -> Result<DominanceVerdict, DominanceError> {
    let n = rel.vertices().len();
    if n > 24 {
        return Err(DominanceError::TooLarge(n));
    }
    let (m1, m2) = rekey_pair(rel.vertices(), mu1, mu2)?;
    let d: Vec<Rat> = (0..n)
        .map(|i| m1.get_idx(i) - m2.get_idx(i))
        .collect();
    let mut up_mask = vec![0u32; n];
    for (x, mask) in up_mask.iter_mut().enumerate() {
        for y in 0..n {
            if rel.le_idx(x, y) {
                *mask |= 1 << y;
            }
        }
    }
    let mut checked = 0u64;
    for mask in 0u32..(1u32 << n) {
        let is_up_set = (0..n)
            .all(|x| mask & (1 << x) == 0 || up_mask[x] & !mask == 0);
        if !is_up_set {
            continue;
        }
        checked += 1;
        let excess: Rat = (0..n)
            .filter(|&x| mask & (1 << x) != 0)
            .map(|x| d[x].clone())
            .sum();
        if excess.is_positive() {
            let witness = (0..n)
                .filter(|&x| mask & (1 << x) != 0)
                .map(|x| rel.vertices()[x].clone())
                .collect();
            return Ok(DominanceVerdict::no(witness));
        }
    }
    Ok(DominanceVerdict {
        dominates: true,
        certificate: Certificate::UpSetsExhausted { checked },
    })
}

/// Supplies/demands network for `div Q = d` feasibility over `hasse` edges.
/// Returns the network, source, sink, total supply and the per-edge arc ids.
pub(crate) fn feasibility_network(
    hasse: &Digraph,
    d: &SignedMeasure,
) -> (Network, usize, usize, Rat, Vec<usize>) {
    let n = hasse.vertex_count();
    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    let mut supply = Rat::zero();
    for (i, v) in hasse.vertices().iter().enumerate() {
        let dv = d.get(v);
        if dv.is_positive() {
            supply += &dv;
            net.arc(s, i, Some(dv), Rat::zero());
        } else if dv.is_negative() {
            net.arc(i, t, Some(-dv), Rat::zero());
        }
    }
    let mut edge_arcs = Vec::with_capacity(hasse.edge_count());
    for &(i, j) in hasse.edges() {
        edge_arcs.push(net.arc(i, j, None, Rat::zero()));
    }
    (net, s, t, supply, edge_arcs)
}

pub(crate) fn flow_from_edge_arcs(hasse: &Digraph, net: &Network, edge_arcs: &[usize]) -> Flow {
    let mut q = Flow::zero(hasse.clone());
    for (edge_id, &arc) in edge_arcs.iter().enumerate() {
        let value = net.flow_on(arc).clone();
        if value.is_positive() {
            let (a, b) = hasse.edge_named(edge_id);
            let (a, b) = (a.to_owned(), b.to_owned());
            q.set_named(&a, &b, value).unwrap();
        }
    }
    q
}

/// Dominance as max-flow feasibility: supplies `[mu1 - mu2]_+`, demands
/// `[mu2 - mu1]_+`, unbounded capacity on Hasse edges. A saturated flow is
/// the yes-certificate; otherwise the residual source side, which is closed
/// under Hasse successors, is a violating up-set.
pub fn dominates_via_flow(
    mu1: &Measure,
    mu2: &Measure,
    hasse: &Digraph,
) -> Result<DominanceVerdict, DominanceError> {
    if !hasse.is_acyclic() {
        return Err(DominanceError::CyclicInput);
    }
    let (m1, m2) = rekey_pair(hasse.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    let (mut net, s, t, supply, edge_arcs) = feasibility_network(hasse, &d);
    let value = net.max_flow(s, t);
    if value == supply {
        Ok(DominanceVerdict::yes_flow(flow_from_edge_arcs(hasse, &net, &edge_arcs)))
    } else {
        let side = net.residual_reachable(s);
        let up_set: Vec<String> = hasse
            .vertices()
            .iter()
            .enumerate()
            .filter(|(i, _)| side[*i])
            .map(|(_, v)| v.clone())
            .collect();
        debug_assert!({
            let excess: Rat = up_set.iter().map(|v| d.get(v)).sum();
            excess.is_positive()
        });
        Ok(DominanceVerdict::no(up_set))
    }
}

/// A coupling with marginals `(mu1, mu2)` compatible with the order, built
/// by flow feasibility followed by the decomposition builder.
pub fn build_compatible_coupling(
    mu1: &Measure,
    mu2: &Measure,
    hasse: &Digraph,
) -> Result<Coupling, DominanceError> {
    let verdict = dominates_via_flow(mu1, mu2, hasse)?;
    match verdict.certificate {
        Certificate::FeasibleFlow(q) => {
            let (m1, _) = rekey_pair(hasse.vertices(), mu1, mu2)?;
            Ok(coupling_from_flow_decomposition(&q, &m1)?)
        }
        Certificate::ViolatingUpSet(u) => Err(DominanceError::NotDominated(u)),
        Certificate::UpSetsExhausted { .. } => unreachable!("flow route never exhausts up-sets"),
    }
}

/// Total-order case: `F_1(x) >= F_2(x)` along the chain; the unique
/// certificate flow is `Q(x_i, x_{i+1}) = F_1(x_i) - F_2(x_i)`.
pub fn chain_condition(
    mu1: &Measure,
    mu2: &Measure,
    chain_order: &[String],
) -> Result<DominanceVerdict, DominanceError> {
    let chain: Vec<String> = chain_order.to_vec();
    let (m1, m2) = rekey_pair(&chain, mu1, mu2)?;
    let mut prefix = Rat::zero();
    let mut values = Vec::new();
    for (i, v) in chain.iter().enumerate() {
        prefix += m1.get(v) - m2.get(v);
        if i + 1 < chain.len() {
            if prefix.is_negative() {
                return Ok(DominanceVerdict::no(chain[i + 1..].to_vec()));
            }
            values.push(prefix.clone());
        }
    }
    let edges: Vec<(String, String)> = chain
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let dg = Digraph::new(chain.clone(), edges)?;
    let q = Flow::new(
        dg,
        chain
            .windows(2)
            .zip(values)
            .map(|(w, v)| (w[0].clone(), w[1].clone(), v)),
    )
    .expect("prefix differences checked nonnegative");
    Ok(DominanceVerdict::yes_flow(q))
}

/// Tree-shadow case: the unique candidate flow puts on each edge the net
/// excess of the tail-side component; dominance iff all values are
/// nonnegative.
pub fn tree_condition(
    mu1: &Measure,
    mu2: &Measure,
    tree_hasse: &Digraph,
) -> Result<DominanceVerdict, DominanceError> {
    let n = tree_hasse.vertex_count();
    let shadow = tree_hasse.shadow_edges();
    if shadow.len() + 1 != n {
        return Err(DominanceError::NotATree(format!(
            "{} undirected edges on {} vertices",
            shadow.len(),
            n
        )));
    }
    if !tree_hasse.is_acyclic() {
        return Err(DominanceError::CyclicInput);
    }
    // connectivity
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in &shadow {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(u) = (0..n).find(|&v| !seen[v]) {
        return Err(DominanceError::NotATree(format!(
            "vertex {:?} disconnected",
            tree_hasse.vertex_name(u)
        )));
    }

    let (m1, m2) = rekey_pair(tree_hasse.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;

    // component of `tail` once the undirected edge {tail, head} is removed
    let tail_component = |tail: usize, head: usize| -> Vec<usize> {
        let mut seen = vec![false; n];
        seen[head] = true; // blocked
        seen[tail] = true;
        let mut stack = vec![tail];
        let mut out = vec![tail];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    stack.push(w);
                }
            }
        }
        out
    };

    let mut values = Vec::new();
    for &(i, j) in tree_hasse.edges() {
        let minus_side = tail_component(i, j);
        let value: Rat = minus_side
            .iter()
            .map(|&v| d.get(tree_hasse.vertex_name(v)))
            .sum();
        if value.is_negative() {
            let plus_side: Vec<String> = {
                let inside: std::collections::HashSet<usize> =
                    minus_side.into_iter().collect();
                (0..n)
                    .filter(|v| !inside.contains(v))
                    .map(|v| tree_hasse.vertex_name(v).to_owned())
                    .collect()
            };
            return Ok(DominanceVerdict::no(plus_side));
        }
        values.push(value);
    }
    let q = Flow::new(
        tree_hasse.clone(),
        tree_hasse
            .edges()
            .iter()
            .zip(values)
            .map(|(&(i, j), v)| {
                (
                    tree_hasse.vertex_name(i).to_owned(),
                    tree_hasse.vertex_name(j).to_owned(),
                    v,
                )
            }),
    )
    .expect("checked nonnegative");
    Ok(DominanceVerdict::yes_flow(q))
}

/// Ring decomposition data shared by the dominance condition and the
/// transport optimizer: vertices in cycle order, the reference field
/// `phi*`, and which ring positions carry an aligned/anti Hasse edge.
pub(crate) struct RingStructure {
    /// vertex indices of the host digraph, in orientation order
    pub order: Vec<usize>,
    /// `phi*` on the oriented ring edge `(c_t, c_{t+1})`
    pub phi_star: Vec<Rat>,
    /// per position: the digraph has the aligned edge `(c_t, c_{t+1})`
    pub aligned: Vec<bool>,
    /// per position: the digraph has the anti edge `(c_{t+1}, c_t)`
    pub anti: Vec<bool>,
}

pub(crate) fn ring_structure(
    g: &Digraph,
    orientation: &DirectedCycle,
    d: &SignedMeasure,
) -> Result<RingStructure, DominanceError> {
    let n = g.vertex_count();
    if n < 3 {
        return Err(DominanceError::NotASingleCycle(format!("{n} vertices")));
    }
    let shadow = g.shadow_edges();
    if shadow.len() != n {
        return Err(DominanceError::NotASingleCycle(format!(
            "{} undirected edges on {n} vertices",
            shadow.len()
        )));
    }
    let mut degree = vec![0usize; n];
    for &(i, j) in &shadow {
        degree[i] += 1;
        degree[j] += 1;
    }
    if let Some(v) = (0..n).find(|&v| degree[v] != 2) {
        return Err(DominanceError::NotASingleCycle(format!(
            "vertex {:?} has shadow degree {}",
            g.vertex_name(v),
            degree[v]
        )));
    }
    if orientation.len() != n {
        return Err(DominanceError::NotASingleCycle(
            "orientation does not visit every vertex exactly once".into(),
        ));
    }
    let order: Vec<usize> = orientation
        .vertices()
        .iter()
        .map(|v| {
            g.vertex_index(v).ok_or_else(|| {
                DominanceError::NotASingleCycle(format!("orientation vertex {v:?} unknown"))
            })
        })
        .collect::<Result<_, _>>()?;
    {
        let mut seen = vec![false; n];
        for &v in &order {
            if seen[v] {
                return Err(DominanceError::NotASingleCycle(
                    "orientation repeats a vertex".into(),
                ));
            }
            seen[v] = true;
        }
    }
    let mut aligned = vec![false; n];
    let mut anti = vec![false; n];
    for t in 0..n {
        let a = order[t];
        let b = order[(t + 1) % n];
        aligned[t] = g.has_edge(a, b);
        anti[t] = g.has_edge(b, a);
        if !aligned[t] && !anti[t] {
            return Err(DominanceError::NotASingleCycle(format!(
                "orientation step ({:?}, {:?}) is not a shadow edge",
                g.vertex_name(a),
                g.vertex_name(b)
            )));
        }
    }
    let mut phi_star = Vec::with_capacity(n);
    let mut prefix = Rat::zero();
    for &v in &order {
        prefix += d.get(g.vertex_name(v));
        phi_star.push(prefix.clone());
    }
    Ok(RingStructure { order, phi_star, aligned, anti })
}

/// Single-cycle shadow: dominance iff the largest lower constraint on the
/// circulation parameter is at most the smallest upper one; the certificate
/// flow realizes the smallest admissible parameter.
pub fn single_cycle_condition(
    mu1: &Measure,
    mu2: &Measure,
    ring_hasse: &Digraph,
    orientation: &DirectedCycle,
) -> Result<DominanceVerdict, DominanceError> {
    if !ring_hasse.is_acyclic() {
        return Err(DominanceError::CyclicInput);
    }
    let (m1, m2) = rekey_pair(ring_hasse.vertices(), mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    let ring = ring_structure(ring_hasse, orientation, &d)?;
    let n = ring.order.len();

    // alpha >= G(t) on aligned positions, alpha <= G(t) on anti positions,
    // where G(t) = -phi*(t)
    let mut lo: Option<(Rat, usize)> = None;
    let mut hi: Option<(Rat, usize)> = None;
    for t in 0..n {
        let g_t = -ring.phi_star[t].clone();
        if ring.aligned[t] && lo.as_ref().is_none_or(|(v, _)| g_t > *v) {
            lo = Some((g_t.clone(), t));
        }
        if ring.anti[t] && hi.as_ref().is_none_or(|(v, _)| g_t < *v) {
            hi = Some((g_t.clone(), t));
        }
    }
    let feasible = match (&lo, &hi) {
        (Some((l, _)), Some((h, _))) => l <= h,
        _ => true,
    };
    if feasible {
        let alpha = lo
            .map(|(v, _)| v)
            .or_else(|| hi.map(|(v, _)| v))
            .expect("a ring has at least one Hasse edge");
        let mut q = Flow::zero(ring_hasse.clone());
        for t in 0..n {
            let value = &ring.phi_star[t] + &alpha;
            let a = ring_hasse.vertex_name(ring.order[t]).to_owned();
            let b = ring_hasse.vertex_name(ring.order[(t + 1) % n]).to_owned();
            if ring.aligned[t] {
                q.set_named(&a, &b, value.clone()).expect("alpha admissible");
            }
            if ring.anti[t] {
                q.set_named(&b, &a, -value).expect("alpha admissible");
            }
        }
        Ok(DominanceVerdict::yes_flow(q))
    } else {
        let (_, t_lo) = lo.unwrap();
        let (_, t_hi) = hi.unwrap();
        // the arc from just past the binding aligned edge up to the binding
        // anti edge is an up-set with positive excess
        let mut members = std::collections::HashSet::new();
        let mut t = (t_lo + 1) % n;
        loop {
            members.insert(ring.order[t]);
            if t == t_hi {
                break;
            }
            t = (t + 1) % n;
        }
        let up_set: Vec<String> = ring_hasse
            .vertices()
            .iter()
            .enumerate()
            .filter(|(i, _)| members.contains(i))
            .map(|(_, v)| v.clone())
            .collect();
        debug_assert!({
            let excess: Rat = up_set.iter().map(|v| d.get(v)).sum();
            excess.is_positive()
        });
        Ok(DominanceVerdict::no(up_set))
    }
}

/// Closed form on the diamond `A < B < D`, `A < C < D`:
/// `|d(C)| + |d(B)| <= d(A) - d(D)` with `d = mu1 - mu2`.
pub fn elementary_lattice_condition(
    mu1: &Measure,
    mu2: &Measure,
) -> Result<bool, DominanceError> {
    let mut names: Vec<String> = mu1.vertices().to_vec();
    names.sort();
    if names != ["A", "B", "C", "D"] {
        return Err(DominanceError::WrongShape(format!(
            "expected vertices A, B, C, D; got {names:?}"
        )));
    }
    let domain: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    let (m1, m2) = rekey_pair(&domain, mu1, mu2)?;
    let d = difference(&m1, &m2)?;
    Ok(d.get("C").abs() + d.get("B").abs() <= d.get("A") - d.get("D"))
}

/// A finite lattice given by join/meet tables.
#[derive(Debug, Clone)]
pub struct Lattice {
    elements: Vec<String>,
    index: std::collections::HashMap<String, usize>,
    join: Vec<usize>,
    meet: Vec<usize>,
}

impl Lattice {
    /// Validates commutativity, idempotence, absorption and agreement of the
    /// two order definitions (`x ∧ y = x` iff `x ∨ y = y`).
    pub fn new(
        elements: Vec<String>,
        join_table: &[Vec<String>],
        meet_table: &[Vec<String>],
    ) -> Result<Self, DominanceError> {
        let n = elements.len();
        let mut index = std::collections::HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(DominanceError::NotALattice(format!("duplicate element {e:?}")));
            }
        }
        let read_table = |table: &[Vec<String>], what: &str| -> Result<Vec<usize>, DominanceError> {
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(DominanceError::NotALattice(format!("{what} table is not {n}x{n}")));
            }
            let mut out = Vec::with_capacity(n * n);
            for row in table {
                for cell in row {
                    match index.get(cell) {
                        Some(&k) => out.push(k),
                        None => {
                            return Err(DominanceError::NotALattice(format!(
                                "{what} table mentions unknown element {cell:?}"
                            )))
                        }
                    }
                }
            }
            Ok(out)
        };
        let join = read_table(join_table, "join")?;
        let meet = read_table(meet_table, "meet")?;
        let lat = Lattice { elements, index, join, meet };
        lat.validate()?;
        Ok(lat)
    }

    /// The Boolean lattice `{0,1}^N` with bitstring element names.
    pub fn hypercube(bits: u32) -> Lattice {
        let n = 1usize << bits;
        let elements: Vec<String> = (0..n)
            .map(|k| {
                (0..bits)
                    .rev()
                    .map(|b| if k >> b & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut join = Vec::with_capacity(n * n);
        let mut meet = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                join.push(a | b);
                meet.push(a & b);
            }
        }
        Lattice { elements, index, join, meet }
    }

    fn validate(&self) -> Result<(), DominanceError> {
        let n = self.elements.len();
        let j = |a: usize, b: usize| self.join[a * n + b];
        let m = |a: usize, b: usize| self.meet[a * n + b];
        for a in 0..n {
            if j(a, a) != a || m(a, a) != a {
                return Err(DominanceError::NotALattice(format!(
                    "idempotence fails at {:?}",
                    self.elements[a]
                )));
            }
            for b in 0..n {
                if j(a, b) != j(b, a) || m(a, b) != m(b, a) {
                    return Err(DominanceError::NotALattice(format!(
                        "commutativity fails at ({:?}, {:?})",
                        self.elements[a], self.elements[b]
                    )));
                }
                if j(a, m(a, b)) != a || m(a, j(a, b)) != a {
                    return Err(DominanceError::NotALattice(format!(
                        "absorption fails at ({:?}, {:?})",
                        self.elements[a], self.elements[b]
                    )));
                }
                if (m(a, b) == a) != (j(a, b) == b) {
                    return Err(DominanceError::NotALattice(format!(
                        "meet/join orders disagree at ({:?}, {:?})",
                        self.elements[a], self.elements[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn join_named(&self, a: &str, b: &str) -> Option<&str> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        Some(&self.elements[self.join[i * self.elements.len() + j]])
    }

    pub fn meet_named(&self, a: &str, b: &str) -> Option<&str> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        Some(&self.elements[self.meet[i * self.elements.len() + j]])
    }

    /// The lattice order `x <= y` iff `x ∧ y = x`.
    pub fn order(&self) -> PartialOrderRelation {
        let n = self.elements.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.meet[a * n + b] == a {
                    pairs.push((self.elements[a].clone(), self.elements[b].clone()));
                }
            }
        }
        PartialOrderRelation::from_pairs(pairs).expect("lattice order is a partial order")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolleyVerdict {
    pub holds: bool,
    /// First failing ordered pair, in element order.
    pub violation: Option<(String, String)>,
}

/// Holley criterion `m2(a ∨ b) m1(a ∧ b) >= m2(a) m1(b)` over all ordered
/// pairs; both measures must be strictly positive on the lattice.
pub fn holley_condition(
    m1: &Measure,
    m2: &Measure,
    lattice: &Lattice,
) -> Result<HolleyVerdict, DominanceError> {
    let n = lattice.elements.len();
    let v1 = Measure::on_vertices(
        &lattice.elements,
        m1.iter().map(|(v, w)| (v.to_owned(), w.clone())),
    )?;
    let v2 = Measure::on_vertices(
        &lattice.elements,
        m2.iter().map(|(v, w)| (v.to_owned(), w.clone())),
    )?;
    for (v, w) in v1.iter().chain(v2.iter()) {
        if !w.is_positive() {
            return Err(DominanceError::NotStrictlyPositive(v.to_owned()));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let jv = &lattice.elements[lattice.join[a * n + b]];
            let mv = &lattice.elements[lattice.meet[a * n + b]];
            let lhs = v2.get(jv) * v1.get(mv);
            let rhs = v2.get(&lattice.elements[a]) * v1.get(&lattice.elements[b]);
            if lhs < rhs {
                return Ok(HolleyVerdict {
                    holds: false,
                    violation: Some((
                        lattice.elements[a].clone(),
                        lattice.elements[b].clone(),
                    )),
                });
            }
        }
    }
    Ok(HolleyVerdict { holds: true, violation: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HolleySearchOutcome {
    /// `mu1 - mu2` lies in the generalized Holley set; `tilt` is the
    /// certifying positive measure `m`.
    InArrowH { tilt: Measure },
    /// Budget exhausted or dominance pre-screen failed; never a definite no.
    Unknown,
}

/// Semi-decision search for a positive `m` with
/// `([mu1 - mu2]_+ + m, [mu2 - mu1]_+ + m)` satisfying the Holley
/// criterion. Dominance is necessary and is checked first; candidates are
/// scaled mixes of `min(mu1, mu2)` and the uniform measure.
pub fn generalized_holley_search(
    mu1: &Measure,
    mu2: &Measure,
    lattice: &Lattice,
    budget: usize,
) -> Result<HolleySearchOutcome, DominanceError> {
    let domain = lattice.elements.to_vec();
    let (m1, m2) = match rekey_pair(&domain, mu1, mu2) {
        Ok(pair) => pair,
        Err(DominanceError::Measure(MeasureError::MassMismatch(_, _))) => {
            return Ok(HolleySearchOutcome::Unknown)
        }
        Err(e) => return Err(e),
    };
    let hasse = hasse_digraph(&lattice.order());
    let screened = dominates_via_flow(&m1, &m2, &hasse)?;
    if !screened.dominates {
        return Ok(HolleySearchOutcome::Unknown);
    }

    let delta = difference(&m1, &m2)?;
    let (dplus, dminus) = delta.positive_negative_parts();
    let base = m1.min_pointwise(&m2)?;
    let uniform = Measure::new(
        domain
            .iter()
            .map(|v| (v.clone(), Rat::from_integer(1.into()))),
    )
    .expect("unit weights");

    let shapes: [(i64, i64); 5] = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)];
    let mut tried = 0usize;
    let mut scale = Rat::from_integer(1.into());
    let half = crate::num::ratio(1, 2);
    for level in 0.. {
        for (a, b) in shapes {
            if tried >= budget {
                return Ok(HolleySearchOutcome::Unknown);
            }
            tried += 1;
            let m = base
                .scale(&(crate::num::rat(a) * &scale))
                .add(&uniform.scale(&(crate::num::rat(b) * &scale)))
                .expect("same domain");
            if !m.is_strictly_positive() {
                continue;
            }
            let t1 = dplus.add(&m).expect("same domain");
            let t2 = dminus.add(&m).expect("same domain");
            if holley_condition(&t1, &t2, lattice)?.holds {
                return Ok(HolleySearchOutcome::InArrowH { tilt: m });
            }
        }
        // alternate 1, 1/2, 2, 1/4, 4, ...
        scale = if level % 2 == 0 {
            &scale * &half * &half
        } else {
            &scale * crate::num::rat(4)
        };
        if tried >= budget {
            return Ok(HolleySearchOutcome::Unknown);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn measure(domain: &[&str], weights: &[(&str, Rat)]) -> Measure {
        let d: Vec<String> = domain.iter().map(|s| s.to_string()).collect();
        Measure::on_vertices(&d, weights.iter().map(|(v, w)| (v.to_string(), w.clone())))
            .unwrap()
    }

    fn chain_rel(names: &[&str]) -> PartialOrderRelation {
        let mut pairs = Vec::new();
        for i in 0..names.len() {
            for j in i..names.len() {
                pairs.push((names[i].to_string(), names[j].to_string()));
            }
        }
        PartialOrderRelation::from_pairs(pairs).unwrap()
    }

    #[test]
    fn oracle_trivial_cases() {
        let rel = chain_rel(&["a", "b"]);
        let m = measure(&["a", "b"], &[("a", ratio(1, 2)), ("b", ratio(1, 2))]);
        assert!(dominates_oracle(&m, &m, &rel).unwrap().dominates);

        let db = measure(&["a", "b"], &[("b", rat(1))]);
        let da = measure(&["a", "b"], &[("a", rat(1))]);
        let v = dominates_oracle(&db, &da, &rel).unwrap();
        assert!(!v.dominates);
        assert_eq!(v.violating_up_set().unwrap(), &["b".to_string()]);
    }

    #[test]
    fn oracle_guards_and_mismatches() {
        // enumeration guard
        let big: Vec<(String, String)> = (0..30)
            .map(|i| (format!("v{i}"), format!("v{i}")))
            .collect();
        let rel = PartialOrderRelation::from_pairs(big).unwrap();
        let m = measure(
            &(0..30).map(|i| format!("v{i}")).collect::<Vec<_>>()
                .iter().map(String::as_str).collect::<Vec<_>>(),
            &[("v0", rat(1))],
        );
        assert!(matches!(
            dominates_oracle(&m, &m, &rel),
            Err(DominanceError::TooLarge(30))
        ));
        // measures off the poset vertex set
        let rel = chain_rel(&["a", "b"]);
        let stray = measure(&["a", "z"], &[("z", rat(1))]);
        let da = measure(&["a", "b"], &[("a", rat(1))]);
        assert!(matches!(
            dominates_oracle(&stray, &da, &rel),
            Err(DominanceError::Measure(_))
        ));
        // unequal totals
        let half = measure(&["a", "b"], &[("a", ratio(1, 2))]);
        assert!(matches!(
            dominates_oracle(&half, &da, &rel),
            Err(DominanceError::Measure(MeasureError::MassMismatch(_, _)))
        ));
    }

    #[test]
    fn flow_route_trivial_cases() {
        let hasse = Digraph::new(vec!["a", "b"], vec![("a".to_string(), "b".to_string())]).unwrap();
        let da = measure(&["a", "b"], &[("a", rat(1))]);
        let db = measure(&["a", "b"], &[("b", rat(1))]);
        let v = dominates_via_flow(&da, &db, &hasse).unwrap();
        assert!(v.dominates);
        assert_eq!(v.flow().unwrap().value_named("a", "b"), rat(1));

        let antichain = Digraph::new(vec!["a", "b"], Vec::<(String, String)>::new()).unwrap();
        let v = dominates_via_flow(&da, &db, &antichain).unwrap();
        assert!(!v.dominates);
    }

    #[test]
    fn flow_and_oracle_agree_on_random_posets() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..60 {
            let n = 6;
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.35) {
                        edges.push((vs[i].clone(), vs[j].clone()));
                    }
                }
            }
            let dag = Digraph::new(vs.clone(), edges).unwrap();
            let rel = PartialOrderRelation::from_digraph(&dag).unwrap();
            let hasse = hasse_digraph(&rel);
            let raw1: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let t1: i64 = raw1.iter().sum::<i64>().max(1);
            let t2: i64 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                vs.iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                vs.iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            let via_flow = dominates_via_flow(&m1, &m2, &hasse).unwrap();
            let via_oracle = dominates_oracle(&m1, &m2, &rel).unwrap();
            assert_eq!(via_flow.dominates, via_oracle.dominates);
            if let Some(q) = via_flow.flow() {
                let d = q.divergence();
                for v in &vs {
                    assert_eq!(d.get(v), m1.get(v) - m2.get(v));
                }
            }
            if let Some(u) = via_flow.violating_up_set() {
                let excess: Rat = u.iter().map(|v| m1.get(v) - m2.get(v)).sum();
                assert!(excess.is_positive());
            }
        }
    }

    #[test]
    fn compatible_coupling_trivial_and_error() {
        let hasse =
            Digraph::new(vec!["a", "b"], vec![("a".to_string(), "b".to_string())]).unwrap();
        let da = measure(&["a", "b"], &[("a", rat(1))]);
        let db = measure(&["a", "b"], &[("b", rat(1))]);
        let c = build_compatible_coupling(&da, &db, &hasse).unwrap();
        assert_eq!(c.get("a", "b"), rat(1));

        let m = measure(&["a", "b"], &[("a", ratio(1, 2)), ("b", ratio(1, 2))]);
        let c = build_compatible_coupling(&m, &m, &hasse).unwrap();
        assert_eq!(c, crate::coupling::Coupling::diagonal(&m));

        assert!(matches!(
            build_compatible_coupling(&db, &da, &hasse),
            Err(DominanceError::NotDominated(_))
        ));
    }

    #[test]
    fn chain_condition_cases() {
        let chain: Vec<String> = vec!["1".into(), "2".into()];
        let d1 = measure(&["1", "2"], &[("1", rat(1))]);
        let d2 = measure(&["1", "2"], &[("2", rat(1))]);
        let v = chain_condition(&d1, &d2, &chain).unwrap();
        assert!(v.dominates);
        assert_eq!(v.flow().unwrap().value_named("1", "2"), rat(1));
        let v = chain_condition(&d2, &d1, &chain).unwrap();
        assert!(!v.dominates);
        assert_eq!(v.violating_up_set().unwrap(), &["2".to_string()]);
    }

    #[test]
    fn chain_condition_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let names: Vec<String> = (0..8).map(|i| format!("c{i}")).collect();
        let rel = chain_rel(&names.iter().map(String::as_str).collect::<Vec<_>>());
        for _ in 0..60 {
            let raw1: Vec<i64> = (0..8).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..8).map(|_| rng.gen_range(0..=3)).collect();
            let t1 = raw1.iter().sum::<i64>().max(1);
            let t2 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                names
                    .iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                names
                    .iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            let closed = chain_condition(&m1, &m2, &names).unwrap();
            let oracle = dominates_oracle(&m1, &m2, &rel).unwrap();
            assert_eq!(closed.dominates, oracle.dominates);
        }
    }

    #[test]
    fn tree_condition_cases() {
        // root below two leaves: r -> a, r -> b
        let tree = Digraph::new(
            vec!["r", "a", "b"],
            vec![
                ("r".to_string(), "a".to_string()),
                ("r".to_string(), "b".to_string()),
            ],
        )
        .unwrap();
        let m1 = measure(&["r", "a", "b"], &[("r", rat(1))]);
        let m2 = measure(&["r", "a", "b"], &[("a", ratio(1, 2)), ("b", ratio(1, 2))]);
        let v = tree_condition(&m1, &m2, &tree).unwrap();
        assert!(v.dominates);
        let q = v.flow().unwrap();
        assert_eq!(q.value_named("r", "a"), ratio(1, 2));
        assert_eq!(q.value_named("r", "b"), ratio(1, 2));
        // mass flowing against an edge
        let v = tree_condition(&m2, &m1, &tree).unwrap();
        assert!(!v.dominates);
    }

    #[test]
    fn tree_condition_matches_flow_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..60 {
            let n = 8;
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            // random tree: parent of k is a smaller index; random direction
            let mut edges = Vec::new();
            for k in 1..n {
                let p = rng.gen_range(0..k);
                if rng.gen_bool(0.5) {
                    edges.push((vs[p].clone(), vs[k].clone()));
                } else {
                    edges.push((vs[k].clone(), vs[p].clone()));
                }
            }
            let tree = Digraph::new(vs.clone(), edges).unwrap();
            let raw1: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let t1 = raw1.iter().sum::<i64>().max(1);
            let t2 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                vs.iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                vs.iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            let closed = tree_condition(&m1, &m2, &tree).unwrap();
            let flow = dominates_via_flow(&m1, &m2, &tree).unwrap();
            assert_eq!(closed.dominates, flow.dominates);
            if closed.dominates {
                // the tree flow is unique, so the two certificates agree
                let qa = closed.flow().unwrap();
                let qb = flow.flow().unwrap();
                for (a, b, w) in qa.iter_named() {
                    assert_eq!(*w, qb.value_named(a, b));
                }
            }
        }
    }

    fn diamond_hasse() -> Digraph {
        Digraph::new(
            vec!["A", "B", "C", "D"],
            vec![
                ("A".to_string(), "B".to_string()),
                ("A".to_string(), "C".to_string()),
                ("B".to_string(), "D".to_string()),
                ("C".to_string(), "D".to_string()),
            ],
        )
        .unwrap()
    }

    fn diamond_orientation(h: &Digraph) -> DirectedCycle {
        crate::graph::fundamental_cycle_basis(h).unwrap().cycles[0].clone()
    }

    #[test]
    fn single_cycle_condition_cases() {
        let h = diamond_hasse();
        let c = diamond_orientation(&h);
        let da = measure(&["A", "B", "C", "D"], &[("A", rat(1))]);
        let dd = measure(&["A", "B", "C", "D"], &[("D", rat(1))]);
        let v = single_cycle_condition(&da, &dd, &h, &c).unwrap();
        assert!(v.dominates);
        let q = v.flow().unwrap();
        let div = q.divergence();
        assert_eq!(div.get("A"), rat(1));
        assert_eq!(div.get("D"), rat(-1));
        let v = single_cycle_condition(&dd, &da, &h, &c).unwrap();
        assert!(!v.dominates);
    }

    #[test]
    fn single_cycle_matches_flow_on_random_diamonds() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let h = diamond_hasse();
        let c = diamond_orientation(&h);
        let names = ["A", "B", "C", "D"];
        for _ in 0..80 {
            let raw1: Vec<i64> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
            let t1 = raw1.iter().sum::<i64>().max(1);
            let t2 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                names
                    .iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.to_string(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                names
                    .iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.to_string(), ratio(w, t2))),
            )
            .unwrap();
            let ring = single_cycle_condition(&m1, &m2, &h, &c).unwrap();
            let flow = dominates_via_flow(&m1, &m2, &h).unwrap();
            assert_eq!(ring.dominates, flow.dominates);
            let lattice = elementary_lattice_condition(&m1, &m2).unwrap();
            assert_eq!(lattice, ring.dominates);
            if let Some(q) = ring.flow() {
                let d = q.divergence();
                for v in names {
                    assert_eq!(d.get(v), m1.get(v) - m2.get(v));
                }
            }
            if let Some(u) = ring.violating_up_set() {
                let excess: Rat = u.iter().map(|v| m1.get(v) - m2.get(v)).sum();
                assert!(excess.is_positive());
                // and it is genuinely an up-set of the diamond
                let rel = PartialOrderRelation::from_digraph(&h).unwrap();
                for x in u {
                    for y in names {
                        if rel.le(x, y) == Some(true) {
                            assert!(u.contains(&y.to_string()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn elementary_lattice_examples() {
        let da = measure(&["A", "B", "C", "D"], &[("A", rat(1))]);
        let dd = measure(&["A", "B", "C", "D"], &[("D", rat(1))]);
        assert!(elementary_lattice_condition(&da, &dd).unwrap());
        let db = measure(&["A", "B", "C", "D"], &[("B", rat(1))]);
        let dc = measure(&["A", "B", "C", "D"], &[("C", rat(1))]);
        assert!(!elementary_lattice_condition(&db, &dc).unwrap());
    }

    #[test]
    fn holley_condition_cases() {
        let lat = Lattice::hypercube(1);
        let u = measure(&["0", "1"], &[("0", ratio(1, 2)), ("1", ratio(1, 2))]);
        assert!(holley_condition(&u, &u, &lat).unwrap().holds);

        let m1 = measure(&["0", "1"], &[("0", ratio(3, 5)), ("1", ratio(2, 5))]);
        let m2 = measure(&["0", "1"], &[("0", ratio(2, 5)), ("1", ratio(3, 5))]);
        assert!(holley_condition(&m1, &m2, &lat).unwrap().holds);

        let zero_somewhere = measure(&["0", "1"], &[("0", rat(1))]);
        assert!(matches!(
            holley_condition(&zero_somewhere, &u, &lat),
            Err(DominanceError::NotStrictlyPositive(_))
        ));
    }

    #[test]
    fn holley_violation_returns_witness() {
        let lat = Lattice::hypercube(2);
        // concentrate mu2 on the incomparable middle layer: the mixed pair
        // fails the product inequality
        let m2 = measure(
            &["00", "01", "10", "11"],
            &[
                ("00", ratio(1, 10)),
                ("01", ratio(2, 5)),
                ("10", ratio(2, 5)),
                ("11", ratio(1, 10)),
            ],
        );
        let u = measure(
            &["00", "01", "10", "11"],
            &[
                ("00", ratio(1, 4)),
                ("01", ratio(1, 4)),
                ("10", ratio(1, 4)),
                ("11", ratio(1, 4)),
            ],
        );
        let v = holley_condition(&u, &m2, &lat).unwrap();
        assert!(!v.holds);
        let (a, b) = v.violation.unwrap();
        // verify the witness directly
        let jv = lat.join_named(&a, &b).unwrap().to_owned();
        let mv = lat.meet_named(&a, &b).unwrap().to_owned();
        assert!(m2.get(&jv) * u.get(&mv) < m2.get(&a) * u.get(&b));
    }

    #[test]
    fn holley_implies_dominance_on_hypercube() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let lat = Lattice::hypercube(2);
        let rel = lat.order();
        let names = lat.elements().to_vec();
        let mut holley_seen = 0;
        for _ in 0..200 {
            let raw1: Vec<i64> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
            let raw2: Vec<i64> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
            let t1: i64 = raw1.iter().sum();
            let t2: i64 = raw2.iter().sum();
            let m1 = Measure::new(
                names
                    .iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                names
                    .iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            if holley_condition(&m1, &m2, &lat).unwrap().holds {
                holley_seen += 1;
                assert!(dominates_oracle(&m1, &m2, &rel).unwrap().dominates);
            }
        }
        assert!(holley_seen > 0, "sampler never produced a Holley pair");
    }

    #[test]
    fn holley_search_finds_certificates() {
        let lat = Lattice::hypercube(2);
        let names = lat.elements().to_vec();
        let rel = lat.order();
        // equal measures: uniform tilt certifies immediately
        let u = Measure::new(names.iter().map(|v| (v.clone(), ratio(1, 4)))).unwrap();
        match generalized_holley_search(&u, &u, &lat, 50).unwrap() {
            HolleySearchOutcome::InArrowH { tilt } => {
                assert!(tilt.is_strictly_positive());
            }
            HolleySearchOutcome::Unknown => panic!("must certify equal measures"),
        }
        // a dominated pair along the diagonal
        let m1 = measure(
            &["00", "01", "10", "11"],
            &[("00", ratio(3, 4)), ("11", ratio(1, 4))],
        );
        let m2 = measure(
            &["00", "01", "10", "11"],
            &[("00", ratio(1, 4)), ("11", ratio(3, 4))],
        );
        if let HolleySearchOutcome::InArrowH { tilt } =
            generalized_holley_search(&m1, &m2, &lat, 100).unwrap()
        {
            // re-verify the certificate end to end
            let delta = difference(&m1, &m2).unwrap();
            let (dp, dm) = delta.positive_negative_parts();
            let t1 = dp.add(&tilt).unwrap();
            let t2 = dm.add(&tilt).unwrap();
            assert!(holley_condition(&t1, &t2, &lat).unwrap().holds);
            assert!(dominates_oracle(&m1, &m2, &rel).unwrap().dominates);
        }
        // non-dominated pair: pre-screen yields Unknown
        let d1 = measure(&["00", "01", "10", "11"], &[("11", rat(1))]);
        let d0 = measure(&["00", "01", "10", "11"], &[("00", rat(1))]);
        assert_eq!(
            generalized_holley_search(&d1, &d0, &lat, 50).unwrap(),
            HolleySearchOutcome::Unknown
        );
    }

    #[test]
    fn byparts_identity_for_certificate_flows() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for _ in 0..30 {
            let n = 6;
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((vs[i].clone(), vs[j].clone()));
                    }
                }
            }
            let dag = Digraph::new(vs.clone(), edges).unwrap();
            let rel = PartialOrderRelation::from_digraph(&dag).unwrap();
            let hasse = hasse_digraph(&rel);
            let raw1: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let t1 = raw1.iter().sum::<i64>().max(1);
            let t2 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                vs.iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                vs.iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            let verdict = dominates_via_flow(&m1, &m2, &hasse).unwrap();
            let Some(q) = verdict.flow() else { continue };
            // random increasing function: sum of random up-set indicators
            for _ in 0..10 {
                let mut f: Vec<Rat> = vec![Rat::zero(); n];
                for _ in 0..3 {
                    let seed: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
                    for x in 0..n {
                        if seed[x] {
                            for y in 0..n {
                                if rel.le(&vs[x], &vs[y]) == Some(true) {
                                    f[y] += rat(1);
                                }
                            }
                        }
                    }
                }
                let lhs: Rat = (0..n)
                    .map(|x| (m2.get(&vs[x]) - m1.get(&vs[x])) * &f[x])
                    .sum();
                let rhs: Rat = q
                    .iter_named()
                    .map(|(a, b, w)| {
                        let fa = &f[vs.iter().position(|v| v == a).unwrap()];
                        let fb = &f[vs.iter().position(|v| v == b).unwrap()];
                        w * &(fb - fa)
                    })
                    .sum();
                assert_eq!(lhs, rhs, "integration by parts must be exact");
            }
        }
    }

    #[test]
    fn invariance_under_scaled_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..30 {
            let n = 5;
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((vs[i].clone(), vs[j].clone()));
                    }
                }
            }
            let dag = Digraph::new(vs.clone(), edges).unwrap();
            let hasse = PartialOrderRelation::from_digraph(&dag)
                .map(|rel| hasse_digraph(&rel))
                .unwrap();
            let raw1: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let raw2: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let t1 = raw1.iter().sum::<i64>().max(1);
            let t2 = raw2.iter().sum::<i64>().max(1);
            let m1 = Measure::new(
                vs.iter()
                    .zip(&raw1)
                    .map(|(v, &w)| (v.clone(), ratio(w, t1))),
            )
            .unwrap();
            let m2 = Measure::new(
                vs.iter()
                    .zip(&raw2)
                    .map(|(v, &w)| (v.clone(), ratio(w, t2))),
            )
            .unwrap();
            // nu_i = (mu_i + lambda * common) / (1 + lambda) shares the
            // difference direction lambda' (mu1 - mu2)
            let lambda = ratio(1, 2);
            let common = Measure::new(vs.iter().map(|v| (v.clone(), ratio(1, n as i64))))
                .unwrap()
                .scale(&lambda);
            let denom = rat(1) + &lambda;
            let nu1 = m1.add(&common).unwrap().scale(&(rat(1) / &denom));
            let nu2 = m2.add(&common).unwrap().scale(&(rat(1) / &denom));
            let a = dominates_via_flow(&m1, &m2, &hasse).unwrap();
            let b = dominates_via_flow(&nu1, &nu2, &hasse).unwrap();
            assert_eq!(a.dominates, b.dominates);
        }
    }
}
