//! Desk-scale machinery for countable instances: ghost-site truncation of
//! lazily described flows, flux estimates along an invading vertex
//! sequence, non-decomposability witnesses, and the closed-form chain and
//! tree flows.
//!
//! Infinity only ever appears through deterministic generators plus prefix
//! indices; every value handed to the finite modules is a finite instance.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::flow::{remove_cycles, Flow, FlowError, PathMeasure};
use crate::graph::{Digraph, GraphError};
use crate::measure::{Measure, MeasureError, SignedMeasure};
use crate::num::{rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TruncateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("boundary sums are not available: {0}")]
    UnsummableBoundary(String),
    #[error("instance window is not a tree: {0}")]
    NotATree(String),
    #[error("generator flow divergence differs from mu1 - mu2 at level {0}")]
    DivergenceMismatch(u32),
    #[error("ghost flux {flux} exceeds the decomposition tail bound {bound}")]
    TailBoundViolated { flux: String, bound: String },
    #[error("decomposition prefix leaves the window: {0}")]
    PrefixNotInterior(String),
    #[error("measures must have equal total mass for the chain flow")]
    UnequalMass,
}

/// A countable instance described by generators: vertex enumeration, the
/// structural flow edges around each vertex (locally finite), the two
/// measures, and the invading sequence `V_n` as a prefix-size function.
pub trait LazyInstance {
    fn vertex_name(&self, i: u64) -> String;
    /// Structural out-edges `(target, flow value)`; values may be zero.
    fn out_edges(&self, i: u64) -> Vec<(u64, Rat)>;
    /// Structural in-edges `(source, flow value)`.
    fn in_edges(&self, i: u64) -> Vec<(u64, Rat)>;
    fn mu1(&self, i: u64) -> Rat;
    fn mu2(&self, i: u64) -> Rat;
    /// `|V_n|`; must be nondecreasing in `n`.
    fn level_size(&self, n: u32) -> u64;
    /// Upper bound on `sum_{x not in V_n} (mu1 + mu2)(x)`, when the
    /// generator can compute one.
    fn measure_tail(&self, _n: u32) -> Option<Rat> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostMode {
    /// One ghost site absorbing both boundary directions; cycles through it
    /// are removed.
    Single,
    /// Separate entry and exit ghosts; preserves acyclicity.
    Split,
}

pub const GHOST: &str = "(ghost)";
pub const GHOST_IN: &str = "(ghost-)";
pub const GHOST_OUT: &str = "(ghost+)";

/// A finite window of a countable instance.
#[derive(Debug, Clone)]
pub struct TruncatedInstance {
    pub inner_vertices: Vec<String>,
    pub mode: GhostMode,
    /// Flow on `V_n` plus the ghost site(s), acyclic in both modes.
    pub truncated_flow: Flow,
    /// Divergence defect on `V_n` once ghost edges are dropped.
    pub boundary_defect: SignedMeasure,
    /// Measures adjusted by the positive/negative parts of the defect, so
    /// the interior flow has divergence `mu1_inner - mu2_inner`.
    pub mu1_inner: Measure,
    pub mu2_inner: Measure,
}

impl TruncatedInstance {
    /// The flow restricted to the inner vertices (ghost edges dropped).
    pub fn interior_flow(&self) -> Flow {
        let values: Vec<(String, String, Rat)> = self
            .truncated_flow
            .iter_named()
            .filter(|(a, b, _)| {
                !matches!(*a, GHOST | GHOST_IN | GHOST_OUT)
                    && !matches!(*b, GHOST | GHOST_IN | GHOST_OUT)
            })
            .map(|(a, b, v)| (a.to_owned(), b.to_owned(), v.clone()))
            .collect();
        let edges: Vec<(String, String)> =
            values.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        let dg = Digraph::new(self.inner_vertices.clone(), edges)
            .expect("interior edges stay inside the window");
        Flow::new(dg, values).expect("interior values are nonnegative")
    }
}

struct WindowData {
    names: Vec<String>,
    inner: Vec<(u64, u64, Rat)>,
    ghost_out: BTreeMap<u64, Rat>, // x -> total flow to outside
    ghost_in: BTreeMap<u64, Rat>,  // x -> total flow from outside
    has_out_edge: BTreeMap<u64, bool>,
    has_in_edge: BTreeMap<u64, bool>,
}

fn collect_window(li: &dyn LazyInstance, n: u32) -> WindowData {
    let size = li.level_size(n);
    let names: Vec<String> = (0..size).map(|i| li.vertex_name(i)).collect();
    let mut inner = Vec::new();
    let mut ghost_out = BTreeMap::new();
    let mut ghost_in = BTreeMap::new();
    let mut has_out_edge = BTreeMap::new();
    let mut has_in_edge = BTreeMap::new();
    for i in 0..size {
        for (j, q) in li.out_edges(i) {
            if j < size {
                inner.push((i, j, q));
            } else {
                *ghost_out.entry(i).or_insert_with(Rat::zero) += q;
                has_out_edge.insert(i, true);
            }
        }
        for (j, q) in li.in_edges(i) {
            if j >= size {
                *ghost_in.entry(i).or_insert_with(Rat::zero) += q;
                has_in_edge.insert(i, true);
            }
        }
    }
    WindowData { names, inner, ghost_out, ghost_in, has_out_edge, has_in_edge }
}

fn assemble_truncation(
    li: &dyn LazyInstance,
    n: u32,
    mode: GhostMode,
    window: &WindowData,
    flow_after_cycles: Flow,
) -> Result<TruncatedInstance, TruncateError> {
    let size = window.names.len();
    let (gin, gout) = match mode {
        GhostMode::Single => (GHOST, GHOST),
        GhostMode::Split => (GHOST_IN, GHOST_OUT),
    };
    let mut defect = Vec::with_capacity(size);
    let mut mu1_inner = Vec::with_capacity(size);
    let mut mu2_inner = Vec::with_capacity(size);
    for (i, name) in window.names.iter().enumerate() {
        let received = flow_after_cycles.value_named(gin, name);
        let sent = flow_after_cycles.value_named(name, gout);
        let delta = received - sent;
        let m1 = li.mu1(i as u64);
        let m2 = li.mu2(i as u64);
        if delta.is_positive() {
            mu1_inner.push((name.clone(), m1 + &delta));
            mu2_inner.push((name.clone(), m2));
        } else {
            mu1_inner.push((name.clone(), m1));
            mu2_inner.push((name.clone(), m2 - &delta));
        }
        defect.push((name.clone(), delta));
    }
    let boundary_defect = SignedMeasure::new(defect)?;
    let mu1_inner = Measure::new(mu1_inner)?;
    let mu2_inner = Measure::new(mu2_inner)?;
    let out = TruncatedInstance {
        inner_vertices: window.names.clone(),
        mode,
        truncated_flow: flow_after_cycles,
        boundary_defect,
        mu1_inner,
        mu2_inner,
    };
    // interior divergence must equal the adjusted measure difference
    let interior = out.interior_flow();
    let div = interior.divergence();
    for name in &out.inner_vertices {
        if div.get(name) != out.mu1_inner.get(name) - out.mu2_inner.get(name) {
            return Err(TruncateError::DivergenceMismatch(n));
        }
    }
    Ok(out)
}

fn build_window_flow(
    window: &WindowData,
    mode: GhostMode,
) -> Result<Flow, TruncateError> {
    let size = window.names.len();
    let mut vertices = window.names.clone();
    match mode {
        GhostMode::Single => vertices.push(GHOST.to_owned()),
        GhostMode::Split => {
            vertices.push(GHOST_IN.to_owned());
            vertices.push(GHOST_OUT.to_owned());
        }
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut values: Vec<(String, String, Rat)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, j, q) in &window.inner {
        let a = window.names[*i as usize].clone();
        let b = window.names[*j as usize].clone();
        if seen.insert((a.clone(), b.clone())) {
            edges.push((a.clone(), b.clone()));
            values.push((a, b, q.clone()));
        }
    }
    let (gin, gout) = match mode {
        GhostMode::Single => (GHOST, GHOST),
        GhostMode::Split => (GHOST_IN, GHOST_OUT),
    };
    for i in 0..size as u64 {
        let name = window.names[i as usize].clone();
        if window.has_out_edge.get(&i).copied().unwrap_or(false) {
            edges.push((name.clone(), gout.to_owned()));
            values.push((
                name.clone(),
                gout.to_owned(),
                window.ghost_out.get(&i).cloned().unwrap_or_else(Rat::zero),
            ));
        }
        if window.has_in_edge.get(&i).copied().unwrap_or(false) {
            edges.push((gin.to_owned(), name.clone()));
            values.push((
                gin.to_owned(),
                name,
                window.ghost_in.get(&i).cloned().unwrap_or_else(Rat::zero),
            ));
        }
    }
    let dg = Digraph::new(vertices, edges)?;
    Ok(Flow::new(dg, values)?)
}

/// Truncates the instance flow to `V_n` with ghost sites absorbing the
/// boundary edges. In single mode cycles created through the ghost are
/// removed deterministically; split mode keeps the flow acyclic as built.
pub fn ghost_truncate(
    li: &dyn LazyInstance,
    n: u32,
    mode: GhostMode,
) -> Result<TruncatedInstance, TruncateError> {
    let window = collect_window(li, n);
    let raw = build_window_flow(&window, mode)?;
    let flow = match mode {
        GhostMode::Single => remove_cycles(&raw),
        GhostMode::Split => raw,
    };
    if !flow.has_acyclic_support() {
        return Err(TruncateError::UnsummableBoundary(
            "window flow has a cycle avoiding the ghost".into(),
        ));
    }
    assemble_truncation(li, n, mode, &window, flow)
}

/// Single-mode truncation with a decomposition prefix whose paths must lie
/// inside `V_n`. The prefix passes through untouched; only the remainder is
/// decycled, and the resulting ghost fluxes are checked against the
/// caller's tail bound for the remaining path weights.
pub fn ghost_truncate_with_decomposition(
    li: &dyn LazyInstance,
    n: u32,
    prefix: &PathMeasure,
    tail_bound: &Rat,
) -> Result<TruncatedInstance, TruncateError> {
    let window = collect_window(li, n);
    let raw = build_window_flow(&window, GhostMode::Single)?;
    // subtract the prefix flow; it must fit inside the window edgewise
    let inner_digraph = raw.digraph().clone();
    let mut remainder = raw.clone();
    for (p, w) in prefix.entries() {
        for (a, b) in p.edges_named() {
            if a == GHOST || b == GHOST {
                return Err(TruncateError::PrefixNotInterior(format!(
                    "path touches the ghost site via ({a:?}, {b:?})"
                )));
            }
            let current = remainder.value_named(a, b);
            let next = current - w;
            if next.is_negative() {
                return Err(TruncateError::PrefixNotInterior(format!(
                    "prefix exceeds the window flow on ({a:?}, {b:?})"
                )));
            }
            let (a, b) = (a.to_owned(), b.to_owned());
            remainder.set_named(&a, &b, next)?;
        }
    }
    let cleaned = remove_cycles(&remainder);
    // reassemble: prefix + decycled remainder
    let mut values: Vec<(String, String, Rat)> = cleaned
        .iter_named()
        .map(|(a, b, v)| (a.to_owned(), b.to_owned(), v.clone()))
        .collect();
    for (p, w) in prefix.entries() {
        for (a, b) in p.edges_named() {
            if let Some(slot) = values
                .iter_mut()
                .find(|(x, y, _)| x == a && y == b)
            {
                slot.2 += w;
            }
        }
    }
    let combined = remove_cycles(&Flow::new(inner_digraph, values)?);
    // ghost fluxes can only be fed by the tail of the decomposition
    let ghost_in_flux: Rat = combined
        .iter_named()
        .filter(|(a, _, _)| *a == GHOST)
        .map(|(_, _, v)| v.clone())
        .sum();
    let ghost_out_flux: Rat = combined
        .iter_named()
        .filter(|(_, b, _)| *b == GHOST)
        .map(|(_, _, v)| v.clone())
        .sum();
    for flux in [&ghost_in_flux, &ghost_out_flux] {
        if flux > tail_bound {
            return Err(TruncateError::TailBoundViolated {
                flux: flux.to_string(),
                bound: tail_bound.to_string(),
            });
        }
    }
    assemble_truncation(li, n, GhostMode::Single, &window, combined)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluxReport {
    pub level: u32,
    pub outgoing: Rat,
    pub incoming: Rat,
}

/// Reports the boundary fluxes per level and checks the balance identity
/// `outgoing - incoming = mu1(V_n) - mu2(V_n)` exactly at every level.
pub fn zero_flux_estimate(
    li: &dyn LazyInstance,
    n_max: u32,
) -> Result<Vec<FluxReport>, TruncateError> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let size = li.level_size(n);
        let mut outgoing = Rat::zero();
        let mut incoming = Rat::zero();
        let mut inner_diff = Rat::zero();
        for i in 0..size {
            for (j, q) in li.out_edges(i) {
                if j >= size {
                    outgoing += q;
                }
            }
            for (j, q) in li.in_edges(i) {
                if j >= size {
                    incoming += q;
                }
            }
            inner_diff += li.mu1(i) - li.mu2(i);
        }
        if &outgoing - &incoming != inner_diff {
            return Err(TruncateError::DivergenceMismatch(n));
        }
        out.push(FluxReport { level: n, outgoing, incoming });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupTailOutcome {
    /// Every level up to `n_max` had a boundary-touching edge with flow at
    /// least epsilon: evidence against finite decomposability (conclusive
    /// only in the limit). One witness edge per level.
    WitnessAtEveryLevel(Vec<(u32, String, String, Rat)>),
    /// Some level had no such edge within the scanned horizon.
    NoWitnessFound { first_clear_level: u32 },
}

/// Scans levels `1..=n_max` for edges touching `V \ V_n` with flow at
/// least `epsilon`. The scan is limited to vertices of `V_{n_max + 1}`, so
/// the verdict is evidence over the observed window, never a proof.
pub fn sup_tail_witness(li: &dyn LazyInstance, n_max: u32, epsilon: &Rat) -> SupTailOutcome {
    let horizon = li.level_size(n_max + 1);
    let mut witnesses = Vec::new();
    for n in 1..=n_max {
        let size = li.level_size(n);
        let mut found = None;
        'scan: for i in 0..horizon {
            for (j, q) in li.out_edges(i) {
                let touches = i >= size || j >= size;
                if touches && q >= *epsilon {
                    found = Some((n, li.vertex_name(i), li.vertex_name(j), q));
                    break 'scan;
                }
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => return SupTailOutcome::NoWitnessFound { first_clear_level: n },
        }
    }
    SupTailOutcome::WitnessAtEveryLevel(witnesses)
}

/// The unique finitely decomposable chain-flow candidate
/// `Q(x, x+1) = F1(x) - F2(x)` on the window covering both supports.
#[derive(Debug, Clone)]
pub struct ZChainCandidate {
    pub window: (i64, i64),
    /// `(x, Q(x, x+1))` for `x` in `window.0 .. window.1`.
    pub edge_values: Vec<(i64, Rat)>,
    pub dominates: bool,
}

impl ZChainCandidate {
    /// The candidate as a flow on the window chain, when nonnegative.
    pub fn to_flow(&self) -> Option<Flow> {
        if !self.dominates {
            return None;
        }
        let (lo, hi) = self.window;
        let vertices: Vec<String> = (lo..=hi).map(|x| x.to_string()).collect();
        let edges: Vec<(String, String)> = (lo..hi)
            .map(|x| (x.to_string(), (x + 1).to_string()))
            .collect();
        let dg = Digraph::new(vertices, edges).ok()?;
        Flow::new(
            dg,
            self.edge_values
                .iter()
                .map(|(x, v)| (x.to_string(), (x + 1).to_string(), v.clone())),
        )
        .ok()
    }
}

/// Computes the telescoped chain flow for finitely supported measures on
/// the integers; the dominance verdict is its nonnegativity.
pub fn z_chain_flow(
    mu1: &BTreeMap<i64, Rat>,
    mu2: &BTreeMap<i64, Rat>,
) -> Result<ZChainCandidate, TruncateError> {
    let total1: Rat = mu1.values().sum();
    let total2: Rat = mu2.values().sum();
    if total1 != total2 {
        return Err(TruncateError::UnequalMass);
    }
    let support: Vec<i64> = mu1.keys().chain(mu2.keys()).copied().collect();
    let (lo, hi) = match (support.iter().min(), support.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, 0),
    };
    let mut edge_values = Vec::new();
    let mut prefix = Rat::zero();
    let mut dominates = true;
    for x in lo..hi {
        prefix += mu1.get(&x).cloned().unwrap_or_else(Rat::zero)
            - mu2.get(&x).cloned().unwrap_or_else(Rat::zero);
        if prefix.is_negative() {
            dominates = false;
        }
        edge_values.push((x, prefix.clone()));
    }
    Ok(ZChainCandidate { window: (lo, hi), edge_values, dominates })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFlowEstimate {
    /// Partial sum of `mu1 - mu2` over the tail-side component within the
    /// depth window.
    pub value: Rat,
    /// Bound on the missing mass outside the window, when the generator
    /// provides one; the exact value differs from `value` by at most this.
    pub tail_bound: Option<Rat>,
}

/// Tree-flow value on `edge` by the cut identity, summed over the window
/// `V_depth`; exact when the measures' supports fit inside the window.
pub fn infinite_tree_flow(
    li: &dyn LazyInstance,
    edge: (u64, u64),
    depth: u32,
) -> Result<TreeFlowEstimate, TruncateError> {
    let size = li.level_size(depth);
    let (tail, head) = edge;
    if tail >= size || head >= size {
        return Err(TruncateError::NotATree(
            "edge endpoints must lie inside the depth window".into(),
        ));
    }
    // undirected adjacency within the window
    let neighbors = |v: u64| -> Vec<u64> {
        let mut out: Vec<u64> = li
            .out_edges(v)
            .into_iter()
            .map(|(j, _)| j)
            .chain(li.in_edges(v).into_iter().map(|(j, _)| j))
            .filter(|&j| j < size)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    // component of `tail` avoiding the removed edge; also a cheap cycle
    // check: reaching `head` without the edge would close a cycle
    let mut seen = std::collections::HashSet::from([tail]);
    let mut stack = vec![tail];
    let mut value = Rat::zero();
    while let Some(v) = stack.pop() {
        value += li.mu1(v) - li.mu2(v);
        for w in neighbors(v) {
            if v == tail && w == head {
                continue;
            }
            if w == head {
                return Err(TruncateError::NotATree(format!(
                    "window contains a cycle through ({tail}, {head})"
                )));
            }
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    Ok(TreeFlowEstimate { value, tail_bound: li.measure_tail(depth) })
}

fn rat_pow(base: &Rat, exp: u64) -> Rat {
    let mut acc = rat(1);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Integer chain instance: finitely supported measures, flow given by the
/// telescoped prefix sums, plus an optional constant drift added to every
/// edge (the drift cancels in the divergence and models flows that never
/// decay at infinity).
#[derive(Debug, Clone)]
pub struct ZChainInstance {
    mu1: BTreeMap<i64, Rat>,
    mu2: BTreeMap<i64, Rat>,
    drift: Rat,
}

impl ZChainInstance {
    pub fn new(
        mu1: BTreeMap<i64, Rat>,
        mu2: BTreeMap<i64, Rat>,
        drift: Rat,
    ) -> Result<Self, TruncateError> {
        if drift.is_negative() {
            return Err(TruncateError::UnsummableBoundary("negative drift".into()));
        }
        let candidate = z_chain_flow(&mu1, &mu2)?;
        if candidate
            .edge_values
            .iter()
            .any(|(_, v)| (v + &drift).is_negative())
        {
            return Err(TruncateError::UnsummableBoundary(
                "chain flow would be negative; the pair is not dominated".into(),
            ));
        }
        Ok(ZChainInstance { mu1, mu2, drift })
    }

    /// index 0, 1, 2, 3, ... enumerates 0, 1, -1, 2, -2, ...
    fn site(i: u64) -> i64 {
        if i % 2 == 1 {
            i.div_ceil(2) as i64
        } else {
            -((i / 2) as i64)
        }
    }

    fn index_of(z: i64) -> u64 {
        if z > 0 {
            (2 * z - 1) as u64
        } else {
            (-2 * z) as u64
        }
    }

    /// `Q(z, z+1) = F1(z) - F2(z) + drift`.
    fn chain_value(&self, z: i64) -> Rat {
        let mut prefix = Rat::zero();
        for (&x, w) in &self.mu1 {
            if x <= z {
                prefix += w;
            }
        }
        for (&x, w) in &self.mu2 {
            if x <= z {
                prefix -= w;
            }
        }
        prefix + &self.drift
    }
}

impl LazyInstance for ZChainInstance {
    fn vertex_name(&self, i: u64) -> String {
        Self::site(i).to_string()
    }

    fn out_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        let z = Self::site(i);
        vec![(Self::index_of(z + 1), self.chain_value(z))]
    }

    fn in_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        let z = Self::site(i);
        vec![(Self::index_of(z - 1), self.chain_value(z - 1))]
    }

    fn mu1(&self, i: u64) -> Rat {
        self.mu1
            .get(&Self::site(i))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn mu2(&self, i: u64) -> Rat {
        self.mu2
            .get(&Self::site(i))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn level_size(&self, n: u32) -> u64 {
        2 * n as u64 + 1
    }

    fn measure_tail(&self, n: u32) -> Option<Rat> {
        let bound = n as i64;
        let mut acc = Rat::zero();
        for (&x, w) in self.mu1.iter().chain(self.mu2.iter()) {
            if x.abs() > bound {
                acc += w;
            }
        }
        Some(acc)
    }
}

/// Chain instance with two-sided geometric measures of a common ratio and
/// ordered centers; all CDF values stay exactly rational.
#[derive(Debug, Clone)]
pub struct GeometricZChain {
    ratio: Rat,
    center1: i64,
    center2: i64,
}

impl GeometricZChain {
    pub fn new(ratio: Rat, center1: i64, center2: i64) -> Result<Self, TruncateError> {
        if !ratio.is_positive() || ratio >= rat(1) {
            return Err(TruncateError::UnsummableBoundary(
                "geometric ratio must lie in (0, 1)".into(),
            ));
        }
        if center1 > center2 {
            return Err(TruncateError::UnsummableBoundary(
                "centers must be ordered so the flow is nonnegative".into(),
            ));
        }
        Ok(GeometricZChain { ratio, center1, center2 })
    }

    /// `mu(x) = (1 - r) / (1 + r) * r^{|x - c|}`.
    fn mass(&self, x: i64, center: i64) -> Rat {
        let a = (rat(1) - &self.ratio) / (rat(1) + &self.ratio);
        a * rat_pow(&self.ratio, x.abs_diff(center))
    }

    /// Exact CDF `F(x) = sum_{z <= x} mu(z)`.
    pub fn cdf(&self, x: i64, center: i64) -> Rat {
        let a = (rat(1) - &self.ratio) / (rat(1) + &self.ratio);
        if x < center {
            // a * r^{c - x} / (1 - r)
            a * rat_pow(&self.ratio, (center - x) as u64) / (rat(1) - &self.ratio)
        } else {
            rat(1)
                - a * rat_pow(&self.ratio, (x - center + 1) as u64) / (rat(1) - &self.ratio)
        }
    }

    fn site(i: u64) -> i64 {
        ZChainInstance::site(i)
    }

    fn index_of(z: i64) -> u64 {
        ZChainInstance::index_of(z)
    }

    fn chain_value(&self, z: i64) -> Rat {
        self.cdf(z, self.center1) - self.cdf(z, self.center2)
    }
}

impl LazyInstance for GeometricZChain {
    fn vertex_name(&self, i: u64) -> String {
        Self::site(i).to_string()
    }

    fn out_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        let z = Self::site(i);
        vec![(Self::index_of(z + 1), self.chain_value(z))]
    }

    fn in_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        let z = Self::site(i);
        vec![(Self::index_of(z - 1), self.chain_value(z - 1))]
    }

    fn mu1(&self, i: u64) -> Rat {
        self.mass(Self::site(i), self.center1)
    }

    fn mu2(&self, i: u64) -> Rat {
        self.mass(Self::site(i), self.center2)
    }

    fn level_size(&self, n: u32) -> u64 {
        2 * n as u64 + 1
    }

    fn measure_tail(&self, n: u32) -> Option<Rat> {
        // sum over |x| > n of both measures; crude but exact upper bound:
        // each one-sided geometric tail beyond distance d from the center
        // is r^d / (1 + r) + r^d... use the CDF complement on both sides.
        let z = n as i64;
        let tail = |center: i64| {
            self.cdf(-z - 1, center) + (rat(1) - self.cdf(z, center))
        };
        Some(tail(self.center1) + tail(self.center2))
    }
}

/// Rooted infinite binary tree orderd root-down, with depth-geometric
/// measures `mu_i(v) = (1 - r_i) (r_i / 2)^{depth(v)}`; the tree flow has
/// the closed form `(r2/2)^{d+1} - (r1/2)^{d+1}` on every depth-`d` edge.
#[derive(Debug, Clone)]
pub struct BinaryTreeInstance {
    r1: Rat,
    r2: Rat,
}

impl BinaryTreeInstance {
    pub fn new(r1: Rat, r2: Rat) -> Result<Self, TruncateError> {
        for r in [&r1, &r2] {
            if !r.is_positive() || *r >= rat(1) {
                return Err(TruncateError::UnsummableBoundary(
                    "depth ratios must lie in (0, 1)".into(),
                ));
            }
        }
        if r1 > r2 {
            return Err(TruncateError::UnsummableBoundary(
                "r1 <= r2 is required for a nonnegative flow".into(),
            ));
        }
        Ok(BinaryTreeInstance { r1, r2 })
    }

    fn depth(i: u64) -> u32 {
        (i + 1).ilog2()
    }

    /// Subtree mass below (and including) a depth-`d` vertex.
    pub fn subtree_mass(r: &Rat, d: u32) -> Rat {
        rat_pow(&(r / rat(2)), d as u64)
    }

    /// Flow on the edge into a depth-`d` child: `(r2/2)^d - (r1/2)^d`.
    fn edge_value_into_depth(&self, d: u32) -> Rat {
        Self::subtree_mass(&self.r2, d) - Self::subtree_mass(&self.r1, d)
    }

    fn mass(r: &Rat, d: u32) -> Rat {
        (rat(1) - r) * rat_pow(&(r / rat(2)), d as u64)
    }
}

impl LazyInstance for BinaryTreeInstance {
    fn vertex_name(&self, i: u64) -> String {
        // path word from the root, "r" then 0/1 per step
        let mut bits = Vec::new();
        let mut v = i + 1;
        while v > 1 {
            bits.push((v & 1) as u8);
            v >>= 1;
        }
        let mut name = String::from("r");
        for b in bits.iter().rev() {
            name.push(if *b == 1 { '1' } else { '0' });
        }
        name
    }

    fn out_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        let d = Self::depth(i);
        let q = self.edge_value_into_depth(d + 1);
        vec![(2 * i + 1, q.clone()), (2 * i + 2, q)]
    }

    fn in_edges(&self, i: u64) -> Vec<(u64, Rat)> {
        if i == 0 {
            return Vec::new();
        }
        let d = Self::depth(i);
        vec![((i - 1) / 2, self.edge_value_into_depth(d))]
    }

    fn mu1(&self, i: u64) -> Rat {
        Self::mass(&self.r1, Self::depth(i))
    }

    fn mu2(&self, i: u64) -> Rat {
        Self::mass(&self.r2, Self::depth(i))
    }

    fn level_size(&self, n: u32) -> u64 {
        (1u64 << (n + 1)) - 1
    }

    fn measure_tail(&self, n: u32) -> Option<Rat> {
        // mass at depth > n is r^{n+1} for each measure
        Some(rat_pow(&self.r1, n as u64 + 1) + rat_pow(&self.r2, n as u64 + 1))
    }
}
