//! Exact rational network solvers: BFS augmenting-path max flow and
//! successive shortest paths with potentials for min-cost flow. Shared by
//! the dominance (feasibility) and transport (Beckmann/Kantorovich) modules.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use num_traits::Zero;

use crate::num::Rat;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: Option<Rat>, // None = unbounded
    flow: Rat,
    cost: Rat,
}

/// A residual network; arcs are stored in twin pairs (`id ^ 1` reverses).
#[derive(Debug, Clone)]
pub(crate) struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Network { arcs: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u -> v` with the given capacity and cost; returns the forward
    /// arc id.
    pub fn arc(&mut self, u: usize, v: usize, cap: Option<Rat>, cost: Rat) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, flow: Rat::zero(), cost: cost.clone() });
        self.arcs.push(Arc { to: u, cap: Some(Rat::zero()), flow: Rat::zero(), cost: -cost });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow_on(&self, arc_id: usize) -> &Rat {
        &self.arcs[arc_id].flow
    }

    fn residual(&self, arc_id: usize) -> Option<Rat> {
        self.arcs[arc_id]
            .cap
            .as_ref()
            .map(|c| c - &self.arcs[arc_id].flow)
    }

    fn has_residual(&self, arc_id: usize) -> bool {
        match self.residual(arc_id) {
            None => true,
            Some(r) => r.is_positive(),
        }
    }

    fn push(&mut self, arc_id: usize, amount: &Rat) {
        self.arcs[arc_id].flow += amount;
        self.arcs[arc_id ^ 1].flow -= amount;
    }

    /// Deterministically reorders each adjacency list with `rng`; used to
    /// sample different feasible flows of the same instance.
    pub fn shuffle_adjacency<R: rand::Rng>(&mut self, rng: &mut R) {
        for list in &mut self.adj {
            for i in (1..list.len()).rev() {
                let j = rng.gen_range(0..=i);
                list.swap(i, j);
            }
        }
    }

    /// Edmonds-Karp: BFS shortest augmenting paths, exact bottlenecks.
    pub fn max_flow(&mut self, s: usize, t: usize) -> Rat {
        let mut total = Rat::zero();
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.nodes()];
            let mut seen = vec![false; self.nodes()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &id in &self.adj[u] {
                    let v = self.arcs[id].to;
                    if !seen[v] && self.has_residual(id) {
                        seen[v] = true;
                        pred[v] = Some(id);
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck: Option<Rat> = None;
            let mut at = t;
            while at != s {
                let id = pred[at].unwrap();
                if let Some(r) = self.residual(id) {
                    bottleneck = Some(match bottleneck {
                        Some(b) => b.min(r),
                        None => r,
                    });
                }
                at = self.arcs[id ^ 1].to;
            }
            let amount = bottleneck.expect("augmenting path has a finite arc");
            debug_assert!(amount.is_positive());
            let mut at = t;
            while at != s {
                let id = pred[at].unwrap();
                self.push(id, &amount);
                at = self.arcs[id ^ 1].to;
            }
            total += amount;
        }
    }

    /// Nodes reachable from `s` in the residual network (after a max-flow
    /// run this is the source side of a minimum cut).
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adj[u] {
                let v = self.arcs[id].to;
                if !seen[v] && self.has_residual(id) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Successive shortest paths with vertex potentials. All arc costs must
    /// be nonnegative. Returns `(flow value, total cost)`.
    pub fn min_cost_flow(&mut self, s: usize, t: usize) -> (Rat, Rat) {
        let n = self.nodes();
        let mut potential = vec![Rat::zero(); n];
        let mut total_flow = Rat::zero();
        let mut total_cost = Rat::zero();
        loop {
            // Dijkstra over reduced costs
            let mut dist: Vec<Option<Rat>> = vec![None; n];
            let mut pred: Vec<Option<usize>> = vec![None; n];
            let mut heap: BinaryHeap<Reverse<(Rat, usize)>> = BinaryHeap::new();
            dist[s] = Some(Rat::zero());
            heap.push(Reverse((Rat::zero(), s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if dist[u].as_ref() != Some(&d) {
                    continue;
                }
                for &id in &self.adj[u] {
                    if !self.has_residual(id) {
                        continue;
                    }
                    let v = self.arcs[id].to;
                    let reduced = &self.arcs[id].cost + &potential[u] - &potential[v];
                    debug_assert!(
                        !reduced.is_negative(),
                        "reduced cost must stay nonnegative"
                    );
                    let cand = &d + &reduced;
                    let better = match &dist[v] {
                        None => true,
                        Some(cur) => cand < *cur,
                    };
                    if better {
                        dist[v] = Some(cand.clone());
                        pred[v] = Some(id);
                        heap.push(Reverse((cand, v)));
                    }
                }
            }
            if dist[t].is_none() {
                return (total_flow, total_cost);
            }
            for v in 0..n {
                if let Some(d) = &dist[v] {
                    potential[v] += d;
                }
            }
            let mut bottleneck: Option<Rat> = None;
            let mut at = t;
            while at != s {
                let id = pred[at].unwrap();
                if let Some(r) = self.residual(id) {
                    bottleneck = Some(match bottleneck {
                        Some(b) => b.min(r),
                        None => r,
                    });
                }
                at = self.arcs[id ^ 1].to;
            }
            let amount = bottleneck.expect("augmenting path has a finite arc");
            debug_assert!(amount.is_positive());
            let mut at = t;
            while at != s {
                let id = pred[at].unwrap();
                total_cost += &amount * &self.arcs[id].cost;
                self.push(id, &amount);
                at = self.arcs[id ^ 1].to;
            }
            total_flow += amount;
        }
    }
}

trait RatSign {
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
}

impl RatSign for Rat {
    fn is_positive(&self) -> bool {
        num_traits::Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
}
