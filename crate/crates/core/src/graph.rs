//! Digraphs, directed paths, partial orders and fundamental cycle bases.
//!
//! Vertices are opaque strings ordered by input position; every tie-break
//! (BFS order, spanning-tree choice, cycle orientation) follows that order,
//! so all outputs are deterministic.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("self-loop at {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge ({0:?}, {1:?})")]
    DuplicateEdge(String, String),
    #[error("input digraph has a directed cycle")]
    CyclicInput,
    #[error("undirected shadow is disconnected (vertex {0:?} unreachable)")]
    Disconnected(String),
    #[error("not a partial order: {axiom} violated by pair ({:?}, {:?})", witness.0, witness.1)]
    NotAPartialOrder {
        axiom: &'static str,
        witness: (String, String),
    },
    #[error("vertex sequence {0:?} is not a directed path of the digraph")]
    NotAPath(Vec<String>),
}

/// A finite digraph: no self-loops, no duplicate edges, every endpoint listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_ids: HashMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator,
        E::Item: Into<(String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut g = Digraph {
            out_adj: vec![Vec::new(); vertices.len()],
            in_adj: vec![Vec::new(); vertices.len()],
            vertices,
            index,
            edges: Vec::new(),
            edge_ids: HashMap::new(),
        };
        for e in edges {
            let (a, b) = e.into();
            g.push_edge(&a, &b)?;
        }
        Ok(g)
    }

    /// Builds a digraph whose vertex list is the order of first appearance in
    /// the edge list.
    pub fn from_edge_list<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let edges: Vec<(String, String)> = edges.into_iter().collect();
        let mut vertices = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in &edges {
            for v in [a, b] {
                if seen.insert(v.clone()) {
                    vertices.push(v.clone());
                }
            }
        }
        Digraph::new(vertices, edges)
    }

    fn push_edge(&mut self, a: &str, b: &str) -> Result<usize, GraphError> {
        let i = *self
            .index
            .get(a)
            .ok_or_else(|| GraphError::UnknownVertex(a.to_owned()))?;
        let j = *self
            .index
            .get(b)
            .ok_or_else(|| GraphError::UnknownVertex(b.to_owned()))?;
        if i == j {
            return Err(GraphError::SelfLoop(a.to_owned()));
        }
        if self.edge_ids.contains_key(&(i, j)) {
            return Err(GraphError::DuplicateEdge(a.to_owned(), b.to_owned()));
        }
        let id = self.edges.len();
        self.edges.push((i, j));
        self.edge_ids.insert((i, j), id);
        self.out_adj[i].push(j);
        self.in_adj[j].push(i);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<usize, GraphError> {
        self.vertex_index(name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_owned()))
    }

    /// Edges as index pairs, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_named(&self, id: usize) -> (&str, &str) {
        let (i, j) = self.edges[id];
        (&self.vertices[i], &self.vertices[j])
    }

    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_ids.get(&(i, j)).copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_ids.contains_key(&(i, j))
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    /// Kahn topological order (smallest vertex index first among ready
    /// vertices); `None` when the digraph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topological_order_of(self.vertex_count(), &self.edges)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Vertex indices reachable from `start` through at least one edge.
    fn reachable(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack: Vec<usize> = self.out_adj[start].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.out_adj[v].iter().copied());
            }
        }
        seen
    }

    /// Transitive closure: `(x, y)` is an edge iff a directed path from `x`
    /// to `y` exists, `x != y`. Works for cyclic inputs too.
    pub fn transitive_closure(&self) -> Digraph {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for i in 0..n {
            let seen = self.reachable(i);
            for (j, reachable) in seen.iter().enumerate() {
                if j != i && *reachable {
                    edges.push((self.vertices[i].clone(), self.vertices[j].clone()));
                }
            }
        }
        Digraph::new(self.vertices.clone(), edges).expect("closure edges are valid")
    }

    /// Unique minimal digraph with the same transitive closure. Requires an
    /// acyclic input. Keeps `(x, y)` iff no intermediate `z` has both
    /// `(x, z)` and `(z, y)` in the closure.
    pub fn transitive_reduction(&self) -> Result<Digraph, GraphError> {
        if !self.is_acyclic() {
            return Err(GraphError::CyclicInput);
        }
        let closure = self.transitive_closure();
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for i in 0..n {
            'pair: for &j in closure.out_neighbors(i) {
                for &k in closure.out_neighbors(i) {
                    if k != j && closure.has_edge(k, j) {
                        continue 'pair;
                    }
                }
                edges.push((self.vertices[i].clone(), self.vertices[j].clone()));
            }
        }
        Ok(Digraph::new(self.vertices.clone(), edges).expect("reduction edges are valid"))
    }

    /// Undirected shadow: one canonical `(i, j)` pair (`i < j` in vertex
    /// order) per undirected edge, in first-appearance order.
    pub fn shadow_edges(&self) -> Vec<(usize, usize)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &(i, j) in &self.edges {
            let key = (i.min(j), i.max(j));
            if seen.insert(key) {
                out.push(key);
            }
        }
        out
    }

    /// The digraph with both orientations of every shadow edge.
    pub fn bidirected_shadow(&self) -> Digraph {
        let mut edges = Vec::new();
        for (i, j) in self.shadow_edges() {
            edges.push((self.vertices[i].clone(), self.vertices[j].clone()));
            edges.push((self.vertices[j].clone(), self.vertices[i].clone()));
        }
        Digraph::new(self.vertices.clone(), edges).expect("shadow edges are valid")
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "digraph({} vertices, {} edges)", self.vertex_count(), self.edge_count())
    }
}

fn topological_order_of(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(i, j) in edges {
        indeg[j] += 1;
        out[i].push(j);
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    ready.sort_unstable_by(|a, b| b.cmp(a)); // pop smallest first
    while let Some(v) = ready.pop() {
        order.push(v);
        let mut newly = Vec::new();
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                newly.push(w);
            }
        }
        newly.sort_unstable();
        for w in newly.into_iter().rev() {
            ready.push(w);
        }
        ready.sort_unstable_by(|a, b| b.cmp(a));
    }
    (order.len() == n).then_some(order)
}

/// A directed path `(x_0, ..., x_n)`, `n >= 1`, on some ambient digraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedPath {
    vertices: Vec<String>,
}

impl DirectedPath {
    /// Validates that consecutive pairs are edges of `g`.
    pub fn new<I>(g: &Digraph, vertices: I) -> Result<Self, GraphError>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let p = DirectedPath { vertices };
        if p.vertices.len() < 2 || !p.lies_in(g) {
            return Err(GraphError::NotAPath(p.vertices));
        }
        Ok(p)
    }

    /// No ambient-digraph check; used where the path edges define the graph.
    pub fn from_vertices(vertices: Vec<String>) -> Result<Self, GraphError> {
        if vertices.len() < 2 {
            return Err(GraphError::NotAPath(vertices));
        }
        Ok(DirectedPath { vertices })
    }

    pub fn lies_in(&self, g: &Digraph) -> bool {
        self.vertices.windows(2).all(|w| {
            match (g.vertex_index(&w[0]), g.vertex_index(&w[1])) {
                (Some(i), Some(j)) => g.has_edge(i, j),
                _ => false,
            }
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// `gamma^-`, the starting point.
    pub fn start(&self) -> &str {
        self.vertices.first().unwrap()
    }

    /// `gamma^+`, the final point.
    pub fn end(&self) -> &str {
        self.vertices.last().unwrap()
    }

    /// `|gamma|`, the number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_self_avoiding(&self) -> bool {
        let mut seen = HashSet::new();
        self.vertices.iter().all(|v| seen.insert(v))
    }

    pub fn edges_named(&self) -> impl Iterator<Item = (&str, &str)> {
        self.vertices.windows(2).map(|w| (w[0].as_str(), w[1].as_str()))
    }

    /// `self ⋆ other`; requires `self.end() == other.start()`.
    pub fn concat(&self, other: &DirectedPath) -> DirectedPath {
        assert_eq!(self.end(), other.start(), "concatenation endpoints differ");
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices[1..].iter().cloned());
        DirectedPath { vertices }
    }
}

/// A directed cycle `(x_0, ..., x_{k-1}, x_0)` stored without the repeated
/// closing vertex; edges taken cyclically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedCycle {
    vertices: Vec<String>,
}

impl DirectedCycle {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges_named(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        (0..self.vertices.len()).map(move |i| {
            let j = (i + 1) % self.vertices.len();
            (self.vertices[i].as_str(), self.vertices[j].as_str())
        })
    }
}

/// Spanning tree plus one oriented cycle per non-tree undirected edge.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    /// Tree edges of the undirected shadow, canonical orientation.
    pub spanning_tree: Vec<(String, String)>,
    pub cycles: Vec<DirectedCycle>,
}

/// Deterministic fundamental cycle basis of the undirected shadow of `g`.
///
/// The spanning tree is BFS from the first vertex with shadow edges scanned
/// in input order. Each non-tree edge is oriented by its first directed
/// occurrence in `g`; the cycle is that edge followed by the tree path from
/// its head back to its tail.
pub fn fundamental_cycle_basis(g: &Digraph) -> Result<CycleBasis, GraphError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(CycleBasis { spanning_tree: Vec::new(), cycles: Vec::new() });
    }
    // shadow edges with their stored direction (first directed occurrence)
    let mut shadow: Vec<(usize, usize)> = Vec::new();
    let mut seen = HashSet::new();
    for &(i, j) in g.edges() {
        if seen.insert((i.min(j), i.max(j))) {
            shadow.push((i, j));
        }
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, shadow id)
    for (id, &(i, j)) in shadow.iter().enumerate() {
        adj[i].push((j, id));
        adj[j].push((i, id));
    }

    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (parent vertex, shadow id)
    let mut visited = vec![false; n];
    let mut tree_edge = vec![false; shadow.len()];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, id) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                parent[w] = Some((v, id));
                tree_edge[id] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(u) = (0..n).find(|&v| !visited[v]) {
        return Err(GraphError::Disconnected(g.vertex_name(u).to_owned()));
    }

    let spanning_tree = shadow
        .iter()
        .enumerate()
        .filter(|(id, _)| tree_edge[*id])
        .map(|(_, &(i, j))| (g.vertex_name(i).to_owned(), g.vertex_name(j).to_owned()))
        .collect();

    let ancestors = |mut v: usize| -> Vec<usize> {
        let mut path = vec![v];
        while let Some((p, _)) = parent[v] {
            path.push(p);
            v = p;
        }
        path
    };

    let mut cycles = Vec::new();
    for (id, &(tail, head)) in shadow.iter().enumerate() {
        if tree_edge[id] {
            continue;
        }
        // tree path head -> tail: climb both to their meeting point
        let up_head = ancestors(head);
        let up_tail = ancestors(tail);
        let head_pos: HashMap<usize, usize> =
            up_head.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let (meet_at_tail, meet) = up_tail
            .iter()
            .enumerate()
            .find(|(_, v)| head_pos.contains_key(v))
            .map(|(k, &v)| (k, v))
            .expect("tree is connected");
        let mut vertices = vec![tail, head];
        vertices.extend(up_head[1..=head_pos[&meet]].iter().copied());
        vertices.extend(up_tail[..meet_at_tail].iter().rev().copied());
        vertices.pop(); // closing copy of `tail`
        cycles.push(DirectedCycle {
            vertices: vertices.into_iter().map(|v| g.vertex_name(v).to_owned()).collect(),
        });
    }
    Ok(CycleBasis { spanning_tree, cycles })
}

/// A finite partial order, stored as its full relation matrix. Reflexive
/// pairs are implied on input.
#[derive(Debug, Clone)]
pub struct PartialOrderRelation {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    le: Vec<bool>, // row-major n*n
}

impl PartialOrderRelation {
    /// Validates antisymmetry and transitivity by enumeration; reflexivity is
    /// implied. Vertex order is first appearance in `pairs`.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let pairs: Vec<(String, String)> = pairs.into_iter().collect();
        let mut vertices = Vec::new();
        let mut index = HashMap::new();
        for (a, b) in &pairs {
            for v in [a, b] {
                if !index.contains_key(v) {
                    index.insert(v.clone(), vertices.len());
                    vertices.push(v.clone());
                }
            }
        }
        let n = vertices.len();
        let mut le = vec![false; n * n];
        for v in 0..n {
            le[v * n + v] = true;
        }
        for (a, b) in &pairs {
            le[index[a] * n + index[b]] = true;
        }
        let rel = PartialOrderRelation { vertices, index, le };
        rel.validate()?;
        Ok(rel)
    }

    /// The partial order induced by an acyclic digraph (reachability plus
    /// reflexivity).
    pub fn from_digraph(g: &Digraph) -> Result<Self, GraphError> {
        if !g.is_acyclic() {
            return Err(GraphError::CyclicInput);
        }
        let closure = g.transitive_closure();
        let mut pairs: Vec<(String, String)> = g
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        for &(i, j) in closure.edges() {
            pairs.push((closure.vertex_name(i).to_owned(), closure.vertex_name(j).to_owned()));
        }
        Self::from_pairs(pairs)
    }

    fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertices.len();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.le[a * n + b] && self.le[b * n + a] {
                    return Err(GraphError::NotAPartialOrder {
                        axiom: "antisymmetry",
                        witness: (self.vertices[a].clone(), self.vertices[b].clone()),
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.le[a * n + b] {
                    continue;
                }
                for c in 0..n {
                    if self.le[b * n + c] && !self.le[a * n + c] {
                        return Err(GraphError::NotAPartialOrder {
                            axiom: "transitivity",
                            witness: (self.vertices[a].clone(), self.vertices[c].clone()),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.le[a * self.vertices.len() + b]
    }

    pub fn le(&self, a: &str, b: &str) -> Option<bool> {
        Some(self.le_idx(self.vertex_index(a)?, self.vertex_index(b)?))
    }

    /// The digraph of strict pairs `x < y` (the full strict order, already
    /// transitively closed).
    pub fn strict_digraph(&self) -> Digraph {
        let n = self.vertices.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.le_idx(a, b) {
                    edges.push((self.vertices[a].clone(), self.vertices[b].clone()));
                }
            }
        }
        Digraph::new(self.vertices.clone(), edges).expect("strict pairs are valid edges")
    }
}

/// Hasse digraph of a partial order: the covering pairs, equal to the
/// transitive reduction of the strict-order digraph.
pub fn hasse_digraph(rel: &PartialOrderRelation) -> Digraph {
    rel.strict_digraph()
        .transitive_reduction()
        .expect("strict order of a validated poset is acyclic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(vertices: &[&str], edges: &[(&str, &str)]) -> Digraph {
        Digraph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
        let vs = names(n);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(p) {
                    edges.push((vs[i].clone(), vs[j].clone()));
                }
            }
        }
        Digraph::new(vs, edges).unwrap()
    }

    fn random_dag(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
        let vs = names(n);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((vs[i].clone(), vs[j].clone()));
                }
            }
        }
        Digraph::new(vs, edges).unwrap()
    }

    /// Independent cycle detector: DFS with a recursion stack.
    fn has_cycle_dfs(g: &Digraph) -> bool {
        fn visit(g: &Digraph, v: usize, state: &mut [u8]) -> bool {
            state[v] = 1;
            for &w in g.out_neighbors(v) {
                if state[w] == 1 || (state[w] == 0 && visit(g, w, state)) {
                    return true;
                }
            }
            state[v] = 2;
            false
        }
        let mut state = vec![0u8; g.vertex_count()];
        (0..g.vertex_count()).any(|v| state[v] == 0 && visit(g, v, &mut state))
    }

    /// Independent reachability oracle: boolean Floyd-Warshall.
    fn closure_matrix(g: &Digraph) -> Vec<Vec<bool>> {
        let n = g.vertex_count();
        let mut m = vec![vec![false; n]; n];
        for &(i, j) in g.edges() {
            m[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = m[i][j] || (m[i][k] && m[k][j]);
                }
            }
        }
        m
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(
            Digraph::new(vec!["a", "a"], Vec::<(String, String)>::new()),
            Err(GraphError::DuplicateVertex(_))
        ));
        assert!(matches!(
            Digraph::new(vec!["a"], vec![("a".to_string(), "a".to_string())]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            Digraph::new(
                vec!["a", "b"],
                vec![("a".to_string(), "b".to_string()), ("a".to_string(), "b".to_string())]
            ),
            Err(GraphError::DuplicateEdge(_, _))
        ));
    }

    #[test]
    fn acyclicity_basics() {
        assert!(g(&["a", "b"], &[("a", "b")]).is_acyclic());
        assert!(!g(&["a", "b"], &[("a", "b"), ("b", "a")]).is_acyclic());
    }

    #[test]
    fn acyclicity_matches_dfs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h = random_digraph(&mut rng, 8, 0.2);
            assert_eq!(h.is_acyclic(), !has_cycle_dfs(&h));
        }
    }

    #[test]
    fn closure_basics() {
        let c = g(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).transitive_closure();
        assert!(c.has_edge(0, 2));
        assert_eq!(c.edge_count(), 3);
        let empty = g(&["a", "b"], &[]).transitive_closure();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn closure_matches_floyd_warshall() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let h = random_dag(&mut rng, 7, 0.3);
            let c = h.transitive_closure();
            let m = closure_matrix(&h);
            for i in 0..7 {
                for j in 0..7 {
                    assert_eq!(c.has_edge(i, j), m[i][j]);
                }
            }
        }
    }

    #[test]
    fn reduction_removes_shortcut() {
        let r = g(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")])
            .transitive_reduction()
            .unwrap();
        assert_eq!(r.edge_count(), 2);
        assert!(!r.has_edge(0, 2));
    }

    #[test]
    fn reduction_keeps_trees() {
        let t = g(&["r", "a", "b", "c"], &[("r", "a"), ("r", "b"), ("a", "c")]);
        assert_eq!(t.transitive_reduction().unwrap(), t);
    }

    #[test]
    fn reduction_rejects_cycles() {
        assert!(matches!(
            g(&["a", "b"], &[("a", "b"), ("b", "a")]).transitive_reduction(),
            Err(GraphError::CyclicInput)
        ));
    }

    #[test]
    fn reduction_is_minimal_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let h = random_dag(&mut rng, 7, 0.35);
            let r = h.transitive_reduction().unwrap();
            assert_eq!(
                r.transitive_closure(),
                h.transitive_closure(),
                "closure must be preserved"
            );
            assert_eq!(r.transitive_reduction().unwrap(), r);
            // minimality: dropping any edge changes the closure
            for skip in 0..r.edge_count() {
                let edges: Vec<(String, String)> = r
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(id, _)| *id != skip)
                    .map(|(_, &(i, j))| {
                        (r.vertex_name(i).to_owned(), r.vertex_name(j).to_owned())
                    })
                    .collect();
                let smaller = Digraph::new(r.vertices().to_vec(), edges).unwrap();
                assert_ne!(smaller.transitive_closure(), h.transitive_closure());
            }
        }
    }

    #[test]
    fn poset_validation_produces_witnesses() {
        let two_cycle = PartialOrderRelation::from_pairs(vec![
            ("a".into(), "b".into()),
            ("b".into(), "a".into()),
        ]);
        match two_cycle {
            Err(GraphError::NotAPartialOrder { axiom, .. }) => assert_eq!(axiom, "antisymmetry"),
            other => panic!("expected antisymmetry violation, got {other:?}"),
        }
        let missing_composite = PartialOrderRelation::from_pairs(vec![
            ("a".into(), "b".into()),
            ("b".into(), "c".into()),
        ]);
        match missing_composite {
            Err(GraphError::NotAPartialOrder { axiom, witness }) => {
                assert_eq!(axiom, "transitivity");
                assert_eq!(witness, ("a".into(), "c".into()));
            }
            other => panic!("expected transitivity violation, got {other:?}"),
        }
    }

    #[test]
    fn hasse_of_total_order_is_chain() {
        let rel = PartialOrderRelation::from_pairs(vec![
            ("1".into(), "2".into()),
            ("1".into(), "3".into()),
            ("2".into(), "3".into()),
        ])
        .unwrap();
        let h = hasse_digraph(&rel);
        assert_eq!(h.edge_count(), 2);
        assert!(h.has_edge(0, 1) && h.has_edge(1, 2));
    }

    #[test]
    fn hasse_of_boolean_square_is_diamond() {
        // {0,1}^2 ordered coordinatewise: bottom 00, top 11
        let pairs = [
            ("00", "01"),
            ("00", "10"),
            ("00", "11"),
            ("01", "11"),
            ("10", "11"),
        ];
        let rel = PartialOrderRelation::from_pairs(
            pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap();
        let h = hasse_digraph(&rel);
        assert_eq!(h.edge_count(), 4);
        assert!(!h.has_edge(
            h.vertex_index("00").unwrap(),
            h.vertex_index("11").unwrap()
        ));
    }

    #[test]
    fn hasse_round_trips_through_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..80 {
            let dag = random_dag(&mut rng, 6, 0.4);
            let rel = PartialOrderRelation::from_digraph(&dag).unwrap();
            let h = hasse_digraph(&rel);
            let strict = rel.strict_digraph();
            assert_eq!(h.transitive_closure(), strict.transitive_closure());
            assert_eq!(h.transitive_closure(), strict);
        }
    }

    #[test]
    fn cycle_basis_of_tree_is_empty() {
        let t = g(&["r", "a", "b"], &[("r", "a"), ("r", "b")]);
        let basis = fundamental_cycle_basis(&t).unwrap();
        assert!(basis.cycles.is_empty());
        assert_eq!(basis.spanning_tree.len(), 2);
    }

    #[test]
    fn cycle_basis_of_ring_has_one_cycle() {
        let ring = g(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        );
        let basis = fundamental_cycle_basis(&ring).unwrap();
        assert_eq!(basis.cycles.len(), 1);
        assert_eq!(basis.cycles[0].len(), 4);
    }

    #[test]
    fn cycle_basis_dimension_formula() {
        // complete undirected shadow on 5 vertices: 10 - 5 + 1 = 6 cycles
        let vs = names(5);
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((vs[i].clone(), vs[j].clone()));
            }
        }
        let k5 = Digraph::new(vs, edges).unwrap();
        let basis = fundamental_cycle_basis(&k5).unwrap();
        assert_eq!(basis.spanning_tree.len(), 4);
        assert_eq!(basis.cycles.len(), 6);
        let tree: HashSet<(String, String)> = basis
            .spanning_tree
            .iter()
            .map(|(a, b)| (a.clone().min(b.clone()), a.clone().max(b.clone())))
            .collect();
        for c in &basis.cycles {
            assert!(c.len() >= 3);
            // each cycle is vertex-simple and uses exactly one non-tree edge
            let mut seen = HashSet::new();
            assert!(c.vertices().iter().all(|v| seen.insert(v.clone())));
            let non_tree = c
                .edges_named()
                .filter(|(a, b)| {
                    let key = (
                        a.to_string().min(b.to_string()),
                        a.to_string().max(b.to_string()),
                    );
                    !tree.contains(&key)
                })
                .count();
            assert_eq!(non_tree, 1);
        }
    }

    #[test]
    fn cycle_basis_rejects_disconnected() {
        let h = g(&["a", "b", "c"], &[("a", "b")]);
        assert!(matches!(
            fundamental_cycle_basis(&h),
            Err(GraphError::Disconnected(_))
        ));
    }

    #[test]
    fn paths_validate_against_ambient_digraph() {
        let h = g(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let p = DirectedPath::new(&h, ["a", "b", "c"]).unwrap();
        assert_eq!(p.start(), "a");
        assert_eq!(p.end(), "c");
        assert_eq!(p.len(), 2);
        assert!(p.is_self_avoiding());
        assert!(DirectedPath::new(&h, ["a", "c"]).is_err());
        assert!(DirectedPath::new(&h, ["a"]).is_err());
    }
}
