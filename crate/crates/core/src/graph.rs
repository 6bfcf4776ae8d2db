//! Finite simple graphs and the structural operations the norming checks
//! rely on: components, isomorphism, subgraph enumeration and embedding.
//!
//! Graphs here are small (a handful of components with at most a dozen or so
//! vertices each), so every algorithm favours being easy to audit over speed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite simple graph on vertices `0..vertex_count`.
///
/// Edges are stored normalised (`u < v`) and sorted, which fixes the edge
/// order used by decorations and by subgraph enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        Graph::new(repr.vertices, repr.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            vertices: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and endpoints
    /// outside `0..n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {u}-{v} has an endpoint outside 0..{n}"
                )));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v}")));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        Self::from_sorted(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    /// The star `K_{1,t}` with centre 0.
    pub fn star(t: usize) -> Self {
        Self::from_sorted(t + 1, (1..=t).map(|i| (0, i)).collect())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_sorted(n, edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Self::new(a + b, edges).expect("complete bipartite graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Index of the edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.adj[v].is_empty()).collect()
    }

    pub fn has_isolated_vertices(&self) -> bool {
        self.adj.iter().any(Vec::is_empty)
    }

    /// Connected in the usual sense; the empty graph is not connected.
    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Vertex-disjoint union; the vertices of `other` are shifted by
    /// `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted(self.n + other.n, edges)
    }

    /// `k` vertex-disjoint copies of `self`.
    pub fn copies(&self, k: usize) -> Graph {
        (1..k).fold(
            if k == 0 { Graph::empty(0) } else { self.clone() },
            |acc, _| acc.disjoint_union(self),
        )
    }

    /// Applies a vertex relabelling: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::Precondition(format!(
                "relabelling has {} entries for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// The subgraph induced by `vertices`, relabelled `0..vertices.len()` in
    /// the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph is simple")
    }

    /// Parses the edge-list text format: one `u v` pair per line, with an
    /// optional `vertices N` line declaring extra isolated vertices. Blank
    /// lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut declared = 0usize;
        let mut max_index = None::<usize>;
        let mut edges = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens[0] == "vertices" {
                if tokens.len() != 2 {
                    return Err(err(format!("expected `vertices N`, found `{line}`")));
                }
                declared = tokens[1]
                    .parse()
                    .map_err(|_| err(format!("invalid vertex count `{}`", tokens[1])))?;
                continue;
            }
            if tokens.len() != 2 {
                return Err(err(format!("expected `u v`, found `{line}`")));
            }
            let mut ends = [0usize; 2];
            for (slot, tok) in ends.iter_mut().zip(&tokens) {
                let value: i64 = tok
                    .parse()
                    .map_err(|_| err(format!("invalid vertex index `{tok}`")))?;
                if value < 0 {
                    return Err(err(format!("negative vertex index {value}")));
                }
                *slot = value as usize;
            }
            let [u, v] = ends;
            if u == v {
                return Err(err(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(err(format!("duplicate edge {u} {v}")));
            }
            max_index = Some(max_index.map_or(u.max(v), |m| m.max(u).max(v)));
            edges.push((u, v));
        }
        let n = declared.max(max_index.map_or(0, |m| m + 1));
        Graph::new(n, edges)
    }

    /// Renders the graph in the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Connected components ordered by their smallest vertex.
    pub fn components(&self) -> Vec<Component> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut vertices = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        vertices.push(w);
                        queue.push_back(w);
                    }
                }
            }
            vertices.sort_unstable();
            out.push(Component {
                graph: self.induced_subgraph(&vertices),
                vertices,
            });
        }
        out
    }

    /// Drops isolated vertices and relabels the rest in increasing order.
    pub fn remove_isolated_vertices(&self) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&v| !self.adj[v].is_empty()).collect();
        self.induced_subgraph(&keep)
    }

    /// Exact average degree `2 e / v`.
    pub fn average_degree(&self) -> Result<Ratio<u64>> {
        if self.n == 0 {
            return Err(Error::Precondition(
                "average degree of the empty graph is undefined".into(),
            ));
        }
        Ok(Ratio::new(2 * self.edges.len() as u64, self.n as u64))
    }

    /// Exact edge-to-vertex ratio `e / v`.
    pub fn edge_density_ratio(&self) -> Result<Ratio<u64>> {
        self.average_degree().map(|d| d / 2)
    }

    /// Every subgraph spanned by a nonempty edge subset with at most
    /// `max_vertices` endpoints.
    ///
    /// Subsets are visited in binary counting order with edge 0 (in
    /// [`Graph::edges`] order) as the least significant bit, so every subset
    /// appears exactly once and the order is deterministic.
    pub fn enumerate_subgraphs(&self, max_vertices: usize) -> Subgraphs<'_> {
        Subgraphs {
            graph: self,
            mask: vec![false; self.edges.len()],
            max_vertices,
            done: self.edges.is_empty(),
        }
    }

    /// `true` iff the graph is `K_{1,t}` for some `t >= 1`.
    pub fn is_star(&self) -> Result<bool> {
        self.require_connected_without_isolated("is_star")?;
        Ok(self.edges.len() + 1 == self.n && (0..self.n).any(|v| self.degree(v) + 1 == self.n))
    }

    /// `true` iff every degree is even (connectivity is a precondition).
    pub fn is_eulerian(&self) -> Result<bool> {
        self.require_connected_without_isolated("is_eulerian")?;
        Ok((0..self.n).all(|v| self.degree(v).is_multiple_of(2)))
    }

    fn require_connected_without_isolated(&self, op: &str) -> Result<()> {
        if !self.is_connected() || self.has_isolated_vertices() {
            return Err(Error::Precondition(format!(
                "{op} needs a connected graph without isolated vertices; \
                 apply it to each component of `components()` instead"
            )));
        }
        Ok(())
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Graph::parse_edge_list(s)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={}", self.n)?;
        for &(u, v) in &self.edges {
            write!(f, " {u}-{v}")?;
        }
        Ok(())
    }
}

/// A connected component together with its original vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// The component relabelled `0..k` following `vertices`.
    pub graph: Graph,
    /// Original labels, increasing.
    pub vertices: Vec<usize>,
}

impl Component {
    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }
}

/// A subgraph produced by [`Graph::enumerate_subgraphs`], in the labels of
/// the host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    /// The subgraph as a standalone graph, vertices relabelled in increasing
    /// order of their host labels.
    pub fn graph(&self) -> Graph {
        let index: BTreeMap<usize, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Graph::new(
            self.vertices.len(),
            self.edges.iter().map(|&(u, v)| (index[&u], index[&v])),
        )
        .expect("subgraph of a simple graph is simple")
    }
}

pub struct Subgraphs<'a> {
    graph: &'a Graph,
    mask: Vec<bool>,
    max_vertices: usize,
    done: bool,
}

impl Iterator for Subgraphs<'_> {
    type Item = Subgraph;

    fn next(&mut self) -> Option<Subgraph> {
        while !self.done {
            // binary increment
            let mut carry = true;
            for bit in self.mask.iter_mut() {
                if *bit {
                    *bit = false;
                } else {
                    *bit = true;
                    carry = false;
                    break;
                }
            }
            if carry {
                self.done = true;
                return None;
            }
            let edges: Vec<(usize, usize)> = self
                .graph
                .edges
                .iter()
                .zip(&self.mask)
                .filter(|(_, &b)| b)
                .map(|(&e, _)| e)
                .collect();
            let vertices: BTreeSet<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            if vertices.len() <= self.max_vertices {
                return Some(Subgraph {
                    vertices: vertices.into_iter().collect(),
                    edges,
                });
            }
        }
        None
    }
}

/// Colour refinement run on both graphs with a shared palette, so colours are
/// comparable across them.
fn refine_pair(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut c1: Vec<usize> = (0..g1.n).map(|v| g1.degree(v)).collect();
    let mut c2: Vec<usize> = (0..g2.n).map(|v| g2.degree(v)).collect();
    let mut classes = usize::MAX;
    loop {
        let signature = |g: &Graph, c: &[usize], v: usize| {
            let mut around: Vec<usize> = g.adj[v].iter().map(|&w| c[w]).collect();
            around.sort_unstable();
            (c[v], around)
        };
        let s1: Vec<_> = (0..g1.n).map(|v| signature(g1, &c1, v)).collect();
        let s2: Vec<_> = (0..g2.n).map(|v| signature(g2, &c2, v)).collect();
        let palette: BTreeMap<_, usize> = s1
            .iter()
            .chain(&s2)
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        c1 = s1.iter().map(|s| palette[s]).collect();
        c2 = s2.iter().map(|s| palette[s]).collect();
        if palette.len() == classes {
            return (c1, c2);
        }
        classes = palette.len();
    }
}

/// Tests `g1 ≅ g2`. On success returns a bijection `map` with
/// `{u, v} ∈ E(g1) ⇔ {map[u], map[v]} ∈ E(g2)`.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    if g1.n != g2.n || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let (c1, c2) = refine_pair(g1, g2);
    let histogram = |c: &[usize]| {
        let mut h = BTreeMap::new();
        for &x in c {
            *h.entry(x).or_insert(0usize) += 1;
        }
        h
    };
    let h1 = histogram(&c1);
    if h1 != histogram(&c2) {
        return None;
    }
    // rarest colour classes first, then keep the order connected
    let mut order: Vec<usize> = Vec::with_capacity(g1.n);
    let mut placed = vec![false; g1.n];
    while order.len() < g1.n {
        let seed = (0..g1.n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (h1[&c1[v]], v))
            .expect("unplaced vertex exists");
        placed[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = g1.adj[u].iter().copied().filter(|&w| !placed[w]).collect();
            next.sort_by_key(|&w| (h1[&c1[w]], w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    let mut map = vec![usize::MAX; g1.n];
    let mut used = vec![false; g2.n];
    let consistent = |map: &[usize], v: usize, w: usize, depth: usize, order: &[usize]| {
        order[..depth]
            .iter()
            .all(|&u| g1.has_edge(u, v) == g2.has_edge(map[u], w))
    };
    fn search(
        depth: usize,
        order: &[usize],
        c1: &[usize],
        c2: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        ok: &dyn Fn(&[usize], usize, usize, usize, &[usize]) -> bool,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for w in 0..c2.len() {
            if used[w] || c2[w] != c1[v] || !ok(map, v, w, depth, order) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if search(depth + 1, order, c1, c2, map, used, ok) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    search(0, &order, &c1, &c2, &mut map, &mut used, &consistent).then_some(map)
}

/// Finds an injective map `φ: V(pattern) → V(host)` sending edges to edges,
/// i.e. a witness that `pattern` is (isomorphic to) a subgraph of `host`.
pub fn find_subgraph_embedding(pattern: &Graph, host: &Graph) -> Option<Vec<usize>> {
    if pattern.n > host.n || pattern.edges.len() > host.edges.len() {
        return None;
    }
    // high-degree vertices first, BFS to keep assigned vertices adjacent
    let mut order = Vec::with_capacity(pattern.n);
    let mut placed = vec![false; pattern.n];
    while order.len() < pattern.n {
        let seed = (0..pattern.n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex exists");
        placed[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &pattern.adj[u] {
                if !placed[w] {
                    placed[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    fn search(
        depth: usize,
        order: &[usize],
        pattern: &Graph,
        host: &Graph,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for w in 0..host.n {
            if used[w] || host.degree(w) < pattern.degree(v) {
                continue;
            }
            let fits = pattern.adj[v]
                .iter()
                .all(|&u| map[u] == usize::MAX || host.has_edge(map[u], w));
            if !fits {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if search(depth + 1, order, pattern, host, map, used) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    let mut map = vec![usize::MAX; pattern.n];
    let mut used = vec![false; host.n];
    search(0, &order, pattern, host, &mut map, &mut used).then_some(map)
}
