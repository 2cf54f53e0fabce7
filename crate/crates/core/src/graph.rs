//! Simple undirected graphs on dense vertex ids.
//!
//! Adjacency is kept as sorted neighbour lists. For graphs with at most
//! [`DEFAULT_BIT_ROW_THRESHOLD`] vertices each vertex additionally gets a
//! bit row, which turns neighbourhood/subset counting into popcounts.

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub type Vertex = usize;

pub const DEFAULT_BIT_ROW_THRESHOLD: usize = 512;

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
    rows: Option<Vec<VertexSet>>,
    edge_count: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

#[inline]
fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self::build(n, vec![Vec::new(); n], DEFAULT_BIT_ROW_THRESHOLD)
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        Self::from_edges_with_threshold(n, edges, DEFAULT_BIT_ROW_THRESHOLD)
    }

    pub fn from_edges_with_threshold(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
        bit_row_threshold: usize,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = ordered(u, w[0]);
                return Err(Error::DuplicateEdge(a, b));
            }
        }
        Ok(Self::build(n, adj, bit_row_threshold))
    }

    /// Like [`Graph::from_edges`] but silently drops repeated pairs.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut pairs: Vec<(Vertex, Vertex)> = edges.into_iter().map(|(u, v)| ordered(u, v)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_edges(n, pairs)
    }

    fn build(n: usize, adj: Vec<Vec<Vertex>>, bit_row_threshold: usize) -> Self {
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let rows = (n <= bit_row_threshold).then(|| {
            adj.iter()
                .map(|list| VertexSet::from_vertices(n, list.iter().copied()))
                .collect()
        });
        Graph {
            n,
            adj,
            rows,
            edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_bit_rows(&self) -> bool {
        self.rows.is_some()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        match &self.rows {
            Some(rows) => rows[u].contains(v),
            None => self.adj[u].binary_search(&v).is_ok(),
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// `|N(v) ∩ set|`.
    pub fn neighbors_in(&self, v: Vertex, set: &VertexSet) -> usize {
        match &self.rows {
            Some(rows) => rows[v].intersection_count(set),
            None => self.adj[v].iter().filter(|&&u| set.contains(u)).count(),
        }
    }

    /// Number of edges with both endpoints in `set`.
    pub fn edges_within(&self, set: &VertexSet) -> usize {
        set.iter().map(|v| self.neighbors_in(v, set)).sum::<usize>() / 2
    }

    /// `|E(a, b)|` for disjoint `a`, `b`.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        a.iter().map(|v| self.neighbors_in(v, b)).sum()
    }

    /// Number of edges with exactly one endpoint in `side`.
    pub fn crossing_edges(&self, side: &VertexSet) -> usize {
        let other = side.complement();
        self.edges_between(side, &other)
    }

    /// Subgraph induced by `keep`, relabelled so that `keep[i]` becomes `i`.
    pub fn induced(&self, keep: &[Vertex]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut list: Vec<Vertex> = self.adj[v]
                    .iter()
                    .filter_map(|&u| (index[u] != usize::MAX).then_some(index[u]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Self::build(keep.len(), adj, DEFAULT_BIT_ROW_THRESHOLD)
    }

    pub fn is_clique(&self, vertices: &[Vertex]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// True iff every connected component is a clique.
    pub fn is_cluster_graph(&self) -> bool {
        // A component of size s is a clique iff every member has degree s-1.
        self.connected_components()
            .iter()
            .all(|comp| comp.iter().all(|&v| self.adj[v].len() + 1 == comp.len()))
    }

    /// Maximal closed-neighbourhood twin classes (critical cliques),
    /// each sorted, ordered by smallest member.
    pub fn twin_classes(&self) -> Vec<Vec<Vertex>> {
        let closed: Vec<Vec<Vertex>> = (0..self.n)
            .map(|v| {
                let mut c = self.adj[v].clone();
                let pos = c.binary_search(&v).unwrap_err();
                c.insert(pos, v);
                c
            })
            .collect();
        let mut class_of: std::collections::HashMap<&[Vertex], usize> = std::collections::HashMap::new();
        let mut classes: Vec<Vec<Vertex>> = Vec::new();
        for (v, nbhd) in closed.iter().enumerate() {
            let id = *class_of.entry(nbhd).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[id].push(v);
        }
        classes
    }

    pub fn complement_edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2 - self.edge_count
    }
}

/// `|E(g) △ E(h)|` for graphs on the same vertex set.
pub fn edit_distance(g: &Graph, h: &Graph) -> Result<usize> {
    if g.n != h.n {
        return Err(Error::VertexCountMismatch(g.n, h.n));
    }
    let mut distance = 0;
    for v in 0..g.n {
        let (a, b) = (&g.adj[v], &h.adj[v]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    distance += usize::from(v < *x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    distance += usize::from(v < *y);
                    j += 1;
                }
                (Some(x), None) => {
                    distance += usize::from(v < *x);
                    i += 1;
                }
                (None, Some(y)) => {
                    distance += usize::from(v < *y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }
    Ok(distance)
}
