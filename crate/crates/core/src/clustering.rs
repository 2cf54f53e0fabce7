use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Assignment of every vertex to one of `count` nonempty clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<usize>,
    count: usize,
}

impl Clustering {
    /// Validates that ids are dense: every id in `0..max+1` is used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let count = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut used = vec![false; count];
        for &c in &assignment {
            used[c] = true;
        }
        if let Some(empty) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidClustering(format!("cluster id {empty} is empty")));
        }
        Ok(Clustering { assignment, count })
    }

    /// Builds from explicit blocks; they must partition `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<Vertex>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (id, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidClustering(format!("block {id} is empty")));
            }
            for &v in block {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if assignment[v] != usize::MAX {
                    return Err(Error::InvalidClustering(format!("vertex {v} assigned twice")));
                }
                assignment[v] = id;
            }
        }
        if let Some(v) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidClustering(format!("vertex {v} unassigned")));
        }
        Ok(Clustering {
            assignment,
            count: blocks.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.count
    }

    pub fn cluster_of(&self, v: Vertex) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each cluster, in cluster-id order, each sorted.
    pub fn blocks(&self) -> Vec<Vec<Vertex>> {
        let mut blocks = vec![Vec::new(); self.count];
        for (v, &c) in self.assignment.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    /// The cluster graph whose components are exactly the clusters.
    pub fn to_cluster_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for block in self.blocks() {
            for (i, &u) in block.iter().enumerate() {
                edges.extend(block[i + 1..].iter().map(|&v| (u, v)));
            }
        }
        Graph::from_edges(self.vertex_count(), edges).expect("blocks partition the vertex set")
    }
}

/// A set of unordered vertex pairs, stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EditSet {
    pairs: BTreeSet<(Vertex, Vertex)>,
}

impl EditSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut set = EditSet::new();
        for (u, v) in pairs {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !set.pairs.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.pairs.contains(&(u.min(v), u.max(v)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.pairs.iter().copied()
    }

    /// Returns a copy without the given pair.
    pub fn without(&self, u: Vertex, v: Vertex) -> EditSet {
        let mut pairs = self.pairs.clone();
        pairs.remove(&(u.min(v), u.max(v)));
        EditSet { pairs }
    }

    /// Pairs of `self` that are non-edges of `g`.
    pub fn additions(&self, g: &Graph) -> Vec<(Vertex, Vertex)> {
        self.iter().filter(|&(u, v)| !g.has_edge(u, v)).collect()
    }

    /// Pairs of `self` that are edges of `g`.
    pub fn deletions(&self, g: &Graph) -> Vec<(Vertex, Vertex)> {
        self.iter().filter(|&(u, v)| g.has_edge(u, v)).collect()
    }
}

/// `G △ F`.
pub fn apply_edits(g: &Graph, f: &EditSet) -> Graph {
    let mut edges: BTreeSet<(Vertex, Vertex)> = g.edges().collect();
    for pair in f.iter() {
        if !edges.remove(&pair) {
            edges.insert(pair);
        }
    }
    Graph::from_edges(g.vertex_count(), edges).expect("symmetric difference of simple graphs is simple")
}

/// Edges of `g` crossing clusters plus non-edges of `g` inside clusters.
pub fn clustering_to_edit_set(g: &Graph, cl: &Clustering) -> EditSet {
    assert_eq!(g.vertex_count(), cl.vertex_count(), "clustering must cover the graph");
    let mut pairs = BTreeSet::new();
    for (u, v) in g.edges() {
        if cl.cluster_of(u) != cl.cluster_of(v) {
            pairs.insert((u, v));
        }
    }
    for block in cl.blocks() {
        for (i, &u) in block.iter().enumerate() {
            for &v in &block[i + 1..] {
                if !g.has_edge(u, v) {
                    pairs.insert((u, v));
                }
            }
        }
    }
    EditSet { pairs }
}

/// `|clustering_to_edit_set(g, cl)|` without materializing the pairs.
pub fn clustering_cost(g: &Graph, cl: &Clustering) -> usize {
    let mut sizes = vec![0usize; cl.cluster_count()];
    for v in g.vertices() {
        sizes[cl.cluster_of(v)] += 1;
    }
    let inside = g.edges().filter(|&(u, v)| cl.cluster_of(u) == cl.cluster_of(v)).count();
    let pairs_inside: usize = sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum();
    g.edge_count() - inside + (pairs_inside - inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edit_distance;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    fn pairs(f: &EditSet) -> Vec<(Vertex, Vertex)> {
        f.iter().collect()
    }

    #[test]
    fn clustering_validation() {
        assert!(Clustering::new(vec![0, 2]).is_err());
        assert!(Clustering::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Clustering::from_blocks(2, &[vec![0, 1], vec![1]]).is_err());
        let cl = Clustering::from_blocks(3, &[vec![2], vec![0, 1]]).unwrap();
        assert_eq!(cl.assignment(), &[1, 1, 0]);
        assert_eq!(cl.cluster_count(), 2);
    }

    #[test]
    fn edit_set_examples() {
        let p = path3();
        let cl = Clustering::from_blocks(3, &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(pairs(&clustering_to_edit_set(&p, &cl)), vec![(1, 2)]);
        let cl = Clustering::from_blocks(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(pairs(&clustering_to_edit_set(&p, &cl)), vec![(0, 2)]);
        let cl = Clustering::new(vec![0, 1, 2]).unwrap();
        assert_eq!(
            pairs(&clustering_to_edit_set(&triangle(), &cl)),
            vec![(0, 1), (0, 2), (1, 2)]
        );
    }

    #[test]
    fn apply_edits_examples() {
        let p = path3();
        assert_eq!(apply_edits(&p, &EditSet::new()), p);
        let f = EditSet::from_pairs([(0, 2)]).unwrap();
        assert_eq!(apply_edits(&p, &f), triangle());
        assert_eq!(apply_edits(&apply_edits(&p, &f), &f), p);
    }

    #[test]
    fn edit_set_rejects_repeats() {
        assert!(EditSet::from_pairs([(0, 1), (1, 0)]).is_err());
        assert!(EditSet::from_pairs([(2, 2)]).is_err());
    }

    fn graph_and_clustering() -> impl Strategy<Value = (Graph, Clustering)> {
        (1usize..9).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                proptest::collection::vec(any::<bool>(), pairs),
                proptest::collection::vec(0..n, n),
            )
                .prop_map(move |(bits, raw)| {
                    let mut edges = Vec::new();
                    let mut i = 0;
                    for u in 0..n {
                        for v in u + 1..n {
                            if bits[i] {
                                edges.push((u, v));
                            }
                            i += 1;
                        }
                    }
                    // Relabel raw ids densely in order of first appearance.
                    let mut map = std::collections::HashMap::new();
                    let assignment = raw
                        .iter()
                        .map(|c| {
                            let next = map.len();
                            *map.entry(*c).or_insert(next)
                        })
                        .collect();
                    (
                        Graph::from_edges(n, edges).unwrap(),
                        Clustering::new(assignment).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn edit_set_realizes_clustering((g, cl) in graph_and_clustering()) {
            let f = clustering_to_edit_set(&g, &cl);
            let h = apply_edits(&g, &f);
            prop_assert!(h.is_cluster_graph());
            prop_assert_eq!(h.connected_components().len(), cl.cluster_count());
            prop_assert_eq!(edit_distance(&g, &h).unwrap(), f.len());
            prop_assert_eq!(clustering_cost(&g, &cl), f.len());
            prop_assert_eq!(&h, &cl.to_cluster_graph());
        }
    }
}
