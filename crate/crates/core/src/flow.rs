//! Unit-capacity edge-disjoint path counting between two vertex sets.

use std::collections::VecDeque;

use crate::graph::{Graph, Vertex};
use crate::vertex_set::VertexSet;

/// Reusable buffers for repeated min-cut queries on one graph.
pub struct MinCutChecker<'g> {
    graph: &'g Graph,
    /// Offsets of each vertex's adjacency in `flow` (CSR layout).
    offsets: Vec<usize>,
    /// Index of the reverse arc for each arc.
    reverse: Vec<usize>,
    /// Net flow on each arc, in {-1, 0, 1}.
    flow: Vec<i8>,
    parent_arc: Vec<usize>,
    visited: Vec<u32>,
    epoch: u32,
    queue: VecDeque<Vertex>,
    pub calls: u64,
}

impl<'g> MinCutChecker<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let n = graph.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            offsets.push(offsets[v] + graph.degree(v));
        }
        let arcs = offsets[n];
        let mut reverse = vec![0; arcs];
        for u in 0..n {
            for (i, &v) in graph.neighbors(u).iter().enumerate() {
                let j = graph.neighbors(v).binary_search(&u).expect("symmetric adjacency");
                reverse[offsets[u] + i] = offsets[v] + j;
            }
        }
        MinCutChecker {
            graph,
            offsets,
            reverse,
            flow: vec![0; arcs],
            parent_arc: vec![usize::MAX; n],
            visited: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
            calls: 0,
        }
    }

    /// True iff the minimum number of edges separating `a` from `b` is at
    /// most `k`. Stops after finding `k + 1` edge-disjoint paths.
    pub fn min_cut_leq(&mut self, a: &VertexSet, b: &VertexSet, k: usize) -> bool {
        self.calls += 1;
        if a.is_empty() || b.is_empty() {
            return true;
        }
        debug_assert!(a.is_disjoint(b));
        self.flow.iter_mut().for_each(|f| *f = 0);
        let mut paths = 0;
        while paths <= k {
            if !self.augment(a, b) {
                return true;
            }
            paths += 1;
        }
        false
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.visited.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// One BFS in the residual graph from all of `a`; pushes a unit of flow
    /// along the path if some vertex of `b` is reached.
    fn augment(&mut self, a: &VertexSet, b: &VertexSet) -> bool {
        let epoch = self.next_epoch();
        self.queue.clear();
        for s in a.iter() {
            self.visited[s] = epoch;
            self.parent_arc[s] = usize::MAX;
            self.queue.push_back(s);
        }
        while let Some(u) = self.queue.pop_front() {
            for arc in self.offsets[u]..self.offsets[u + 1] {
                if self.flow[arc] >= 1 {
                    continue;
                }
                let v = self.graph.neighbors(u)[arc - self.offsets[u]];
                if self.visited[v] == epoch {
                    continue;
                }
                self.visited[v] = epoch;
                self.parent_arc[v] = arc;
                if b.contains(v) {
                    self.push_path(v);
                    return true;
                }
                self.queue.push_back(v);
            }
        }
        false
    }

    fn push_path(&mut self, mut v: Vertex) {
        while self.parent_arc[v] != usize::MAX {
            let arc = self.parent_arc[v];
            self.flow[arc] += 1;
            self.flow[self.reverse[arc]] -= 1;
            // Tail of `arc`: the vertex whose range contains it.
            v = self.offsets.partition_point(|&o| o <= arc) - 1;
        }
    }
}

/// One-shot form of [`MinCutChecker::min_cut_leq`].
pub fn min_cut_leq(g: &Graph, a: &VertexSet, b: &VertexSet, k: usize) -> bool {
    MinCutChecker::new(g).min_cut_leq(a, b, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    /// Smallest number of edges whose removal disconnects `a` from `b`,
    /// by trying every edge subset.
    fn brute_min_cut(g: &Graph, a: &[usize], b: &[usize]) -> usize {
        let edges: Vec<_> = g.edges().collect();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << edges.len()) {
            let kept: Vec<_> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, &e)| e)
                .collect();
            let h = Graph::from_edges(g.vertex_count(), kept).unwrap();
            let separated = h
                .connected_components()
                .iter()
                .all(|c| !(c.iter().any(|v| a.contains(v)) && c.iter().any(|v| b.contains(v))));
            if separated {
                best = best.min(mask.count_ones() as usize);
            }
        }
        best
    }

    #[test]
    fn triangle_examples() {
        let g = triangle();
        let a = VertexSet::from_vertices(3, [0]);
        let b = VertexSet::from_vertices(3, [1]);
        assert_eq!(brute_min_cut(&g, &[0], &[1]), 2);
        assert!(!min_cut_leq(&g, &a, &b, 1));
        assert!(min_cut_leq(&g, &a, &b, 2));
        for k in 0..3 {
            assert!(min_cut_leq(&g, &VertexSet::empty(3), &b, k));
        }
    }

    proptest! {
        #[test]
        fn agrees_with_edge_subset_enumeration(
            n in 2usize..7,
            bits in proptest::collection::vec(any::<bool>(), 15),
            sides in proptest::collection::vec(0u8..3, 7),
            k in 0usize..5,
        ) {
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .zip(&bits)
                .filter(|(_, &b)| b)
                .map(|(e, _)| e)
                .take(12)
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let a: Vec<_> = (0..n).filter(|&v| sides[v] == 1).collect();
            let b: Vec<_> = (0..n).filter(|&v| sides[v] == 2).collect();
            let expected = a.is_empty() || b.is_empty() || brute_min_cut(&g, &a, &b) <= k;
            let got = min_cut_leq(
                &g,
                &VertexSet::from_vertices(n, a.iter().copied()),
                &VertexSet::from_vertices(n, b.iter().copied()),
                k,
            );
            prop_assert_eq!(got, expected);
        }
    }
}
