//! Brute-force ground truth over all set partitions.
//!
//! Partitions are enumerated as restricted growth strings: `a[0] = 0` and
//! `a[i] <= 1 + max(a[0..i])`. Block-count restrictions prune during
//! generation, so exact-`p` enumeration only visits partitions with exactly
//! `p` blocks.

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::preprocess::Mode;

pub const ORACLE_VERTEX_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockFilter {
    Any,
    Exactly(usize),
    AtMost(usize),
}

impl BlockFilter {
    fn max_blocks(self, n: usize) -> usize {
        match self {
            BlockFilter::Any => n,
            BlockFilter::Exactly(p) | BlockFilter::AtMost(p) => p.min(n),
        }
    }

    fn min_blocks(self) -> usize {
        match self {
            BlockFilter::Exactly(p) => p,
            _ => 0,
        }
    }
}

/// Enumerates every set partition of `0..n` exactly once, in
/// lexicographic order of restricted growth strings.
#[derive(Clone, Debug)]
pub struct PartitionIterator {
    n: usize,
    filter: BlockFilter,
    rgs: Vec<usize>,
    /// `blocks[i]` = number of blocks used by `rgs[0..=i]`.
    blocks: Vec<usize>,
    state: IterState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl PartitionIterator {
    pub fn new(n: usize, filter: BlockFilter) -> Self {
        PartitionIterator {
            n,
            filter,
            rgs: vec![0; n],
            blocks: vec![0; n],
            state: IterState::Fresh,
        }
    }

    /// Fills `rgs[from..]` with the lexicographically smallest suffix that
    /// still reaches the minimum block count. Returns false if impossible.
    fn fill_suffix(&mut self, from: usize) -> bool {
        let mut used = if from == 0 { 0 } else { self.blocks[from - 1] };
        let remaining = self.n - from;
        let need = self.filter.min_blocks().saturating_sub(used);
        if need > remaining || used > self.filter.max_blocks(self.n) {
            return false;
        }
        for i in from..self.n {
            let left_after = self.n - i - 1;
            let still_needed = self.filter.min_blocks().saturating_sub(used);
            // Open a new block only when the rest can no longer reach the minimum,
            // or unconditionally for the first element.
            if i == 0 || still_needed > left_after {
                self.rgs[i] = used;
                used += 1;
            } else {
                self.rgs[i] = 0;
            }
            self.blocks[i] = used;
        }
        true
    }

    /// Advances to the next partition; returns false when exhausted.
    pub fn advance(&mut self) -> bool {
        match self.state {
            IterState::Done => return false,
            IterState::Fresh => {
                self.state = IterState::Running;
                if self.n == 0 {
                    self.state = IterState::Done;
                    // The empty set has exactly one partition (with zero blocks).
                    return self.filter.min_blocks() == 0;
                }
                if self.fill_suffix(0) && self.filter.max_blocks(self.n) >= 1 {
                    return true;
                }
                self.state = IterState::Done;
                return false;
            }
            IterState::Running => {}
        }
        let max_blocks = self.filter.max_blocks(self.n);
        for i in (1..self.n).rev() {
            let prefix_blocks = self.blocks[i - 1];
            let mut candidate = self.rgs[i] + 1;
            while candidate <= prefix_blocks {
                let used = prefix_blocks.max(candidate + 1);
                let left = self.n - i - 1;
                if used <= max_blocks && used + left >= self.filter.min_blocks() {
                    self.rgs[i] = candidate;
                    self.blocks[i] = used;
                    if self.fill_suffix(i + 1) {
                        return true;
                    }
                }
                candidate += 1;
            }
        }
        self.state = IterState::Done;
        false
    }

    /// The current restricted growth string (valid after `advance` returned true).
    pub fn current(&self) -> &[usize] {
        &self.rgs
    }

    pub fn current_block_count(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.blocks[self.n - 1]
        }
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.rgs.clone())
    }
}

fn filter_for(p: usize, mode: Mode) -> BlockFilter {
    match mode {
        Mode::ExactP => BlockFilter::Exactly(p),
        Mode::AtMostP => BlockFilter::AtMost(p),
    }
}

/// Edit cost of the cluster graph given by a restricted growth string.
fn partition_cost(g: &Graph, edges: &[(usize, usize)], rgs: &[usize], blocks: usize, sizes: &mut Vec<usize>) -> usize {
    sizes.clear();
    sizes.resize(blocks, 0);
    for &b in rgs {
        sizes[b] += 1;
    }
    let inside = edges.iter().filter(|&&(u, v)| rgs[u] == rgs[v]).count();
    let pairs_inside: usize = sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum();
    g.edge_count() - inside + pairs_inside - inside
}

/// Minimum-cost clustering with exactly / at most `p` blocks, with its cost.
/// `None` iff no clustering qualifies. Ties go to the lexicographically
/// first restricted growth string.
pub fn oracle_solve(g: &Graph, p: usize, mode: Mode) -> Result<Option<(usize, Clustering)>> {
    let n = g.vertex_count();
    if n > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_VERTEX_LIMIT,
        });
    }
    let edges: Vec<_> = g.edges().collect();
    let mut iter = PartitionIterator::new(n, filter_for(p, mode));
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut sizes = Vec::new();
    while iter.advance() {
        let cost = partition_cost(g, &edges, iter.current(), iter.current_block_count(), &mut sizes);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, iter.current().to_vec()));
        }
    }
    Ok(best.map(|(cost, rgs)| (cost, Clustering::new(rgs).expect("restricted growth strings are dense"))))
}

pub fn oracle_best_cost(g: &Graph, p: usize, mode: Mode) -> Result<Option<usize>> {
    Ok(oracle_solve(g, p, mode)?.map(|(cost, _)| cost))
}

/// Calls `visit(cost, rgs)` for every qualifying partition.
pub fn for_each_partition_cost(g: &Graph, filter: BlockFilter, mut visit: impl FnMut(usize, &[usize])) -> Result<()> {
    let n = g.vertex_count();
    if n > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_VERTEX_LIMIT,
        });
    }
    let edges: Vec<_> = g.edges().collect();
    let mut iter = PartitionIterator::new(n, filter);
    let mut sizes = Vec::new();
    while iter.advance() {
        let cost = partition_cost(g, &edges, iter.current(), iter.current_block_count(), &mut sizes);
        visit(cost, iter.current());
    }
    Ok(())
}

/// Minimum edge count of a cluster graph on `total` vertices with at most
/// `max_clusters` clusters, by brute force over integer partitions.
pub fn oracle_min_edges_cluster_graph(total: usize, max_clusters: usize) -> usize {
    fn go(remaining: usize, largest: usize, parts_left: usize, acc: usize, best: &mut usize) {
        if remaining == 0 {
            *best = (*best).min(acc);
            return;
        }
        if parts_left == 0 {
            return;
        }
        for part in (1..=largest.min(remaining)).rev() {
            go(
                remaining - part,
                part,
                parts_left - 1,
                acc + part * (part - 1) / 2,
                best,
            );
        }
    }
    let mut best = usize::MAX;
    go(total, total, max_clusters, 0, &mut best);
    best
}
