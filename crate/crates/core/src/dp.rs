//! Exact-p solver: preprocess, enumerate k-cuts, then a layered shortest
//! path over cuts.
//!
//! A state `(c, j)` says the first `j` clusters of some solution cover
//! exactly `side1(c)`. Moving to a cut `c'` with `side1(c') ⊋ side1(c)`
//! closes the cluster `D = side1(c') \ side1(c)`, paying for edges from `D`
//! back into `side1(c)` and for missing edges inside `D`. Only the minimum
//! cost per state is kept; the answer is YES iff `(V, p)` is reachable with
//! cost at most `k`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::{apply_edits, clustering_to_edit_set, Clustering, EditSet};
use crate::cuts::{cut_count_bound, enumerate_k_cuts, CutIndex, Enumeration};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::preprocess::{preprocess, Instance, Mode, PreprocessOutcome, ReducedInstance};
use crate::vertex_set::VertexSet;

/// Cost of closing the cluster `v1prime \ v1` after the clusters covering `v1`.
pub fn arc_cost(g: &Graph, v1: &VertexSet, v1prime: &VertexSet) -> usize {
    debug_assert!(v1.is_subset(v1prime) && v1 != v1prime);
    let new_cluster = v1prime.difference(v1);
    let back_edges: usize = new_cluster.iter().map(|v| g.neighbors_in(v, v1)).sum();
    let size = new_cluster.count();
    back_edges + size * size.saturating_sub(1) / 2 - g.edges_within(&new_cluster)
}

/// How the cut-enumeration cap is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CapPolicy {
    /// `cut_count_bound(p', k)`; exceeding it proves NO.
    #[default]
    Bound,
    /// Never abort.
    Unlimited,
    /// Abort after this many cuts. Answers NO on abort, which is only sound
    /// when the value is at least the bound.
    Fixed(u64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub cap: CapPolicy,
    /// Worker threads for the layer relaxation; `None` or `Some(1)` runs
    /// sequentially. The result does not depend on this.
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub cuts_enumerated: u64,
    pub dp_states: u64,
    pub rules_applied: u64,
    /// True if some enumeration exceeded its cap.
    pub aborted: bool,
}

impl SolveStats {
    fn absorb(&mut self, other: SolveStats) {
        self.cuts_enumerated += other.cuts_enumerated;
        self.dp_states += other.dp_states;
        self.rules_applied += other.rules_applied;
        self.aborted |= other.aborted;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub clustering: Clustering,
    pub edits: EditSet,
    pub cost: usize,
}

impl Solution {
    pub fn from_clustering(g: &Graph, clustering: Clustering) -> Self {
        let edits = clustering_to_edit_set(g, &clustering);
        Solution {
            cost: edits.len(),
            clustering,
            edits,
        }
    }
}

/// Prefix sets along the optimal DP path, on the reduced graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub graph: Graph,
    /// `prefixes[0]` is empty, the last one is the full vertex set.
    pub prefixes: Vec<VertexSet>,
    pub arc_costs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub solution: Option<Solution>,
    pub stats: SolveStats,
    /// Present for YES answers produced by the DP (absent for trivial cases
    /// decided by preprocessing alone and for at-most-p aggregation).
    pub trace: Option<Trace>,
}

impl SolveReport {
    fn no(stats: SolveStats) -> Self {
        SolveReport {
            solution: None,
            stats,
            trace: None,
        }
    }
}

const UNREACHED: u32 = u32::MAX;

struct Layers {
    /// `best[j][c]`: minimum cost to cover `side1(c)` with `j` clusters.
    best: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
}

/// Successor candidates of one source state: `(target cut, cost)`.
#[allow(clippy::too_many_arguments)]
fn successors(
    g: &Graph,
    index: &CutIndex,
    sizes: &[usize],
    order: &[usize],
    rank: &[usize],
    source: usize,
    base: u32,
    remaining_layers: usize,
    k: usize,
) -> Vec<(usize, u32)> {
    let n = g.vertex_count();
    let v1 = index.get(source).side1();
    let comp = v1.complement();
    let free = comp.count();
    let mut out = Vec::new();
    let consider = |target: usize, out: &mut Vec<(usize, u32)>| {
        // The remaining `remaining_layers - 1` clusters need a vertex each.
        if n - sizes[target] < remaining_layers - 1 {
            return;
        }
        let cost = base as usize + arc_cost(g, v1, index.get(target).side1());
        if cost <= k {
            out.push((target, cost as u32));
        }
    };
    if free < 63 && (1u64 << free) < index.len() as u64 {
        let free_vertices = comp.to_vec();
        for mask in 1u64..1 << free {
            let mut next = v1.clone();
            for (bit, &v) in free_vertices.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    next.insert(v);
                }
            }
            if let Some(target) = index.position(&next) {
                consider(target, &mut out);
            }
        }
        // Keep the scan order so both strategies yield identical lists.
        out.sort_by_key(|&(t, _)| rank[t]);
    } else {
        let start = order.partition_point(|&c| sizes[c] <= sizes[source]);
        for &target in &order[start..] {
            if v1.is_subset(index.get(target).side1()) {
                consider(target, &mut out);
            }
        }
    }
    out
}

fn run_layers(g: &Graph, index: &CutIndex, p: usize, k: usize, threads: Option<usize>) -> Result<Layers> {
    let n = g.vertex_count();
    let count = index.len();
    let sizes: Vec<usize> = index.cuts().iter().map(|c| c.side1().count()).collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&c| sizes[c]);
    let mut rank = vec![0; count];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let empty = index
        .position(&VertexSet::empty(n))
        .expect("the empty side is always a k-cut");

    let mut best = vec![vec![UNREACHED; count]; p + 1];
    let mut pred = vec![vec![UNREACHED; count]; p + 1];
    best[0][empty] = 0;

    let pool = match threads {
        Some(t) if t > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidInstance(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };

    for j in 0..p {
        let sources: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&c| best[j][c] != UNREACHED && sizes[c] < n)
            .collect();
        let layer = &best[j];
        let expand = |&c: &usize| successors(g, index, &sizes, &order, &rank, c, layer[c], p - j, k);
        let candidates: Vec<Vec<(usize, u32)>> = match &pool {
            Some(pool) => pool.install(|| sources.par_iter().map(expand).collect()),
            None => sources.iter().map(expand).collect(),
        };
        let next = &mut best[j + 1];
        let next_pred = &mut pred[j + 1];
        // Merge in source order; strict `<` keeps the first-discovered predecessor.
        for (&source, list) in sources.iter().zip(&candidates) {
            for &(target, cost) in list {
                if cost < next[target] {
                    next[target] = cost;
                    next_pred[target] = source as u32;
                }
            }
        }
    }
    Ok(Layers { best, pred })
}

/// Solves the reduced instance; returns the reduced-graph clustering.
fn solve_reduced(
    reduced: &ReducedInstance,
    config: &SolverConfig,
    stats: &mut SolveStats,
) -> Result<Option<(Clustering, Trace)>> {
    let g = &reduced.graph;
    let (p, k) = (reduced.p, reduced.k);
    let n = g.vertex_count();
    if p == 0 {
        return Ok((n == 0).then(|| {
            let trace = Trace {
                graph: g.clone(),
                prefixes: vec![VertexSet::empty(0)],
                arc_costs: Vec::new(),
            };
            (Clustering::new(Vec::new()).expect("empty clustering"), trace)
        }));
    }
    let cap = match config.cap {
        CapPolicy::Bound => cut_count_bound(p, k).as_cap(),
        CapPolicy::Unlimited => None,
        CapPolicy::Fixed(c) => Some(c),
    };
    let (enumeration, enum_stats) = enumerate_k_cuts(g, k, cap);
    stats.cuts_enumerated += enum_stats.emitted;
    let index = match enumeration {
        Enumeration::Complete(index) => index,
        Enumeration::Aborted { .. } => {
            stats.aborted = true;
            return Ok(None);
        }
    };
    let layers = run_layers(g, &index, p, k, config.threads)?;
    stats.dp_states += layers
        .best
        .iter()
        .map(|row| row.iter().filter(|&&c| c != UNREACHED).count() as u64)
        .sum::<u64>();
    let full = index
        .position(&VertexSet::full(n))
        .expect("the full side is always a k-cut");
    if layers.best[p][full] == UNREACHED {
        return Ok(None);
    }

    let mut path = vec![full];
    for j in (1..=p).rev() {
        let prev = layers.pred[j][*path.last().unwrap()];
        path.push(prev as usize);
    }
    path.reverse();
    let prefixes: Vec<VertexSet> = path.iter().map(|&c| index.get(c).side1().clone()).collect();
    let mut assignment = vec![0; n];
    let mut arc_costs = Vec::with_capacity(p);
    for (cluster, pair) in prefixes.windows(2).enumerate() {
        arc_costs.push(arc_cost(g, &pair[0], &pair[1]));
        for v in pair[1].difference(&pair[0]).iter() {
            assignment[v] = cluster;
        }
    }
    let clustering = Clustering::new(assignment)?;
    let trace = Trace {
        graph: g.clone(),
        prefixes,
        arc_costs,
    };
    Ok(Some((clustering, trace)))
}

pub fn solve_exact_p_with(inst: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    if inst.mode != Mode::ExactP {
        return Err(Error::InvalidInstance("solve_exact_p needs an exact-p instance".into()));
    }
    let mut stats = SolveStats::default();
    let outcome = preprocess(inst);
    stats.rules_applied = outcome.log().iter().filter(|a| !a.removed.is_empty()).count() as u64;
    let reduced = match outcome {
        PreprocessOutcome::Reject { .. } => return Ok(SolveReport::no(stats)),
        PreprocessOutcome::Reduced(r) => r,
    };
    let Some((clustering, trace)) = solve_reduced(&reduced, config, &mut stats)? else {
        return Ok(SolveReport::no(stats));
    };
    let lifted = reduced.lift_clustering(&clustering);
    let solution = Solution::from_clustering(&inst.graph, lifted);
    if !verify_solution(inst, &solution) {
        return Err(Error::InvalidClustering("solver produced an invalid solution".into()));
    }
    Ok(SolveReport {
        solution: Some(solution),
        stats,
        trace: Some(trace),
    })
}

pub fn solve_at_most_p_with(inst: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    if inst.mode != Mode::AtMostP {
        return Err(Error::InvalidInstance(
            "solve_at_most_p needs an at-most-p instance".into(),
        ));
    }
    let n = inst.graph.vertex_count();
    let mut stats = SolveStats::default();
    if n == 0 {
        let solution = Solution::from_clustering(&inst.graph, Clustering::new(Vec::new())?);
        return Ok(SolveReport {
            solution: Some(solution),
            stats,
            trace: None,
        });
    }
    let mut best: Option<Solution> = None;
    for q in 1..=inst.p.min(n) {
        let sub = Instance::exact(inst.graph.clone(), q, inst.k)?;
        let report = solve_exact_p_with(&sub, config)?;
        stats.absorb(report.stats);
        if let Some(sol) = report.solution {
            if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                best = Some(sol);
            }
        }
    }
    Ok(SolveReport {
        solution: best,
        stats,
        trace: None,
    })
}

/// Dispatches on the instance mode.
pub fn solve_with(inst: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    match inst.mode {
        Mode::ExactP => solve_exact_p_with(inst, config),
        Mode::AtMostP => solve_at_most_p_with(inst, config),
    }
}

pub fn solve_exact_p(inst: &Instance) -> Result<Option<Solution>> {
    Ok(solve_exact_p_with(inst, &SolverConfig::default())?.solution)
}

pub fn solve_at_most_p(inst: &Instance) -> Result<Option<Solution>> {
    Ok(solve_at_most_p_with(inst, &SolverConfig::default())?.solution)
}

/// Independent check: the edits turn the graph into a cluster graph with the
/// right number of components, the cost is within budget, and the clustering
/// matches the components.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> bool {
    let g = &inst.graph;
    if sol.clustering.vertex_count() != g.vertex_count() || sol.cost != sol.edits.len() || sol.cost > inst.k {
        return false;
    }
    if sol.edits.iter().any(|(u, v)| u.max(v) >= g.vertex_count()) {
        return false;
    }
    let h = apply_edits(g, &sol.edits);
    if !h.is_cluster_graph() {
        return false;
    }
    let components = h.connected_components();
    let count_ok = match inst.mode {
        Mode::ExactP => components.len() == inst.p,
        Mode::AtMostP => components.len() <= inst.p,
    };
    if !count_ok {
        return false;
    }
    let mut expected: HashMap<usize, usize> = HashMap::new();
    components.iter().all(|comp| {
        let label = sol.clustering.cluster_of(comp[0]);
        expected.insert(label, comp.len()).is_none() && comp.iter().all(|&v| sol.clustering.cluster_of(v) == label)
    })
}
