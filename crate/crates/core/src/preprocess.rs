//! Reduction rules that shrink the target cluster count to `p <= 6k`.
//!
//! Every rule removes whole connected components that are cliques, so the
//! reduced graph is an induced subgraph of the input and any solution of the
//! reduced instance lifts back by re-attaching each removed clique as its own
//! cluster.

use serde::Serialize;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exactly `p` clusters.
    ExactP,
    /// At most `p` clusters.
    AtMostP,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub p: usize,
    pub k: usize,
    pub mode: Mode,
}

impl Instance {
    pub fn new(graph: Graph, p: usize, k: usize, mode: Mode) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInstance("p must be at least 1".into()));
        }
        Ok(Instance { graph, p, k, mode })
    }

    pub fn exact(graph: Graph, p: usize, k: usize) -> Result<Self> {
        Self::new(graph, p, k, Mode::ExactP)
    }

    pub fn at_most(graph: Graph, p: usize, k: usize) -> Result<Self> {
        Self::new(graph, p, k, Mode::AtMostP)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Fewer than `p - 2k` clique components: NO.
    TooFewCliques,
    /// At least `2k + 1` isolated vertices: drop one.
    IsolatedVertex,
    /// At least `2k + 1` non-trivial clique components: drop a largest one.
    LargestClique,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleApplication {
    pub rule: Rule,
    /// Removed vertices, as ids of the original input graph.
    pub removed: Vec<Vertex>,
}

/// One rule step on a graph: what it removed and the new `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub graph: Graph,
    pub p: usize,
    /// Removed vertices, as ids of the graph the rule was applied to.
    pub removed: Vec<Vertex>,
    /// `kept[i]` is the id (in the pre-rule graph) of reduced vertex `i`.
    pub kept: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub graph: Graph,
    /// May reach 0 when `k = 0` and every component was a removed clique.
    pub p: usize,
    pub k: usize,
    /// `kept[i]` is the original id of reduced vertex `i`.
    pub kept: Vec<Vertex>,
    pub original_vertex_count: usize,
    pub log: Vec<RuleApplication>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreprocessOutcome {
    Reject { log: Vec<RuleApplication> },
    Reduced(ReducedInstance),
}

impl PreprocessOutcome {
    pub fn log(&self) -> &[RuleApplication] {
        match self {
            PreprocessOutcome::Reject { log } => log,
            PreprocessOutcome::Reduced(r) => &r.log,
        }
    }
}

fn clique_components(g: &Graph) -> Vec<Vec<Vertex>> {
    g.connected_components()
        .into_iter()
        .filter(|c| c.iter().all(|&v| g.degree(v) + 1 == c.len()))
        .collect()
}

fn rule1_rejects_graph(g: &Graph, p: usize, k: usize) -> bool {
    clique_components(g).len() + 2 * k < p
}

pub fn rule1_check(inst: &Instance) -> bool {
    rule1_rejects_graph(&inst.graph, inst.p, inst.k)
}

fn remove_vertices(g: &Graph, p: usize, removed: Vec<Vertex>) -> Reduction {
    let mut gone = vec![false; g.vertex_count()];
    for &v in &removed {
        gone[v] = true;
    }
    let kept: Vec<Vertex> = g.vertices().filter(|&v| !gone[v]).collect();
    Reduction {
        graph: g.induced(&kept),
        p: p - 1,
        removed,
        kept,
    }
}

fn rule2_on(g: &Graph, p: usize, k: usize) -> Option<Reduction> {
    let isolated: Vec<Vertex> = g.vertices().filter(|&v| g.degree(v) == 0).collect();
    (isolated.len() > 2 * k && p > 0).then(|| remove_vertices(g, p, vec![isolated[0]]))
}

fn rule3_on(g: &Graph, p: usize, k: usize) -> Option<Reduction> {
    let cliques: Vec<Vec<Vertex>> = clique_components(g).into_iter().filter(|c| c.len() >= 2).collect();
    if cliques.len() <= 2 * k || p == 0 {
        return None;
    }
    // Components come ordered by smallest vertex, so the first largest one
    // is the one containing the smallest id.
    let largest = cliques.iter().map(Vec::len).max().unwrap();
    let chosen = cliques.into_iter().find(|c| c.len() == largest).unwrap();
    Some(remove_vertices(g, p, chosen))
}

pub fn rule2_apply(inst: &Instance) -> Option<Reduction> {
    rule2_on(&inst.graph, inst.p, inst.k)
}

pub fn rule3_apply(inst: &Instance) -> Option<Reduction> {
    rule3_on(&inst.graph, inst.p, inst.k)
}

/// Applies Rule 1, then Rule 3 / Rule 2 until `p <= 6k`.
pub fn preprocess(inst: &Instance) -> PreprocessOutcome {
    let k = inst.k;
    let mut graph = inst.graph.clone();
    let mut p = inst.p;
    let mut kept: Vec<Vertex> = inst.graph.vertices().collect();
    let mut log = Vec::new();
    loop {
        if rule1_rejects_graph(&graph, p, k) {
            log.push(RuleApplication {
                rule: Rule::TooFewCliques,
                removed: Vec::new(),
            });
            return PreprocessOutcome::Reject { log };
        }
        if p <= 6 * k {
            break;
        }
        let (rule, step) = match rule3_on(&graph, p, k) {
            Some(step) => (Rule::LargestClique, step),
            None => match rule2_on(&graph, p, k) {
                Some(step) => (Rule::IsolatedVertex, step),
                // Unreachable while p > 6k and Rule 1 passes (more than 4k clique
                // components exist), but p = 0 with k = 0 lands here.
                None => break,
            },
        };
        log.push(RuleApplication {
            rule,
            removed: step.removed.iter().map(|&v| kept[v]).collect(),
        });
        kept = step.kept.iter().map(|&v| kept[v]).collect();
        graph = step.graph;
        p = step.p;
    }
    if graph.vertex_count() < p {
        return PreprocessOutcome::Reject { log };
    }
    PreprocessOutcome::Reduced(ReducedInstance {
        graph,
        p,
        k,
        kept,
        original_vertex_count: inst.graph.vertex_count(),
        log,
    })
}

impl ReducedInstance {
    /// Extends a clustering of the reduced graph to the original graph,
    /// placing each removed component in a cluster of its own.
    pub fn lift_clustering(&self, reduced: &Clustering) -> Clustering {
        assert_eq!(reduced.vertex_count(), self.graph.vertex_count());
        let mut blocks: Vec<Vec<Vertex>> = reduced
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|v| self.kept[v]).collect())
            .collect();
        for entry in &self.log {
            if !entry.removed.is_empty() {
                blocks.push(entry.removed.clone());
            }
        }
        Clustering::from_blocks(self.original_vertex_count, &blocks).expect("removed components are disjoint")
    }
}
