//! Seeded instance generators. The same seed always yields the same output.

use pcluster::sat::cnf::{CnfFormula, Lit};
use pcluster::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G(n, prob)`.
pub fn gnp(rng: &mut impl Rng, n: usize, prob: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("simple graph")
}

/// Random sizes (each at least 1) of `p` clusters covering `n` vertices.
pub fn cluster_sizes(rng: &mut impl Rng, n: usize, p: usize) -> Vec<usize> {
    assert!(p >= 1 && p <= n, "need 1 <= p <= n");
    let mut sizes = vec![1; p];
    for _ in p..n {
        let i = rng.gen_range(0..p);
        sizes[i] += 1;
    }
    sizes
}

/// Disjoint cliques of the given sizes, vertices numbered consecutively.
pub fn cluster_graph(sizes: &[usize]) -> Graph {
    let mut edges = Vec::new();
    let mut base = 0;
    for &s in sizes {
        for u in base..base + s {
            for v in u + 1..base + s {
                edges.push((u, v));
            }
        }
        base += s;
    }
    Graph::from_edges(base, edges).expect("disjoint cliques")
}

/// Vertex labels shuffled, so clusters are not contiguous.
pub fn shuffled(rng: &mut impl Rng, g: &Graph) -> Graph {
    let mut perm: Vec<usize> = g.vertices().collect();
    perm.shuffle(rng);
    Graph::from_edges(g.vertex_count(), g.edges().map(|(u, v)| (perm[u], perm[v]))).expect("relabelling")
}

/// Toggles `count` distinct random vertex pairs.
pub fn perturb(rng: &mut impl Rng, g: &Graph, count: usize) -> Graph {
    let n = g.vertex_count();
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    all.shuffle(rng);
    let flips: std::collections::BTreeSet<_> = all.into_iter().take(count).collect();
    let mut edges: Vec<_> = g.edges().filter(|e| !flips.contains(e)).collect();
    edges.extend(flips.iter().copied().filter(|&(u, v)| !g.has_edge(u, v)));
    Graph::from_edges(n, edges).expect("toggled pairs are distinct")
}

/// A cluster graph with `p` clusters on `n` vertices, shuffled, then with
/// up to `k` random pair toggles.
pub fn planted(rng: &mut impl Rng, n: usize, p: usize, k: usize) -> Graph {
    let sizes = cluster_sizes(rng, n, p);
    let base = shuffled(rng, &cluster_graph(&sizes));
    let flips = rng.gen_range(0..=k);
    perturb(rng, &base, flips)
}

/// `clauses` random clauses, each with three literals on distinct variables.
pub fn random_3cnf(rng: &mut impl Rng, vars: usize, clauses: usize) -> CnfFormula {
    assert!(vars >= 3, "need at least three variables");
    let ids: Vec<usize> = (1..=vars).collect();
    let list = (0..clauses)
        .map(|_| {
            ids.choose_multiple(rng, 3)
                .map(|&v| Lit {
                    var: v,
                    positive: rng.gen_bool(0.5),
                })
                .collect()
        })
        .collect();
    CnfFormula::new(vars, list).expect("valid ids")
}

/// A random 3-CNF formula that the given assignment satisfies: clauses
/// falsified by it are resampled.
pub fn satisfiable_3cnf(rng: &mut impl Rng, vars: usize, clauses: usize) -> (CnfFormula, Vec<bool>) {
    let assignment: Vec<bool> = (0..vars).map(|_| rng.gen_bool(0.5)).collect();
    let ids: Vec<usize> = (1..=vars).collect();
    let mut list = Vec::with_capacity(clauses);
    while list.len() < clauses {
        let clause: Vec<Lit> = ids
            .choose_multiple(rng, 3)
            .map(|&v| Lit {
                var: v,
                positive: rng.gen_bool(0.5),
            })
            .collect();
        if clause.iter().any(|l| l.eval(&assignment)) {
            list.push(clause);
        }
    }
    (CnfFormula::new(vars, list).expect("valid ids"), assignment)
}
