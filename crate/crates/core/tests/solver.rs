use pcluster::cuts::{cluster_cut_count_bound, cut_count_bound, for_each_k_cut, CutBound};
use pcluster::dp::{solve_with, CapPolicy, SolverConfig};
use pcluster::format::{parse_graph, write_graph};
use pcluster::oracle::oracle_best_cost;
use pcluster::preprocess::{preprocess, PreprocessOutcome};
use pcluster::{
    apply_edits, edit_distance, solve_at_most_p, solve_exact_p, verify_solution, Clustering, Graph, Instance, Mode,
};
use proptest::prelude::*;
use std::ops::ControlFlow;

fn graph(n: usize, bits: &[bool]) -> Graph {
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
    Graph::from_edges(n, edges).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| graph(n, &bits))
    })
}

/// All set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        let mut prefix = vec![0];
        grow(&mut prefix, 0, n, &mut out);
    }
    out
}

fn partition_cost(g: &Graph, labels: &[usize]) -> usize {
    let n = g.vertex_count();
    let mut cost = 0;
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) != (labels[u] == labels[v]) {
                cost += 1;
            }
        }
    }
    cost
}

/// Minimum editing cost over partitions accepted by `keep`.
fn brute_force(g: &Graph, keep: impl Fn(&[usize]) -> bool) -> Option<usize> {
    partitions(g.vertex_count())
        .into_iter()
        .filter(|l| keep(l))
        .map(|l| partition_cost(g, &l))
        .min()
}

fn blocks(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |&m| m + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_solver_matches_brute_force(g in arb_graph(7), p in 1usize..=7, k in 0usize..=10) {
        let expected = brute_force(&g, |l| blocks(l) == p).filter(|&c| c <= k);
        let inst = Instance::exact(g.clone(), p, k).unwrap();
        let got = solve_exact_p(&inst).unwrap();
        prop_assert_eq!(got.as_ref().map(|s| s.cost), expected);
        if let Some(sol) = got {
            prop_assert!(verify_solution(&inst, &sol));
            let h = apply_edits(&g, &sol.edits);
            prop_assert!(h.is_cluster_graph());
            prop_assert_eq!(edit_distance(&g, &h).unwrap(), sol.cost);
        }
    }

    #[test]
    fn at_most_solver_matches_brute_force(g in arb_graph(7), p in 1usize..=7, k in 0usize..=10) {
        let expected = brute_force(&g, |l| blocks(l) <= p).filter(|&c| c <= k);
        let inst = Instance::at_most(g, p, k).unwrap();
        let got = solve_at_most_p(&inst).unwrap();
        prop_assert_eq!(got.as_ref().map(|s| s.cost), expected);
        if let Some(sol) = got {
            prop_assert!(sol.clustering.cluster_count() <= p);
            prop_assert!(verify_solution(&inst, &sol));
        }
    }

    #[test]
    fn library_oracle_matches_brute_force(g in arb_graph(7), p in 1usize..=7) {
        prop_assert_eq!(oracle_best_cost(&g, p, Mode::ExactP).unwrap(), brute_force(&g, |l| blocks(l) == p));
        prop_assert_eq!(oracle_best_cost(&g, p, Mode::AtMostP).unwrap(), brute_force(&g, |l| blocks(l) <= p));
    }

    /// Some optimal at-most-p clustering keeps every twin class together.
    #[test]
    fn twin_classes_stay_together_at_most_p(g in arb_graph(7), p in 1usize..=7) {
        let best = brute_force(&g, |l| blocks(l) <= p);
        let classes = g.twin_classes();
        let together = brute_force(&g, |l| {
            blocks(l) <= p && classes.iter().all(|c| c.iter().all(|&v| l[v] == l[c[0]]))
        });
        prop_assert_eq!(best, together);
    }

    #[test]
    fn preprocessing_keeps_answers(g in arb_graph(7), p in 1usize..=7, k in 0usize..=3) {
        let inst = Instance::exact(g.clone(), p, k).unwrap();
        let expected = brute_force(&g, |l| blocks(l) == p).is_some_and(|c| c <= k);
        match preprocess(&inst) {
            PreprocessOutcome::Reject { .. } => prop_assert!(!expected),
            PreprocessOutcome::Reduced(r) => {
                prop_assert!(r.p <= 6 * k);
                let reduced = if r.p == 0 {
                    r.graph.vertex_count() == 0
                } else {
                    brute_force(&r.graph, |l| blocks(l) == r.p).is_some_and(|c| c <= k)
                };
                prop_assert_eq!(reduced, expected);
            }
        }
    }

    #[test]
    fn planted_graphs_respect_cut_bound(sizes in proptest::collection::vec(1usize..4, 1..5), flips in proptest::collection::vec((0usize..12, 0usize..12), 0..4)) {
        let n: usize = sizes.iter().sum();
        let mut edges = std::collections::BTreeSet::new();
        let mut base = 0;
        for &s in &sizes {
            for u in base..base + s {
                for v in u + 1..base + s {
                    edges.insert((u, v));
                }
            }
            base += s;
        }
        let cluster = Graph::from_edges(n, edges.iter().copied()).unwrap();
        let (p, k) = (sizes.len(), flips.len().max(1));
        let count = for_each_k_cut(&cluster, k, |_| ControlFlow::Continue(())).emitted;
        if let CutBound::Finite(b) = cluster_cut_count_bound(p, k) {
            prop_assert!(count <= b);
        }
        for &(u, v) in &flips {
            let (u, v) = (u % n, v % n);
            if u != v {
                let e = (u.min(v), u.max(v));
                if !edges.remove(&e) {
                    edges.insert(e);
                }
            }
        }
        let planted = Graph::from_edges(n, edges).unwrap();
        let count = for_each_k_cut(&planted, k, |_| ControlFlow::Continue(())).emitted;
        if let CutBound::Finite(b) = cut_count_bound(p, k) {
            prop_assert!(count <= b);
        }
    }

    #[test]
    fn graph_files_round_trip(g in arb_graph(9)) {
        let text = write_graph(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }
}

#[test]
fn exact_p_may_have_to_split_twins() {
    // The two vertices of an edge are twins, yet two clusters force a split.
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let sol = solve_exact_p(&Instance::exact(g.clone(), 2, 1).unwrap())
        .unwrap()
        .unwrap();
    assert_eq!(sol.cost, 1);
    assert_eq!(g.twin_classes(), vec![vec![0, 1]]);
}

#[test]
fn thread_count_does_not_change_the_answer() {
    let g =
        parse_graph("p cep 9 12\ne 1 2\ne 1 3\ne 2 3\ne 3 4\ne 4 5\ne 4 6\ne 5 6\ne 6 7\ne 7 8\ne 7 9\ne 8 9\ne 2 9\n")
            .unwrap();
    for mode in [Mode::ExactP, Mode::AtMostP] {
        let inst = Instance::new(g.clone(), 3, 4, mode).unwrap();
        let runs: Vec<_> = [None, Some(1), Some(4)]
            .into_iter()
            .map(|threads| {
                let config = SolverConfig {
                    cap: CapPolicy::Unlimited,
                    threads,
                };
                solve_with(&inst, &config).unwrap().solution.map(|s| s.clustering)
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{mode:?}");
        assert!(runs[0].is_some());
    }
}

#[test]
fn tiny_cap_aborts_to_no() {
    let g = parse_graph("p cep 4 3\ne 1 2\ne 2 3\ne 3 4\n").unwrap();
    let inst = Instance::exact(g, 2, 1).unwrap();
    let capped = solve_with(
        &inst,
        &SolverConfig {
            cap: CapPolicy::Fixed(1),
            threads: None,
        },
    )
    .unwrap();
    assert!(capped.solution.is_none());
    assert!(capped.stats.aborted);
    let full = solve_with(
        &inst,
        &SolverConfig {
            cap: CapPolicy::Bound,
            threads: None,
        },
    )
    .unwrap();
    assert_eq!(full.solution.map(|s| s.cost), Some(1));
}

#[test]
fn clusterings_cost_what_their_edits_cost() {
    let g = parse_graph("p cep 5 5\ne 1 2\ne 2 3\ne 3 1\ne 3 4\ne 4 5\n").unwrap();
    let cl = Clustering::new(vec![0, 0, 0, 1, 1]).unwrap();
    assert_eq!(pcluster::clustering_cost(&g, &cl), 1);
    let edits = pcluster::clustering_to_edit_set(&g, &cl);
    assert_eq!(edits.len(), 1);
    assert_eq!(apply_edits(&g, &edits), cl.to_cluster_graph());
}
