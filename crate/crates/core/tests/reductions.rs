use num_rational::Ratio;
use pcluster::sat::cnf::{parse_dimacs, write_dimacs, CnfFormula, Lit};
use pcluster::sat::eth::{build_eth, eth_witness, normalize_for_eth, EthRole};
use pcluster::sat::multivariate::{build_multivariate, multivariate_witness, MultivariateParams};
use pcluster::sat::regularize::regularize;
use pcluster::{verify_solution, Instance, Solution};
use proptest::prelude::*;

fn arb_3cnf(max_vars: usize, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    (3..=max_vars).prop_flat_map(move |n| {
        let clause = (
            proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 3),
            any::<[bool; 3]>(),
        )
            .prop_map(|(vars, signs)| {
                vars.into_iter()
                    .zip(signs)
                    .map(|(var, positive)| Lit { var, positive })
                    .collect()
            });
        proptest::collection::vec(clause, 1..=max_clauses).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
    })
}

/// Formulas with clauses of one to three literals.
fn arb_short_cnf() -> impl Strategy<Value = CnfFormula> {
    (3usize..=5).prop_flat_map(|n| {
        let clause = (
            proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 1..=3),
            any::<[bool; 3]>(),
        )
            .prop_map(|(vars, signs)| {
                vars.into_iter()
                    .zip(signs)
                    .map(|(var, positive)| Lit { var, positive })
                    .collect()
            });
        proptest::collection::vec(clause, 1..=8).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
    })
}

fn budget(n: u128, m: u128, p: u128, l: u128) -> u128 {
    let per = (6 * n + 9 * m) / (6 * p);
    (6 * n + 36 * m) * l + 6 * p * (per * per.saturating_sub(1) / 2) + 6 * n + 27 * m - 6 * n - 18 * m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn regularized_formulas_are_regular(phi in arb_short_cnf(), p in 1usize..=3) {
        let reg = regularize(&phi, p, Ratio::from_integer(1)).unwrap();
        let f = &reg.formula;
        for clause in f.clauses() {
            let mut vars: Vec<_> = clause.iter().map(|l| l.var).collect();
            vars.sort();
            vars.dedup();
            prop_assert_eq!(vars.len(), 3);
        }
        prop_assert!(f.occurrences().iter().all(|&c| c == (3, 3)));
        prop_assert_eq!(reg.parts.len(), p);
        prop_assert!(reg.parts.iter().all(|part| part.len() * p == f.var_count()));
        if let Some(a) = phi.brute_force_sat() {
            let ext = reg.extend_assignment(&a);
            prop_assert!(f.satisfies(&ext));
            for part in &reg.parts {
                let trues = part.iter().filter(|&&v| ext[v - 1]).count();
                prop_assert_eq!(2 * trues, part.len());
            }
            prop_assert!(phi.satisfies(&reg.restrict_assignment(&ext)));
        }
    }

    #[test]
    fn eth_graphs_have_bounded_degree_and_tight_witnesses(phi in arb_3cnf(5, 5)) {
        let inst = build_eth(&phi).unwrap();
        let g = &inst.graph;
        let m = inst.normalized.formula.clause_count();
        prop_assert_eq!(inst.budget, 14 * m);
        prop_assert!(g.vertices().all(|v| g.degree(v) <= 5));
        let cycles = inst.roles.iter().filter(|r| matches!(r, EthRole::Cycle { .. })).count();
        let occurrences: usize = inst.occurrence_counts.iter().sum();
        // Each occurrence contributes four cycle vertices and two gadget vertices.
        prop_assert_eq!(cycles, 4 * occurrences);
        prop_assert_eq!(g.vertex_count(), 6 * occurrences);
        if let Some(a) = phi.brute_force_sat() {
            let sol = eth_witness(&inst, &inst.normalized.extend_assignment(&a)).unwrap();
            prop_assert_eq!(sol.cost, inst.budget);
            let check = Instance::at_most(g.clone(), g.vertex_count(), inst.budget).unwrap();
            prop_assert!(verify_solution(&check, &sol));
        }
    }

    #[test]
    fn dimacs_round_trip(phi in arb_short_cnf()) {
        prop_assert_eq!(parse_dimacs(&write_dimacs(&phi)).unwrap(), phi);
    }
}

#[test]
fn normalized_formulas_keep_satisfiability() {
    let phi = CnfFormula::from_ints(3, &[&[1], &[-1, 2], &[2, 3, -1]]).unwrap();
    let norm = normalize_for_eth(&phi).unwrap();
    let f = &norm.formula;
    assert!(f.clauses().iter().all(|c| c.len() == 3));
    assert!(f.occurrences().iter().all(|&(pos, neg)| pos >= 1 && neg >= 1));
    let a = phi.brute_force_sat().unwrap();
    assert!(f.satisfies(&norm.extend_assignment(&a)));
    let unsat = CnfFormula::from_ints(1, &[&[1], &[-1]]).unwrap();
    assert!(normalize_for_eth(&unsat).unwrap().formula.brute_force_sat().is_none());
}

#[test]
fn small_multivariate_instance_materializes_at_budget() {
    // l_factor = 1 keeps the graph small enough to build and verify directly.
    let phi = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
    let params = MultivariateParams {
        p: 1,
        k: 9,
        epsilon: Ratio::from_integer(1),
        l_factor: 1,
    };
    assert!(!params.is_faithful());
    let inst = build_multivariate(&phi, params).unwrap();
    let (n, m) = (inst.n_prime() as u128, inst.m_prime() as u128);
    assert_eq!(inst.l as u128, 1 + n);
    assert_eq!(inst.budget, budget(n, m, 1, inst.l as u128));

    let w = multivariate_witness(&inst, &inst.regularized.extend_assignment(&[true, false, false])).unwrap();
    assert_eq!(w.cost, inst.budget);
    let g = inst.graph.to_graph(u128::MAX).unwrap();
    assert_eq!(g.vertex_count() as u64, inst.graph.vertex_count());
    assert_eq!(g.edge_count() as u128, inst.graph.edge_count());
    let clustering = inst.graph.expand_clustering(&w.node_cluster).unwrap();
    assert_eq!(clustering.cluster_count(), 6);
    let sol = Solution::from_clustering(&g, clustering);
    assert_eq!(sol.cost as u128, inst.budget);
    let check = Instance::exact(g, 6, sol.cost).unwrap();
    assert!(verify_solution(&check, &sol));
}

#[test]
fn multivariate_rejects_violated_hypotheses() {
    let phi = CnfFormula::from_ints(4, &[&[1, 2, 3], &[-2, -3, 4]]).unwrap();
    // n = 4 needs p·k >= 16 at epsilon = 1.
    assert!(build_multivariate(&phi, MultivariateParams::faithful(1, 15, Ratio::from_integer(1))).is_err());
    assert!(build_multivariate(&phi, MultivariateParams::faithful(1, 16, Ratio::from_integer(1))).is_ok());
    assert!(build_multivariate(&phi, MultivariateParams::faithful(5, 16, Ratio::from_integer(1))).is_err());
}

#[test]
fn multivariate_witness_rejects_falsifying_assignments() {
    let phi = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
    let inst = build_multivariate(&phi, MultivariateParams::faithful(1, 9, Ratio::from_integer(1))).unwrap();
    let bad = vec![false; inst.n_prime()];
    assert!(multivariate_witness(&inst, &bad).is_err());
    assert!(multivariate_witness(&inst, &[true]).is_err());
}
