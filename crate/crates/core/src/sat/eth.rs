//! Linear reduction from 3-CNF-SAT to (unrestricted) Cluster Editing with
//! budget `14m`.
//!
//! Each variable `x` with `s_x` occurrences becomes a cycle of length
//! `4 s_x`, four consecutive vertices `a^1..a^4` per occurrence (the `a^5` of
//! one occurrence is the `a^1` of the next). Each clause becomes a gadget
//! `p_1, p_2, p_3, q_1, q_2, q_3` with every inner edge except the three
//! `q`–`q` pairs. `q_η` is joined to `a^1, a^2` of its occurrence if the
//! literal is positive and to `a^2, a^3` if it is negative.

use serde::Serialize;

use crate::clustering::{apply_edits, EditSet};
use crate::dp::Solution;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::sat::cnf::{Clause, CnfFormula, Lit};

/// Where a variable of the normalized formula comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PadOrigin {
    Input,
    /// Padding variable; this value satisfies every padding clause.
    Pad(bool),
}

/// A formula where every clause has three literals on distinct variables
/// and every occurring variable appears at least once with each sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFormula {
    /// Input variables keep their ids; padding variables follow.
    pub formula: CnfFormula,
    pub origin: Vec<PadOrigin>,
    pub input_var_count: usize,
}

impl NormalizedFormula {
    /// The input assignment followed by the padding values.
    pub fn extend_assignment(&self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.input_var_count, "assignment length");
        let mut out = input.to_vec();
        out.extend(self.origin[self.input_var_count..].iter().map(|o| match o {
            PadOrigin::Pad(b) => *b,
            PadOrigin::Input => unreachable!("padding variables follow the input ones"),
        }));
        out
    }
}

/// Normalizes an arbitrary CNF with clauses of at most three literals:
/// repeated literals are merged, tautologies dropped, 2-literal clauses
/// `C` become `(C ∨ f) ∧ (C ∨ ¬f)`, 1-literal clauses `l` become the four
/// clauses `l ∨ ±f ∨ ±g`, and a variable missing a sign gets the clause
/// `(±x ∨ a ∨ b)`; `a` and `b` then receive their negative occurrences via
/// `(¬a ∨ ¬b ∨ c) ∧ (¬a ∨ ¬b ∨ ¬c)`. Every padding clause holds under
/// `a = true, b = false`, so the result is equisatisfiable.
pub fn normalize_for_eth(phi: &CnfFormula) -> Result<NormalizedFormula> {
    let n = phi.var_count();
    let mut origin = vec![PadOrigin::Input; n];
    let fresh = |origin: &mut Vec<PadOrigin>, value: bool| {
        origin.push(PadOrigin::Pad(value));
        origin.len()
    };
    let mut clauses: Vec<Clause> = Vec::new();
    let mut short = Vec::new();
    for (i, clause) in phi.clauses().iter().enumerate() {
        let mut c: Clause = Vec::new();
        let mut tautology = false;
        for &lit in clause {
            if c.contains(&lit.negate()) {
                tautology = true;
            }
            if !c.contains(&lit) {
                c.push(lit);
            }
        }
        if tautology {
            continue;
        }
        if c.len() > 3 {
            return Err(Error::InvalidInstance(format!(
                "clause {} has {} distinct literals; expected at most 3",
                i + 1,
                c.len()
            )));
        }
        if c.len() < 3 {
            short.push(clauses.len());
        }
        clauses.push(c);
    }
    if !short.is_empty() {
        let f = fresh(&mut origin, false);
        let g = if short.iter().any(|&i| clauses[i].len() == 1) {
            Some(fresh(&mut origin, false))
        } else {
            None
        };
        let mut padded = Vec::with_capacity(clauses.len() + 3 * short.len());
        for c in clauses {
            match c.len() {
                3 => padded.push(c),
                2 => {
                    for sign in [true, false] {
                        let mut d = c.clone();
                        d.push(Lit { var: f, positive: sign });
                        padded.push(d);
                    }
                }
                1 => {
                    let g = g.expect("allocated for unit clauses");
                    for (sf, sg) in [(true, true), (true, false), (false, true), (false, false)] {
                        padded.push(vec![c[0], Lit { var: f, positive: sf }, Lit { var: g, positive: sg }]);
                    }
                }
                _ => unreachable!(),
            }
        }
        clauses = padded;
    }
    let mut counts = vec![(0usize, 0usize); origin.len()];
    for lit in clauses.iter().flatten() {
        if lit.positive {
            counts[lit.var - 1].0 += 1;
        } else {
            counts[lit.var - 1].1 += 1;
        }
    }
    let lacking: Vec<Lit> = counts
        .iter()
        .enumerate()
        .filter(|(_, &(pos, neg))| (pos == 0) != (neg == 0))
        .map(|(i, &(pos, _))| Lit {
            var: i + 1,
            positive: pos == 0,
        })
        .collect();
    if !lacking.is_empty() {
        let a = fresh(&mut origin, true);
        let b = fresh(&mut origin, false);
        let c = fresh(&mut origin, false);
        for lit in lacking {
            clauses.push(vec![lit, Lit::pos(a), Lit::pos(b)]);
        }
        clauses.push(vec![Lit::neg(a), Lit::neg(b), Lit::pos(c)]);
        clauses.push(vec![Lit::neg(a), Lit::neg(b), Lit::neg(c)]);
    }
    Ok(NormalizedFormula {
        formula: CnfFormula::new(origin.len(), clauses)?,
        origin,
        input_var_count: n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum EthRole {
    /// `a^j` of the occurrence of `var` in `clause` (`j` in 1..=4).
    Cycle { var: usize, clause: usize, j: usize },
    /// `p` vertex of literal `literal` (1..=3) of `clause`.
    GadgetP { clause: usize, literal: usize },
    /// `q` vertex of literal `literal` (1..=3) of `clause`.
    GadgetQ { clause: usize, literal: usize },
}

#[derive(Clone, Debug)]
pub struct EthInstance {
    pub normalized: NormalizedFormula,
    pub graph: Graph,
    pub budget: usize,
    /// Role of every vertex.
    pub roles: Vec<EthRole>,
    /// `s_x` per variable (index `var - 1`); 0 for variables that do not occur.
    pub occurrence_counts: Vec<usize>,
    /// First cycle vertex of every variable.
    cycle_base: Vec<usize>,
    /// `(variable, position on its cycle)` per clause literal.
    slots: Vec<[(usize, usize); 3]>,
    gadget_base: usize,
}

impl EthInstance {
    fn cycle_len(&self, var: usize) -> usize {
        4 * self.occurrence_counts[var - 1]
    }

    /// `a^j` (j in 1..=5) of literal `eta` (0-based) of clause `c` (0-based).
    pub fn a(&self, c: usize, eta: usize, j: usize) -> Vertex {
        let (var, pos) = self.slots[c][eta];
        self.cycle_base[var - 1] + (4 * pos + j - 1) % self.cycle_len(var)
    }

    pub fn p_vertex(&self, c: usize, eta: usize) -> Vertex {
        self.gadget_base + 6 * c + eta
    }

    pub fn q_vertex(&self, c: usize, eta: usize) -> Vertex {
        self.gadget_base + 6 * c + 3 + eta
    }

    /// The two cycle vertices joined to `q_eta` of clause `c`.
    pub fn q_attachments(&self, c: usize, eta: usize) -> [Vertex; 2] {
        let lit = self.normalized.formula.clauses()[c][eta];
        if lit.positive {
            [self.a(c, eta, 1), self.a(c, eta, 2)]
        } else {
            [self.a(c, eta, 2), self.a(c, eta, 3)]
        }
    }
}

pub fn build_eth(phi: &CnfFormula) -> Result<EthInstance> {
    let normalized = normalize_for_eth(phi)?;
    let formula = &normalized.formula;
    let n = formula.var_count();
    let m = formula.clause_count();

    let mut occurrence_counts = vec![0usize; n];
    let mut slots = Vec::with_capacity(m);
    for clause in formula.clauses() {
        let mut slot = [(0, 0); 3];
        for (eta, lit) in clause.iter().enumerate() {
            slot[eta] = (lit.var, occurrence_counts[lit.var - 1]);
            occurrence_counts[lit.var - 1] += 1;
        }
        slots.push(slot);
    }
    let mut roles = Vec::new();
    let mut cycle_base = vec![0usize; n];
    // Cycle vertices in variable order, occurrences in clause order.
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, clause) in formula.clauses().iter().enumerate() {
        for lit in clause {
            occurrences[lit.var - 1].push(c);
        }
    }
    for var in 1..=n {
        cycle_base[var - 1] = roles.len();
        for &c in &occurrences[var - 1] {
            for j in 1..=4 {
                roles.push(EthRole::Cycle { var, clause: c + 1, j });
            }
        }
    }
    let gadget_base = roles.len();
    for c in 1..=m {
        for literal in 1..=3 {
            roles.push(EthRole::GadgetP { clause: c, literal });
        }
        for literal in 1..=3 {
            roles.push(EthRole::GadgetQ { clause: c, literal });
        }
    }

    let mut inst = EthInstance {
        normalized: normalized.clone(),
        graph: Graph::empty(0),
        budget: 14 * m,
        roles,
        occurrence_counts,
        cycle_base,
        slots,
        gadget_base,
    };
    let mut edges = Vec::new();
    for var in 1..=n {
        let len = inst.cycle_len(var);
        let base = inst.cycle_base[var - 1];
        for i in 0..len {
            edges.push((base + i, base + (i + 1) % len));
        }
    }
    for c in 0..m {
        let gadget: Vec<Vertex> = (0..6).map(|i| gadget_base + 6 * c + i).collect();
        for (i, &u) in gadget.iter().enumerate() {
            for &v in &gadget[i + 1..] {
                let both_q = u >= gadget[3] && v >= gadget[3];
                if !both_q {
                    edges.push((u, v));
                }
            }
        }
        for eta in 0..3 {
            let q = inst.q_vertex(c, eta);
            for a in inst.q_attachments(c, eta) {
                edges.push((q, a));
            }
        }
    }
    inst.graph = Graph::from_edges(inst.roles.len(), edges)?;
    Ok(inst)
}

/// The editing set built from `assignment`, an assignment of the normalized
/// formula (see [`NormalizedFormula::extend_assignment`]).
pub fn eth_witness(inst: &EthInstance, assignment: &[bool]) -> Result<Solution> {
    let formula = &inst.normalized.formula;
    if assignment.len() != formula.var_count() {
        return Err(Error::AssignmentLength {
            expected: formula.var_count(),
            got: assignment.len(),
        });
    }
    if let Some(c) = formula.first_falsified(assignment) {
        return Err(Error::UnsatisfiedClause { clause: c + 1 });
    }
    let mut pairs = Vec::new();
    for (c, clause) in formula.clauses().iter().enumerate() {
        for (eta, lit) in clause.iter().enumerate() {
            // Every second cycle edge, chosen by the variable's value.
            let cut = if assignment[lit.var - 1] {
                [(2, 3), (4, 5)]
            } else {
                [(1, 2), (3, 4)]
            };
            for (i, j) in cut {
                pairs.push((inst.a(c, eta, i), inst.a(c, eta, j)));
            }
        }
        let first_true = clause
            .iter()
            .position(|l| l.eval(assignment))
            .expect("clause satisfied");
        let others: Vec<usize> = (0..3).filter(|&e| e != first_true).collect();
        let q = inst.q_vertex(c, first_true);
        for eta in 0..3 {
            pairs.push((q, inst.p_vertex(c, eta)));
        }
        for &eta in &others {
            for a in inst.q_attachments(c, eta) {
                pairs.push((inst.q_vertex(c, eta), a));
            }
        }
        pairs.push((inst.q_vertex(c, others[0]), inst.q_vertex(c, others[1])));
    }
    let edits = EditSet::from_pairs(pairs)?;
    let h = apply_edits(&inst.graph, &edits);
    let components = h.connected_components();
    let clustering = crate::clustering::Clustering::from_blocks(h.vertex_count(), &components)?;
    Ok(Solution {
        cost: edits.len(),
        clustering,
        edits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_short_and_one_sided_formulas() {
        let phi = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
        let norm = normalize_for_eth(&phi).unwrap();
        for (i, (pos, neg)) in norm.formula.occurrences().into_iter().enumerate() {
            assert!(pos >= 1 && neg >= 1, "variable {}", i + 1);
        }
        for c in norm.formula.clauses() {
            assert_eq!(c.len(), 3);
        }
        let phi = CnfFormula::from_ints(2, &[&[1], &[-1, 2], &[1, -1, 2]]).unwrap();
        let norm = normalize_for_eth(&phi).unwrap();
        assert!(norm.formula.clauses().iter().all(|c| c.len() == 3));
        assert_eq!(
            norm.formula.brute_force_sat().is_some(),
            phi.brute_force_sat().is_some()
        );
    }

    #[test]
    fn construction_counts() {
        let phi = CnfFormula::from_ints(3, &[&[1, 2, 3], &[-1, -2, -3]]).unwrap();
        let inst = build_eth(&phi).unwrap();
        let m = inst.normalized.formula.clause_count();
        assert_eq!(m, 2);
        assert_eq!(inst.graph.vertex_count(), 3 * 8 + 6 * m);
        assert_eq!(inst.budget, 14 * m);
        assert!(inst.graph.vertices().all(|v| inst.graph.degree(v) <= 5));
        let gadget: Vec<_> = (0..6).map(|i| inst.gadget_base + i).collect();
        let inner = gadget
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| gadget[i + 1..].iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| inst.graph.has_edge(u, v))
            .count();
        assert_eq!(inner, 12);
    }

    #[test]
    fn witness_has_exact_budget() {
        let phi = CnfFormula::from_ints(3, &[&[1, 2, 3], &[-1, -2, -3]]).unwrap();
        let inst = build_eth(&phi).unwrap();
        let sol = eth_witness(&inst, &[true, false, false]).unwrap();
        assert_eq!(sol.cost, inst.budget);
        let h = apply_edits(&inst.graph, &sol.edits);
        assert!(h.is_cluster_graph());
        assert!(matches!(
            eth_witness(&inst, &[true, true, true]),
            Err(Error::UnsatisfiedClause { clause: 2 })
        ));
    }
}
