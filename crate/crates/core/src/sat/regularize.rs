//! Rewrites a 3-CNF formula into a regular one: every clause has three
//! literals on distinct variables, every variable occurs exactly three times
//! positively and three times negatively, and the variables split into `p`
//! equal parts each of which admits a balanced satisfying assignment
//! whenever the formula is satisfiable.
//!
//! The pipeline, in order:
//! 1. clean up and unit-propagate, then pad 2-literal clauses with a fresh `p`
//!    as `(C ∨ p) ∧ (C ∨ ¬p)`;
//! 2. duplicate every clause, then balance polarities with `(x ∨ q ∨ r)`,
//!    `(x ∨ ¬q ∨ ¬r)` (or the `¬x` forms);
//! 3. triple every clause and replace each variable by an implication cycle
//!    `x_1 → x_2 → … → x_{3d} → x_1`;
//! 4. take three disjoint copies and add triples of filler variables until
//!    the count is divisible by `p`;
//! 5. conjoin a copy with all literals reversed, pairing each variable with
//!    its reversed twin in the same part.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::sat::cnf::{Clause, CnfFormula, Lit};

/// Where a variable of the regularized formula gets its value when an
/// assignment of the input formula is carried over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Equal to input variable `var`, negated if `negated`.
    Original { var: usize, negated: bool },
    /// A fixed value that satisfies every clause it was introduced with.
    Const(bool),
}

impl Origin {
    fn flipped(self) -> Self {
        match self {
            Origin::Original { var, negated } => Origin::Original { var, negated: !negated },
            Origin::Const(b) => Origin::Const(!b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularizeStatus {
    /// Satisfiability is not decided by the pipeline.
    Open,
    /// Unit propagation derived a contradiction; the output is a fixed
    /// unsatisfiable regular formula.
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularizedFormula {
    pub formula: CnfFormula,
    /// `parts[r]` lists the (1-based) variables of part `r`.
    pub parts: Vec<Vec<usize>>,
    /// `origin[v - 1]` for every variable `v` of `formula`.
    pub origin: Vec<Origin>,
    /// Values forced by unit propagation, indexed by input `var - 1`.
    pub fixed: Vec<Option<bool>>,
    pub status: RegularizeStatus,
    pub input_var_count: usize,
}

impl RegularizedFormula {
    pub fn p(&self) -> usize {
        self.parts.len()
    }

    /// Index of the part containing `var`.
    pub fn part_of(&self, var: usize) -> usize {
        let per_part = self.formula.var_count() / self.parts.len();
        let half = self.formula.var_count() / 2;
        let base = if var > half { var - half } else { var };
        (base - 1) / (per_part / 2)
    }

    /// Carries a satisfying assignment of the input over to a satisfying
    /// assignment of the regularized formula that is balanced in every part.
    pub fn extend_assignment(&self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.input_var_count, "assignment length");
        self.origin
            .iter()
            .map(|o| match *o {
                Origin::Original { var, negated } => input[var - 1] != negated,
                Origin::Const(b) => b,
            })
            .collect()
    }

    /// Reads an input assignment back from an assignment of the
    /// regularized formula.
    pub fn restrict_assignment(&self, regular: &[bool]) -> Vec<bool> {
        assert_eq!(regular.len(), self.formula.var_count(), "assignment length");
        let mut out: Vec<Option<bool>> = self.fixed.clone();
        for (i, o) in self.origin.iter().enumerate() {
            if let Origin::Original { var, negated: false } = *o {
                out[var - 1].get_or_insert(regular[i]);
            }
        }
        out.into_iter().map(|v| v.unwrap_or(false)).collect()
    }
}

/// Working formula: clauses plus the origin of every variable.
struct Work {
    clauses: Vec<Clause>,
    origin: Vec<Origin>,
}

impl Work {
    fn var_count(&self) -> usize {
        self.origin.len()
    }

    fn fresh(&mut self, origin: Origin) -> usize {
        self.origin.push(origin);
        self.origin.len()
    }

    fn counts(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.var_count()];
        for lit in self.clauses.iter().flatten() {
            if lit.positive {
                counts[lit.var - 1].0 += 1;
            } else {
                counts[lit.var - 1].1 += 1;
            }
        }
        counts
    }
}

/// Removes repeated literals; `None` for tautologies.
fn clean_clause(clause: &[Lit]) -> Option<Clause> {
    let mut out: Clause = Vec::with_capacity(clause.len());
    for &lit in clause {
        if out.contains(&lit.negate()) {
            return None;
        }
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    Some(out)
}

/// Every sign pattern on three variables: unsatisfiable, and each variable
/// occurs four times with each polarity.
fn unsat_constant(vars: [usize; 3]) -> Vec<Clause> {
    (0..8u8)
        .map(|signs| {
            vars.iter()
                .enumerate()
                .map(|(i, &v)| Lit {
                    var: v,
                    positive: signs >> i & 1 == 0,
                })
                .collect()
        })
        .collect()
}

/// Step 1. Returns the forced values and whether a contradiction occurred.
fn propagate_and_pad(phi: &CnfFormula, work: &mut Work) -> Result<(Vec<Option<bool>>, RegularizeStatus)> {
    let mut fixed = vec![None; phi.var_count()];
    let mut clauses: Vec<Clause> = Vec::new();
    for (i, clause) in phi.clauses().iter().enumerate() {
        if let Some(c) = clean_clause(clause) {
            if c.len() > 3 {
                return Err(Error::InvalidInstance(format!(
                    "clause {} has {} distinct literals; expected at most 3",
                    i + 1,
                    c.len()
                )));
            }
            clauses.push(c);
        }
    }
    while let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) {
        fixed[unit.var - 1] = Some(unit.positive);
        let mut next = Vec::with_capacity(clauses.len());
        for clause in clauses {
            if clause.contains(&unit) {
                continue;
            }
            let reduced: Clause = clause.into_iter().filter(|&l| l != unit.negate()).collect();
            if reduced.is_empty() {
                let vars = [
                    work.fresh(Origin::Const(false)),
                    work.fresh(Origin::Const(false)),
                    work.fresh(Origin::Const(false)),
                ];
                work.clauses = unsat_constant(vars);
                return Ok((fixed, RegularizeStatus::Unsat));
            }
            next.push(reduced);
        }
        clauses = next;
    }
    if clauses.iter().any(|c| c.len() == 2) {
        let pad = work.fresh(Origin::Const(false));
        let mut padded = Vec::with_capacity(clauses.len() * 2);
        for clause in clauses {
            if clause.len() == 2 {
                let mut with_pos = clause.clone();
                with_pos.push(Lit::pos(pad));
                let mut with_neg = clause;
                with_neg.push(Lit::neg(pad));
                padded.push(with_pos);
                padded.push(with_neg);
            } else {
                padded.push(clause);
            }
        }
        clauses = padded;
    }
    work.clauses = clauses;
    Ok((fixed, RegularizeStatus::Open))
}

/// Step 2: even counts, then equal positive and negative counts.
fn balance_polarities(work: &mut Work) {
    let doubled: Vec<Clause> = work.clauses.iter().chain(work.clauses.iter()).cloned().collect();
    work.clauses = doubled;
    let counts = work.counts();
    if counts.iter().all(|&(pos, neg)| pos == neg) {
        return;
    }
    let q = work.fresh(Origin::Const(true));
    let r = work.fresh(Origin::Const(false));
    for (i, &(pos, neg)) in counts.iter().enumerate() {
        let x = i + 1;
        let lit = Lit {
            var: x,
            positive: pos < neg,
        };
        for _ in 0..pos.abs_diff(neg) / 2 {
            work.clauses.push(vec![lit, Lit::pos(q), Lit::pos(r)]);
            work.clauses.push(vec![lit, Lit::neg(q), Lit::neg(r)]);
        }
    }
}

/// Step 3: every variable becomes an implication cycle of `3d` variables,
/// each used once per polarity by the original clauses.
fn implication_cycles(work: &Work) -> Work {
    let tripled: Vec<&Clause> = (0..3).flat_map(|_| work.clauses.iter()).collect();
    let mut counts = vec![0usize; work.var_count()];
    for lit in tripled.iter().flat_map(|c| c.iter()) {
        counts[lit.var - 1] += 1;
    }
    let mut out = Work {
        clauses: Vec::new(),
        origin: Vec::new(),
    };
    // First new id of each variable's cycle, and the implication clauses.
    let mut first_x = vec![0usize; work.var_count()];
    let mut implications = Vec::new();
    for (i, &total) in counts.iter().enumerate() {
        if total == 0 {
            continue;
        }
        debug_assert_eq!(total % 6, 0);
        let d = total / 6;
        let xs: Vec<usize> = (0..3 * d).map(|_| out.fresh(work.origin[i])).collect();
        let ys: Vec<usize> = (0..d).map(|_| out.fresh(Origin::Const(false))).collect();
        first_x[i] = xs[0];
        for (j, &x) in xs.iter().enumerate() {
            let next = xs[(j + 1) % xs.len()];
            let y = ys[j / 3];
            implications.push(vec![Lit::neg(x), Lit::pos(next), Lit::pos(y)]);
            implications.push(vec![Lit::neg(x), Lit::pos(next), Lit::neg(y)]);
        }
    }
    let mut seen_pos = vec![0usize; work.var_count()];
    let mut seen_neg = vec![0usize; work.var_count()];
    for clause in tripled {
        let mapped = clause
            .iter()
            .map(|lit| {
                let seen = if lit.positive { &mut seen_pos } else { &mut seen_neg };
                let slot = seen[lit.var - 1];
                seen[lit.var - 1] += 1;
                Lit {
                    var: first_x[lit.var - 1] + slot,
                    positive: lit.positive,
                }
            })
            .collect();
        out.clauses.push(mapped);
    }
    out.clauses.extend(implications);
    out
}

/// Step 4: three disjoint copies, then filler triples until `p` divides the
/// variable count.
fn pad_to_multiple(work: &Work, p: usize) -> Work {
    let n = work.var_count();
    let mut out = Work {
        clauses: Vec::with_capacity(work.clauses.len() * 3),
        origin: Vec::with_capacity(n * 3),
    };
    for copy in 0..3 {
        out.origin.extend_from_slice(&work.origin);
        let shift = copy * n;
        out.clauses.extend(work.clauses.iter().map(|c| {
            c.iter()
                .map(|l| Lit {
                    var: l.var + shift,
                    positive: l.positive,
                })
                .collect::<Clause>()
        }));
    }
    while !out.var_count().is_multiple_of(p) {
        let vars = [
            out.fresh(Origin::Const(true)),
            out.fresh(Origin::Const(true)),
            out.fresh(Origin::Const(true)),
        ];
        // All sign patterns except all-positive and all-negative.
        for clause in unsat_constant(vars).into_iter().skip(1).take(6) {
            out.clauses.push(clause);
        }
    }
    out
}

/// Step 5: `Φ ∧ reversed copy`.
fn add_reversed_copy(work: &Work) -> Work {
    let n = work.var_count();
    let mut origin = work.origin.clone();
    origin.extend(work.origin.iter().map(|o| o.flipped()));
    let mut clauses = work.clauses.clone();
    clauses.extend(work.clauses.iter().map(|c| {
        c.iter()
            .map(|l| Lit {
                var: l.var + n,
                positive: !l.positive,
            })
            .collect::<Clause>()
    }));
    Work { clauses, origin }
}

/// Regularizes `phi` for `p` parts. Requires `epsilon · p <= n`.
pub fn regularize(phi: &CnfFormula, p: usize, epsilon: Ratio<u64>) -> Result<RegularizedFormula> {
    if p == 0 {
        return Err(Error::InvalidInstance("p must be at least 1".into()));
    }
    if *epsilon.numer() == 0 {
        return Err(Error::InvalidInstance("epsilon must be positive".into()));
    }
    let n = phi.var_count() as u128;
    if *epsilon.numer() as u128 * p as u128 > n * *epsilon.denom() as u128 {
        return Err(Error::Hypothesis(format!(
            "epsilon·p <= n violated: {}·{p} > {n}",
            epsilon
        )));
    }
    let mut work = Work {
        clauses: Vec::new(),
        origin: (1..=phi.var_count())
            .map(|var| Origin::Original { var, negated: false })
            .collect(),
    };
    let (fixed, status) = propagate_and_pad(phi, &mut work)?;
    balance_polarities(&mut work);
    let work = implication_cycles(&work);
    let work = pad_to_multiple(&work, p);
    let half = work.var_count();
    let work = add_reversed_copy(&work);

    let per_part = half / p;
    let parts = (0..p)
        .map(|r| {
            let block = r * per_part + 1..=(r + 1) * per_part;
            block.clone().chain(block.map(|v| v + half)).collect()
        })
        .collect();
    Ok(RegularizedFormula {
        formula: CnfFormula::new(work.origin.len(), work.clauses)?,
        parts,
        origin: work.origin,
        fixed,
        status,
        input_var_count: phi.var_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Ratio<u64> {
        Ratio::from_integer(1)
    }

    #[test]
    fn single_clause() {
        let phi = CnfFormula::from_ints(3, &[&[1, 2, 3]]).unwrap();
        let reg = regularize(&phi, 1, one()).unwrap();
        assert_eq!(reg.status, RegularizeStatus::Open);
        for (pos, neg) in reg.formula.occurrences() {
            assert_eq!((pos, neg), (3, 3));
        }
        assert_eq!(reg.formula.clause_count(), 2 * reg.formula.var_count());
        let a = reg.extend_assignment(&[true, false, false]);
        assert!(reg.formula.satisfies(&a));
        assert_eq!(reg.restrict_assignment(&a), vec![true, false, false]);
    }

    #[test]
    fn contradiction_by_propagation() {
        let phi = CnfFormula::from_ints(1, &[&[1], &[-1]]).unwrap();
        let reg = regularize(&phi, 1, one()).unwrap();
        assert_eq!(reg.status, RegularizeStatus::Unsat);
        for (pos, neg) in reg.formula.occurrences() {
            assert_eq!((pos, neg), (3, 3));
        }
    }

    #[test]
    fn parts_pair_each_variable_with_its_reversed_twin() {
        let phi = CnfFormula::from_ints(4, &[&[1, -2, 3], &[-1, 4], &[2, 3, -4]]).unwrap();
        let reg = regularize(&phi, 4, one()).unwrap();
        let n = reg.formula.var_count();
        assert_eq!(n % 4, 0);
        for (r, part) in reg.parts.iter().enumerate() {
            assert_eq!(part.len(), n / 4);
            for &v in part {
                assert_eq!(reg.part_of(v), r);
            }
        }
    }

    #[test]
    fn hypothesis_is_checked() {
        let phi = CnfFormula::from_ints(2, &[&[1, 2]]).unwrap();
        assert!(matches!(regularize(&phi, 3, one()), Err(Error::Hypothesis(_))));
        assert!(regularize(&phi, 4, Ratio::new(1, 2)).is_ok());
    }
}
