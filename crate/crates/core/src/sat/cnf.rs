//! CNF formulas, DIMACS I/O and brute-force satisfiability.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A literal over a 1-based variable id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    /// From a DIMACS integer (`-3` is `¬x3`).
    pub fn from_dimacs(x: i64) -> Self {
        assert!(x != 0, "0 is not a literal");
        Lit {
            var: x.unsigned_abs() as usize,
            positive: x > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn negate(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Truth value under `assignment` (indexed by `var - 1`).
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] == self.positive
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub type Clause = Vec<Lit>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(var_count: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidInstance(format!("clause {} is empty", i + 1)));
            }
            if let Some(lit) = clause.iter().find(|l| l.var == 0 || l.var > var_count) {
                return Err(Error::InvalidInstance(format!(
                    "clause {} uses variable {} outside 1..={var_count}",
                    i + 1,
                    lit.var
                )));
            }
        }
        Ok(CnfFormula { var_count, clauses })
    }

    /// From DIMACS-style integer clauses.
    pub fn from_ints(var_count: usize, clauses: &[&[i64]]) -> Result<Self> {
        Self::new(
            var_count,
            clauses
                .iter()
                .map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect())
                .collect(),
        )
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `(positive, negative)` occurrence counts, indexed by `var - 1`.
    pub fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.var_count];
        for lit in self.clauses.iter().flatten() {
            let slot = &mut counts[lit.var - 1];
            if lit.positive {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
        counts
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        self.first_falsified(assignment).is_none()
    }

    /// Index of the first clause that `assignment` falsifies.
    pub fn first_falsified(&self, assignment: &[bool]) -> Option<usize> {
        assert_eq!(assignment.len(), self.var_count, "assignment length");
        self.clauses.iter().position(|c| !c.iter().any(|l| l.eval(assignment)))
    }

    /// Exhaustive search; the first satisfying assignment in binary counting
    /// order (variable 1 is the lowest bit).
    pub fn brute_force_sat(&self) -> Option<Vec<bool>> {
        assert!(self.var_count <= 24, "brute force limited to 24 variables");
        (0u32..1 << self.var_count)
            .map(|mask| (0..self.var_count).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.satisfies(a))
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses DIMACS CNF: `c` comments, a `p cnf <vars> <clauses>` header, and
/// clauses as 0-terminated integer lists (which may span lines).
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Clause = Vec::new();
    let mut last_line = 0;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        last_line = line;
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(parse_error(line, "duplicate header"));
            }
            let tokens: Vec<_> = trimmed.split_whitespace().collect();
            if tokens.len() != 4 || tokens[1] != "cnf" {
                return Err(parse_error(line, "expected `p cnf <vars> <clauses>`"));
            }
            let n = tokens[2]
                .parse()
                .map_err(|_| parse_error(line, format!("invalid variable count `{}`", tokens[2])))?;
            let m = tokens[3]
                .parse()
                .map_err(|_| parse_error(line, format!("invalid clause count `{}`", tokens[3])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_error(line, "clause before header"))?;
        for token in trimmed.split_whitespace() {
            let x: i64 = token
                .parse()
                .map_err(|_| parse_error(line, format!("invalid literal `{token}`")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(parse_error(line, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > n {
                    return Err(parse_error(line, format!("variable {} outside 1..={n}", x.abs())));
                }
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_error(0, "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(parse_error(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(parse_error(
            0,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses)
}

pub fn write_dimacs(phi: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", phi.var_count, phi.clauses.len()).unwrap();
    for clause in &phi.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses an assignment: whitespace-separated signed variable ids, with an
/// optional leading `v` per line and an optional terminating `0`. Every
/// variable in `1..=var_count` must appear exactly once.
pub fn parse_assignment(text: &str, var_count: usize) -> Result<Vec<bool>> {
    let mut values: Vec<Option<bool>> = vec![None; var_count];
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let body = trimmed.strip_prefix('v').unwrap_or(trimmed);
        for token in body.split_whitespace() {
            let x: i64 = token
                .parse()
                .map_err(|_| parse_error(line, format!("invalid literal `{token}`")))?;
            if x == 0 {
                continue;
            }
            let lit = Lit::from_dimacs(x);
            if lit.var > var_count {
                return Err(parse_error(
                    line,
                    format!("variable {} outside 1..={var_count}", lit.var),
                ));
            }
            if values[lit.var - 1].replace(lit.positive).is_some() {
                return Err(parse_error(line, format!("variable {} assigned twice", lit.var)));
            }
        }
    }
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| parse_error(0, format!("variable {} not assigned", i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c tiny\np cnf 3 2\n1 -2 3 0\n-1\n2 0\n";
        let phi = parse_dimacs(text).unwrap();
        assert_eq!(phi.clause_count(), 2);
        assert_eq!(phi.clauses()[1], vec![Lit::neg(1), Lit::pos(2)]);
        let written = write_dimacs(&phi);
        assert_eq!(written, "p cnf 3 2\n1 -2 3 0\n-1 2 0\n");
        assert_eq!(parse_dimacs(&written).unwrap(), phi);
    }

    #[test]
    fn dimacs_errors() {
        for (text, line) in [
            ("p cnf 2 1\n1 3 0\n", 2),
            ("1 2 0\n", 1),
            ("p cnf 2 1\n1 x 0\n", 2),
            ("p cnf 2 1\n0\n", 2),
            ("p cnf 2 1\n1 2\n", 2),
        ] {
            match parse_dimacs(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn brute_force() {
        let phi = CnfFormula::from_ints(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(phi.brute_force_sat(), None);
        let phi = CnfFormula::from_ints(3, &[&[1, 2, 3], &[-1, -2], &[-3]]).unwrap();
        let a = phi.brute_force_sat().unwrap();
        assert!(phi.satisfies(&a));
        assert_eq!(phi.first_falsified(&[false, false, false]), Some(0));
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("v 1 -2\nv 3 0\n", 3).unwrap(), vec![true, false, true]);
        assert!(parse_assignment("1 -2", 3).is_err());
        assert!(parse_assignment("1 -1 2", 2).is_err());
    }
}
