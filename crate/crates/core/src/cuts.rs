//! Enumeration of all k-cuts, i.e. ordered bipartitions `(V1, V2)` with at
//! most `k` crossing edges, plus the count bounds used to abort early.
//!
//! Enumeration is a depth-first branching over vertices (highest degree
//! first). After each placement a unit-capacity max-flow decides whether the
//! partial sides can still be separated by at most `k` edges; if not, the
//! branch is cut. Every surviving branch therefore ends in at least one
//! emitted cut, which gives polynomial delay.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigUint;

use crate::flow::MinCutChecker;
use crate::graph::{Graph, Vertex};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    side1: VertexSet,
    crossing: usize,
}

impl Cut {
    pub fn new(g: &Graph, side1: VertexSet) -> Self {
        let crossing = g.crossing_edges(&side1);
        Cut { side1, crossing }
    }

    pub fn side1(&self) -> &VertexSet {
        &self.side1
    }

    pub fn side2(&self) -> VertexSet {
        self.side1.complement()
    }

    pub fn crossing(&self) -> usize {
        self.crossing
    }

    /// Bit string of `side1` followed by the crossing count.
    pub fn to_line(&self) -> String {
        format!("{} {}", self.side1.to_bit_string(), self.crossing)
    }
}

/// All k-cuts of a graph, with lookup by `side1`.
#[derive(Clone, Debug)]
pub struct CutIndex {
    k: usize,
    cuts: Vec<Cut>,
    lookup: HashMap<VertexSet, usize>,
}

impl CutIndex {
    pub fn from_cuts(k: usize, cuts: Vec<Cut>) -> Self {
        let mut lookup = HashMap::with_capacity(cuts.len());
        for (i, cut) in cuts.iter().enumerate() {
            assert!(cut.crossing <= k, "cut exceeds k");
            let fresh = lookup.insert(cut.side1.clone(), i).is_none();
            assert!(fresh, "duplicate cut");
        }
        CutIndex { k, cuts, lookup }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn get(&self, index: usize) -> &Cut {
        &self.cuts[index]
    }

    pub fn position(&self, side1: &VertexSet) -> Option<usize> {
        self.lookup.get(side1).copied()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub emitted: u64,
    /// Branch nodes whose flow check passed.
    pub live_nodes: u64,
    /// Branch nodes cut by the flow check.
    pub pruned_nodes: u64,
    /// Live nodes whose subtree emitted nothing. Always zero if the flow
    /// check is exact.
    pub dead_live_nodes: u64,
    pub flow_calls: u64,
}

/// Branching order: descending degree, ties by vertex id.
pub fn branching_order(g: &Graph) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

struct Enumerator<'g, F> {
    graph: &'g Graph,
    k: usize,
    order: Vec<Vertex>,
    side1: VertexSet,
    side2: VertexSet,
    checker: MinCutChecker<'g>,
    stats: EnumStats,
    visit: F,
}

impl<F: FnMut(Cut) -> ControlFlow<()>> Enumerator<'_, F> {
    /// Returns the number of cuts emitted below this node, or `Break`.
    fn descend(&mut self, depth: usize) -> ControlFlow<(), u64> {
        if depth == self.order.len() {
            let crossing = self.graph.crossing_edges(&self.side1);
            debug_assert!(crossing <= self.k);
            self.stats.emitted += 1;
            (self.visit)(Cut {
                side1: self.side1.clone(),
                crossing,
            })?;
            return ControlFlow::Continue(1);
        }
        let v = self.order[depth];
        let mut emitted = 0;
        // V2 first, so the very first cut is (∅, V).
        for into_side1 in [false, true] {
            if into_side1 {
                self.side1.insert(v);
            } else {
                self.side2.insert(v);
            }
            let live = self.checker.min_cut_leq(&self.side1, &self.side2, self.k);
            let below = if live {
                self.stats.live_nodes += 1;
                let below = self.descend(depth + 1);
                if let ControlFlow::Continue(0) = below {
                    self.stats.dead_live_nodes += 1;
                }
                below
            } else {
                self.stats.pruned_nodes += 1;
                ControlFlow::Continue(0)
            };
            if into_side1 {
                self.side1.remove(v);
            } else {
                self.side2.remove(v);
            }
            emitted += below?;
        }
        ControlFlow::Continue(emitted)
    }
}

/// Streams every k-cut of `g` to `visit` exactly once. `visit` may stop the
/// enumeration by returning `Break`.
pub fn for_each_k_cut(g: &Graph, k: usize, visit: impl FnMut(Cut) -> ControlFlow<()>) -> EnumStats {
    let n = g.vertex_count();
    let mut e = Enumerator {
        graph: g,
        k,
        order: branching_order(g),
        side1: VertexSet::empty(n),
        side2: VertexSet::empty(n),
        checker: MinCutChecker::new(g),
        stats: EnumStats::default(),
        visit,
    };
    let _ = e.descend(0);
    e.stats.flow_calls = e.checker.calls;
    e.stats
}

#[derive(Clone, Debug)]
pub enum Enumeration {
    Complete(CutIndex),
    /// More than `cap` cuts exist; enumeration stopped at `cap + 1`.
    Aborted {
        emitted: u64,
    },
}

/// Collects all k-cuts, aborting as soon as more than `cap` are emitted.
/// `cap = None` means uncapped.
pub fn enumerate_k_cuts(g: &Graph, k: usize, cap: Option<u64>) -> (Enumeration, EnumStats) {
    let mut cuts = Vec::new();
    let mut aborted = false;
    let stats = for_each_k_cut(g, k, |cut| {
        cuts.push(cut);
        if cap.is_some_and(|c| cuts.len() as u64 > c) {
            aborted = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    let result = if aborted {
        Enumeration::Aborted {
            emitted: cuts.len() as u64,
        }
    } else {
        Enumeration::Complete(CutIndex::from_cuts(k, cuts))
    };
    (result, stats)
}

/// Upper bound on the number of ordered k-cuts of a YES-instance with
/// `p <= 6k`: `⌈2^(8·√(2pk))⌉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutBound {
    Finite(u64),
    /// Exponent above 63; enumeration runs uncapped.
    Saturated,
}

impl CutBound {
    pub fn as_cap(self) -> Option<u64> {
        match self {
            CutBound::Finite(c) => Some(c),
            CutBound::Saturated => None,
        }
    }
}

/// `⌈2^√radicand⌉`, saturating once the exponent exceeds 63.
fn ceil_pow2_sqrt(radicand: u64) -> CutBound {
    let root = radicand.isqrt();
    if root * root == radicand {
        return if root > 63 {
            CutBound::Saturated
        } else {
            CutBound::Finite(1u64 << root)
        };
    }
    let exponent = (radicand as f64).sqrt();
    if exponent > 63.0 {
        return CutBound::Saturated;
    }
    CutBound::Finite(exponent.exp2().ceil() as u64)
}

/// Bound on k-cuts of a YES-instance: `⌈2^(8√(2pk))⌉`.
pub fn cut_count_bound(p: usize, k: usize) -> CutBound {
    // 8√(2pk) = √(128pk)
    match (p as u64).checked_mul(k as u64).and_then(|x| x.checked_mul(128)) {
        Some(r) => ceil_pow2_sqrt(r),
        None => CutBound::Saturated,
    }
}

/// Bound on k-cuts of a cluster graph with at most `p` clusters: `⌈2^(8√(pk))⌉`.
pub fn cluster_cut_count_bound(p: usize, k: usize) -> CutBound {
    match (p as u64).checked_mul(k as u64).and_then(|x| x.checked_mul(64)) {
        Some(r) => ceil_pow2_sqrt(r),
        None => CutBound::Saturated,
    }
}

fn binomial(n: u64, r: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Exact test of `C(a+b, a) <= 2^(2√(ab))`.
///
/// Raises both sides to a power `q`: with `lo = ⌊q·2√(ab)⌋` and
/// `hi = ⌈q·2√(ab)⌉`, `C^q <= 2^lo` proves the inequality and `C^q > 2^hi`
/// refutes it. Equality can only occur when `C` is a power of two and
/// `4ab` is a perfect square, which is checked directly.
pub fn binomial_bound_holds(a: u64, b: u64) -> bool {
    let c = binomial(a + b, a);
    let radicand = 4 * a * b;
    let root = radicand.isqrt();
    let exact_root = root * root == radicand;
    if exact_root && c.count_ones() == 1 && c.bits() - 1 == root {
        return true;
    }
    let mut q: u64 = 1;
    loop {
        // q·√(4ab) = √(4ab·q²)
        let scaled = BigUint::from(radicand) * BigUint::from(q) * BigUint::from(q);
        let lo = scaled.sqrt();
        let hi = if &lo * &lo == scaled { lo.clone() } else { &lo + 1u32 };
        let lhs = c.pow(q as u32);
        let lo_bits: u64 = lo.try_into().expect("exponent fits u64");
        let hi_bits: u64 = hi.try_into().expect("exponent fits u64");
        if lhs <= BigUint::from(1u32) << lo_bits {
            return true;
        }
        if lhs > BigUint::from(1u32) << hi_bits {
            return false;
        }
        q *= 2;
        assert!(q <= 1 << 20, "undecided after q = {q}");
    }
}

/// Checks `C(a+b, a) <= 2^(2√(ab))` for all `0 <= a, b <= limit`.
pub fn binomial_bound_check(limit: u64) -> bool {
    (0..=limit).all(|a| (0..=limit).all(|b| binomial_bound_holds(a, b)))
}
