//! Reduction from 3-CNF-SAT to p-Cluster Editing with `6p` target clusters.
//!
//! For each part `r` of the regularized formula there are six cliques
//! `Q_1^r..Q_6^r` of size `L`. Each variable `x` gets a 6-cycle
//! `w_{1,2}^x, …, w_{6,1}^x` with `w_{α,α+1}^x` joined to all of `Q_α^{r(x)}`
//! and `Q_{α+1}^{r(x)}`. Each clause gets nine vertices `s_{β,ξ}` wired to
//! one cycle vertex per literal and to one (`ξ = 1`) or two (`ξ > 1`)
//! cliques per literal. All subscripts are cyclic in `1..=6`.
//!
//! `L` grows linearly with `n'/p`, so at the faithful constant the graph
//! has hundreds of thousands of vertices even for tiny formulas. The graph is
//! therefore kept in compressed form: every clique is one weighted node and
//! adjacency between nodes is all-or-nothing. [`BlockGraph::to_graph`]
//! materializes it when it is small enough.

use num_rational::Ratio;
use serde::Serialize;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sat::cnf::CnfFormula;
use crate::sat::regularize::{regularize, RegularizedFormula};

/// The constant in `L = c · (1 + n'/(pε))` used by the construction.
pub const FAITHFUL_L_FACTOR: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum NodeRole {
    /// `Q_alpha^part`.
    Clique { part: usize, alpha: usize },
    /// `w_{alpha,alpha+1}^var`.
    Cycle { var: usize, alpha: usize },
    /// `s_{beta,xi}^clause`.
    Clause { clause: usize, beta: usize, xi: usize },
}

/// A graph whose nodes are either single vertices or cliques of a given
/// weight; two nodes are either fully joined or not joined at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGraph {
    weights: Vec<u64>,
    roles: Vec<NodeRole>,
    adj: Vec<Vec<usize>>,
}

impl BlockGraph {
    fn new() -> Self {
        BlockGraph {
            weights: Vec::new(),
            roles: Vec::new(),
            adj: Vec::new(),
        }
    }

    fn add_node(&mut self, weight: u64, role: NodeRole) -> usize {
        self.weights.push(weight);
        self.roles.push(role);
        self.adj.push(Vec::new());
        self.weights.len() - 1
    }

    fn join(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            assert_eq!(before, list.len(), "duplicate node adjacency");
        }
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, node: usize) -> u64 {
        self.weights[node]
    }

    pub fn role(&self, node: usize) -> NodeRole {
        self.roles[node]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn node_neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn vertex_count(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn edge_count(&self) -> u128 {
        let inside: u128 = self.weights.iter().map(|&w| pairs(w)).sum();
        let between: u128 = (0..self.node_count())
            .flat_map(|a| self.adj[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .map(|(a, b)| self.weights[a] as u128 * self.weights[b] as u128)
            .sum();
        inside + between
    }

    /// First materialized vertex of each node.
    pub fn offsets(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.node_count());
        let mut next = 0;
        for &w in &self.weights {
            out.push(next);
            next += w;
        }
        out
    }

    /// Expands every node into its vertices. Fails if the result would
    /// exceed `max_edges` edges.
    pub fn to_graph(&self, max_edges: u128) -> Result<Graph> {
        let m = self.edge_count();
        if m > max_edges {
            return Err(Error::TooLarge(format!("{m} edges exceed the limit of {max_edges}")));
        }
        let offsets = self.offsets();
        let range = |node: usize| offsets[node] as usize..(offsets[node] + self.weights[node]) as usize;
        let mut edges = Vec::with_capacity(m as usize);
        for a in 0..self.node_count() {
            for u in range(a) {
                for v in u + 1..range(a).end {
                    edges.push((u, v));
                }
            }
            for &b in self.adj[a].iter().filter(|&&b| b > a) {
                for u in range(a) {
                    edges.extend(range(b).map(|v| (u, v)));
                }
            }
        }
        Graph::from_edges(self.vertex_count() as usize, edges)
    }

    /// Expands a per-node cluster labelling to a per-vertex clustering.
    pub fn expand_clustering(&self, node_cluster: &[usize]) -> Result<Clustering> {
        let mut assignment = Vec::with_capacity(self.vertex_count() as usize);
        for (node, &c) in node_cluster.iter().enumerate() {
            assignment.extend(std::iter::repeat_n(c, self.weights[node] as usize));
        }
        Clustering::new(assignment)
    }
}

fn pairs(w: u64) -> u128 {
    let w = w as u128;
    w * w.saturating_sub(1) / 2
}

/// Number of edits turning the block graph into the cluster graph where
/// node `i` lies in cluster `node_cluster[i]` (clique nodes are never split).
pub fn block_clustering_cost(g: &BlockGraph, node_cluster: &[usize]) -> u128 {
    assert_eq!(node_cluster.len(), g.node_count());
    let clusters = node_cluster.iter().copied().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0u128; clusters];
    for (node, &c) in node_cluster.iter().enumerate() {
        sizes[c] += g.weights[node] as u128;
    }
    let mut cut = 0u128;
    let mut kept = 0u128;
    for a in 0..g.node_count() {
        kept += pairs(g.weights[a]);
        for &b in g.adj[a].iter().filter(|&&b| b > a) {
            let w = g.weights[a] as u128 * g.weights[b] as u128;
            if node_cluster[a] == node_cluster[b] {
                kept += w;
            } else {
                cut += w;
            }
        }
    }
    let inside_pairs: u128 = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
    cut + (inside_pairs - kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultivariateParams {
    pub p: usize,
    pub k: u64,
    pub epsilon: Ratio<u64>,
    /// [`FAITHFUL_L_FACTOR`] unless deliberately scaled down for testing.
    pub l_factor: u64,
}

impl MultivariateParams {
    pub fn faithful(p: usize, k: u64, epsilon: Ratio<u64>) -> Self {
        MultivariateParams {
            p,
            k,
            epsilon,
            l_factor: FAITHFUL_L_FACTOR,
        }
    }

    pub fn is_faithful(&self) -> bool {
        self.l_factor == FAITHFUL_L_FACTOR
    }
}

/// The summands of the editing budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetTerms {
    pub q_q: u128,
    pub q_ws: u128,
    pub ws_ws_all: u128,
    pub ws_ws_exist: u128,
    pub w_w_save: u128,
    pub w_s_save: u128,
}

impl BudgetTerms {
    pub fn total(&self) -> u128 {
        self.q_q + self.q_ws + self.ws_ws_all + self.ws_ws_exist - 2 * self.w_w_save - 2 * self.w_s_save
    }
}

pub fn budget_terms(n_prime: usize, m_prime: usize, p: usize, l: u64) -> Result<BudgetTerms> {
    let (n, m, p, l) = (n_prime as u128, m_prime as u128, p as u128, l as u128);
    if (6 * n + 9 * m) % (6 * p) != 0 {
        return Err(Error::InvalidInstance(format!(
            "cluster share (6n'+9m')/(6p) = {}/{} is not integral",
            6 * n + 9 * m,
            6 * p
        )));
    }
    let per_cluster = (6 * n + 9 * m) / (6 * p);
    Ok(BudgetTerms {
        q_q: 0,
        q_ws: (6 * n + 36 * m) * l,
        ws_ws_all: 6 * p * (per_cluster * per_cluster.saturating_sub(1) / 2),
        ws_ws_exist: 6 * n + 27 * m,
        w_w_save: 3 * n,
        w_s_save: 9 * m,
    })
}

/// `L = ⌈l_factor · (1 + n'/(p·ε'))⌉` with `ε' = min(ε, 1)`.
pub fn clique_size(n_prime: usize, p: usize, epsilon: Ratio<u64>, l_factor: u64) -> u64 {
    let eps = epsilon.min(Ratio::from_integer(1));
    let (a, b) = (*eps.numer() as u128, *eps.denom() as u128);
    let num = l_factor as u128 * (p as u128 * a + n_prime as u128 * b);
    let den = p as u128 * a;
    num.div_ceil(den) as u64
}

/// Checks `k >= εp`, `n >= εp`, `n <= √(pk)/ε` and `m <= √(pk)/ε` exactly.
pub fn check_hypotheses(phi: &CnfFormula, params: &MultivariateParams) -> Result<()> {
    let (a, b) = (*params.epsilon.numer() as u128, *params.epsilon.denom() as u128);
    if a == 0 {
        return Err(Error::Hypothesis("epsilon must be positive".into()));
    }
    let p = params.p as u128;
    let k = params.k as u128;
    let n = phi.var_count() as u128;
    let m = phi.clause_count() as u128;
    let eps = params.epsilon;
    if k * b < a * p {
        return Err(Error::Hypothesis(format!("k >= epsilon·p violated: {k} < {eps}·{p}")));
    }
    if n * b < a * p {
        return Err(Error::Hypothesis(format!("n >= epsilon·p violated: {n} < {eps}·{p}")));
    }
    if n * n * a * a > p * k * b * b {
        return Err(Error::Hypothesis(format!(
            "n <= sqrt(p·k)/epsilon violated: n = {n}, p·k = {}, epsilon = {eps}",
            p * k
        )));
    }
    if m * m * a * a > p * k * b * b {
        return Err(Error::Hypothesis(format!(
            "m <= sqrt(p·k)/epsilon violated: m = {m}, p·k = {}, epsilon = {eps}",
            p * k
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MultivariateInstance {
    pub regularized: RegularizedFormula,
    pub params: MultivariateParams,
    pub l: u64,
    pub graph: BlockGraph,
    pub terms: BudgetTerms,
    pub budget: u128,
    /// Target cluster count, `6p`.
    pub clusters: usize,
    w_base: usize,
    s_base: usize,
}

/// `1..=6` cyclic index.
fn cyc6(i: i64) -> usize {
    ((i - 1).rem_euclid(6) + 1) as usize
}

/// `1..=3` cyclic index.
fn cyc3(i: usize) -> usize {
    (i - 1) % 3 + 1
}

impl MultivariateInstance {
    pub fn clique_node(&self, part: usize, alpha: usize) -> usize {
        6 * (part - 1) + alpha - 1
    }

    /// Node of `w_{alpha,alpha+1}^var`.
    pub fn cycle_node(&self, var: usize, alpha: usize) -> usize {
        self.w_base + 6 * (var - 1) + alpha - 1
    }

    pub fn clause_node(&self, clause: usize, beta: usize, xi: usize) -> usize {
        self.s_base + 9 * (clause - 1) + 3 * (beta - 1) + xi - 1
    }

    /// 1-based part of a variable.
    pub fn part(&self, var: usize) -> usize {
        self.regularized.part_of(var) + 1
    }

    pub fn n_prime(&self) -> usize {
        self.regularized.formula.var_count()
    }

    pub fn m_prime(&self) -> usize {
        self.regularized.formula.clause_count()
    }

    /// Number of single-vertex nodes joined to a clique node.
    pub fn attached_count(&self, part: usize, alpha: usize) -> usize {
        let node = self.clique_node(part, alpha);
        self.graph
            .node_neighbors(node)
            .iter()
            .filter(|&&v| self.graph.weight(v) == 1)
            .count()
    }
}

pub fn build_multivariate(phi: &CnfFormula, params: MultivariateParams) -> Result<MultivariateInstance> {
    if params.p == 0 {
        return Err(Error::InvalidInstance("p must be at least 1".into()));
    }
    if params.l_factor == 0 {
        return Err(Error::InvalidInstance("L factor must be positive".into()));
    }
    check_hypotheses(phi, &params)?;
    let regularized = regularize(phi, params.p, params.epsilon)?;
    let formula = &regularized.formula;
    let (n_prime, m_prime, p) = (formula.var_count(), formula.clause_count(), params.p);
    let l = clique_size(n_prime, p, params.epsilon, params.l_factor);
    let terms = budget_terms(n_prime, m_prime, p, l)?;

    let mut graph = BlockGraph::new();
    for part in 1..=p {
        for alpha in 1..=6 {
            graph.add_node(l, NodeRole::Clique { part, alpha });
        }
    }
    let w_base = graph.node_count();
    for var in 1..=n_prime {
        for alpha in 1..=6 {
            graph.add_node(1, NodeRole::Cycle { var, alpha });
        }
    }
    let s_base = graph.node_count();
    for clause in 1..=m_prime {
        for beta in 1..=3 {
            for xi in 1..=3 {
                graph.add_node(1, NodeRole::Clause { clause, beta, xi });
            }
        }
    }
    let mut inst = MultivariateInstance {
        budget: terms.total(),
        regularized,
        params,
        l,
        graph,
        terms,
        clusters: 6 * p,
        w_base,
        s_base,
    };

    let mut joins = Vec::new();
    for var in 1..=n_prime {
        let r = inst.part(var);
        for alpha in 1..=6 {
            let w = inst.cycle_node(var, alpha);
            joins.push((w, inst.cycle_node(var, cyc6(alpha as i64 + 1))));
            joins.push((w, inst.clique_node(r, alpha)));
            joins.push((w, inst.clique_node(r, cyc6(alpha as i64 + 1))));
        }
    }
    for (c, clause) in inst.regularized.formula.clauses().iter().enumerate() {
        for beta in 1..=3i64 {
            for xi in 1..=3 {
                let s = inst.clause_node(c + 1, beta as usize, xi);
                for (eta0, lit) in clause.iter().enumerate() {
                    let eta = eta0 as i64 + 1;
                    let r = inst.part(lit.var);
                    let sgn = lit.positive as i64;
                    joins.push((s, inst.cycle_node(lit.var, cyc6(2 * beta + 2 * eta - 3))));
                    if xi == 1 {
                        joins.push((s, inst.clique_node(r, cyc6(2 * beta + 2 * eta - 2 - sgn))));
                    } else {
                        joins.push((s, inst.clique_node(r, cyc6(2 * beta + 2 * eta - 3))));
                        joins.push((s, inst.clique_node(r, cyc6(2 * beta + 2 * eta - 2))));
                    }
                }
            }
        }
    }
    for (a, b) in joins {
        inst.graph.join(a, b);
    }
    inst.graph.finish();
    Ok(inst)
}

/// The clustering built from a satisfying, per-part balanced assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivariateWitness {
    /// Cluster of every node; cluster `6(r-1) + (α-1)` is `K_α^r`.
    pub node_cluster: Vec<usize>,
    pub cost: u128,
    pub cluster_sizes: Vec<u64>,
}

/// Builds the witness clustering for `assignment`, an assignment of the
/// regularized formula (see [`RegularizedFormula::extend_assignment`]).
pub fn multivariate_witness(inst: &MultivariateInstance, assignment: &[bool]) -> Result<MultivariateWitness> {
    let formula = &inst.regularized.formula;
    if assignment.len() != formula.var_count() {
        return Err(Error::AssignmentLength {
            expected: formula.var_count(),
            got: assignment.len(),
        });
    }
    if let Some(c) = formula.first_falsified(assignment) {
        return Err(Error::UnsatisfiedClause { clause: c + 1 });
    }
    for (r, part) in inst.regularized.parts.iter().enumerate() {
        let trues = part.iter().filter(|&&v| assignment[v - 1]).count();
        let falses = part.len() - trues;
        if trues != falses {
            return Err(Error::UnbalancedPart {
                part: r + 1,
                trues,
                falses,
            });
        }
    }
    let phi = |var: usize| assignment[var - 1] as i64;
    let cluster = |r: usize, alpha: usize| 6 * (r - 1) + alpha - 1;
    let mut node_cluster = vec![usize::MAX; inst.graph.node_count()];
    for r in 1..=inst.params.p {
        for alpha in 1..=6 {
            node_cluster[inst.clique_node(r, alpha)] = cluster(r, alpha);
        }
    }
    for var in 1..=formula.var_count() {
        let r = inst.part(var);
        // True variables go to odd-indexed clusters, false ones to even.
        let parity = phi(var) as usize;
        for alpha in 1..=6 {
            let target = if alpha % 2 == parity {
                alpha
            } else {
                cyc6(alpha as i64 + 1)
            };
            node_cluster[inst.cycle_node(var, alpha)] = cluster(r, target);
        }
    }
    for (c, clause) in formula.clauses().iter().enumerate() {
        let first_true = clause
            .iter()
            .position(|l| l.eval(assignment))
            .expect("clause satisfied")
            + 1;
        for beta in 1..=3 {
            for xi in 1..=3 {
                let eta = cyc3(first_true + xi - 1);
                let var = clause[eta - 1].var;
                let alpha = cyc6(2 * beta as i64 + 2 * eta as i64 - 2 - phi(var));
                node_cluster[inst.clause_node(c + 1, beta, xi)] = cluster(inst.part(var), alpha);
            }
        }
    }
    debug_assert!(node_cluster.iter().all(|&c| c != usize::MAX));
    let mut cluster_sizes = vec![0u64; inst.clusters];
    for (node, &c) in node_cluster.iter().enumerate() {
        cluster_sizes[c] += inst.graph.weight(node);
    }
    Ok(MultivariateWitness {
        cost: block_clustering_cost(&inst.graph, &node_cluster),
        node_cluster,
        cluster_sizes,
    })
}
