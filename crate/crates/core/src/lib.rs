//! Exact p-Cluster Editing.
//!
//! Given a graph `G`, a target cluster count `p` and a budget `k`, decide
//! whether at most `k` edge additions/deletions turn `G` into a disjoint
//! union of exactly `p` cliques, and produce such an edit set.
//!
//! The solver reduces `p` to at most `6k` by removing isolated cliques,
//! enumerates all cuts crossed by at most `k` edges (aborting once their
//! number exceeds `2^(8√(2pk))`), and runs a layered shortest-path search
//! over those cuts.
//!
//! ```
//! use pcluster::{format::parse_graph, preprocess::Instance, dp::solve_exact_p};
//!
//! let g = parse_graph("p cep 3 2\ne 1 2\ne 2 3\n").unwrap();
//! let sol = solve_exact_p(&Instance::exact(g, 2, 1).unwrap()).unwrap().unwrap();
//! assert_eq!(sol.cost, 1);
//! ```
//!
//! [`oracle`] holds brute-force reference implementations and [`sat`] the
//! SAT-based hard-instance generators.

pub mod clustering;
pub mod cuts;
pub mod dp;
pub mod error;
pub mod flow;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod preprocess;
pub mod sat;
pub mod vertex_set;

pub use clustering::{apply_edits, clustering_cost, clustering_to_edit_set, Clustering, EditSet};
pub use dp::{solve_at_most_p, solve_exact_p, verify_solution, Solution};
pub use error::{Error, Result};
pub use graph::{edit_distance, Graph};
pub use preprocess::{Instance, Mode};
pub use vertex_set::VertexSet;

/// The guide's code samples, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    mod preprocessing {}
    #[doc = include_str!("../../../book/src/cuts.md")]
    mod cuts {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
