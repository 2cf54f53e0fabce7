//! JSON and text renderings of solver results. Vertex ids are 1-based,
//! matching the graph file format.

use pcluster::dp::{Solution, SolveStats};
use pcluster::{Graph, Mode};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct StatsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuts_enumerated: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_states: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules_applied: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<bool>,
    /// Only with `--timing`, so default output stays reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl StatsReport {
    pub fn from_solver(stats: &SolveStats) -> Self {
        StatsReport {
            cuts_enumerated: Some(stats.cuts_enumerated),
            dp_states: Some(stats.dp_states),
            rules_applied: Some(stats.rules_applied),
            aborted: Some(stats.aborted),
            wall_time_ms: None,
        }
    }

    /// The oracle has no solver statistics.
    pub fn empty() -> Self {
        StatsReport {
            cuts_enumerated: None,
            dp_states: None,
            rules_applied: None,
            aborted: None,
            wall_time_ms: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub command: &'static str,
    pub answer: &'static str,
    pub mode: Mode,
    pub p: usize,
    pub k: usize,
    pub cost: Option<usize>,
    pub clusters: Option<Vec<Vec<usize>>>,
    pub additions: Option<Vec<[usize; 2]>>,
    pub deletions: Option<Vec<[usize; 2]>>,
    pub stats: StatsReport,
}

fn one_based(pairs: Vec<(usize, usize)>) -> Vec<[usize; 2]> {
    pairs.into_iter().map(|(u, v)| [u + 1, v + 1]).collect()
}

impl SolveReport {
    pub fn new(
        command: &'static str,
        g: &Graph,
        mode: Mode,
        p: usize,
        k: usize,
        solution: Option<&Solution>,
        stats: StatsReport,
    ) -> Self {
        let (cost, clusters, additions, deletions) = match solution {
            Some(sol) => (
                Some(sol.cost),
                Some({
                    let mut blocks: Vec<Vec<usize>> = sol
                        .clustering
                        .blocks()
                        .into_iter()
                        .map(|b| b.into_iter().map(|v| v + 1).collect())
                        .collect();
                    blocks.sort();
                    blocks
                }),
                Some(one_based(sol.edits.additions(g))),
                Some(one_based(sol.edits.deletions(g))),
            ),
            None => (None, None, None, None),
        };
        SolveReport {
            schema: SCHEMA,
            command,
            answer: if solution.is_some() { "YES" } else { "NO" },
            mode,
            p,
            k,
            cost,
            clusters,
            additions,
            deletions,
            stats,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.cost {
            Some(cost) => out.push_str(&format!("YES cost {cost}\n")),
            None => out.push_str("NO\n"),
        }
        let pairs = |label: &str, list: &Option<Vec<[usize; 2]>>, out: &mut String| {
            for [u, v] in list.iter().flatten() {
                out.push_str(&format!("{label} {u} {v}\n"));
            }
        };
        for cluster in self.clusters.iter().flatten() {
            let ids: Vec<String> = cluster.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("cluster {}\n", ids.join(" ")));
        }
        pairs("add", &self.additions, &mut out);
        pairs("delete", &self.deletions, &mut out);
        let s = &self.stats;
        let mut fields = Vec::new();
        for (name, value) in [
            ("cuts_enumerated", s.cuts_enumerated),
            ("dp_states", s.dp_states),
            ("rules_applied", s.rules_applied),
        ] {
            if let Some(v) = value {
                fields.push(format!("{name}={v}"));
            }
        }
        if let Some(ms) = s.wall_time_ms {
            fields.push(format!("wall_time_ms={ms}"));
        }
        if !fields.is_empty() {
            out.push_str(&format!("stats {}\n", fields.join(" ")));
        }
        out
    }
}
