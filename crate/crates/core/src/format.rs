//! Plain-text graph format.
//!
//! ```text
//! c optional comment lines
//! p cep <n> <m>
//! e <u> <v>
//! ```
//!
//! Vertex ids in the file are 1-based. [`write_graph`] emits the canonical
//! form (no comments, edges sorted with `u < v`), so
//! `write_graph(&parse_graph(&write_graph(g))?)` is byte-identical.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field(token: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| parse_error(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_error(line, format!("invalid {what} `{token}`")))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_error(line, "duplicate header"));
                }
                if tokens.next() != Some("cep") {
                    return Err(parse_error(line, "expected `p cep <n> <m>`"));
                }
                let n = parse_field(tokens.next(), line, "vertex count")?;
                let m = parse_field(tokens.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_error(line, "edge before header"))?;
                let u = parse_field(tokens.next(), line, "endpoint")?;
                let v = parse_field(tokens.next(), line, "endpoint")?;
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_error(line, format!("vertex {x} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(parse_error(line, format!("self-loop on {u}")));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(parse_error(line, format!("duplicate edge {u} {v}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(parse_error(line, format!("unknown line type `{other}`"))),
            None => unreachable!(),
        }
        if tokens.next().is_some() {
            return Err(parse_error(line, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_error(0, "missing `p cep` header"))?;
    if edges.len() != m {
        return Err(parse_error(
            0,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.edge_count());
    writeln!(out, "p cep {} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}
