//! Plain-text edge lists.
//!
//! The first line holds `n k`; every following non-blank line is one edge as
//! `k` space-separated 1-based vertices. Writers emit canonical form (vertices
//! sorted within a line, lines in lexicographic order); readers accept any
//! order and canonicalize.

use std::fmt::Write as _;
use std::path::Path;

use super::Family;
use crate::{Error, Result, Vertex};

pub fn write_edge_list(f: &Family) -> String {
    let mut out = format!("{} {}\n", f.n(), f.k());
    for e in f.edges() {
        let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Family> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing `n k` header".into()))?;
    let nums = parse_ints(header)?;
    let [n, k] = nums[..] else {
        return Err(Error::Parse(format!("header must be `n k`, got {header:?}")));
    };
    let mut edges = Vec::new();
    for line in lines {
        if line.is_empty() && k != 0 {
            continue;
        }
        edges.push(parse_ints(line)?);
    }
    Family::new(n, k, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Family> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

fn parse_ints(line: &str) -> Result<Vec<Vertex>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<Vertex>()
                .map_err(|_| Error::Parse(format!("not a vertex: {t:?}")))
        })
        .collect()
}
