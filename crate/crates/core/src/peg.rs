//! The `peg 1` text format.
//!
//! ```text
//! peg 1
//! n 3
//! v 0 1 *
//! v 1 0
//! v 2
//! ```
//!
//! Each `v` line gives a vertex id followed by its list entries in order,
//! `*` marking an erased entry. Vertices without a line have degree 0.
//! Blank lines and `#` comments are ignored. [`write_peg`] emits every vertex
//! in ascending order, so parsing its output and writing again reproduces the
//! same bytes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{AdjEntry, GraphError, PartiallyErasedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PegError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `peg 1` header")]
    MissingHeader,
    #[error("missing `n <count>` line")]
    MissingCount,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> PegError {
    PegError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_peg(text: &str) -> Result<PartiallyErasedGraph, PegError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "peg 1")) => {}
        Some((line, other)) if other.starts_with("peg") => {
            return Err(syntax(line, format!("unsupported header {other:?}")))
        }
        _ => return Err(PegError::MissingHeader),
    }

    let (count_line, count) = lines.next().ok_or(PegError::MissingCount)?;
    let n: usize = match count.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", value] => value
            .parse()
            .map_err(|_| syntax(count_line, format!("bad vertex count {value:?}")))?,
        _ => return Err(PegError::MissingCount),
    };
    if n == 0 {
        return Err(GraphError::Empty.into());
    }

    let mut lists: Vec<Option<Vec<AdjEntry>>> = vec![None; n];
    for (line, body) in lines {
        let mut tokens = body.split_whitespace();
        if tokens.next() != Some("v") {
            return Err(syntax(line, "expected a `v` line"));
        }
        let id: usize = tokens
            .next()
            .ok_or_else(|| syntax(line, "missing vertex id"))?
            .parse()
            .map_err(|_| syntax(line, "vertex id is not a decimal integer"))?;
        if id >= n {
            return Err(syntax(line, format!("vertex {id} out of range for n = {n}")));
        }
        if lists[id].is_some() {
            return Err(syntax(line, format!("vertex {id} listed twice")));
        }
        let mut entries = Vec::new();
        for tok in tokens {
            if tok == "*" {
                entries.push(AdjEntry::Erased);
            } else {
                let v: usize = tok
                    .parse()
                    .map_err(|_| syntax(line, format!("bad entry {tok:?}")))?;
                if v >= n {
                    return Err(syntax(line, format!("entry {v} out of range for n = {n}")));
                }
                entries.push(AdjEntry::Vertex(v));
            }
        }
        lists[id] = Some(entries);
    }
    Ok(PartiallyErasedGraph::from_lists(
        lists.into_iter().map(Option::unwrap_or_default).collect(),
    )?)
}

pub fn write_peg(g: &PartiallyErasedGraph) -> String {
    let mut out = String::with_capacity(16 + 4 * g.total_entries() + 8 * g.num_vertices());
    out.push_str("peg 1\n");
    let _ = writeln!(out, "n {}", g.num_vertices());
    for u in 0..g.num_vertices() {
        let _ = write!(out, "v {u}");
        for e in g.adj(u) {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    out
}
