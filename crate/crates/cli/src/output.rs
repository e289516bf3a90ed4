use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use peg_core::peg::parse_peg;
use peg_core::PartiallyErasedGraph;
use serde::Serialize;

use crate::{Format, RunFlags};

pub fn read_graph(path: &Path) -> Result<PartiallyErasedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_peg(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

#[derive(Serialize)]
struct Document<'a, P, S, R> {
    plan: &'a P,
    summary: &'a S,
    records: &'a [R],
}

/// Writes records (JSON document with plan and summary, or CSV rows) and the
/// optional summary file, and echoes the summary on stderr.
pub fn emit<P: Serialize, S: Serialize, R: Serialize>(flags: &RunFlags, plan: &P, summary: &S, records: &[R]) -> Result<()> {
    let body = match flags.format {
        Format::Json => to_json(&Document { plan, summary, records })?,
        Format::Csv => to_csv(records)?,
    };
    write_text(flags.out.as_deref(), &body)?;
    if let Some(p) = &flags.summary {
        write_text(Some(p), &to_json(summary)?)?;
    }
    if flags.out.is_some() || flags.format == Format::Csv {
        eprintln!("{}", serde_json::to_string(summary)?);
    }
    Ok(())
}

/// Lower nearest-rank quantile of sorted data.
pub fn quantile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Quantiles {
    pub min: u64,
    pub median: u64,
    pub p90: u64,
    pub max: u64,
    pub mean: f64,
}

impl Quantiles {
    pub fn of(values: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = values.into_iter().collect();
        v.sort_unstable();
        let mean = if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<u64>() as f64 / v.len() as f64
        };
        Self {
            min: v.first().copied().unwrap_or(0),
            median: quantile(&v, 0.5),
            p90: quantile(&v, 0.9),
            max: v.last().copied().unwrap_or(0),
            mean,
        }
    }
}

pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    Ok(b.build()?)
}
