//! Edge-list input and tab-separated / JSON-lines output.
//!
//! Input lines are `src dst [weight]`, `v <label> <value>` for initial
//! vertex values, `#` comments, or blank. Tokens are whitespace-separated.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::engine::RunResult;
use crate::graph::{Graph, GraphBuilder, GraphError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {reason}: `{content}`")]
pub struct ParseError {
    pub line: usize,
    pub content: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLine {
    pub src: String,
    pub dst: String,
    pub weight: f64,
}

/// A parsed edge-list file, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeListDocument {
    pub edges: Vec<EdgeLine>,
    pub values: Vec<(String, f64)>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListDocument, ParseError> {
    let mut doc = EdgeListDocument::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |reason: String| ParseError {
            line: i + 1,
            content: raw.to_owned(),
            reason,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["v", label, value] => {
                let value: f64 = value
                    .parse()
                    .map_err(|_| fail(format!("vertex value `{value}` is not a number")))?;
                doc.values.push(((*label).to_owned(), value));
            }
            [src, dst] => doc.edges.push(EdgeLine {
                src: (*src).to_owned(),
                dst: (*dst).to_owned(),
                weight: 1.0,
            }),
            [src, dst, weight] => {
                let weight: f64 = weight
                    .parse()
                    .map_err(|_| fail(format!("weight `{weight}` is not a number")))?;
                if !weight.is_finite() || weight < 0.0 {
                    return Err(fail(format!(
                        "weight {weight} must be finite and non-negative"
                    )));
                }
                doc.edges.push(EdgeLine {
                    src: (*src).to_owned(),
                    dst: (*dst).to_owned(),
                    weight,
                });
            }
            _ => {
                return Err(fail(format!(
                    "expected `src dst [weight]` or `v label value`, found {} tokens",
                    tokens.len()
                )))
            }
        }
    }
    Ok(doc)
}

/// Writes a document back out in the same syntax, weights always explicit.
pub fn write_edge_list(doc: &EdgeListDocument) -> String {
    let mut out = String::new();
    for e in &doc.edges {
        out.push_str(&format!("{} {} {}\n", e.src, e.dst, e.weight));
    }
    for (label, value) in &doc.values {
        out.push_str(&format!("v {label} {value}\n"));
    }
    out
}

/// Builds a graph from a document. Edge endpoints get ids first, in file
/// order; labels that only appear on value lines follow.
pub fn load_graph(doc: &EdgeListDocument, directed: bool) -> Result<Graph, GraphError> {
    let mut builder = GraphBuilder::new(directed);
    for e in &doc.edges {
        builder.edge(&e.src, &e.dst, Some(e.weight))?;
    }
    for (label, value) in &doc.values {
        builder.value(label, *value);
    }
    Ok(builder.build())
}

/// Integer labels in numeric order first, then the rest lexicographically.
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-4, 1e17)`. Infinities print as `inf`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One `label<TAB>value` line per vertex, sorted by label.
pub fn write_vertex_values<W: Write>(
    values: &BTreeMap<VertexId, f64>,
    graph: &Graph,
    sink: &mut W,
) -> io::Result<()> {
    let mut rows: Vec<(&str, f64)> = values
        .iter()
        .map(|(&v, &x)| (graph.label(v).unwrap_or_default(), x))
        .collect();
    rows.sort_by(|a, b| label_order(a.0, b.0));
    let mut out = String::with_capacity(rows.len() * 24);
    for (label, x) in rows {
        out.push_str(label);
        out.push('\t');
        out.push_str(&format_value(x));
        out.push('\n');
    }
    sink.write_all(out.as_bytes())
}

#[derive(Serialize)]
struct SuperstepRecord {
    superstep: u64,
    active: usize,
    messages_sent: usize,
    wall_ms: f64,
}

#[derive(Serialize)]
struct SummaryRecord {
    supersteps_executed: u64,
    recoveries: u32,
}

/// JSON lines: one record per superstep execution, then a summary record.
pub fn write_metrics<W: Write>(result: &RunResult, sink: &mut W) -> io::Result<()> {
    for m in &result.metrics {
        let record = SuperstepRecord {
            superstep: m.superstep,
            active: m.active,
            messages_sent: m.messages_sent,
            wall_ms: m.wall_ms(),
        };
        serde_json::to_writer(&mut *sink, &record)?;
        sink.write_all(b"\n")?;
    }
    let summary = SummaryRecord {
        supersteps_executed: result.supersteps_executed,
        recoveries: result.recoveries,
    };
    serde_json::to_writer(&mut *sink, &summary)?;
    sink.write_all(b"\n")
}
