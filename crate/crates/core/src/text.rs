//! Line-based graph text format.
//!
//! ```text
//! # comment
//! vertex <id> full|hollow
//! edge <id> <v1> <v2> <weight>      weight is "n" or "n/d"
//! ```
//!
//! ASCII, order-insensitive. Source parsing additionally requires integer
//! weights >= 2.

use crate::graph::{EdgeId, LabeledGraph, Marking, VertexId, Weight};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Integer weights >= 2 only (raw quotient graphs).
    Source,
    /// Rational weights > 1 (cover outputs).
    Derived,
}

pub fn parse_source(text: &str) -> Result<LabeledGraph, TextError> {
    parse(text, WeightMode::Source)
}

pub fn parse(text: &str, mode: WeightMode) -> Result<LabeledGraph, TextError> {
    let mut vertices: Vec<(VertexId, Marking)> = Vec::new();
    let mut edges: Vec<(EdgeId, VertexId, VertexId, Weight)> = Vec::new();
    let mut edge_lines: Vec<usize> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "vertex" => {
                if tokens.len() != 3 {
                    return Err(err(line_no, "expected `vertex <id> full|hollow`"));
                }
                let marking = match tokens[2] {
                    "full" => Marking::Full,
                    "hollow" => Marking::Hollow,
                    other => {
                        return Err(err(line_no, format!("unknown marking token `{other}`")));
                    }
                };
                vertices.push((VertexId::new(tokens[1]), marking));
            }
            "edge" => {
                if tokens.len() != 5 {
                    return Err(err(line_no, "expected `edge <id> <v1> <v2> <weight>`"));
                }
                let w = parse_weight(tokens[4]).ok_or_else(|| {
                    err(line_no, format!("malformed weight `{}`", tokens[4]))
                })?;
                if mode == WeightMode::Source {
                    if !w.is_integer() || w < Weight::from_integer(2) {
                        return Err(err(line_no, format!("weight < 2 or non-integer: `{w}`")));
                    }
                } else if w <= Weight::from_integer(1) {
                    return Err(err(line_no, format!("weight <= 1: `{w}`")));
                }
                edges.push((
                    EdgeId::new(tokens[1]),
                    VertexId::new(tokens[2]),
                    VertexId::new(tokens[3]),
                    w,
                ));
                edge_lines.push(line_no);
            }
            other => {
                return Err(err(line_no, format!("unknown directive `{other}`")));
            }
        }
    }
    for (i, (id, a, b, _)) in edges.iter().enumerate() {
        for v in [a, b] {
            if !vertices.iter().any(|(vid, _)| vid == v) {
                return Err(err(
                    edge_lines[i],
                    format!("edge `{id}` references missing vertex `{v}`"),
                ));
            }
        }
    }
    let build = match mode {
        WeightMode::Source => LabeledGraph::source(vertices, edges),
        WeightMode::Derived => LabeledGraph::derived(vertices, edges),
    };
    build.map_err(|e| err(last_line, e.to_string()))
}

fn parse_weight(token: &str) -> Option<Weight> {
    if let Some((n, d)) = token.split_once('/') {
        let n: u64 = n.parse().ok()?;
        let d: u64 = d.parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Weight::new(n, d))
    } else {
        token.parse::<u64>().ok().map(Weight::from_integer)
    }
}

/// Serializes in canonical order (vertices then edges, sorted by id).
/// `parse(serialize(g))` reproduces `g` exactly.
pub fn serialize(g: &LabeledGraph) -> String {
    let mut out = String::new();
    for (v, m) in g.vertices() {
        out.push_str(&format!("vertex {v} {m}\n"));
    }
    for (id, e) in g.edges() {
        out.push_str(&format!(
            "edge {id} {} {} {}\n",
            e.ends[0],
            e.ends[1],
            display_weight(e.weight)
        ));
    }
    out
}

pub fn display_weight(w: Weight) -> impl fmt::Display {
    struct W(Weight);
    impl fmt::Display for W {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.0.is_integer() {
                write!(f, "{}", self.0.numer())
            } else {
                write!(f, "{}/{}", self.0.numer(), self.0.denom())
            }
        }
    }
    W(w)
}
