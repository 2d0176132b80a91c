//! Line-oriented text format for augmented ADMGs.
//!
//! ```text
//! # treatment X, outcome Y, selection S
//! X -> Y
//! X <-> Z
//! Z -> S
//! Y <-> S
//! node W        # isolated vertex
//! select S      # optional when a vertex is named S
//! ```

use std::collections::BTreeSet;

use serde::Serialize;

use crate::admg::AugmentedAdmg;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Directed,
    Bidirected,
}

/// Where an edge was declared (1-based line and column of its first endpoint).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeSpan {
    pub kind: EdgeKind,
    pub from: String,
    pub to: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphDocument {
    pub source: String,
    pub graph: AugmentedAdmg,
    pub provenance: Vec<EdgeSpan>,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Splits a line into (column, token) pairs; `->` and `<->` are tokens even
/// without surrounding whitespace.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    let bytes = line.as_bytes();
    let column = |byte: usize| line[..byte].chars().count() + 1;
    while i < bytes.len() {
        let rest = &line[i..];
        let op = if rest.starts_with("<->") {
            3
        } else if rest.starts_with("->") {
            2
        } else {
            0
        };
        let ws = rest.starts_with(char::is_whitespace);
        if op > 0 || ws {
            if let Some(s) = start.take() {
                out.push((column(s), &line[s..i]));
            }
            if op > 0 {
                out.push((column(i), &line[i..i + op]));
                i += op;
            } else {
                i += rest.chars().next().map_or(1, char::len_utf8);
            }
            continue;
        }
        if start.is_none() {
            start = Some(i);
        }
        i += rest.chars().next().map_or(1, char::len_utf8);
    }
    if let Some(s) = start {
        out.push((column(s), &line[s..]));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    let mut vertices: Vec<String> = Vec::new();
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    let mut seen_directed = BTreeSet::new();
    let mut seen_bidirected = BTreeSet::new();
    let mut selection: Option<(String, usize)> = None;
    let mut provenance = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let code = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(code);
        let name = |(col, tok): (usize, &str)| -> Result<String> {
            if is_identifier(tok) {
                Ok(tok.to_owned())
            } else {
                Err(parse_error(
                    line_no,
                    col,
                    format!("expected a vertex name, found `{tok}`"),
                ))
            }
        };
        match tokens.as_slice() {
            [] => {}
            [a, (col, op), b] if *op == "->" || *op == "<->" => {
                let (from, to) = (name(*a)?, name(*b)?);
                if from == to {
                    return Err(parse_error(line_no, a.0, format!("self-loop on `{from}`")));
                }
                let kind = if *op == "->" {
                    if !seen_directed.insert((from.clone(), to.clone())) {
                        return Err(parse_error(
                            line_no,
                            *col,
                            format!("duplicate edge {from} -> {to}"),
                        ));
                    }
                    directed.push((from.clone(), to.clone()));
                    EdgeKind::Directed
                } else {
                    let key = if from <= to {
                        (from.clone(), to.clone())
                    } else {
                        (to.clone(), from.clone())
                    };
                    if !seen_bidirected.insert(key) {
                        return Err(parse_error(
                            line_no,
                            *col,
                            format!("duplicate edge {from} <-> {to}"),
                        ));
                    }
                    bidirected.push((from.clone(), to.clone()));
                    EdgeKind::Bidirected
                };
                vertices.extend([from.clone(), to.clone()]);
                provenance.push(EdgeSpan {
                    kind,
                    from,
                    to,
                    line: line_no,
                    column: a.0,
                });
            }
            [(_, "node"), v] => vertices.push(name(*v)?),
            [(col, "select"), v] => {
                if let Some((_, first)) = &selection {
                    return Err(parse_error(
                        line_no,
                        *col,
                        format!("duplicate select (first on line {first})"),
                    ));
                }
                let v = name(*v)?;
                vertices.push(v.clone());
                selection = Some((v, line_no));
            }
            [(col, tok), ..] => {
                let message = match *tok {
                    "node" | "select" => format!("`{tok}` takes exactly one vertex name"),
                    _ => "expected `A -> B`, `A <-> B`, `node A` or `select A`".to_owned(),
                };
                return Err(parse_error(line_no, *col, message));
            }
        }
    }

    let selection = match selection {
        Some((s, _)) => Some(s),
        None => vertices.iter().any(|v| v == "S").then(|| "S".to_owned()),
    };
    let graph = AugmentedAdmg::new(vertices, directed, bidirected, selection)?;
    Ok(GraphDocument {
        source: text.to_owned(),
        graph,
        provenance,
    })
}

/// Text that [`parse_graph`] maps back to `g`.
pub fn to_dsl(g: &AugmentedAdmg) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str(&format!("node {v}\n"));
    }
    for (a, b) in g.directed_edges() {
        out.push_str(&format!("{a} -> {b}\n"));
    }
    for (a, b) in g.bidirected_edges() {
        out.push_str(&format!("{a} <-> {b}\n"));
    }
    if let Some(s) = g.selection() {
        out.push_str(&format!("select {s}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::VertexSet;
    use crate::fixtures;

    fn set(names: &[&str]) -> VertexSet {
        names.iter().copied().collect()
    }

    #[test]
    fn parses_fig2() {
        let doc = parse_graph("X -> Y\nX <-> Z\nZ -> S\nY <-> S").unwrap();
        assert_eq!(doc.graph, fixtures::fig2());
        assert_eq!(doc.graph.selection(), Some("S"));
        assert_eq!(doc.provenance.len(), 4);
        assert_eq!(doc.provenance[2].line, 3);
    }

    #[test]
    fn parses_fig3b_edge_list() {
        let text = "X1 -> Y1\nY1 -> Y2\nX1 -> X2\nX2 -> Y2\nZ2 -> Y2\nZ1 -> Z2\nZ2 -> S\n\
                    Z1 <-> X1\nZ2 <-> X1\nZ2 <-> X2\nY2 <-> S\nY1 <-> S";
        let g = parse_graph(text).unwrap().graph;
        assert_eq!(g.vertices().len(), 7);
        assert_eq!(
            g.split_by_selection().unwrap(),
            (set(&["Z1", "Z2"]), set(&["X1", "X2", "Y1", "Y2"]))
        );
    }

    #[test]
    fn operators_need_no_spaces() {
        let g = parse_graph("A->B\nB<->C # trailing comment").unwrap().graph;
        assert!(g.has_directed("A", "B"));
        assert!(g.has_bidirected("B", "C"));
        assert_eq!(g.selection(), None);
    }

    #[test]
    fn cycle_is_reported() {
        match parse_graph("A -> B\nB -> A") {
            Err(Error::Cycle(c)) => {
                assert!(c.contains(&"A".to_owned()) && c.contains(&"B".to_owned()))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_graph("A -> B\n  A => B"),
            Err(Error::Parse {
                line: 2,
                column: 3,
                message: "expected `A -> B`, `A <-> B`, `node A` or `select A`".into()
            })
        );
        assert!(matches!(
            parse_graph("A -> 1B"),
            Err(Error::Parse {
                line: 1,
                column: 6,
                ..
            })
        ));
        assert!(matches!(
            parse_graph("A -> B\nA -> B"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("select S\nselect T"),
            Err(Error::Parse {
                line: 2,
                column: 1,
                ..
            })
        ));
    }

    #[test]
    fn selection_must_be_sink() {
        assert!(matches!(
            parse_graph("S -> A"),
            Err(Error::SelectionHasChildren { .. })
        ));
        assert!(parse_graph("T -> A\nselect A").is_ok());
    }

    #[test]
    fn round_trip() {
        for g in fixtures::all() {
            assert_eq!(parse_graph(&to_dsl(&g.1)).unwrap().graph, g.1, "{}", g.0);
        }
        let g = parse_graph("node Q\nA -> B").unwrap().graph;
        assert_eq!(parse_graph(&to_dsl(&g)).unwrap().graph, g);
    }
}
