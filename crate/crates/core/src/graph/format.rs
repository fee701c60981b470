//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! vertices a b c d
//! edge a b
//! face b d
//! context c
//! ```
//!
//! `vertices` must be the first non-comment line and appear exactly once.

use std::collections::HashSet;
use std::fmt::Write;

use super::{GraphDescription, MDag};
use crate::error::{Error, Result};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (byte, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..byte]));
            }
        } else if start.is_none() {
            start = Some(byte);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(b, t)| (line[..b].chars().count() + 1, t))
        .collect()
}

pub fn parse_mdag(text: &str) -> Result<MDag> {
    parse_description(text)?.build()
}

pub(crate) fn parse_description(text: &str) -> Result<GraphDescription> {
    let mut desc = GraphDescription::default();
    let mut declared: Option<HashSet<String>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks = tokens(content);
        let Some(&(kcol, keyword)) = toks.first() else {
            continue;
        };
        let args = &toks[1..];

        if keyword == "vertices" {
            if declared.is_some() {
                return Err(syntax(line_no, kcol, "`vertices` declared more than once"));
            }
            let mut set = HashSet::new();
            for &(col, name) in args {
                if !set.insert(name.to_string()) {
                    return Err(syntax(line_no, col, format!("duplicate vertex `{name}`")));
                }
                desc.vertices.push(name.to_string());
            }
            declared = Some(set);
            continue;
        }
        let Some(known) = declared.as_ref() else {
            return Err(syntax(
                line_no,
                kcol,
                "expected `vertices` as the first declaration",
            ));
        };
        for &(col, name) in args {
            if !known.contains(name) {
                return Err(syntax(line_no, col, format!("undeclared vertex `{name}`")));
            }
        }
        let names: Vec<String> = args.iter().map(|(_, s)| s.to_string()).collect();
        match keyword {
            "edge" => {
                if names.len() != 2 {
                    return Err(syntax(line_no, kcol, "`edge` takes exactly two vertices"));
                }
                desc.edges.push((names[0].clone(), names[1].clone()));
            }
            "face" => {
                if names.len() < 2 {
                    return Err(syntax(line_no, kcol, "`face` needs at least two vertices"));
                }
                desc.faces.push(names);
            }
            "context" => desc.context.extend(names),
            other => {
                return Err(syntax(line_no, kcol, format!("unknown keyword `{other}`")));
            }
        }
    }
    if declared.is_none() {
        return Err(syntax(1, 1, "missing `vertices` declaration"));
    }
    Ok(desc)
}

/// Serializes in canonical order: vertices, edges, faces, context, all
/// members sorted lexicographically.
pub fn serialize_mdag(g: &MDag) -> String {
    let mut s = String::new();
    s.push_str("vertices");
    for n in g.names() {
        s.push(' ');
        s.push_str(n);
    }
    s.push('\n');
    for (a, b) in g.directed_edges() {
        writeln!(s, "edge {} {}", g.name(a), g.name(b)).unwrap();
    }
    for f in g.facets() {
        writeln!(s, "face {}", g.names_of(*f).join(" ")).unwrap();
    }
    if !g.context().is_empty() {
        writeln!(s, "context {}", g.names_of(g.context()).join(" ")).unwrap();
    }
    s
}
