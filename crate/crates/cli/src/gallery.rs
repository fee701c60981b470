//! Batch runner: every `<name>.mdag` in a directory is classified and
//! compared with `<name>.expect.json`.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::json;

use mdag::equivalence::markov_equivalent;
use mdag::nested::fix_graph;
use mdag::{Constraint, MarkedMixedGraph, ModelClass};

use crate::commands::{classify_report, load, read};
use crate::error::{CliError, CliResult};
use crate::{Cli, Outcome};

/// Expected results for one gallery graph.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    /// Absent for graphs with context vertices, which are not classified.
    #[serde(default)]
    pub class: Option<ModelClass>,
    #[serde(default)]
    pub decided: Option<bool>,
    /// Each must appear among the reported witnesses.
    #[serde(default)]
    pub witnesses: Vec<Constraint>,
    /// Graph file (same directory) the attached DAG must be Markov equivalent to.
    #[serde(default)]
    pub equivalent_to: Option<String>,
    /// The graph must equal the result of fixing `vertex` in `graph`.
    #[serde(default)]
    pub fixing_of: Option<FixingOf>,
    /// Where the expectation comes from.
    pub source: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixingOf {
    pub graph: String,
    pub vertex: String,
}

struct Row {
    name: String,
    expected: String,
    got: String,
    source: String,
    problems: Vec<String>,
}

fn sidecar_path(graph: &Path) -> PathBuf {
    let stem = graph.file_stem().unwrap_or_default().to_string_lossy();
    graph.with_file_name(format!("{stem}.expect.json"))
}

fn load_sidecar(path: &Path) -> CliResult<Sidecar> {
    if !path.exists() {
        return Err(CliError::Sidecar {
            path: path.to_path_buf(),
            message: "missing sidecar".into(),
        });
    }
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Sidecar {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn check(cli: &Cli, graph: &Path, expect: &Sidecar) -> CliResult<Row> {
    let g = load(graph)?;
    let mut problems = Vec::new();
    let (mut expected, mut got) = ("-".to_string(), "-".to_string());
    if let Some(fx) = &expect.fixing_of {
        let source = load(&graph.with_file_name(&fx.graph))?;
        let fixed = fix_graph(&source, source.index(&fx.vertex)?)?;
        if fixed != g {
            problems.push(format!("differs from fixing {} in {}", fx.vertex, fx.graph));
        }
        expected = format!("fix {}", fx.vertex);
        got = expected.clone();
    }
    if let Some(class) = expect.class {
        let report = classify_report(cli, &g)?;
        expected = class.to_string();
        got = report.class.to_string();
        if report.class != class {
            problems.push(format!("class {} expected {class}", report.class));
        }
        if let Some(d) = expect.decided {
            if d != report.decided {
                problems.push(format!("decided {} expected {d}", report.decided));
            }
        }
        let found = report.constraints();
        for w in &expect.witnesses {
            if !found.contains(w) {
                problems.push(format!("missing witness `{w}`"));
            }
        }
        if let Some(other) = &expect.equivalent_to {
            let target = load(&graph.with_file_name(other))?;
            match &report.equivalent_dag {
                None => problems.push("no equivalent DAG attached".into()),
                Some(dag) => {
                    let same =
                        markov_equivalent(&MarkedMixedGraph::from_dag(dag), &MarkedMixedGraph::from_dag(&target))?;
                    if !same {
                        problems.push(format!("attached DAG not equivalent to {other}"));
                    }
                }
            }
        }
    }
    Ok(Row {
        name: graph.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        expected,
        got,
        source: expect.source.clone(),
        problems,
    })
}

pub fn run(cli: &Cli, dir: &Path) -> CliResult<Outcome> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut graphs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mdag"))
        .collect();
    graphs.sort();
    // all sidecars are read up front so a bad one fails the run before any output
    let sidecars: Vec<Sidecar> = graphs.iter().map(|g| load_sidecar(&sidecar_path(g))).collect::<CliResult<_>>()?;
    let mut rows = Vec::new();
    for (g, s) in graphs.iter().zip(&sidecars) {
        rows.push(check(cli, g, s)?);
    }
    let failed = rows.iter().filter(|r| !r.problems.is_empty()).count();
    let stdout = if cli.json {
        let list: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "file": r.name,
                    "expected": r.expected,
                    "got": r.got,
                    "source": r.source,
                    "pass": r.problems.is_empty(),
                    "problems": r.problems,
                })
            })
            .collect();
        let v = json!({"schema": crate::commands::SCHEMA, "results": list, "passed": rows.len() - failed, "failed": failed});
        let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
        s.push('\n');
        s
    } else {
        let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut s = format!("{:width$}  {:16}  {:16}  result\n", "file", "expected", "got");
        for r in &rows {
            let verdict = if r.problems.is_empty() { "PASS".to_string() } else { format!("FAIL ({})", r.problems.join("; ")) };
            writeln!(s, "{:width$}  {:16}  {:16}  {verdict}", r.name, r.expected, r.got).unwrap();
        }
        writeln!(s, "{} passed, {failed} failed", rows.len() - failed).unwrap();
        s
    };
    Ok(Outcome {
        stdout,
        code: if failed == 0 { 0 } else { 1 },
    })
}
