use std::fmt::Write;
use std::path::Path;

use serde_json::{json, Value};

use mdag::classify::{classify_with, ClassifyOptions, ModelClass};
use mdag::equivalence::{build_pag_with_cap, mag_class};
use mdag::nested::{find_nested_constraints, fix_graph};
use mdag::oracle::{chsh_value, fix_distribution, sample_marginal, uniform, DiscreteDistribution};
use mdag::projection::{canonical_dag, latent_project, mag_project};
use mdag::separation::{e_separated, m_separated, open_path};
use mdag::{parse_mdag, serialize_mdag, MarkedMixedGraph, MDag, VertexSet};

use crate::error::{CliError, CliResult};
use crate::{gallery, Cli, Command, OracleCommand, Outcome, SampleArgs, SepArgs};

pub const SCHEMA: u32 = 1;

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> CliResult<MDag> {
    let text = read(path)?;
    parse_mdag(&text).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

pub fn names(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn set(g: &MDag, list: &str) -> CliResult<VertexSet> {
    Ok(g.set(&names(list))?)
}

fn to_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

fn mixed_json(m: &MarkedMixedGraph) -> Value {
    let edges: Vec<Value> = m
        .edges()
        .map(|(u, v, mu, mv)| json!({"u": m.name(u), "v": m.name(v), "mark_u": mu, "mark_v": mv}))
        .collect();
    json!({"vertices": m.names(), "edges": edges})
}

fn graph_output(cli: &Cli, g: &MDag) -> Outcome {
    if cli.json {
        Outcome::ok(to_json(with_schema(json!({"graph": g.describe()}))))
    } else {
        Outcome::ok(serialize_mdag(g))
    }
}

pub fn class_exit_code(class: ModelClass) -> i32 {
    match class {
        ModelClass::DagEquivalent => 10,
        ModelClass::InequalityOnly => 11,
        ModelClass::NondagCi => 12,
        ModelClass::Nested => 13,
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    if !(cli.tol >= 0.0) {
        return Err(CliError::Usage("--tol must be a non-negative number".into()));
    }
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Msep(sep) => separation(cli, sep, None),
        Command::Esep { sep, del } => separation(cli, sep, Some(del)),
        Command::Project { file, keep } => {
            let g = load(file)?;
            let keep = set(&g, keep)?;
            Ok(graph_output(cli, &latent_project(&g, keep)?))
        }
        Command::Canonical { file } => {
            let canon = canonical_dag(&load(file)?)?;
            if cli.json {
                let latents: Vec<Value> = canon
                    .latents
                    .iter()
                    .map(|(facet, name)| json!({"latent": name, "facet": facet}))
                    .collect();
                let v = json!({"graph": canon.dag.describe(), "latents": latents});
                Ok(Outcome::ok(to_json(with_schema(v))))
            } else {
                Ok(Outcome::ok(serialize_mdag(&canon.dag)))
            }
        }
        Command::Mag { file } => {
            let m = mag_project(&load(file)?)?;
            Ok(mixed_output(cli, &m, m.to_text()))
        }
        Command::Pag { file } => {
            let p = build_pag_with_cap(&load(file)?, cli.max_edges)?;
            Ok(mixed_output(cli, &p, p.to_mark_lines()))
        }
        Command::Class { file, list_members } => class(cli, file, *list_members),
        Command::Fix { file, vertex } => {
            let g = load(file)?;
            let v = g.index(vertex)?;
            Ok(graph_output(cli, &fix_graph(&g, v)?))
        }
        Command::Nested { file } => nested(file),
        Command::Classify { file } => classify_cmd(cli, file),
        Command::Oracle(cmd) => oracle(cli, cmd),
        Command::Gallery { dir } => gallery::run(cli, dir),
    }
}

fn mixed_output(cli: &Cli, m: &MarkedMixedGraph, text: String) -> Outcome {
    if cli.json {
        Outcome::ok(to_json(with_schema(mixed_json(m))))
    } else {
        Outcome::ok(text)
    }
}

fn validate(cli: &Cli, file: &Path) -> CliResult<Outcome> {
    let text = read(file)?;
    let (violations, summary) = match parse_mdag(&text) {
        Ok(g) => {
            let summary = format!(
                "ok: {} vertices, {} directed edges, {} facets, {} context\n",
                g.n(),
                g.edge_count(),
                g.facets().len(),
                g.context().len()
            );
            (Vec::new(), summary)
        }
        Err(mdag::Error::Invalid(v)) => {
            let list: Vec<String> = v.iter().map(ToString::to_string).collect();
            (list, String::new())
        }
        Err(source) => {
            return Err(CliError::Graph {
                path: file.to_path_buf(),
                source,
            })
        }
    };
    let code = if violations.is_empty() { 0 } else { crate::error::EXIT_DOMAIN };
    let stdout = if cli.json {
        to_json(with_schema(json!({"valid": violations.is_empty(), "violations": violations})))
    } else if violations.is_empty() {
        summary
    } else {
        violations.iter().map(|v| format!("violation: {v}\n")).collect()
    };
    Ok(Outcome { stdout, code })
}

fn separation(cli: &Cli, sep: &SepArgs, del: Option<&String>) -> CliResult<Outcome> {
    let g = load(&sep.file)?;
    let (a, b, c) = (set(&g, &sep.a)?, set(&g, &sep.b)?, set(&g, &sep.c)?);
    let d = match del {
        Some(list) => set(&g, list)?,
        None => VertexSet::EMPTY,
    };
    let separated = match del {
        Some(_) => e_separated(&g, a, b, c, d)?,
        None => m_separated(&g, a, b, c)?,
    };
    let mut path = None;
    if sep.witness && !separated {
        let h = g.delete(d);
        let remap = |s: VertexSet| h.set(&g.names_of(s));
        if let Some(p) = open_path(&h, remap(a)?, remap(b)?, remap(c)?)? {
            path = Some(p.render(&h));
        }
    }
    let stdout = if cli.json {
        to_json(with_schema(json!({"separated": separated, "open_path": path})))
    } else {
        let mut s = String::from(if separated { "separated\n" } else { "connected\n" });
        if let Some(p) = &path {
            writeln!(s, "open path: {p}").unwrap();
        }
        s
    };
    Ok(Outcome {
        stdout,
        code: if separated { 0 } else { 1 },
    })
}

fn class(cli: &Cli, file: &Path, list: bool) -> CliResult<Outcome> {
    let class = mag_class(&load(file)?, cli.max_edges)?;
    if cli.json {
        let mut v = json!({
            "size": class.members.len(),
            "contains_dag": class.contains_dag(),
            "pag": mixed_json(&class.pag),
        });
        if list {
            v["members"] = class.members.iter().map(mixed_json).collect();
        }
        return Ok(Outcome::ok(to_json(with_schema(v))));
    }
    let mut s = format!(
        "members: {}\ncontains DAG: {}\n",
        class.members.len(),
        if class.contains_dag() { "yes" } else { "no" }
    );
    if list {
        for (i, m) in class.members.iter().enumerate() {
            write!(s, "\n# member {}\n{}", i + 1, m.to_text()).unwrap();
        }
    }
    Ok(Outcome::ok(s))
}

fn nested(file: &Path) -> CliResult<Outcome> {
    let g = load(file)?;
    let witnesses: Vec<Value> = find_nested_constraints(&g)?
        .iter()
        .map(|w| {
            let sigma: Vec<&str> = w.sigma.iter().map(|&v| g.name(v)).collect();
            json!({"sigma": sigma, "A": g.names_of(w.a), "B": g.names_of(w.b), "C": g.names_of(w.c)})
        })
        .collect();
    Ok(Outcome::ok(to_json(with_schema(json!({"witnesses": witnesses})))))
}

pub fn classify_report(cli: &Cli, g: &MDag) -> CliResult<mdag::ClassificationReport> {
    Ok(classify_with(
        g,
        ClassifyOptions {
            max_edges: cli.max_edges,
        },
    )?)
}

fn classify_cmd(cli: &Cli, file: &Path) -> CliResult<Outcome> {
    let g = load(file)?;
    let report = classify_report(cli, &g)?;
    let constraints = report.constraints();
    let stdout = if cli.json {
        let v = json!({
            "class": report.class,
            "decided": report.decided,
            "witnesses": constraints,
            "equivalent_dag": report.equivalent_dag.as_ref().map(MDag::describe),
        });
        to_json(with_schema(v))
    } else {
        let mut s = format!("class: {}\ndecided: {}\n", report.class, report.decided);
        for c in &constraints {
            writeln!(s, "witness: {c}").unwrap();
        }
        if let Some(dag) = &report.equivalent_dag {
            write!(s, "equivalent DAG:\n{}", serialize_mdag(dag)).unwrap();
        }
        s
    };
    Ok(Outcome {
        stdout,
        code: class_exit_code(report.class),
    })
}

fn cardinalities(g: &MDag, spec: &str) -> CliResult<Vec<usize>> {
    let parsed: Result<Vec<usize>, _> = names(spec).iter().map(|s| s.parse::<usize>()).collect();
    let cards = parsed.map_err(|_| CliError::Usage(format!("bad --cards `{spec}`")))?;
    let cards = match cards.len() {
        1 => vec![cards[0]; g.n()],
        n if n == g.n() => cards,
        n => {
            return Err(CliError::Usage(format!(
                "--cards lists {n} values for {} vertices",
                g.n()
            )))
        }
    };
    if cards.iter().any(|&k| k < 1) {
        return Err(CliError::Usage("cardinalities must be positive".into()));
    }
    Ok(cards)
}

fn samples(cli: &Cli, g: &MDag, args: &SampleArgs) -> CliResult<Vec<(u64, DiscreteDistribution)>> {
    let cards = cardinalities(g, &args.cards)?;
    (0..args.seeds)
        .map(|k| {
            let seed = cli.seed.wrapping_add(k);
            Ok((seed, sample_marginal(g, &cards, seed)?))
        })
        .collect()
}

fn oracle(cli: &Cli, cmd: &OracleCommand) -> CliResult<Outcome> {
    match cmd {
        OracleCommand::Sample { sample, check_msep } => {
            let g = load(&sample.file)?;
            let dists = samples(cli, &g, sample)?;
            if *check_msep {
                check_implied(cli, &g, &dists)
            } else {
                let mut s = String::new();
                for (_, p) in &dists {
                    s.push_str(&serde_json::to_string(p).expect("distributions serialize"));
                    s.push('\n');
                }
                Ok(Outcome::ok(s))
            }
        }
        OracleCommand::Chsh { sample, roles } => {
            let g = load(&sample.file)?;
            let r = names(roles);
            if r.len() != 4 {
                return Err(CliError::Usage("--roles takes four vertices a,b,c,d".into()));
            }
            for v in &r {
                g.index(v)?;
            }
            let mut values = Vec::new();
            for (seed, p) in samples(cli, &g, sample)? {
                values.push((seed, chsh_value(&p, r[0], r[1], r[2], r[3])?));
            }
            let max = values.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            let holds = max <= 2.0 + cli.tol;
            let stdout = if cli.json {
                let vals: Vec<Value> = values.iter().map(|(s, v)| json!({"seed": s, "value": v})).collect();
                to_json(with_schema(json!({"roles": r, "values": vals, "max_abs": max, "within_bound": holds})))
            } else {
                let mut s = String::new();
                for (seed, v) in &values {
                    writeln!(s, "seed {seed}: {v:.12}").unwrap();
                }
                writeln!(s, "max |CHSH| {max:.12} ({} the bound 2)", if holds { "within" } else { "exceeds" })
                    .unwrap();
                s
            };
            Ok(Outcome::ok(stdout))
        }
        OracleCommand::Verma { sample, fix, a, b, c } => {
            let g = load(&sample.file)?;
            let v = g.index(fix)?;
            let (a, b, c) = (names(a), names(b), names(c));
            for x in a.iter().chain(&b).chain(&c) {
                g.index(x)?;
            }
            let mut before: f64 = 0.0;
            let mut after: f64 = 0.0;
            for (_, p) in samples(cli, &g, sample)? {
                let k = p.cards()[p.index_of(fix)?];
                before = before.max(p.ci_violation(&a, &b, &c)?);
                let q = fix_distribution(&p, &g, v, &uniform(k))?;
                after = after.max(q.ci_violation(&a, &b, &c)?);
            }
            let holds = after <= cli.tol;
            let stdout = if cli.json {
                to_json(with_schema(json!({
                    "models": sample.seeds,
                    "max_violation_before": before,
                    "max_violation_after": after,
                    "holds": holds,
                })))
            } else {
                format!(
                    "{} models; max violation {before:.3e} before fixing {fix}, {after:.3e} after; {}\n",
                    sample.seeds,
                    if holds { "holds" } else { "fails" }
                )
            };
            Ok(Outcome {
                stdout,
                code: if holds { 0 } else { 1 },
            })
        }
    }
}

fn check_implied(cli: &Cli, g: &MDag, dists: &[(u64, DiscreteDistribution)]) -> CliResult<Outcome> {
    let n = g.n();
    let mut statements = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rest = g.all() - VertexSet::singleton(a) - VertexSet::singleton(b);
            for c in rest.subsets() {
                if m_separated(g, VertexSet::singleton(a), VertexSet::singleton(b), c)? {
                    statements.push((a, b, c));
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (seed, p) in dists {
        for &(a, b, c) in &statements {
            let given = g.names_of(c);
            let x = p.ci_violation(&[g.name(a)], &[g.name(b)], &given.iter().map(String::as_str).collect::<Vec<_>>())?;
            worst = worst.max(x);
            if x > cli.tol {
                failures.push(format!(
                    "seed {seed}: {} ⊥ {} | {{{}}} violated by {x:.3e}",
                    g.name(a),
                    g.name(b),
                    g.names_of(c).join(",")
                ));
            }
        }
    }
    let stdout = if cli.json {
        to_json(with_schema(json!({
            "models": dists.len(),
            "statements": statements.len(),
            "max_violation": worst,
            "failures": failures,
        })))
    } else {
        let mut s = format!(
            "{} models, {} implied independences each; max violation {worst:.3e}\n",
            dists.len(),
            statements.len()
        );
        for f in &failures {
            writeln!(s, "{f}").unwrap();
        }
        s
    };
    Ok(Outcome {
        stdout,
        code: if failures.is_empty() { 0 } else { 1 },
    })
}
