//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use common::*;
use mdag::classify::{
    classify, find_collider_3paths, find_discriminating_paths, reduce_discriminating_path, ModelClass,
    Witness,
};
use mdag::equivalence::{enumerate_class, is_ancestral, is_maximal, markov_equivalent, skeleton_classes};
use mdag::oracle::{chsh_value, pr_box_distribution, fix_distribution, sample_marginal, uniform};
use mdag::projection::{canonical_dag, latent_project, mag_project};
use mdag::separation::{
    e_separated, is_fixable, is_fixable_by_walks, m_separated, markov_blanket, markov_blanket_formula,
};
use mdag::{DiscreteDistribution, MarkedMixedGraph, MDag, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn verma() -> MDag {
    MDag::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")], &[&["b", "d"]], &[]).unwrap()
}

fn verma_fixed_c(context: bool) -> MDag {
    let ctx: &[&str] = if context { &["c"] } else { &[] };
    MDag::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")], &[&["b", "d"]], ctx).unwrap()
}

fn six() -> MDag {
    MDag::from_names(
        &["a", "b", "c", "d", "e", "f"],
        &[("a", "b"), ("b", "d"), ("d", "e"), ("e", "f")],
        &[&["a", "b"], &["a", "c", "e"], &["d", "f"]],
        &[],
    )
    .unwrap()
}

fn equiv_gallery(which: usize) -> MDag {
    let v = ["a", "b", "c", "d"];
    match which {
        1 => MDag::from_names(&v, &[("d", "b")], &[&["a", "b", "c"]], &[]),
        2 => MDag::from_names(&v, &[("a", "b")], &[&["a", "c"], &["b", "c"], &["b", "d"]], &[]),
        3 => MDag::from_names(&v, &[("a", "b"), ("a", "c"), ("c", "b"), ("d", "b")], &[], &[]),
        _ => MDag::from_names(&v, &[("d", "b")], &[&["a", "b"], &["a", "c"], &["b", "c"]], &[]),
    }
    .unwrap()
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    if t.elapsed() > limit {
        Err(format!("took {:.1?}, limit {:?}", t.elapsed(), limit))
    } else {
        Ok(())
    }
}

/// Exhaustive 4-vertex mDAGs followed by 1000 random 6-vertex ones.
fn suite3() -> Vec<MDag> {
    let mut graphs = all_mdags(4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        graphs.push(random_mdag(&mut rng, 6, 0.35, 4));
    }
    graphs
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let g = verma();
    let canon = canonical_dag(&g).map_err(|e| e.to_string())?;
    let h = canon.latent_set().first().unwrap();
    let latent_card = canon.dag.children(h).len() * 2;
    if latent_card != 4 {
        return Err(format!("latent cardinality {latent_card}"));
    }
    let mut worst_ci: f64 = 0.0;
    let mut worst_nested: f64 = 0.0;
    for seed in 0..200 {
        let p = sample_marginal(&g, &[2; 4], seed).map_err(|e| e.to_string())?;
        worst_ci = worst_ci.max(p.ci_violation(&["a"], &["c"], &["b"]).unwrap());
        let fixed = fix_distribution(&p, &g, 2, &uniform(2)).map_err(|e| e.to_string())?;
        worst_nested = worst_nested.max(fixed.ci_violation(&["d"], &["a"], &["c"]).unwrap());
    }
    within(t, Duration::from_secs(10))?;
    if worst_ci > 1e-10 || worst_nested > 1e-9 {
        return Err(format!("max violations {worst_ci:e} (a⊥c|b), {worst_nested:e} (d⊥a|c fixed)"));
    }
    Ok(format!(
        "200 models; max |a⊥c|b| {worst_ci:.1e}, max |d⊥a|c after fixing c| {worst_nested:.1e}; {:.2?}",
        t.elapsed()
    ))
}

/// Relabels the two states of the variables in `flip`.
fn flipped(p: &DiscreteDistribution, flip: &[bool]) -> DiscreteDistribution {
    let cards = p.cards().to_vec();
    let mut probs = vec![0.0; p.probs().len()];
    for (cell, &x) in p.probs().iter().enumerate() {
        let mut rest = cell;
        let mut out = 0;
        let mut mult = 1;
        for k in (0..cards.len()).rev() {
            let s = rest % cards[k];
            rest /= cards[k];
            let s = if flip[k] { cards[k] - 1 - s } else { s };
            out += s * mult;
            mult *= cards[k];
        }
        probs[out] = x;
    }
    DiscreteDistribution::new(p.vars().to_vec(), cards, probs).unwrap()
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let g = verma_fixed_c(true);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..500 {
        let p = sample_marginal(&g, &[2; 4], seed).map_err(|e| e.to_string())?;
        for mask in 0..16u32 {
            let flip: Vec<bool> = (0..4).map(|k| mask >> k & 1 == 1).collect();
            let q = flipped(&p, &flip);
            let v = chsh_value(&q, "a", "b", "c", "d").map_err(|e| e.to_string())?;
            worst = worst.max(v.abs());
        }
    }
    within(t, Duration::from_secs(30))?;
    if worst > 2.0 + 1e-9 {
        return Err(format!("sampled CHSH value {worst}"));
    }
    let e = pr_box_distribution();
    let v = chsh_value(&e, "a", "b", "c", "d").unwrap();
    if (v - 4.0).abs() > 1e-12 {
        return Err(format!("example distribution gives {v}"));
    }
    if !e.ci_holds(&["a"], &["c"], &["b"], 1e-12).unwrap() || !e.ci_holds(&["d"], &["a"], &["c"], 1e-12).unwrap() {
        return Err("example distribution fails an independence".into());
    }
    Ok(format!(
        "500 models x 16 relabellings; max |CHSH| {worst:.6}; example value {v}; {:.2?}",
        t.elapsed()
    ))
}

fn criterion3(graphs: &[MDag]) -> Outcome {
    let t = Instant::now();
    let mut checked = 0u64;
    for g in graphs {
        let dag = Dag::canonical(g);
        for (a, b, c) in disjoint_triples(g.n()) {
            let m = m_separated(g, vs(a), vs(b), vs(c)).unwrap();
            if m != dag.d_separated(a, b, c) {
                return Err(format!("m-separation mismatch on\n{g}A={a:b} B={b:b} C={c:b}"));
            }
            if e_separated(g, vs(a), vs(b), vs(c), VertexSet::EMPTY).unwrap() != m {
                return Err(format!("e-separation with D=∅ differs on\n{g}"));
            }
            checked += 1;
        }
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("{} graphs, {checked} triples; {:.1?}", graphs.len(), t.elapsed()))
}

fn criterion4(graphs: &[MDag]) -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for g in graphs {
        for v in 0..g.n() {
            if markov_blanket(g, v).unwrap() != markov_blanket_formula(g, v).unwrap() {
                return Err(format!("blanket of {} differs on\n{g}", g.name(v)));
            }
            if is_fixable(g, v).unwrap() != is_fixable_by_walks(g, v).unwrap() {
                return Err(format!("fixability of {} differs on\n{g}", g.name(v)));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} vertices; {:.1?}", t.elapsed()))
}

/// Oracle class of `m`: all orientations of its skeleton that are ancestral
/// and separate exactly as `m` does.
fn oracle_class(m: &MarkedMixedGraph) -> Vec<MarkedMixedGraph> {
    let skel = m.skeleton();
    let want = mag_signature(m);
    (0..3u64.pow(skel.len() as u32))
        .map(|code| orient(m.n(), &skel, code))
        .filter(|c| ancestral(c) && mag_signature(c) == want)
        .collect()
}

fn check_class(m: &MarkedMixedGraph, oracle: &[MarkedMixedGraph], recheck: usize) -> Result<bool, String> {
    let class = enumerate_class(m, 12).map_err(|e| e.to_string())?;
    let got: HashSet<&MarkedMixedGraph> = class.members.iter().collect();
    let want: HashSet<&MarkedMixedGraph> = oracle.iter().collect();
    if got != want {
        return Err(format!("class of {m:?}: {} members, oracle {}", got.len(), want.len()));
    }
    if class.pag != agreement(oracle) {
        return Err(format!("PAG of {m:?} differs from the oracle's mark agreement"));
    }
    for member in class.members.iter().take(recheck) {
        if enumerate_class(member, 12).unwrap().pag != class.pag {
            return Err(format!("PAG not invariant: {member:?} vs {m:?}"));
        }
    }
    let has_dag = class.members.iter().any(|x| x.bidirected_edges().is_empty());
    if has_dag != class.pag.bidirected_edges().is_empty() {
        return Err(format!("DAG membership and PAG bidirected edges disagree for {m:?}"));
    }
    Ok(has_dag)
}

fn is_mag(m: &MarkedMixedGraph) -> bool {
    if !ancestral(m) {
        return false;
    }
    // maximal: every non-adjacent pair separated by some set
    let n = m.n();
    let sig = mag_signature(m);
    let per_pair = 1usize << (n - 2);
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            let any = sig[k * per_pair..(k + 1) * per_pair].iter().any(|&s| s);
            if !m.adjacent(a, b) && !any {
                return false;
            }
            k += 1;
        }
    }
    true
}

fn criterion5() -> Outcome {
    let t = Instant::now();
    // exhaustive on 4 vertices, grouped by the oracle's separation table
    let n = 4;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut groups: HashMap<Vec<bool>, Vec<MarkedMixedGraph>> = HashMap::new();
    let mut mags = 0;
    for mask in 0u32..1 << pairs.len() {
        let skel: Vec<(usize, usize)> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        for code in 0..3u64.pow(skel.len() as u32) {
            let m = orient(n, &skel, code);
            if is_mag(&m) {
                mags += 1;
                groups.entry(mag_signature(&m)).or_default().push(m);
            }
        }
    }
    let (mut with_dag, mut without) = (0, 0);
    for members in groups.values() {
        if check_class(&members[0], members, usize::MAX)? {
            with_dag += 1;
        } else {
            without += 1;
        }
    }
    // random 5-vertex MAGs
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut sampled = 0;
    while sampled < 500 {
        let pairs5: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let skel: Vec<(usize, usize)> = pairs5.into_iter().filter(|_| rng.random_bool(0.5)).collect();
        let code = rng.random_range(0..3u64.pow(skel.len() as u32));
        let m = orient(5, &skel, code);
        if !is_mag(&m) {
            continue;
        }
        if is_ancestral(&m) != Ok(true) || is_maximal(&m) != Ok(true) {
            return Err(format!("library rejects MAG {m:?}"));
        }
        let oracle = oracle_class(&m);
        if check_class(&m, &oracle, 4)? {
            with_dag += 1;
        } else {
            without += 1;
        }
        sampled += 1;
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "{mags} MAGs on 4 vertices in {} classes + 500 random 5-vertex MAGs; classes with a DAG {with_dag}, without {without}; {:.1?}",
        groups.len(),
        t.elapsed()
    ))
}

fn nested_has(r: &mdag::ClassificationReport, sigma: &[usize], x: usize, y: usize, c: &[usize]) -> bool {
    let c: VertexSet = c.iter().copied().collect();
    r.witnesses.iter().any(|w| match w {
        Witness::Nested(w) => {
            let (sx, sy) = (VertexSet::singleton(x), VertexSet::singleton(y));
            w.sigma == sigma && w.c == c && ((w.a == sx && w.b == sy) || (w.a == sy && w.b == sx))
        }
        _ => false,
    })
}

fn criterion6() -> Outcome {
    let mut notes = Vec::new();
    let dag3 = MarkedMixedGraph::from_dag(&equiv_gallery(3));
    for (label, which) in [("equiv_facet", 1), ("equiv_mixed", 2)] {
        let r = classify(&equiv_gallery(which)).map_err(|e| e.to_string())?;
        if r.class != ModelClass::DagEquivalent {
            return Err(format!("{label} classified {}", r.class));
        }
        let dag = r.equivalent_dag.ok_or(format!("{label}: no DAG attached"))?;
        if !markov_equivalent(&MarkedMixedGraph::from_dag(&dag), &dag3).unwrap() {
            return Err(format!("{label}: attached DAG not equivalent to equiv_dag"));
        }
        notes.push(format!("{label} DAG_EQUIVALENT"));
    }
    let r = classify(&equiv_gallery(4)).map_err(|e| e.to_string())?;
    if r.class != ModelClass::InequalityOnly || !r.witnesses.contains(&Witness::FritzTriangle([0, 1, 2])) {
        return Err(format!("triangle: {} {:?}", r.class, r.witnesses));
    }
    notes.push("triangle INEQUALITY_ONLY {a,b,c}".into());
    let r = classify(&verma_fixed_c(false)).map_err(|e| e.to_string())?;
    let chsh = r.witnesses.iter().any(|w| matches!(w, Witness::Chsh(_)));
    if r.class != ModelClass::NondagCi || !chsh {
        return Err(format!("bell structure: {} {:?}", r.class, r.witnesses));
    }
    notes.push("bell NONDAG_CI+CHSH".into());
    let r = classify(&verma()).map_err(|e| e.to_string())?;
    if r.class != ModelClass::Nested || !nested_has(&r, &[2], 3, 0, &[2]) {
        return Err(format!("verma: {} {:?}", r.class, r.witnesses));
    }
    notes.push("verma NESTED ([c], d⊥a|c)".into());
    let r = classify(&six()).map_err(|e| e.to_string())?;
    if r.class != ModelClass::Nested || !nested_has(&r, &[4], 1, 5, &[4]) {
        return Err(format!("six: {} {:?}", r.class, r.witnesses));
    }
    notes.push("six NESTED ([e], b⊥f|e)".into());
    Ok(notes.join(", "))
}

fn criterion7() -> Outcome {
    let t = Instant::now();
    let names: Vec<String> = NAMES[..6].iter().map(|s| s.to_string()).collect();
    let skeletons = skeletons_up_to_iso(6);
    let (mut pags, mut instances) = (0usize, 0usize);
    for skel in &skeletons {
        for class in skeleton_classes(&names, skel, 15).map_err(|e| e.to_string())? {
            pags += 1;
            let p = &class.pag;
            if !find_collider_3paths(p).is_empty() {
                continue;
            }
            if !find_discriminating_paths(p).iter().any(|d| d.collider_at_b) {
                continue;
            }
            instances += 1;
            if !has_core(p) {
                return Err(format!("no induced core in PAG {p:?}"));
            }
            match reduce_discriminating_path(p) {
                Ok(Some(k)) => {
                    let keep: VertexSet = [k.a, k.v, k.b, k.c].into_iter().collect();
                    if !has_core(&p.induced(keep)) {
                        return Err(format!("reduction returned a non-core in {p:?}"));
                    }
                }
                other => return Err(format!("reduction failed on {p:?}: {other:?}")),
            }
        }
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "{} skeletons, {pags} PAGs, {instances} with a discriminating path and no collider 3-path; {:.1?}",
        skeletons.len(),
        t.elapsed()
    ))
}

fn criterion8(graphs: &[MDag]) -> Outcome {
    let t = Instant::now();
    for g in graphs {
        let canon = canonical_dag(g).unwrap();
        if latent_project(&canon.dag, canon.observed).unwrap() != *g {
            return Err(format!("projection of the canonical DAG differs from\n{g}"));
        }
        // observed vertices of the canonical DAG keep their names, hence order
        let obs: Vec<usize> = canon.observed.iter().collect();
        let lift = |s: u64| -> VertexSet { (0..g.n()).filter(|&v| s >> v & 1 == 1).map(|v| obs[v]).collect() };
        let mag = mag_project(g).unwrap();
        if !is_ancestral(&mag).unwrap() || !is_maximal(&mag).unwrap() {
            return Err(format!("MAG of\n{g}is not maximal ancestral: {mag:?}"));
        }
        let magg = mag.to_mdag().unwrap();
        for (a, b, c) in disjoint_triples(g.n()) {
            let m = m_separated(g, vs(a), vs(b), vs(c)).unwrap();
            if m_separated(&canon.dag, lift(a), lift(b), lift(c)).unwrap() != m {
                return Err(format!("canonical DAG separates differently from\n{g}"));
            }
            if m_separated(&magg, vs(a), vs(b), vs(c)).unwrap() != m {
                return Err(format!("MAG separates differently from\n{g}"));
            }
        }
    }
    Ok(format!("{} graphs; {:.1?}", graphs.len(), t.elapsed()))
}

fn main() {
    let graphs = suite3();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 Verma constraint", Box::new(criterion1)),
        ("2 CHSH", Box::new(criterion2)),
        ("3 separation oracle", Box::new(|| criterion3(&graphs))),
        ("4 blanket/fixability duals", Box::new(|| criterion4(&graphs))),
        ("5 PAG invariance, DAG in class", Box::new(criterion5)),
        ("6 classifier gallery", Box::new(criterion6)),
        ("7 discriminating path reduction", Box::new(criterion7)),
        ("8 projection fidelity", Box::new(|| criterion8(&graphs))),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
