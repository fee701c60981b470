//! Assigns an mDAG to one of four constraint classes and collects witnesses:
//! nested independences, PAG collider paths and discriminating paths, CHSH
//! instances, Fritz triangles and e-separations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equivalence::{dag_member, mag_class, DEFAULT_MAX_EDGES};
use crate::error::{Error, Result};
use crate::graph::{Mark, MarkedMixedGraph, MDag};
use crate::nested::{find_nested_constraints, NestedWitness, MAX_NESTED_VERTICES};
use crate::projection::latent_project;
use crate::separation::m_reachable;
use crate::vset::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelClass {
    DagEquivalent,
    InequalityOnly,
    NondagCi,
    Nested,
}

impl ModelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelClass::DagEquivalent => "DAG_EQUIVALENT",
            ModelClass::InequalityOnly => "INEQUALITY_ONLY",
            ModelClass::NondagCi => "NONDAG_CI",
            ModelClass::Nested => "NESTED",
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the endpoints of a collider path `v0 *-> v1 <-> v2 <-* v3` meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColliderShape {
    /// `v0` and `v3` not adjacent.
    EndsApart,
    /// `v0 - v3` with no arrowhead.
    EndsJoinedNoArrowhead,
    /// `v0 - v3` with one arrowhead.
    EndsJoinedOneArrowhead,
    /// `v0 <-> v3`.
    EndsJoinedBidirected,
}

/// A locally unshielded collider path of length 3 in a PAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Collider3Path {
    pub path: [usize; 4],
    pub shape: ColliderShape,
}

/// `<a, v1, ..., vk, b, c>`: `path[len-2]` is the discriminated vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiscriminatingPath {
    pub path: Vec<usize>,
    /// `b` has arrowheads from both of its path neighbours.
    pub collider_at_b: bool,
}

impl DiscriminatingPath {
    pub fn discriminated(&self) -> usize {
        self.path[self.path.len() - 2]
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.path.len() - 1
    }
}

/// Induced subgraph `a *-> v <-> b <-> c` with `v -> c`, `a` adjacent to
/// `v` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscriminatingCore {
    pub a: usize,
    pub v: usize,
    pub b: usize,
    pub c: usize,
}

/// Roles in the CHSH expression: settings `a`, `c`, outcomes `b`, `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChshInstance {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    /// Shape of the collider path giving the roles; anything other than
    /// [`ColliderShape::EndsApart`] or an edge without arrowheads reaches
    /// CHSH through the Fritz reduction that drops the `a - c` edge.
    pub source: ColliderShape,
}

impl ChshInstance {
    pub fn via_fritz_reduction(&self) -> bool {
        matches!(
            self.source,
            ColliderShape::EndsJoinedOneArrowhead | ColliderShape::EndsJoinedBidirected
        )
    }
}

/// `A ⊥_e B | C` after deleting `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ESepWitness {
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
    pub d: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Nested(NestedWitness),
    PagBidirectedEdge(usize, usize),
    Collider3Path(Collider3Path),
    DiscriminatingPath(DiscriminatingPath),
    DiscriminatingCore(DiscriminatingCore),
    FritzTriangle([usize; 3]),
    Chsh(ChshInstance),
    ESep(ESepWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub class: ModelClass,
    /// The class follows from a proven graphical criterion.
    pub decided: bool,
    pub witnesses: Vec<Witness>,
    pub equivalent_dag: Option<MDag>,
    /// Vertex names of the classified graph, for rendering.
    pub names: Vec<String>,
}

impl ClassificationReport {
    pub fn constraints(&self) -> Vec<Constraint> {
        self.witnesses.iter().map(|w| emit_witness(&self.names, w)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub max_edges: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_edges: DEFAULT_MAX_EDGES,
        }
    }
}

#[inline]
fn arrow_at(p: &MarkedMixedGraph, at: usize, other: usize) -> bool {
    p.mark_at(at, other) == Some(Mark::Arrow)
}

/// `u -> v` in `p`.
#[inline]
fn directed(p: &MarkedMixedGraph, u: usize, v: usize) -> bool {
    p.is_directed(u, v)
}

/// All locally unshielded collider paths `<v0, v1, v2, v3>`, each reported
/// once (with `v0 < v3`).
pub fn find_collider_3paths(p: &MarkedMixedGraph) -> Vec<Collider3Path> {
    let mut out = Vec::new();
    for v1 in 0..p.n() {
        for v2 in p.neighbors(v1).iter() {
            if !(arrow_at(p, v1, v2) && arrow_at(p, v2, v1)) {
                continue;
            }
            for v0 in p.neighbors(v1).without(v2).iter() {
                if !arrow_at(p, v1, v0) || p.adjacent(v0, v2) {
                    continue;
                }
                for v3 in p.neighbors(v2).without(v1).iter() {
                    if v3 <= v0 || !arrow_at(p, v2, v3) || p.adjacent(v1, v3) {
                        continue;
                    }
                    let shape = if !p.adjacent(v0, v3) {
                        ColliderShape::EndsApart
                    } else {
                        match arrow_at(p, v0, v3) as u8 + arrow_at(p, v3, v0) as u8 {
                            0 => ColliderShape::EndsJoinedNoArrowhead,
                            1 => ColliderShape::EndsJoinedOneArrowhead,
                            _ => ColliderShape::EndsJoinedBidirected,
                        }
                    };
                    out.push(Collider3Path {
                        path: [v0, v1, v2, v3],
                        shape,
                    });
                }
            }
        }
    }
    out.sort_by_key(|c| c.path);
    out
}

/// All discriminating paths `<a, v1, ..., vk, b, c>`, `k >= 1`: `a` and `c`
/// non-adjacent, every `vi` a collider on the path and a parent of `c`.
pub fn find_discriminating_paths(p: &MarkedMixedGraph) -> Vec<DiscriminatingPath> {
    let mut out = Vec::new();
    for c in 0..p.n() {
        for b in p.neighbors(c).iter() {
            // walk backwards from b: rev = [b, vk, ..., v1]
            let mut rev = vec![b];
            extend_discriminating(p, c, &mut rev, &mut out);
        }
    }
    out.sort_by(|x, y| (x.path.len(), &x.path).cmp(&(y.path.len(), &y.path)));
    out
}

fn extend_discriminating(
    p: &MarkedMixedGraph,
    c: usize,
    rev: &mut Vec<usize>,
    out: &mut Vec<DiscriminatingPath>,
) {
    let last = *rev.last().unwrap();
    for x in p.neighbors(last).iter() {
        if x == c || rev.contains(&x) {
            continue;
        }
        // x becomes v_i: collider between `last` and its own predecessor, parent of c;
        // when `last` is itself some v_j it needs an arrowhead from x
        if !directed(p, x, c) || !arrow_at(p, x, last) || (rev.len() > 1 && !arrow_at(p, last, x)) {
            continue;
        }
        rev.push(x);
        for a in p.neighbors(x).iter() {
            if a == c || rev.contains(&a) || p.adjacent(a, c) || !arrow_at(p, x, a) {
                continue;
            }
            let mut path: Vec<usize> = rev.iter().rev().copied().collect();
            path.insert(0, a);
            path.push(c);
            let b = rev[0];
            let vk = rev[1];
            out.push(DiscriminatingPath {
                collider_at_b: arrow_at(p, b, vk) && arrow_at(p, b, c),
                path,
            });
        }
        extend_discriminating(p, c, rev, out);
        rev.pop();
    }
}

/// `(a, v, b, c)` induces `a *-> v <-> b <-> c`, `v -> c`, with `a`
/// adjacent to `v` only. The mark at `a` is unconstrained.
pub fn is_discriminating_core(p: &MarkedMixedGraph, a: usize, v: usize, b: usize, c: usize) -> bool {
    p.adjacent(a, v)
        && !p.adjacent(a, b)
        && !p.adjacent(a, c)
        && arrow_at(p, v, a)
        && p.is_bidirected(v, b)
        && p.is_bidirected(b, c)
        && directed(p, v, c)
}

/// Every induced discriminating core, found by checking all 4-tuples.
pub fn find_discriminating_cores(p: &MarkedMixedGraph) -> Vec<DiscriminatingCore> {
    let mut out = Vec::new();
    for v in 0..p.n() {
        for c in p.neighbors(v).iter() {
            if !directed(p, v, c) {
                continue;
            }
            for b in (p.neighbors(v) & p.neighbors(c)).iter() {
                for a in p.neighbors(v).iter() {
                    if a != b && a != c && is_discriminating_core(p, a, v, b, c) {
                        out.push(DiscriminatingCore { a, v, b, c });
                    }
                }
            }
        }
    }
    out
}

/// With no collider 3-path present, turns a discriminating path into an
/// induced core. Paths are tried shortest first; a path of length 3 is its
/// own core, and longer paths are shortcut through the shields that must
/// exist along them, by searching their vertex sets (and then the whole
/// graph) for a core.
pub fn reduce_discriminating_path(p: &MarkedMixedGraph) -> Result<Option<DiscriminatingCore>> {
    if !find_collider_3paths(p).is_empty() {
        return Err(Error::Precondition(
            "graph has a locally unshielded collider path of length 3".into(),
        ));
    }
    let paths: Vec<DiscriminatingPath> = find_discriminating_paths(p)
        .into_iter()
        .filter(|d| d.collider_at_b)
        .collect();
    if paths.is_empty() {
        return Ok(None);
    }
    let cores = find_discriminating_cores(p);
    for d in &paths {
        if let [a, v, b, c] = d.path[..] {
            if is_discriminating_core(p, a, v, b, c) {
                return Ok(Some(DiscriminatingCore { a, v, b, c }));
            }
        }
        let on_path: VertexSet = d.path.iter().copied().collect();
        if let Some(k) = cores.iter().find(|k| {
            [k.a, k.v, k.b, k.c].iter().all(|&x| on_path.contains(x))
        }) {
            return Ok(Some(*k));
        }
    }
    Ok(cores.first().copied())
}

/// Triples pairwise joined by facets, with no directed edge among them and
/// no facet containing all three.
pub fn find_fritz_triangles(g: &MDag) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let n = g.n();
    for x in 0..n {
        for y in g.siblings(x).iter().filter(|&y| y > x) {
            for z in (g.siblings(x) & g.siblings(y)).iter().filter(|&z| z > y) {
                let t = VertexSet::singleton(x).with(y).with(z);
                let directed = [x, y, z].iter().any(|&v| !(g.parents(v) & t).is_empty());
                let joint = g.facets().iter().any(|f| t.is_subset(*f));
                if !directed && !joint {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Singleton e-separations `a ⊥_e b | C ∥ D` with `D` non-empty and minimal
/// that no m-separation `a ⊥_m b | C ∪ D'`, `D' ⊆ D`, accounts for.
pub fn find_esep_witnesses(g: &MDag) -> Vec<ESepWitness> {
    let n = g.n();
    let sep = |a: usize, b: usize, c: VertexSet, d: VertexSet| {
        !m_reachable(g, VertexSet::singleton(a), c, d).contains(b)
    };
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rest = g.all().without(a).without(b);
            for c in rest.subsets() {
                let mut found: Vec<VertexSet> = Vec::new();
                let mut ds: Vec<VertexSet> = (rest - c).subsets().filter(|d| !d.is_empty()).collect();
                ds.sort_by_key(|d| (d.len(), d.bits()));
                for d in ds {
                    if found.iter().any(|f| f.is_subset(d)) || !sep(a, b, c, d) {
                        continue;
                    }
                    found.push(d);
                    let explained = d.subsets().any(|e| sep(a, b, c | e, VertexSet::EMPTY));
                    if !explained {
                        out.push(ESepWitness {
                            a: VertexSet::singleton(a),
                            b: VertexSet::singleton(b),
                            c,
                            d,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Decides the class of `g` with the default edge cap.
pub fn classify(g: &MDag) -> Result<ClassificationReport> {
    classify_with(g, ClassifyOptions::default())
}

pub fn classify_with(g: &MDag, opts: ClassifyOptions) -> Result<ClassificationReport> {
    if !g.context().is_empty() {
        return Err(Error::HasContext);
    }
    if g.n() > MAX_NESTED_VERTICES {
        return Err(Error::TooLarge(format!(
            "classification is limited to {MAX_NESTED_VERTICES} vertices, graph has {}",
            g.n()
        )));
    }
    let report = |class, decided, witnesses, equivalent_dag| ClassificationReport {
        class,
        decided,
        witnesses,
        equivalent_dag,
        names: g.names().to_vec(),
    };

    let nested = find_nested_constraints(g)?;
    if !nested.is_empty() {
        let w = nested.into_iter().map(Witness::Nested).collect();
        return Ok(report(ModelClass::Nested, true, w, None));
    }

    let class = mag_class(g, opts.max_edges)?;
    let pag = &class.pag;
    let bidirected = pag.bidirected_edges();
    if !bidirected.is_empty() {
        return Ok(report(ModelClass::NondagCi, true, pag_witnesses(g, pag), None));
    }

    let mut w: Vec<Witness> = find_fritz_triangles(g)
        .into_iter()
        .map(Witness::FritzTriangle)
        .collect();
    let proven = !w.is_empty();
    w.extend(find_esep_witnesses(g).into_iter().map(Witness::ESep));
    if !w.is_empty() {
        return Ok(report(ModelClass::InequalityOnly, proven, w, None));
    }
    let dag = dag_member(&class);
    Ok(report(ModelClass::DagEquivalent, !g.has_facets(), Vec::new(), dag))
}

fn pag_witnesses(g: &MDag, pag: &MarkedMixedGraph) -> Vec<Witness> {
    let mut w: Vec<Witness> = pag
        .bidirected_edges()
        .into_iter()
        .map(|(u, v)| Witness::PagBidirectedEdge(u, v))
        .collect();
    let colliders = find_collider_3paths(pag);
    for c in &colliders {
        w.push(Witness::Collider3Path(*c));
    }
    for c in &colliders {
        let [v0, v1, v2, v3] = c.path;
        w.push(Witness::Chsh(ChshInstance {
            a: v0,
            b: v1,
            c: v3,
            d: v2,
            source: c.shape,
        }));
    }
    if colliders.is_empty() {
        for d in find_discriminating_paths(pag).into_iter().filter(|d| d.collider_at_b) {
            w.push(Witness::DiscriminatingPath(d));
        }
        if let Ok(Some(core)) = reduce_discriminating_path(pag) {
            w.push(Witness::DiscriminatingCore(core));
            if let Some(e) = core_esep(g, core) {
                w.push(Witness::ESep(e));
            }
        }
    }
    w
}

/// `{a} ⊥_e {b, c} | ∅ ∥ {v}` on the margin over the core's vertices.
fn core_esep(g: &MDag, k: DiscriminatingCore) -> Option<ESepWitness> {
    let keep = VertexSet::singleton(k.a).with(k.v).with(k.b).with(k.c);
    let m = latent_project(g, keep).ok()?;
    let idx = |x: usize| keep.iter().position(|y| y == x).unwrap();
    let (a, v) = (idx(k.a), idx(k.v));
    let bc = VertexSet::singleton(idx(k.b)).with(idx(k.c));
    let held = m_reachable(&m, VertexSet::singleton(a), VertexSet::EMPTY, VertexSet::singleton(v))
        .is_disjoint(bc);
    held.then(|| ESepWitness {
        a: VertexSet::singleton(k.a),
        b: VertexSet::singleton(k.b).with(k.c),
        c: VertexSet::EMPTY,
        d: VertexSet::singleton(k.v),
    })
}

/// Name-level, machine-checkable form of a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    NestedIndependence {
        sigma: Vec<String>,
        a: Vec<String>,
        b: Vec<String>,
        c: Vec<String>,
    },
    PagBidirectedEdge {
        u: String,
        v: String,
    },
    ColliderPath {
        path: Vec<String>,
        shape: ColliderShape,
    },
    DiscriminatingPath {
        path: Vec<String>,
        discriminated: String,
    },
    DiscriminatingCore {
        a: String,
        v: String,
        b: String,
        c: String,
    },
    FritzTriangle {
        vertices: Vec<String>,
    },
    Chsh {
        a: String,
        b: String,
        c: String,
        d: String,
        bound: f64,
        fritz_reduction: bool,
    },
    ESeparation {
        a: Vec<String>,
        b: Vec<String>,
        c: Vec<String>,
        d: Vec<String>,
    },
}

fn names_of(names: &[String], s: VertexSet) -> Vec<String> {
    s.iter().map(|v| names[v].clone()).collect()
}

pub fn emit_witness(names: &[String], w: &Witness) -> Constraint {
    let nm = |v: usize| names[v].clone();
    match w {
        Witness::Nested(x) => Constraint::NestedIndependence {
            sigma: x.sigma.iter().map(|&v| nm(v)).collect(),
            a: names_of(names, x.a),
            b: names_of(names, x.b),
            c: names_of(names, x.c),
        },
        Witness::PagBidirectedEdge(u, v) => Constraint::PagBidirectedEdge { u: nm(*u), v: nm(*v) },
        Witness::Collider3Path(c) => Constraint::ColliderPath {
            path: c.path.iter().map(|&v| nm(v)).collect(),
            shape: c.shape,
        },
        Witness::DiscriminatingPath(d) => Constraint::DiscriminatingPath {
            path: d.path.iter().map(|&v| nm(v)).collect(),
            discriminated: nm(d.discriminated()),
        },
        Witness::DiscriminatingCore(k) => Constraint::DiscriminatingCore {
            a: nm(k.a),
            v: nm(k.v),
            b: nm(k.b),
            c: nm(k.c),
        },
        Witness::FritzTriangle(t) => Constraint::FritzTriangle {
            vertices: t.iter().map(|&v| nm(v)).collect(),
        },
        Witness::Chsh(c) => Constraint::Chsh {
            a: nm(c.a),
            b: nm(c.b),
            c: nm(c.c),
            d: nm(c.d),
            bound: 2.0,
            fritz_reduction: c.via_fritz_reduction(),
        },
        Witness::ESep(e) => Constraint::ESeparation {
            a: names_of(names, e.a),
            b: names_of(names, e.b),
            c: names_of(names, e.c),
            d: names_of(names, e.d),
        },
    }
}

fn xs(v: &[String]) -> String {
    if v.is_empty() {
        "∅".to_string()
    } else {
        v.iter().map(|n| format!("X_{n}")).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::NestedIndependence { sigma, a, b, c } => {
                write!(f, "{} ⊥ {}", xs(a), xs(b))?;
                if !c.is_empty() {
                    write!(f, " | {}", xs(c))?;
                }
                write!(f, " after fixing {}", sigma.join(", "))
            }
            Constraint::PagBidirectedEdge { u, v } => write!(f, "PAG edge {u} <-> {v}"),
            Constraint::ColliderPath { path, shape } => {
                write!(f, "collider path {} ({})", path.join(" "), serde_json::to_value(shape).unwrap().as_str().unwrap())
            }
            Constraint::DiscriminatingPath { path, discriminated } => {
                write!(f, "discriminating path {} for {discriminated}", path.join(" "))
            }
            Constraint::DiscriminatingCore { a, v, b, c } => {
                write!(f, "induced {a} *-> {v} <-> {b} <-> {c}, {v} -> {c}")
            }
            Constraint::FritzTriangle { vertices } => {
                write!(f, "Fritz triangle {{{}}}", vertices.join(", "))
            }
            Constraint::Chsh {
                a,
                b,
                c,
                d,
                bound,
                fritz_reduction,
            } => {
                let e = |x: &str, y: &str| format!("E[X_{b} X_{d} | X_{a}={x}, X_{c}={y}]");
                write!(
                    f,
                    "-{bound} <= {} + {} + {} - {} <= {bound}",
                    e("-1", "+1"),
                    e("+1", "-1"),
                    e("-1", "-1"),
                    e("+1", "+1")
                )?;
                if *fritz_reduction {
                    write!(f, " (on the submodel where X_{d} is carried by X_{c})")?;
                }
                Ok(())
            }
            Constraint::ESeparation { a, b, c, d } => {
                write!(f, "{} ⊥_e {} | {} after deleting {}", xs(a), xs(b), xs(c), xs(d))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::build_pag;

    fn mdag(v: &[&str], e: &[(&str, &str)], f: &[&[&str]]) -> MDag {
        MDag::from_names(v, e, f, &[]).unwrap()
    }

    fn bell() -> MDag {
        mdag(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")], &[&["b", "d"]])
    }

    fn core_graph() -> MDag {
        mdag(&["a", "b", "c", "v"], &[("a", "v"), ("v", "c")], &[&["b", "v"], &["b", "c"]])
    }

    #[test]
    fn collider_path_of_bell_graph() {
        let g = bell();
        let pag = build_pag(&g).unwrap();
        let c = find_collider_3paths(&pag);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].path, [0, 1, 3, 2]);
        assert_eq!(c[0].shape, ColliderShape::EndsApart);
    }

    #[test]
    fn no_collider_paths_in_chain_or_dag() {
        let chain = mdag(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")], &[]);
        assert!(find_collider_3paths(&build_pag(&chain).unwrap()).is_empty());
        let equiv_dag = mdag(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("c", "b"), ("d", "b")],
            &[],
        );
        assert!(find_collider_3paths(&build_pag(&equiv_dag).unwrap()).is_empty());
    }

    #[test]
    fn discriminating_path_of_core_graph() {
        let g = core_graph();
        let pag = build_pag(&g).unwrap();
        let [a, b, c, v] = [0, 1, 2, 3];
        assert!(pag.is_bidirected(v, b));
        assert!(pag.is_bidirected(b, c));
        assert!(pag.is_directed(v, c));
        let d = find_discriminating_paths(&pag);
        assert!(d.iter().any(|d| d.path == vec![a, v, b, c] && d.collider_at_b));
        assert_eq!(
            reduce_discriminating_path(&pag).unwrap(),
            Some(DiscriminatingCore { a, v, b, c })
        );
    }

    #[test]
    fn longer_discriminating_path_reduces() {
        // a *-> v1 <-> v2 <-> b <-> c with v1, v2 -> c and the shield v1 -> b;
        // the shield makes <a, v1, v2, b> a shorter discriminating path
        let names = ["a", "b", "c", "v1", "v2"];
        let mut p = MarkedMixedGraph::new(&names).unwrap();
        let t = |p: &mut MarkedMixedGraph, x: &str, y: &str, mx, my| p.add(x, y, mx, my).unwrap();
        t(&mut p, "a", "v1", Mark::Circle, Mark::Arrow);
        t(&mut p, "v1", "v2", Mark::Arrow, Mark::Arrow);
        t(&mut p, "v2", "b", Mark::Arrow, Mark::Arrow);
        t(&mut p, "b", "c", Mark::Arrow, Mark::Arrow);
        t(&mut p, "v1", "c", Mark::Tail, Mark::Arrow);
        t(&mut p, "v2", "c", Mark::Tail, Mark::Arrow);
        t(&mut p, "v1", "b", Mark::Tail, Mark::Arrow);
        let id = |s: &str| p.index(s).unwrap();
        let d = find_discriminating_paths(&p);
        assert!(d.iter().any(|d| d.length() == 4));
        assert!(find_collider_3paths(&p).is_empty());
        let core = reduce_discriminating_path(&p).unwrap().unwrap();
        assert!(is_discriminating_core(&p, core.a, core.v, core.b, core.c));
        assert_eq!((core.a, core.v, core.b, core.c), (id("a"), id("v1"), id("v2"), id("b")));
    }

    #[test]
    fn reduce_requires_no_collider_path() {
        let pag = build_pag(&bell()).unwrap();
        assert!(matches!(reduce_discriminating_path(&pag), Err(Error::Precondition(_))));
        let chain = mdag(&["a", "b", "c"], &[("a", "b"), ("b", "c")], &[]);
        assert_eq!(reduce_discriminating_path(&build_pag(&chain).unwrap()).unwrap(), None);
    }

    #[test]
    fn fritz_triangles() {
        let triangle = mdag(&["a", "b", "c", "d"], &[("d", "b")], &[&["a", "b"], &["a", "c"], &["b", "c"]]);
        assert_eq!(find_fritz_triangles(&triangle), vec![[0, 1, 2]]);
        let equiv_facet = mdag(&["a", "b", "c", "d"], &[("d", "b")], &[&["a", "b", "c"]]);
        assert!(find_fritz_triangles(&equiv_facet).is_empty());
        let dag = mdag(&["a", "b"], &[("a", "b")], &[]);
        assert!(find_fritz_triangles(&dag).is_empty());
    }

    #[test]
    fn instrumental_esep() {
        let g = mdag(&["x", "y", "z"], &[("z", "x"), ("x", "y")], &[&["x", "y"]]);
        let w = find_esep_witnesses(&g);
        let [x, y, z] = [0, 1, 2];
        assert!(w.contains(&ESepWitness {
            a: VertexSet::singleton(y),
            b: VertexSet::singleton(z),
            c: VertexSet::EMPTY,
            d: VertexSet::singleton(x),
        }));
        let chain = mdag(&["x", "y", "z"], &[("z", "x"), ("x", "y")], &[]);
        assert!(find_esep_witnesses(&chain).is_empty());
    }

    #[test]
    fn gallery_classes() {
        let verma = mdag(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")], &[&["b", "d"]]);
        let r = classify(&verma).unwrap();
        assert_eq!(r.class, ModelClass::Nested);

        let r = classify(&bell()).unwrap();
        assert_eq!(r.class, ModelClass::NondagCi);
        assert!(r.decided);
        let chsh: Vec<&ChshInstance> = r
            .witnesses
            .iter()
            .filter_map(|w| match w {
                Witness::Chsh(c) => Some(c),
                _ => None,
            })
            .collect();
        assert_eq!(chsh.len(), 1);
        assert_eq!((chsh[0].a, chsh[0].b, chsh[0].c, chsh[0].d), (0, 1, 2, 3));

        let triangle = mdag(&["a", "b", "c", "d"], &[("d", "b")], &[&["a", "b"], &["a", "c"], &["b", "c"]]);
        let r = classify(&triangle).unwrap();
        assert_eq!(r.class, ModelClass::InequalityOnly);
        assert!(r.witnesses.contains(&Witness::FritzTriangle([0, 1, 2])));

        let equiv_facet = mdag(&["a", "b", "c", "d"], &[("d", "b")], &[&["a", "b", "c"]]);
        let r = classify(&equiv_facet).unwrap();
        assert_eq!(r.class, ModelClass::DagEquivalent);
        assert!(!r.decided);
        assert!(r.equivalent_dag.is_some());
    }

    #[test]
    fn core_graph_classifies_with_esep() {
        let g = core_graph();
        let r = classify(&g).unwrap();
        assert_eq!(r.class, ModelClass::NondagCi);
        let [a, b, c, v] = [0, 1, 2, 3];
        let want = ESepWitness {
            a: VertexSet::singleton(a),
            b: VertexSet::singleton(b).with(c),
            c: VertexSet::EMPTY,
            d: VertexSet::singleton(v),
        };
        assert!(r.witnesses.contains(&Witness::ESep(want)));
        let text = emit_witness(&r.names, &Witness::ESep(want)).to_string();
        assert_eq!(text, "X_a ⊥_e X_b,X_c | ∅ after deleting X_v");
    }

    #[test]
    fn chsh_rendering() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let w = Witness::Chsh(ChshInstance {
            a: 0,
            b: 1,
            c: 2,
            d: 3,
            source: ColliderShape::EndsApart,
        });
        let s = emit_witness(&names, &w).to_string();
        assert!(s.starts_with("-2 <= E[X_b X_d | X_a=-1, X_c=+1]"));
        assert!(s.ends_with("- E[X_b X_d | X_a=+1, X_c=+1] <= 2"));
    }
}
