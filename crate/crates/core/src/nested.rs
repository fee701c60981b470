//! Fixing, fixing-sequence search and nested (Verma) constraint discovery.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MDag;
use crate::separation::{is_fixable, m_reachable};
use crate::vset::VertexSet;

/// Largest graph accepted by [`find_nested_constraints`].
pub const MAX_NESTED_VERTICES: usize = 12;

/// Fixes `v`: drops every edge with an arrowhead at `v` (incoming directed
/// edges and the faces containing `v`) and marks `v` as context.
pub fn fix_graph(g: &MDag, v: usize) -> Result<MDag> {
    if v >= g.n() {
        return Err(Error::UnknownVertex(format!("index {v}")));
    }
    if g.is_context(v) {
        return Err(Error::ContextVertex(g.name(v).to_string()));
    }
    if !is_fixable(g, v)? {
        return Err(Error::NotFixable(g.name(v).to_string()));
    }
    let mut parents: Vec<VertexSet> = (0..g.n()).map(|w| g.parents(w)).collect();
    parents[v] = VertexSet::EMPTY;
    let faces: Vec<VertexSet> = g.facets().iter().map(|f| f.without(v)).collect();
    Ok(g.with_structure(parents, faces, g.context().with(v)))
}

/// A graph reachable by a sequence of fixings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachable {
    pub sigma: Vec<usize>,
    pub graph: MDag,
}

/// Breadth-first search over fixing sequences, starting from `g` itself
/// (empty sequence). Each distinct graph is reported once, with the first
/// (shortest, then lexicographically smallest) sequence reaching it.
pub fn reachable_graphs(g: &MDag, max_depth: Option<usize>) -> Vec<Reachable> {
    let mut seen: HashSet<MDag> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(g.clone());
    queue.push_back(Reachable {
        sigma: Vec::new(),
        graph: g.clone(),
    });
    while let Some(cur) = queue.pop_front() {
        let expand = max_depth.is_none_or(|d| cur.sigma.len() < d);
        if expand {
            for v in cur.graph.random().iter() {
                if !is_fixable(&cur.graph, v).unwrap_or(false) {
                    continue;
                }
                let next = fix_graph(&cur.graph, v).expect("fixable vertex");
                if seen.insert(next.clone()) {
                    let mut sigma = cur.sigma.clone();
                    sigma.push(v);
                    queue.push_back(Reachable { sigma, graph: next });
                }
            }
        }
        out.push(cur);
    }
    out
}

/// `A ⊥ B | C` holding in the graph reached by fixing `sigma`, where `C`
/// contains every fixed vertex, that fails in the original graph for every
/// conditioning set `(C \ sigma) ∪ S` with `S ⊆ sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NestedWitness {
    pub sigma: Vec<usize>,
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
}

impl NestedWitness {
    pub fn render(&self, g: &MDag) -> String {
        let x = |s: VertexSet| {
            g.names_of(s)
                .iter()
                .map(|n| format!("X_{n}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let fixed: Vec<&str> = self.sigma.iter().map(|&v| g.name(v)).collect();
        let given = if self.c.is_empty() {
            String::new()
        } else {
            format!(" | {}", x(self.c))
        };
        format!(
            "{} ⊥ {}{given} after fixing {}",
            x(self.a),
            x(self.b),
            fixed.join(", ")
        )
    }

    /// Graph obtained from `g` by applying the fixing sequence.
    pub fn fixed_graph(&self, g: &MDag) -> Result<MDag> {
        let mut cur = g.clone();
        for &v in &self.sigma {
            cur = fix_graph(&cur, v)?;
        }
        Ok(cur)
    }
}

/// For every conditioning set `C` (as bits) and every vertex `a`, the set of
/// vertices m-separated from `a` given `C`.
struct SepTable {
    n: usize,
    rows: Vec<VertexSet>,
}

impl SepTable {
    /// Rows for every `C = base ∪ C0`, `C0 ⊆ free`, indexed by `C0` bits
    /// compressed into `free`'s positions.
    fn build(g: &MDag, base: VertexSet, free: VertexSet) -> (SepTable, Vec<u64>) {
        let n = g.n();
        let free_bits: Vec<usize> = free.iter().collect();
        let count = 1usize << free_bits.len();
        let mut rows = vec![VertexSet::EMPTY; count * n];
        let mut masks = Vec::with_capacity(count);
        for k in 0..count {
            let c0: VertexSet = free_bits
                .iter()
                .enumerate()
                .filter(|(i, _)| k >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            masks.push(c0.bits());
            let c = base | c0;
            for a in (g.all() - c).iter() {
                let reach = m_reachable(g, VertexSet::singleton(a), c, VertexSet::EMPTY);
                rows[k * n + a] = g.all() - reach - c;
            }
        }
        (SepTable { n, rows }, masks)
    }

    #[inline]
    fn sep(&self, k: usize, a: usize) -> VertexSet {
        self.rows[k * self.n + a]
    }
}

/// Position of `c0` in a table built over `free`.
fn compress(c0: VertexSet, free: VertexSet) -> usize {
    free.iter()
        .enumerate()
        .filter(|&(_, v)| c0.contains(v))
        .fold(0usize, |acc, (i, _)| acc | 1 << i)
}

/// Searches every reachable fixed graph for non-trivial nested constraints.
/// Witnesses have inclusion-minimal `A` and `B`, and for a given `(A, B)`
/// only the inclusion-minimal random parts of `C` are kept.
///
/// A separation counts only if, for some last-fixed vertex `v`, a path
/// avoiding `v` joined `A` and `B` in the graph just before `v` was fixed;
/// separations produced only by cutting paths through `v` are skipped.
pub fn find_nested_constraints(g: &MDag) -> Result<Vec<NestedWitness>> {
    if !g.context().is_empty() {
        return Err(Error::HasContext);
    }
    if g.n() > MAX_NESTED_VERTICES {
        return Err(Error::TooLarge(format!(
            "nested constraint search is limited to {MAX_NESTED_VERTICES} vertices, graph has {}",
            g.n()
        )));
    }
    let (g_table, _) = SepTable::build(g, VertexSet::EMPTY, g.all());
    let reachable = reachable_graphs(g, None);
    let known: HashSet<&MDag> = reachable.iter().map(|r| &r.graph).collect();
    let mut out = Vec::new();
    for r in &reachable {
        if r.sigma.is_empty() {
            continue;
        }
        let sigma_set: VertexSet = r.sigma.iter().copied().collect();
        let before = last_steps(g, sigma_set, &known);
        out.extend(witnesses_for(g, &g_table, r, sigma_set, &before));
    }
    out.sort_by(|x, y| {
        (x.sigma.len(), &x.sigma, x.a.len() + x.b.len(), x.a, x.b, x.c.len(), x.c).cmp(&(
            y.sigma.len(),
            &y.sigma,
            y.a.len() + y.b.len(),
            y.a,
            y.b,
            y.c.len(),
            y.c,
        ))
    });
    Ok(out)
}

/// The graph with every vertex of `s` fixed, in whatever order.
fn fixed_set(g: &MDag, s: VertexSet) -> MDag {
    let parents = (0..g.n()).map(|w| if s.contains(w) { VertexSet::EMPTY } else { g.parents(w) }).collect();
    let faces: Vec<VertexSet> = g.facets().iter().map(|f| *f - s).collect();
    g.with_structure(parents, faces, s)
}

/// Pairs `(G', v)` with `v` in `sigma`, `G'` reachable with `sigma \ {v}`
/// fixed, and `v` fixable in `G'`.
fn last_steps(g: &MDag, sigma: VertexSet, known: &HashSet<&MDag>) -> Vec<(MDag, usize)> {
    sigma
        .iter()
        .filter_map(|v| {
            let prev = fixed_set(g, sigma.without(v));
            (known.contains(&prev) && is_fixable(&prev, v).unwrap_or(false)).then_some((prev, v))
        })
        .collect()
}

fn witnesses_for(
    g: &MDag,
    g_table: &SepTable,
    r: &Reachable,
    sigma: VertexSet,
    before: &[(MDag, usize)],
) -> Vec<NestedWitness> {
    let random = g.all() - sigma;
    let (star, _) = SepTable::build(&r.graph, sigma, random);
    let all = g.all();

    let holds_star = |a: VertexSet, b: VertexSet, k: usize| a.iter().all(|x| b.is_subset(star.sep(k, x)));
    // some path avoiding the last fixed vertex was open before fixing it
    let cut_by_fixing = |a: VertexSet, b: VertexSet, c: VertexSet| {
        before.iter().any(|(prev, v)| {
            a.iter().any(|x| {
                b.iter().any(|y| {
                    let cond = (a | b | c).without(x).without(y);
                    m_reachable(prev, VertexSet::singleton(x), cond, VertexSet::singleton(*v)).contains(y)
                })
            })
        })
    };
    let is_new = |a: VertexSet, b: VertexSet, c0: VertexSet, k: usize| -> bool {
        if !holds_star(a, b, k) {
            return false;
        }
        let swept = sigma.subsets().all(|s| {
            let kg = compress(c0 | s, all);
            !a.iter().all(|x| b.is_subset(g_table.sep(kg, x)))
        });
        swept && cut_by_fixing(a, b, c0 | sigma)
    };

    let mut found: Vec<(VertexSet, VertexSet, VertexSet)> = Vec::new();
    for c0 in random.subsets() {
        let k = compress(c0, random);
        let rest = random - c0;
        for u in rest.subsets() {
            if u.len() < 2 {
                continue;
            }
            let first = u.first().unwrap();
            let tail = u.without(first);
            for b in tail.subsets() {
                if b.is_empty() {
                    continue;
                }
                let a = u - b;
                if !is_new(a, b, c0, k) {
                    continue;
                }
                let a_min = a.len() == 1 || a.iter().all(|x| !is_new(a.without(x), b, c0, k));
                let b_min = b.len() == 1 || b.iter().all(|x| !is_new(a, b.without(x), c0, k));
                if a_min && b_min {
                    found.push((a, b, c0));
                }
            }
        }
    }
    found
        .iter()
        .filter(|&&(a, b, c0)| {
            !found
                .iter()
                .any(|&(a2, b2, c2)| a2 == a && b2 == b && c2 != c0 && c2.is_subset(c0))
        })
        .map(|&(a, b, c0)| NestedWitness {
            sigma: r.sigma.clone(),
            a,
            b,
            c: c0 | sigma,
        })
        .collect()
}

/// Membership oracle for a conditional independence model over vertices
/// `0..n`, queried pairwise.
pub trait IndependenceModel {
    fn vertex_count(&self) -> usize;
    fn independent(&self, a: usize, b: usize, given: VertexSet) -> bool;
}

impl IndependenceModel for MDag {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn independent(&self, a: usize, b: usize, given: VertexSet) -> bool {
        !m_reachable(self, VertexSet::singleton(a), given, VertexSet::EMPTY).contains(b)
    }
}

/// `A ⊥ B | C` over vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CiStatement {
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
}

/// An explicit list of statements, closed under symmetry and decomposition.
#[derive(Clone, Debug, Default)]
pub struct CiModel {
    n: usize,
    pairs: HashSet<(usize, usize, VertexSet)>,
}

impl CiModel {
    pub fn new(n: usize, statements: &[CiStatement]) -> CiModel {
        let mut pairs = HashSet::new();
        for s in statements {
            for x in s.a.iter() {
                for y in s.b.iter() {
                    pairs.insert((x.min(y), x.max(y), s.c));
                }
            }
        }
        CiModel { n, pairs }
    }

    /// All pairwise m-separations of `g`.
    pub fn from_graph(g: &MDag) -> CiModel {
        let mut statements = Vec::new();
        for a in 0..g.n() {
            for b in a + 1..g.n() {
                let rest = g.all().without(a).without(b);
                for c in rest.subsets() {
                    if g.independent(a, b, c) {
                        statements.push(CiStatement {
                            a: VertexSet::singleton(a),
                            b: VertexSet::singleton(b),
                            c,
                        });
                    }
                }
            }
        }
        CiModel::new(g.n(), &statements)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl IndependenceModel for CiModel {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn independent(&self, a: usize, b: usize, given: VertexSet) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b), given))
    }
}

/// `v ⊥ s`, `a ⊥ b | D`, `a ⊥̸ b | D ∪ {s}` with `v ∈ {a, b} ∪ D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonDagPattern {
    pub v: usize,
    pub s: usize,
    pub a: usize,
    pub b: usize,
    pub d: VertexSet,
    /// `D` is inclusion-minimal among all sets separating `a` and `b`, not
    /// only among the sets completing the pattern.
    pub separator_minimal: bool,
}

/// Every instance of the pattern, with `D` inclusion-minimal among the sets
/// completing it for the given `(v, s, a, b)`.
pub fn all_nondag_patterns<M: IndependenceModel + ?Sized>(model: &M) -> Vec<NonDagPattern> {
    let n = model.vertex_count();
    let all = VertexSet::full(n);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut seps: Vec<VertexSet> = (all.without(a).without(b))
                .subsets()
                .filter(|&d| model.independent(a, b, d))
                .collect();
            seps.sort_by_key(|d| (d.len(), d.bits()));
            for s in (all.without(a).without(b)).iter() {
                for v in 0..n {
                    if v == s || !model.independent(v.min(s), v.max(s), VertexSet::EMPTY) {
                        continue;
                    }
                    let mut chosen: Vec<VertexSet> = Vec::new();
                    for &d in &seps {
                        if d.contains(s) {
                            continue;
                        }
                        let touches = v == a || v == b || d.contains(v);
                        if !touches || model.independent(a, b, d.with(s)) {
                            continue;
                        }
                        if chosen.iter().any(|c| c.is_subset(d)) {
                            continue;
                        }
                        chosen.push(d);
                        let separator_minimal =
                            !seps.iter().any(|&e| e != d && e.is_subset(d));
                        out.push(NonDagPattern {
                            v,
                            s,
                            a,
                            b,
                            d,
                            separator_minimal,
                        });
                    }
                }
            }
        }
    }
    out
}

/// First pattern found, preferring ones whose `D` is a minimal separator.
pub fn detect_nondag_pattern<M: IndependenceModel + ?Sized>(model: &M) -> Option<NonDagPattern> {
    let all = all_nondag_patterns(model);
    all.iter()
        .find(|p| p.separator_minimal)
        .or_else(|| all.first())
        .copied()
}
