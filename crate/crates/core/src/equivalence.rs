//! Ancestral and maximal checks, Markov equivalence of MAGs, brute-force
//! equivalence classes and PAGs.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Mark, MarkedMixedGraph, MDag};
use crate::projection::{mag_project, separating_set};
use crate::separation::msep;
use crate::vset::VertexSet;

/// Default limit on the number of skeleton edges for class enumeration.
pub const DEFAULT_MAX_EDGES: usize = 12;

/// Largest vertex count handled by the enumeration routines.
pub const MAX_CLASS_VERTICES: usize = 16;

/// A directed/bidirected graph stored as adjacency bitsets.
#[derive(Clone, Copy)]
struct Compact {
    n: usize,
    pa: [VertexSet; MAX_CLASS_VERTICES],
    ch: [VertexSet; MAX_CLASS_VERTICES],
    sp: [VertexSet; MAX_CLASS_VERTICES],
}

impl Compact {
    fn empty(n: usize) -> Compact {
        Compact {
            n,
            pa: [VertexSet::EMPTY; MAX_CLASS_VERTICES],
            ch: [VertexSet::EMPTY; MAX_CLASS_VERTICES],
            sp: [VertexSet::EMPTY; MAX_CLASS_VERTICES],
        }
    }

    fn from_mixed(m: &MarkedMixedGraph) -> Result<Compact> {
        if m.n() > MAX_CLASS_VERTICES {
            return Err(Error::TooLarge(format!(
                "limited to {MAX_CLASS_VERTICES} vertices, graph has {}",
                m.n()
            )));
        }
        let mut c = Compact::empty(m.n());
        for (u, v, mu, mv) in m.edges() {
            match (mu, mv) {
                (Mark::Tail, Mark::Arrow) => c.directed(u, v),
                (Mark::Arrow, Mark::Tail) => c.directed(v, u),
                (Mark::Arrow, Mark::Arrow) => c.bidirected(u, v),
                (Mark::Circle, _) | (_, Mark::Circle) => return Err(Error::CircleMarks),
                (Mark::Tail, Mark::Tail) => {
                    return Err(Error::Precondition(format!(
                        "undirected edge {} - {}",
                        m.name(u),
                        m.name(v)
                    )))
                }
            }
        }
        Ok(c)
    }

    #[inline]
    fn directed(&mut self, u: usize, v: usize) {
        self.pa[v].insert(u);
        self.ch[u].insert(v);
    }

    #[inline]
    fn bidirected(&mut self, u: usize, v: usize) {
        self.sp[u].insert(v);
        self.sp[v].insert(u);
    }

    fn ancestors(&self, s: VertexSet) -> VertexSet {
        let mut seen = s;
        let mut frontier = s;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next |= self.pa[v];
            }
            frontier = next - seen;
            seen |= frontier;
        }
        seen
    }

    /// Acyclic and no vertex is an ancestor of one of its spouses.
    fn is_ancestral(&self) -> bool {
        for v in 0..self.n {
            let strict = self.ancestors(self.pa[v]);
            if strict.contains(v) || !(strict & self.sp[v]).is_empty() {
                return false;
            }
        }
        true
    }

    /// Vertices m-connected to `a` given `c`; `anc` is `an(c)`.
    fn reach(&self, a: usize, c: VertexSet, anc: VertexSet) -> VertexSet {
        // seen[0]: arrived with a tail, seen[1]: arrived with an arrowhead
        let mut seen = [VertexSet::singleton(a), VertexSet::EMPTY];
        let mut stack = vec![(a, false)];
        while let Some((w, head)) = stack.pop() {
            let open = !c.contains(w);
            let mut next = [VertexSet::EMPTY; 2];
            if head {
                if open {
                    next[1] |= self.ch[w];
                }
                if anc.contains(w) {
                    next[0] |= self.pa[w];
                    next[1] |= self.sp[w];
                }
            } else if open {
                next[0] |= self.pa[w];
                next[1] |= self.ch[w] | self.sp[w];
            }
            for k in 0..2 {
                for x in (next[k] - seen[k]).iter() {
                    seen[k].insert(x);
                    stack.push((x, k == 1));
                }
            }
        }
        (seen[0] | seen[1]) - c
    }

    fn to_mixed(&self, names: &[String]) -> MarkedMixedGraph {
        let mut m = MarkedMixedGraph::with_sorted_names(names.to_vec());
        for v in 0..self.n {
            for u in self.pa[v].iter() {
                m.set_edge(u, v, Mark::Tail, Mark::Arrow);
            }
            for u in self.sp[v].iter().filter(|&u| u < v) {
                m.set_edge(u, v, Mark::Arrow, Mark::Arrow);
            }
        }
        m
    }
}

/// For each conditioning set (as bits) and each vertex `a`, the non-adjacent
/// partners `b > a` that are separated from `a`. Only pairs that are not
/// adjacent are recorded: adjacent pairs are never separated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Signature(Vec<VertexSet>);

/// Non-adjacent partners with a larger index, per vertex.
fn partners(n: usize, adj: &[VertexSet]) -> Vec<VertexSet> {
    (0..n)
        .map(|a| (VertexSet::full(n) - adj[a]).without(a) - VertexSet::full(a + 1))
        .collect()
}

fn signature(g: &Compact, partners: &[VertexSet]) -> Signature {
    let n = g.n;
    let mut out = Vec::new();
    for cbits in 0u64..1 << n {
        let c = VertexSet::from_bits(cbits);
        let anc = g.ancestors(c);
        for a in 0..n {
            let t = partners[a] - c;
            if c.contains(a) || t.is_empty() {
                continue;
            }
            out.push(t - g.reach(a, c, anc));
        }
    }
    Signature(out)
}

/// Compares against a stored signature, stopping at the first difference.
fn same_signature(g: &Compact, partners: &[VertexSet], want: &Signature) -> bool {
    let n = g.n;
    let mut i = 0;
    for cbits in 0u64..1 << n {
        let c = VertexSet::from_bits(cbits);
        let mut anc = None;
        for a in 0..n {
            let t = partners[a] - c;
            if c.contains(a) || t.is_empty() {
                continue;
            }
            let anc = *anc.get_or_insert_with(|| g.ancestors(c));
            if t - g.reach(a, c, anc) != want.0[i] {
                return false;
            }
            i += 1;
        }
    }
    true
}

/// Every non-adjacent pair is separated by some set.
fn separable_everywhere(sig: &Signature, n: usize, partners: &[VertexSet]) -> bool {
    let mut found = vec![VertexSet::EMPTY; n];
    let mut i = 0;
    for cbits in 0u64..1 << n {
        let c = VertexSet::from_bits(cbits);
        for a in 0..n {
            let t = partners[a] - c;
            if c.contains(a) || t.is_empty() {
                continue;
            }
            found[a] |= sig.0[i];
            i += 1;
        }
    }
    (0..n).all(|a| partners[a].is_subset(found[a]))
}

/// Directed part acyclic and no vertex an ancestor of a `<->` neighbour.
pub fn is_ancestral(m: &MarkedMixedGraph) -> Result<bool> {
    Ok(Compact::from_mixed(m)?.is_ancestral())
}

/// Every non-adjacent pair admits a separating set.
pub fn is_maximal(m: &MarkedMixedGraph) -> Result<bool> {
    if !is_ancestral(m)? {
        return Err(Error::NotAncestral);
    }
    let g = m.to_mdag()?;
    for a in 0..m.n() {
        for b in a + 1..m.n() {
            if !m.adjacent(a, b) && separating_set(&g, a, b).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Same m-separations. Because m-separation between sets decomposes into
/// separation between their elements, pairs suffice.
pub fn markov_equivalent(m1: &MarkedMixedGraph, m2: &MarkedMixedGraph) -> Result<bool> {
    if m1.names() != m2.names() {
        return Err(Error::MismatchedVertices);
    }
    if !is_ancestral(m1)? || !is_ancestral(m2)? {
        return Err(Error::NotAncestral);
    }
    let (g1, g2) = (m1.to_mdag()?, m2.to_mdag()?);
    let n = m1.n();
    for a in 0..n {
        for b in a + 1..n {
            let (sa, sb) = (VertexSet::singleton(a), VertexSet::singleton(b));
            for c in (g1.all().without(a).without(b)).subsets() {
                if msep(&g1, sa, sb, c) != msep(&g2, sa, sb, c) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub skeleton: Vec<(usize, usize)>,
    pub members: Vec<MarkedMixedGraph>,
    pub pag: MarkedMixedGraph,
}

impl EquivalenceClass {
    pub fn contains_dag(&self) -> bool {
        self.members.iter().any(|m| m.bidirected_edges().is_empty())
    }
}

/// Marks on which every member agrees, circles elsewhere.
pub fn unanimous_marks(members: &[MarkedMixedGraph]) -> MarkedMixedGraph {
    let first = &members[0];
    let mut pag = first.empty_like();
    for (u, v, mu, mv) in first.edges() {
        let agree = |at: usize, other: usize, mark: Mark| {
            members.iter().all(|m| m.mark_at(at, other) == Some(mark))
        };
        let eu = if agree(u, v, mu) { mu } else { Mark::Circle };
        let ev = if agree(v, u, mv) { mv } else { Mark::Circle };
        pag.set_edge(u, v, eu, ev);
    }
    pag
}

fn check_edges(edges: usize, max_edges: usize) -> Result<()> {
    if edges > max_edges {
        return Err(Error::TooLarge(format!(
            "skeleton has {edges} edges, enumeration cap is {max_edges}"
        )));
    }
    Ok(())
}

/// Orientation `code` of `edges`: base-3 digits, 0 is `u -> v`, 1 is
/// `u <- v`, 2 is `u <-> v`.
fn orient(n: usize, edges: &[(usize, usize)], mut code: u64) -> Compact {
    let mut c = Compact::empty(n);
    for &(u, v) in edges {
        match code % 3 {
            0 => c.directed(u, v),
            1 => c.directed(v, u),
            _ => c.bidirected(u, v),
        }
        code /= 3;
    }
    c
}

/// All MAGs over the skeleton of `m` that are Markov equivalent to `m`,
/// found by trying every assignment of `->`, `<-`, `<->` to its edges.
pub fn enumerate_class(m: &MarkedMixedGraph, max_edges: usize) -> Result<EquivalenceClass> {
    let base = Compact::from_mixed(m)?;
    if !base.is_ancestral() {
        return Err(Error::NotAncestral);
    }
    let skeleton = m.skeleton();
    check_edges(skeleton.len(), max_edges)?;
    let n = m.n();
    let adj: Vec<VertexSet> = (0..n).map(|v| m.neighbors(v)).collect();
    let part = partners(n, &adj);
    let want = signature(&base, &part);
    if !separable_everywhere(&want, n, &part) {
        return Err(Error::Precondition("graph is not maximal".into()));
    }
    let total = 3u64.pow(skeleton.len() as u32);
    let members: Vec<MarkedMixedGraph> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let c = orient(n, &skeleton, code);
            (c.is_ancestral() && same_signature(&c, &part, &want)).then(|| c.to_mixed(m.names()))
        })
        .collect();
    let pag = unanimous_marks(&members);
    Ok(EquivalenceClass {
        skeleton,
        members,
        pag,
    })
}

/// Every Markov equivalence class of MAGs over a skeleton, in order of the
/// first orientation code reaching each class.
pub fn skeleton_classes(
    names: &[String],
    skeleton: &[(usize, usize)],
    max_edges: usize,
) -> Result<Vec<EquivalenceClass>> {
    let n = names.len();
    if n > MAX_CLASS_VERTICES {
        return Err(Error::TooLarge(format!(
            "limited to {MAX_CLASS_VERTICES} vertices, graph has {n}"
        )));
    }
    check_edges(skeleton.len(), max_edges)?;
    let mut adj = vec![VertexSet::EMPTY; n];
    for &(u, v) in skeleton {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let part = partners(n, &adj);
    let total = 3u64.pow(skeleton.len() as u32);
    let found: Vec<(u64, Signature)> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let c = orient(n, skeleton, code);
            if !c.is_ancestral() {
                return None;
            }
            let sig = signature(&c, &part);
            separable_everywhere(&sig, n, &part).then_some((code, sig))
        })
        .collect();
    let mut order: Vec<Signature> = Vec::new();
    let mut groups: HashMap<Signature, Vec<u64>> = HashMap::new();
    for (code, sig) in found {
        groups
            .entry(sig.clone())
            .or_insert_with(|| {
                order.push(sig);
                Vec::new()
            })
            .push(code);
    }
    Ok(order
        .into_iter()
        .map(|sig| {
            let members: Vec<MarkedMixedGraph> = groups[&sig]
                .iter()
                .map(|&code| orient(n, skeleton, code).to_mixed(names))
                .collect();
            EquivalenceClass {
                skeleton: skeleton.to_vec(),
                pag: unanimous_marks(&members),
                members,
            }
        })
        .collect())
}

/// The class of the maximal ancestral projection of `g`.
pub fn mag_class(g: &MDag, max_edges: usize) -> Result<EquivalenceClass> {
    enumerate_class(&mag_project(g)?, max_edges)
}

pub fn build_pag(g: &MDag) -> Result<MarkedMixedGraph> {
    build_pag_with_cap(g, DEFAULT_MAX_EDGES)
}

pub fn build_pag_with_cap(g: &MDag, max_edges: usize) -> Result<MarkedMixedGraph> {
    Ok(mag_class(g, max_edges)?.pag)
}

/// A DAG with the same m-separations as `g`, when its PAG has no
/// bidirected edge.
pub fn ci_dag_representable(g: &MDag) -> Result<Option<MDag>> {
    ci_dag_representable_with_cap(g, DEFAULT_MAX_EDGES)
}

pub fn ci_dag_representable_with_cap(g: &MDag, max_edges: usize) -> Result<Option<MDag>> {
    let class = mag_class(g, max_edges)?;
    Ok(dag_member(&class))
}

/// First member of the class without bidirected edges, if the PAG has none.
pub fn dag_member(class: &EquivalenceClass) -> Option<MDag> {
    if !class.pag.bidirected_edges().is_empty() {
        return None;
    }
    class
        .members
        .iter()
        .find(|m| m.bidirected_edges().is_empty())
        .map(|m| m.to_mdag().expect("class members are acyclic"))
}
