//! m-separation, e-separation, Markov blankets, districts and fixability.
//!
//! Separation is decided by reachability over `(vertex, arrowhead-on-arrival)`
//! states directly on the mDAG. Traversing a facet presents an arrowhead at
//! both of its ends, so a vertex is a collider exactly when it is entered and
//! left through arrowheads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MDag;
use crate::vset::VertexSet;

fn check_disjoint(g: &MDag, sets: &[VertexSet]) -> Result<()> {
    for (i, x) in sets.iter().enumerate() {
        if !x.is_subset(g.all()) {
            return Err(Error::UnknownVertex(format!("index {:?}", *x - g.all())));
        }
        for y in &sets[i + 1..] {
            let both = *x & *y;
            if !both.is_empty() {
                return Err(Error::Overlap(g.names_of(both)));
            }
        }
    }
    Ok(())
}

/// Vertices reachable from `sources` along walks that are open given `cond`
/// in the graph with `removed` deleted.
pub(crate) fn m_reachable(
    g: &MDag,
    sources: VertexSet,
    cond: VertexSet,
    removed: VertexSet,
) -> VertexSet {
    let keep = g.all() - removed;
    // ancestors of the conditioning set inside the deleted graph
    let mut anc = cond;
    let mut frontier = cond;
    while !frontier.is_empty() {
        let mut grown = VertexSet::EMPTY;
        for v in frontier.iter() {
            grown |= g.parents(v) & keep;
        }
        frontier = grown - anc;
        anc |= grown;
    }

    // arrived with a tail (or start) / arrived with an arrowhead
    let mut seen_tail = sources & keep;
    let mut seen_arrow = VertexSet::EMPTY;
    let mut todo_tail = seen_tail;
    let mut todo_arrow = VertexSet::EMPTY;
    loop {
        if let Some(v) = todo_tail.first() {
            todo_tail.remove(v);
            if cond.contains(v) {
                continue;
            }
            // non-collider whatever the exit edge
            let to_arrow = (g.children(v) | g.siblings(v)) & keep;
            let to_tail = g.parents(v) & keep;
            todo_arrow |= to_arrow - seen_arrow;
            seen_arrow |= to_arrow;
            todo_tail |= to_tail - seen_tail;
            seen_tail |= to_tail;
        } else if let Some(v) = todo_arrow.first() {
            todo_arrow.remove(v);
            if !cond.contains(v) {
                // leaving through a tail keeps v a non-collider
                let to = g.children(v) & keep;
                todo_arrow |= to - seen_arrow;
                seen_arrow |= to;
            }
            if anc.contains(v) {
                // collider: exits with an arrowhead at v
                let to_arrow = g.siblings(v) & keep;
                let to_tail = g.parents(v) & keep;
                todo_arrow |= to_arrow - seen_arrow;
                seen_arrow |= to_arrow;
                todo_tail |= to_tail - seen_tail;
                seen_tail |= to_tail;
            }
        } else {
            break;
        }
    }
    seen_tail | seen_arrow
}

/// `A ⊥_m B | C`.
pub fn m_separated(g: &MDag, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<bool> {
    check_disjoint(g, &[a, b, c])?;
    Ok(m_reachable(g, a, c, VertexSet::EMPTY).is_disjoint(b))
}

/// `A ⊥_e B | C` after deleting `D`: every path is blocked by `C` or passes
/// through `D`.
pub fn e_separated(
    g: &MDag,
    a: VertexSet,
    b: VertexSet,
    c: VertexSet,
    d: VertexSet,
) -> Result<bool> {
    check_disjoint(g, &[a, b, c, d])?;
    Ok(m_reachable(g, a, c, d).is_disjoint(b))
}

/// Unchecked m-separation for hot loops; sets must be disjoint.
#[inline]
pub(crate) fn msep(g: &MDag, a: VertexSet, b: VertexSet, c: VertexSet) -> bool {
    m_reachable(g, a, c, VertexSet::EMPTY).is_disjoint(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// `v_i -> v_{i+1}`
    Forward,
    /// `v_i <- v_{i+1}`
    Backward,
    /// `v_i <-> v_{i+1}` (shared facet)
    Bidirected,
}

impl EdgeKind {
    fn arrow_at_start(self) -> bool {
        matches!(self, EdgeKind::Backward | EdgeKind::Bidirected)
    }
    fn arrow_at_end(self) -> bool {
        matches!(self, EdgeKind::Forward | EdgeKind::Bidirected)
    }
}

/// A path of distinct vertices; `edges[i]` joins `vertices[i]` and
/// `vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeKind>,
}

impl Path {
    /// Collider flag for each internal vertex.
    pub fn colliders(&self) -> Vec<bool> {
        self.edges
            .windows(2)
            .map(|w| w[0].arrow_at_end() && w[1].arrow_at_start())
            .collect()
    }

    pub fn render(&self, g: &MDag) -> String {
        let mut s = g.name(self.vertices[0]).to_string();
        for (e, &v) in self.edges.iter().zip(&self.vertices[1..]) {
            s.push_str(match e {
                EdgeKind::Forward => " -> ",
                EdgeKind::Backward => " <- ",
                EdgeKind::Bidirected => " <-> ",
            });
            s.push_str(g.name(v));
        }
        s
    }
}

/// Finds one path from `A` to `B` that is open given `C`, by depth-first
/// search over simple paths. Exponential in the worst case; meant for
/// reporting witnesses on small graphs.
pub fn open_path(g: &MDag, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<Option<Path>> {
    check_disjoint(g, &[a, b, c])?;
    let anc = g.ancestors(c);
    for start in a.iter() {
        let mut path = Path {
            vertices: vec![start],
            edges: vec![],
        };
        if dfs_open(g, b, c, anc, &mut path, VertexSet::singleton(start)) {
            return Ok(Some(path));
        }
    }
    Ok(None)
}

fn dfs_open(
    g: &MDag,
    b: VertexSet,
    c: VertexSet,
    anc: VertexSet,
    path: &mut Path,
    on_path: VertexSet,
) -> bool {
    let v = *path.vertices.last().unwrap();
    if b.contains(v) {
        return true;
    }
    let steps = g
        .children(v)
        .iter()
        .map(|w| (w, EdgeKind::Forward))
        .chain(g.parents(v).iter().map(|w| (w, EdgeKind::Backward)))
        .chain(g.siblings(v).iter().map(|w| (w, EdgeKind::Bidirected)))
        .collect::<Vec<_>>();
    for (w, kind) in steps {
        if on_path.contains(w) {
            continue;
        }
        if let Some(&prev) = path.edges.last() {
            let collider = prev.arrow_at_end() && kind.arrow_at_start();
            let open = if collider { anc.contains(v) } else { !c.contains(v) };
            if !open {
                continue;
            }
        }
        path.vertices.push(w);
        path.edges.push(kind);
        if dfs_open(g, b, c, anc, path, on_path.with(w)) {
            return true;
        }
        path.vertices.pop();
        path.edges.pop();
    }
    false
}

fn random_vertex(g: &MDag, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::UnknownVertex(format!("index {v}")));
    }
    if g.is_context(v) {
        return Err(Error::ContextVertex(g.name(v).to_string()));
    }
    Ok(())
}

/// Vertices reachable from `v` by a walk whose internal vertices are all
/// colliders and whose first edge has an arrowhead at `v`.
pub fn markov_blanket(g: &MDag, v: usize) -> Result<VertexSet> {
    random_vertex(g, v)?;
    let mut blanket = g.parents(v);
    // vertices entered through an arrowhead; only these can be colliders
    let mut entered = VertexSet::EMPTY;
    let mut stack: Vec<usize> = g.siblings(v).iter().collect();
    while let Some(w) = stack.pop() {
        if entered.contains(w) {
            continue;
        }
        entered.insert(w);
        blanket.insert(w);
        // leave w through an arrowhead at w: w <- x or w <-> x
        blanket |= g.parents(w);
        for x in g.siblings(w).iter() {
            if !entered.contains(x) {
                stack.push(x);
            }
        }
    }
    Ok(blanket.without(v))
}

/// `(dis(v) \ {v}) ∪ pa(dis(v))`, with `v` itself excluded.
pub fn markov_blanket_formula(g: &MDag, v: usize) -> Result<VertexSet> {
    random_vertex(g, v)?;
    let dis = g.district(v);
    let mut pa = VertexSet::EMPTY;
    for w in dis.iter() {
        pa |= g.parents(w);
    }
    Ok((dis | pa).without(v))
}

/// `de(v) ∩ dis(v) = {v}`. Context vertices are already fixed and report
/// `false`.
pub fn is_fixable(g: &MDag, v: usize) -> Result<bool> {
    if v >= g.n() {
        return Err(Error::UnknownVertex(format!("index {v}")));
    }
    if g.is_context(v) {
        return Ok(false);
    }
    let r = g.relations(v);
    Ok((r.de & r.dis) == VertexSet::singleton(v))
}

/// No strict descendant of `v` can be reached from `v` by a walk over
/// bidirected edges only. Agrees with [`is_fixable`].
pub fn is_fixable_by_walks(g: &MDag, v: usize) -> Result<bool> {
    if v >= g.n() {
        return Err(Error::UnknownVertex(format!("index {v}")));
    }
    if g.is_context(v) {
        return Ok(false);
    }
    let mut strict_de = VertexSet::EMPTY;
    let mut stack: Vec<usize> = g.children(v).iter().collect();
    while let Some(w) = stack.pop() {
        if !strict_de.contains(w) {
            strict_de.insert(w);
            stack.extend(g.children(w).iter());
        }
    }
    let mut red = VertexSet::EMPTY;
    let mut stack: Vec<usize> = g.siblings(v).iter().collect();
    while let Some(w) = stack.pop() {
        if !red.contains(w) {
            red.insert(w);
            stack.extend(g.siblings(w).iter());
        }
    }
    Ok(strict_de.is_disjoint(red.without(v)))
}

/// Connected components of the random vertices under facet co-membership,
/// ordered by smallest member.
pub fn districts(g: &MDag) -> Vec<VertexSet> {
    let mut left = g.random();
    let mut out = Vec::new();
    while let Some(v) = left.first() {
        let d = g.district(v);
        out.push(d);
        left -= d;
    }
    out
}
