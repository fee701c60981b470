//! Canonical DAGs, latent projection and maximal ancestral projection.

use crate::error::{Error, Result};
use crate::graph::{Mark, MarkedMixedGraph, MDag};
use crate::separation::msep;
use crate::vset::{VertexSet, MAX_VERTICES};

/// Largest graph accepted by [`mag_project`]; pairwise separability is
/// decided by enumerating `2^(n-2)` candidate sets.
pub const MAX_MAG_VERTICES: usize = 16;

/// The DAG obtained by giving every facet its own latent parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDag {
    pub dag: MDag,
    /// The original vertices, as indices of `dag`.
    pub observed: VertexSet,
    /// `(facet members, latent name)` in facet order.
    pub latents: Vec<(Vec<String>, String)>,
}

impl CanonicalDag {
    pub fn latent_set(&self) -> VertexSet {
        self.dag.all() - self.observed
    }
}

pub fn canonical_dag(g: &MDag) -> Result<CanonicalDag> {
    let total = g.n() + g.facets().len();
    if total > MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "canonical DAG needs {total} vertices, limit is {MAX_VERTICES}"
        )));
    }
    let mut latents = Vec::new();
    for (i, f) in g.facets().iter().enumerate() {
        let mut name = format!("h{}", i + 1);
        while g.index(&name).is_ok() {
            name.insert(0, '_');
        }
        latents.push((g.names_of(*f), name));
    }
    let mut names: Vec<String> = g.names().to_vec();
    names.extend(latents.iter().map(|(_, h)| h.clone()));
    names.sort();
    let idx = |s: &str| names.binary_search_by(|x| x.as_str().cmp(s)).unwrap();

    let n = names.len();
    let mut parents = vec![VertexSet::EMPTY; n];
    for (a, b) in g.directed_edges() {
        parents[idx(g.name(b))].insert(idx(g.name(a)));
    }
    for (members, h) in &latents {
        let hi = idx(h);
        for m in members {
            parents[idx(m)].insert(hi);
        }
    }
    let observed: VertexSet = g.names().iter().map(|s| idx(s)).collect();
    let context: VertexSet = g.context().iter().map(|v| idx(g.name(v))).collect();
    let dag = MDag::from_parts(names, parents, Vec::new(), context);
    Ok(CanonicalDag {
        dag,
        observed,
        latents,
    })
}

/// Observed vertices reached from `start` by directed paths whose vertices,
/// other than the endpoint, lie in `latent`. Observed members of `start`
/// are reached by the empty path.
fn reach_through(g: &MDag, start: VertexSet, latent: VertexSet) -> VertexSet {
    let mut found = start - latent;
    let mut seen = start & latent;
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = VertexSet::EMPTY;
        for v in frontier.iter() {
            next |= g.children(v);
        }
        found |= next - latent;
        let lat = (next & latent) - seen;
        seen |= lat;
        frontier = lat;
    }
    found
}

/// Latent projection onto `keep`: `a -> b` for each directed walk with
/// latent interior, and a face for every source (a latent vertex or a
/// facet) whose latent-interior directed paths reach it.
pub fn latent_project(g: &MDag, keep: VertexSet) -> Result<MDag> {
    if !keep.is_subset(g.all()) {
        return Err(Error::UnknownVertex(format!("index {:?}", keep - g.all())));
    }
    let latent = g.all() - keep;
    let map: Vec<usize> = keep.iter().collect();
    let remap = |s: VertexSet| -> VertexSet {
        map.iter()
            .enumerate()
            .filter(|(_, &old)| s.contains(old))
            .map(|(new, _)| new)
            .collect()
    };

    let parents_new: Vec<VertexSet> = {
        let mut p = vec![VertexSet::EMPTY; map.len()];
        for (ia, &a) in map.iter().enumerate() {
            for b in reach_through(g, g.children(a), latent).iter() {
                p[remap(VertexSet::singleton(b)).first().unwrap()].insert(ia);
            }
        }
        p
    };

    let mut faces = Vec::new();
    for l in latent.iter() {
        faces.push(remap(reach_through(g, g.children(l), latent)));
    }
    for f in g.facets() {
        faces.push(remap(reach_through(g, *f, latent)));
    }
    let names = map.iter().map(|&v| g.name(v).to_string()).collect();
    Ok(MDag::from_parts(
        names,
        parents_new,
        faces,
        remap(g.context() & keep),
    ))
}

/// Some set separating `a` and `b`, if one exists. Tries the ancestral
/// candidate `an({a,b}) \ {a,b}` first, then every subset of the rest.
pub fn separating_set(g: &MDag, a: usize, b: usize) -> Option<VertexSet> {
    let pair = VertexSet::singleton(a).with(b);
    let (sa, sb) = (VertexSet::singleton(a), VertexSet::singleton(b));
    let guess = g.ancestors(pair) - pair;
    if msep(g, sa, sb, guess) {
        return Some(guess);
    }
    (g.all() - pair).subsets().find(|&c| msep(g, sa, sb, c))
}

/// Maximal ancestral projection: inseparable pairs become adjacent, oriented
/// by ancestry (`a -> b` when `a ∈ an(b)`) and bidirected otherwise.
pub fn mag_project(g: &MDag) -> Result<MarkedMixedGraph> {
    if !g.context().is_empty() {
        return Err(Error::HasContext);
    }
    if g.n() > MAX_MAG_VERTICES {
        return Err(Error::TooLarge(format!(
            "maximal ancestral projection is limited to {MAX_MAG_VERTICES} vertices, graph has {}",
            g.n()
        )));
    }
    let n = g.n();
    let anc: Vec<VertexSet> = (0..n).map(|v| g.ancestors(VertexSet::singleton(v))).collect();
    let mut m = MarkedMixedGraph::with_sorted_names(g.names().to_vec());
    for a in 0..n {
        for b in a + 1..n {
            if separating_set(g, a, b).is_some() {
                continue;
            }
            if anc[b].contains(a) {
                m.set_edge(a, b, Mark::Tail, Mark::Arrow);
            } else if anc[a].contains(b) {
                m.set_edge(a, b, Mark::Arrow, Mark::Tail);
            } else {
                m.set_edge(a, b, Mark::Arrow, Mark::Arrow);
            }
        }
    }
    Ok(m)
}
