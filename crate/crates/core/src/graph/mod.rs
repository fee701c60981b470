//! mDAGs and marked mixed graphs.
//!
//! An [`MDag`] is a DAG together with a simplicial complex of bidirected faces.
//! Only the facets (maximal faces) are stored; every subset of a facet is an
//! implicit face. Vertices are kept sorted by name so that equal graphs have
//! equal representations and every derived output is ordered
//! lexicographically.

mod format;
mod mixed;

pub use format::{parse_mdag, serialize_mdag};
pub use mixed::{Mark, MarkedMixedGraph};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

/// An mDAG: vertices, acyclic directed edges, bidirected facets and an
/// optional set of context (fixed) vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MDag {
    names: Vec<String>,
    parents: Vec<VertexSet>,
    children: Vec<VertexSet>,
    facets: Vec<VertexSet>,
    siblings: Vec<VertexSet>,
    context: VertexSet,
}

/// Unvalidated, name-based description of an mDAG, as read from a file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescription {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub faces: Vec<Vec<String>>,
    pub context: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    DuplicateVertex(String),
    UnknownVertex(String),
    TooManyVertices(usize),
    SelfLoop(String),
    Cycle(Vec<String>),
    SmallFacet(Vec<String>),
    RepeatedFacetMember(Vec<String>),
    NonMaximalFacet { facet: Vec<String>, within: Vec<String> },
    ContextHasParent { vertex: String, parent: String },
    ContextInFacet { vertex: String, facet: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertex(v) => write!(f, "vertex `{v}` declared twice"),
            Violation::UnknownVertex(v) => write!(f, "undeclared vertex `{v}`"),
            Violation::TooManyVertices(n) => {
                write!(f, "{n} vertices exceeds the limit of {MAX_VERTICES}")
            }
            Violation::SelfLoop(v) => write!(f, "self-loop at `{v}`"),
            Violation::Cycle(c) => write!(f, "directed cycle among {{{}}}", c.join(", ")),
            Violation::SmallFacet(x) => write!(f, "face {{{}}} has fewer than 2 vertices", x.join(", ")),
            Violation::RepeatedFacetMember(x) => {
                write!(f, "face {{{}}} repeats a vertex", x.join(", "))
            }
            Violation::NonMaximalFacet { facet, within } => write!(
                f,
                "face {{{}}} is contained in face {{{}}}",
                facet.join(", "),
                within.join(", ")
            ),
            Violation::ContextHasParent { vertex, parent } => {
                write!(f, "context vertex `{vertex}` has parent `{parent}`")
            }
            Violation::ContextInFacet { vertex, facet } => write!(
                f,
                "context vertex `{vertex}` lies in face {{{}}}",
                facet.join(", ")
            ),
        }
    }
}

/// Reports every violated mDAG invariant of `desc`; empty when valid.
pub fn validate(desc: &GraphDescription) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &desc.vertices {
        if !seen.insert(v.as_str()) {
            out.push(Violation::DuplicateVertex(v.clone()));
        }
    }
    if seen.len() > MAX_VERTICES {
        out.push(Violation::TooManyVertices(seen.len()));
        return out;
    }
    let names: Vec<&str> = seen.iter().copied().collect();
    let lookup = |s: &str| names.binary_search(&s).ok();
    let mut unknown = BTreeSet::new();
    let check = |s: &String, unknown: &mut BTreeSet<String>| -> Option<usize> {
        let i = lookup(s);
        if i.is_none() {
            unknown.insert(s.clone());
        }
        i
    };

    let n = names.len();
    let mut parents = vec![VertexSet::EMPTY; n];
    for (a, b) in &desc.edges {
        let (ia, ib) = (check(a, &mut unknown), check(b, &mut unknown));
        if let (Some(ia), Some(ib)) = (ia, ib) {
            if ia == ib {
                out.push(Violation::SelfLoop(a.clone()));
            } else {
                parents[ib].insert(ia);
            }
        }
    }
    let mut facets: Vec<(VertexSet, Vec<String>)> = Vec::new();
    for face in &desc.faces {
        let mut set = VertexSet::EMPTY;
        let mut ok = true;
        let mut repeated = false;
        for v in face {
            match check(v, &mut unknown) {
                Some(i) => {
                    if set.contains(i) {
                        repeated = true;
                    }
                    set.insert(i);
                }
                None => ok = false,
            }
        }
        if repeated {
            out.push(Violation::RepeatedFacetMember(face.clone()));
        }
        if set.len() < 2 {
            out.push(Violation::SmallFacet(face.clone()));
        } else if ok {
            facets.push((set, face.clone()));
        }
    }
    let mut context = VertexSet::EMPTY;
    for v in &desc.context {
        if let Some(i) = check(v, &mut unknown) {
            context.insert(i);
        }
    }
    out.extend(unknown.into_iter().map(Violation::UnknownVertex));

    if let Err(cyc) = kahn(&parents, |v| v) {
        out.push(Violation::Cycle(
            cyc.iter().map(|&v| names[v].to_string()).collect(),
        ));
    }

    let mut reported = BTreeSet::new();
    for (i, (f, fname)) in facets.iter().enumerate() {
        for (j, (g, gname)) in facets.iter().enumerate() {
            if i != j && f.is_subset(*g) && f != g && reported.insert(i) {
                out.push(Violation::NonMaximalFacet {
                    facet: sorted_names(fname),
                    within: sorted_names(gname),
                });
            }
        }
    }

    for c in context.iter() {
        for p in parents[c].iter() {
            out.push(Violation::ContextHasParent {
                vertex: names[c].to_string(),
                parent: names[p].to_string(),
            });
        }
        for (f, fname) in &facets {
            if f.contains(c) {
                out.push(Violation::ContextInFacet {
                    vertex: names[c].to_string(),
                    facet: sorted_names(fname),
                });
            }
        }
    }
    out
}

fn sorted_names(v: &[String]) -> Vec<String> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

impl GraphDescription {
    /// Validates the description and builds the graph.
    pub fn build(&self) -> Result<MDag> {
        let violations = validate(self);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let mut names = self.vertices.clone();
        names.sort();
        let idx = |s: &str| names.binary_search_by(|x| x.as_str().cmp(s)).unwrap();
        let n = names.len();
        let mut parents = vec![VertexSet::EMPTY; n];
        for (a, b) in &self.edges {
            parents[idx(b)].insert(idx(a));
        }
        let faces: Vec<VertexSet> = self
            .faces
            .iter()
            .map(|f| f.iter().map(|v| idx(v)).collect())
            .collect();
        let context = self.context.iter().map(|v| idx(v)).collect();
        Ok(MDag::from_parts(names, parents, faces, context))
    }
}

/// Kahn elimination, always taking the smallest available key.
/// Returns the order, or the vertices left on a cycle.
fn kahn<K: Ord>(parents: &[VertexSet], key: impl Fn(usize) -> K) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = parents.len();
    let mut remaining = VertexSet::full(n);
    let mut order = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .filter(|&v| parents[v].is_disjoint(remaining))
            .min_by_key(|&v| key(v));
        match next {
            Some(v) => {
                order.push(v);
                remaining.remove(v);
            }
            None => return Err(remaining.iter().collect()),
        }
    }
    Ok(order)
}

/// Reduces a collection of faces to its maximal elements of size >= 2,
/// sorted canonically.
pub(crate) fn maximal_faces(faces: impl IntoIterator<Item = VertexSet>) -> Vec<VertexSet> {
    let mut all: Vec<VertexSet> = faces.into_iter().filter(|f| f.len() >= 2).collect();
    all.sort_by_key(|f| std::cmp::Reverse(f.len()));
    let mut kept: Vec<VertexSet> = Vec::new();
    for f in all {
        if !kept.iter().any(|k| f.is_subset(*k)) {
            kept.push(f);
        }
    }
    kept.sort_by_key(|f| facet_key(*f));
    kept
}

/// Orders facets by their ascending member lists.
fn facet_key(f: VertexSet) -> Vec<usize> {
    f.iter().collect()
}

/// Parent, ancestor, descendant, sibling and district sets of one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexRelations {
    pub pa: VertexSet,
    pub an: VertexSet,
    pub de: VertexSet,
    pub sib: VertexSet,
    pub dis: VertexSet,
}

impl MDag {
    /// Builds a graph from index-level parts. `names` must be sorted and
    /// unique and the directed part acyclic; faces are re-maximalized.
    pub(crate) fn from_parts(
        names: Vec<String>,
        parents: Vec<VertexSet>,
        faces: impl IntoIterator<Item = VertexSet>,
        context: VertexSet,
    ) -> MDag {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(kahn(&parents, |v| v).is_ok());
        let n = names.len();
        let mut children = vec![VertexSet::EMPTY; n];
        for (v, p) in parents.iter().enumerate() {
            for u in p.iter() {
                children[u].insert(v);
            }
        }
        let facets = maximal_faces(faces);
        let mut siblings = vec![VertexSet::EMPTY; n];
        for f in &facets {
            for v in f.iter() {
                siblings[v] |= f.without(v);
            }
        }
        MDag {
            names,
            parents,
            children,
            facets,
            siblings,
            context,
        }
    }

    /// Builds a graph from names; a convenience over [`GraphDescription`].
    pub fn from_names(
        vertices: &[&str],
        edges: &[(&str, &str)],
        faces: &[&[&str]],
        context: &[&str],
    ) -> Result<MDag> {
        GraphDescription {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            faces: faces
                .iter()
                .map(|f| f.iter().map(|s| s.to_string()).collect())
                .collect(),
            context: context.iter().map(|s| s.to_string()).collect(),
        }
        .build()
    }

    pub fn describe(&self) -> GraphDescription {
        GraphDescription {
            vertices: self.names.clone(),
            edges: self
                .directed_edges()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            faces: self.facets.iter().map(|f| self.names_of(*f)).collect(),
            context: self.names_of(self.context),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names_of(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .binary_search_by(|x| x.as_str().cmp(name))
            .map_err(|_| Error::UnknownVertex(name.to_string()))
    }

    /// Resolves a list of names to a vertex set.
    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet> {
        names.iter().map(|s| self.index(s.as_ref())).collect()
    }

    #[inline]
    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    #[inline]
    pub fn parents(&self, v: usize) -> VertexSet {
        self.parents[v]
    }

    #[inline]
    pub fn children(&self, v: usize) -> VertexSet {
        self.children[v]
    }

    /// Vertices sharing a facet with `v`.
    #[inline]
    pub fn siblings(&self, v: usize) -> VertexSet {
        self.siblings[v]
    }

    pub fn facets(&self) -> &[VertexSet] {
        &self.facets
    }

    #[inline]
    pub fn context(&self) -> VertexSet {
        self.context
    }

    #[inline]
    pub fn is_context(&self, v: usize) -> bool {
        self.context.contains(v)
    }

    /// Non-context vertices.
    pub fn random(&self) -> VertexSet {
        self.all() - self.context
    }

    pub fn has_facets(&self) -> bool {
        !self.facets.is_empty()
    }

    /// Directed edges `(from, to)`, ordered by source then target.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |a| self.children[a].iter().map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.parents[b].contains(a)
    }

    /// True when some facet contains both vertices.
    pub fn bidirected(&self, a: usize, b: usize) -> bool {
        self.siblings[a].contains(b)
    }

    /// `an(S)`, including `S` itself.
    pub fn ancestors(&self, s: VertexSet) -> VertexSet {
        closure(s, &self.parents)
    }

    /// `de(S)`, including `S` itself.
    pub fn descendants(&self, s: VertexSet) -> VertexSet {
        closure(s, &self.children)
    }

    /// `dis(v)`: vertices joined to `v` by a chain of facets, including `v`.
    pub fn district(&self, v: usize) -> VertexSet {
        closure(VertexSet::singleton(v), &self.siblings)
    }

    pub fn relations(&self, v: usize) -> VertexRelations {
        let one = VertexSet::singleton(v);
        VertexRelations {
            pa: self.parents[v],
            an: self.ancestors(one),
            de: self.descendants(one),
            sib: self.siblings[v],
            dis: self.district(v),
        }
    }

    /// Name-based form of [`MDag::relations`].
    pub fn relations_of(&self, v: &str) -> Result<VertexRelations> {
        Ok(self.relations(self.index(v)?))
    }

    /// Deterministic topological order: among the available vertices the
    /// lexicographically smallest name comes first.
    pub fn topological_order(&self) -> Vec<usize> {
        // acyclicity is an invariant of MDag
        kahn(&self.parents, |v| v).expect("MDag is acyclic")
    }

    /// Induced subgraph on `keep`: directed edges within `keep` and the
    /// maximal traces `F ∩ keep` of the facets.
    pub fn induced_subgraph(&self, keep: VertexSet) -> MDag {
        let map: Vec<usize> = keep.iter().collect();
        let remap = |s: VertexSet| -> VertexSet {
            map.iter()
                .enumerate()
                .filter(|(_, &old)| s.contains(old))
                .map(|(new, _)| new)
                .collect()
        };
        let names = map.iter().map(|&v| self.names[v].clone()).collect();
        let parents = map.iter().map(|&v| remap(self.parents[v] & keep)).collect();
        let faces: Vec<VertexSet> = self.facets.iter().map(|f| remap(*f & keep)).collect();
        MDag::from_parts(names, parents, faces, remap(self.context & keep))
    }

    /// Removes the vertices of `drop` and all incident edges.
    pub fn delete(&self, drop: VertexSet) -> MDag {
        self.induced_subgraph(self.all() - drop)
    }

    /// Copy of the graph with every context mark cleared.
    pub fn without_context(&self) -> MDag {
        let mut g = self.clone();
        g.context = VertexSet::EMPTY;
        g
    }

    /// Builds a new graph over the same vertex names.
    pub(crate) fn with_structure(
        &self,
        parents: Vec<VertexSet>,
        faces: impl IntoIterator<Item = VertexSet>,
        context: VertexSet,
    ) -> MDag {
        MDag::from_parts(self.names.clone(), parents, faces, context)
    }
}

/// Reflexive-transitive closure of `s` under a neighbour map.
pub(crate) fn closure(s: VertexSet, next: &[VertexSet]) -> VertexSet {
    let mut seen = s;
    let mut frontier = s;
    while !frontier.is_empty() {
        let mut grown = VertexSet::EMPTY;
        for v in frontier.iter() {
            grown |= next[v];
        }
        frontier = grown - seen;
        seen |= grown;
    }
    seen
}

impl fmt::Debug for MDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MDag {{ {} }}", serialize_mdag(self).trim_end().replace('\n', "; "))
    }
}

impl fmt::Display for MDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_mdag(self))
    }
}
