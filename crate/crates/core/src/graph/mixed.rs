//! Simple mixed graphs with per-end edge marks, used for MAGs and PAGs.

use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use super::MDag;
use crate::error::{Error, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Tail,
    Arrow,
    Circle,
}

impl Mark {
    pub const ALL: [Mark; 3] = [Mark::Tail, Mark::Arrow, Mark::Circle];

    pub fn as_str(self) -> &'static str {
        match self {
            Mark::Tail => "tail",
            Mark::Arrow => "arrow",
            Mark::Circle => "circle",
        }
    }
}

/// A simple graph over named vertices where each edge carries one mark at
/// each of its two ends.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MarkedMixedGraph {
    names: Vec<String>,
    /// `ends[u * n + v]` is the mark at `v` on the edge `u - v`.
    ends: Vec<Option<Mark>>,
    adj: Vec<VertexSet>,
}

impl MarkedMixedGraph {
    /// Edgeless graph; `names` are sorted and deduplicated.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        names.dedup();
        if names.len() > MAX_VERTICES {
            return Err(Error::TooLarge(format!(
                "{} vertices exceeds the limit of {MAX_VERTICES}",
                names.len()
            )));
        }
        Ok(Self::with_sorted_names(names))
    }

    pub(crate) fn with_sorted_names(names: Vec<String>) -> Self {
        let n = names.len();
        MarkedMixedGraph {
            names,
            ends: vec![None; n * n],
            adj: vec![VertexSet::EMPTY; n],
        }
    }

    /// Same vertices, no edges.
    pub fn empty_like(&self) -> Self {
        Self::with_sorted_names(self.names.clone())
    }

    /// The DAG part of an mDAG without facets, as a mixed graph.
    pub fn from_dag(g: &MDag) -> Self {
        let mut m = Self::with_sorted_names(g.names().to_vec());
        for (a, b) in g.directed_edges() {
            m.set_edge(a, b, Mark::Tail, Mark::Arrow);
        }
        m
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

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .binary_search_by(|x| x.as_str().cmp(name))
            .map_err(|_| Error::UnknownVertex(name.to_string()))
    }

    pub fn names_of(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    /// Adds or replaces the edge `u - v` with the given end marks.
    pub fn set_edge(&mut self, u: usize, v: usize, at_u: Mark, at_v: Mark) {
        assert_ne!(u, v, "self-loops are not allowed");
        let n = self.n();
        self.ends[v * n + u] = Some(at_u);
        self.ends[u * n + v] = Some(at_v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    /// Name-based form of [`MarkedMixedGraph::set_edge`].
    pub fn add(&mut self, u: &str, v: &str, at_u: Mark, at_v: Mark) -> Result<()> {
        let (u, v) = (self.index(u)?, self.index(v)?);
        self.set_edge(u, v, at_u, at_v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        let n = self.n();
        self.ends[v * n + u] = None;
        self.ends[u * n + v] = None;
        self.adj[u].remove(v);
        self.adj[v].remove(u);
    }

    /// Mark at `at` on the edge between `at` and `other`.
    #[inline]
    pub fn mark_at(&self, at: usize, other: usize) -> Option<Mark> {
        self.ends[other * self.n() + at]
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    /// Edges `(u, v, mark at u, mark at v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Mark, Mark)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.adj[u]
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v, self.mark_at(u, v).unwrap(), self.mark_at(v, u).unwrap()))
        })
    }

    /// Unordered adjacent pairs `(u, v)` with `u < v`.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        self.edges().map(|(u, v, _, _)| (u, v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// `u -> v`.
    pub fn is_directed(&self, u: usize, v: usize) -> bool {
        self.mark_at(u, v) == Some(Mark::Tail) && self.mark_at(v, u) == Some(Mark::Arrow)
    }

    /// `u <-> v`.
    pub fn is_bidirected(&self, u: usize, v: usize) -> bool {
        self.mark_at(u, v) == Some(Mark::Arrow) && self.mark_at(v, u) == Some(Mark::Arrow)
    }

    pub fn bidirected_edges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .filter(|&(_, _, a, b)| a == Mark::Arrow && b == Mark::Arrow)
            .map(|(u, v, _, _)| (u, v))
            .collect()
    }

    pub fn has_circles(&self) -> bool {
        self.edges().any(|(_, _, a, b)| a == Mark::Circle || b == Mark::Circle)
    }

    /// Vertices `u` with `u -> v`.
    pub fn parents(&self, v: usize) -> VertexSet {
        self.adj[v].iter().filter(|&u| self.is_directed(u, v)).collect()
    }

    /// Vertices `u` with `u <-> v`.
    pub fn spouses(&self, v: usize) -> VertexSet {
        self.adj[v].iter().filter(|&u| self.is_bidirected(u, v)).collect()
    }

    /// Induced subgraph on `keep`; vertices keep their relative order.
    pub fn induced(&self, keep: VertexSet) -> MarkedMixedGraph {
        let map: Vec<usize> = keep.iter().collect();
        let mut out = Self::with_sorted_names(map.iter().map(|&v| self.names[v].clone()).collect());
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    out.set_edge(i, j, self.mark_at(u, v).unwrap(), self.mark_at(v, u).unwrap());
                }
            }
        }
        out
    }

    /// Reads a MAG (edges `->` and `<->` only) as an mDAG whose facets are
    /// the bidirected edges. m-separation is preserved by this embedding.
    pub fn to_mdag(&self) -> Result<MDag> {
        let n = self.n();
        let mut parents = vec![VertexSet::EMPTY; n];
        let mut faces = Vec::new();
        for (u, v, mu, mv) in self.edges() {
            match (mu, mv) {
                (Mark::Tail, Mark::Arrow) => parents[v].insert(u),
                (Mark::Arrow, Mark::Tail) => parents[u].insert(v),
                (Mark::Arrow, Mark::Arrow) => faces.push(VertexSet::singleton(u).with(v)),
                (Mark::Circle, _) | (_, Mark::Circle) => return Err(Error::CircleMarks),
                (Mark::Tail, Mark::Tail) => {
                    return Err(Error::Precondition(format!(
                        "undirected edge {} - {}",
                        self.names[u], self.names[v]
                    )))
                }
            }
        }
        let g = MDag::from_parts_checked(self.names.clone(), parents, faces)?;
        Ok(g)
    }

    /// `vertices` line followed by `edge a b` / `biedge a b` lines; other
    /// edge kinds use the general `mark a b <end-a> <end-b>` form.
    pub fn to_text(&self) -> String {
        let mut s = String::from("vertices");
        for n in &self.names {
            s.push(' ');
            s.push_str(n);
        }
        s.push('\n');
        for (u, v, mu, mv) in self.edges() {
            let (a, b) = (&self.names[u], &self.names[v]);
            match (mu, mv) {
                (Mark::Tail, Mark::Arrow) => writeln!(s, "edge {a} {b}"),
                (Mark::Arrow, Mark::Tail) => writeln!(s, "edge {b} {a}"),
                (Mark::Arrow, Mark::Arrow) => writeln!(s, "biedge {a} {b}"),
                _ => writeln!(s, "mark {a} {b} {} {}", mu.as_str(), mv.as_str()),
            }
            .unwrap();
        }
        s
    }

    /// `vertices` line followed by one `mark a b <end-a> <end-b>` line per edge.
    pub fn to_mark_lines(&self) -> String {
        let mut s = String::from("vertices");
        for n in &self.names {
            s.push(' ');
            s.push_str(n);
        }
        s.push('\n');
        for (u, v, mu, mv) in self.edges() {
            writeln!(
                s,
                "mark {} {} {} {}",
                self.names[u],
                self.names[v],
                mu.as_str(),
                mv.as_str()
            )
            .unwrap();
        }
        s
    }
}

impl MDag {
    /// Like `from_parts` but checks acyclicity instead of assuming it.
    pub(crate) fn from_parts_checked(
        names: Vec<String>,
        parents: Vec<VertexSet>,
        faces: Vec<VertexSet>,
    ) -> Result<MDag> {
        if let Err(cyc) = super::kahn(&parents, |v| v) {
            return Err(Error::Cycle(cyc.iter().map(|&v| names[v].clone()).collect()));
        }
        Ok(MDag::from_parts(names, parents, faces, VertexSet::EMPTY))
    }
}

fn end_glyph(m: Mark, left: bool) -> &'static str {
    match (m, left) {
        (Mark::Tail, _) => "-",
        (Mark::Arrow, true) => "<",
        (Mark::Arrow, false) => ">",
        (Mark::Circle, _) => "o",
    }
}

impl fmt::Debug for MarkedMixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (u, v, mu, mv)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{} {}-{} {}",
                self.names[u],
                end_glyph(mu, true),
                end_glyph(mv, false),
                self.names[v]
            )?;
        }
        write!(f, "]")
    }
}
