//! Independent reference implementations and graph generators for tests.
#![allow(dead_code)]

use mdag::graph::{GraphDescription, Mark, MarkedMixedGraph, MDag};
use mdag::VertexSet;
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Builds an mDAG over the first `n` letters from parent bitmasks and faces.
pub fn build(n: usize, parents: &[u64], faces: &[u64]) -> MDag {
    let mut desc = GraphDescription::default();
    desc.vertices = NAMES[..n].iter().map(|s| s.to_string()).collect();
    for (v, &p) in parents.iter().enumerate() {
        for u in 0..n {
            if p >> u & 1 == 1 {
                desc.edges.push((NAMES[u].into(), NAMES[v].into()));
            }
        }
    }
    for &f in &maximal(faces) {
        desc.faces.push((0..n).filter(|&v| f >> v & 1 == 1).map(|v| NAMES[v].to_string()).collect());
    }
    desc.build().unwrap()
}

/// Maximal elements of size at least two.
pub fn maximal(faces: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &f in faces {
        if f.count_ones() < 2 {
            continue;
        }
        if faces.iter().any(|&g| g != f && f & g == f) || out.contains(&f) {
            continue;
        }
        out.push(f);
    }
    out
}

/// Every labelled DAG on `n` vertices, as parent bitmasks.
pub fn all_dags(n: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mut code in 0..3u64.pow(pairs.len() as u32) {
        let mut pa = vec![0u64; n];
        for &(u, v) in &pairs {
            match code % 3 {
                1 => pa[v] |= 1 << u,
                2 => pa[u] |= 1 << v,
                _ => {}
            }
            code /= 3;
        }
        if acyclic(&pa) {
            out.push(pa);
        }
    }
    out
}

pub fn acyclic(pa: &[u64]) -> bool {
    let n = pa.len();
    let mut done = 0u64;
    for _ in 0..n {
        match (0..n).find(|&v| done >> v & 1 == 0 && pa[v] & !done == 0) {
            Some(v) => done |= 1 << v,
            None => return false,
        }
    }
    true
}

/// Every simplicial complex on `n` vertices, as its list of facets.
pub fn all_complexes(n: usize) -> Vec<Vec<u64>> {
    let cands: Vec<u64> = (0u64..1 << n).filter(|s| s.count_ones() >= 2).collect();
    let mut out = Vec::new();
    fn rec(cands: &[u64], i: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == cands.len() {
            out.push(cur.clone());
            return;
        }
        rec(cands, i + 1, cur, out);
        let f = cands[i];
        if cur.iter().all(|&g| f & g != f && f & g != g) {
            cur.push(f);
            rec(cands, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(&cands, 0, &mut Vec::new(), &mut out);
    out
}

/// Every mDAG on `n` vertices.
pub fn all_mdags(n: usize) -> Vec<MDag> {
    let complexes = all_complexes(n);
    let mut out = Vec::new();
    for pa in all_dags(n) {
        for c in &complexes {
            out.push(build(n, &pa, c));
        }
    }
    out
}

/// A random mDAG: edges along a random order with probability `p_edge`,
/// up to `max_faces` random faces of size 2 or 3.
pub fn random_mdag<R: Rng>(rng: &mut R, n: usize, p_edge: f64, max_faces: usize) -> MDag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pa = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_edge) {
                pa[order[j]] |= 1 << order[i];
            }
        }
    }
    let k = if n < 2 { 0 } else { rng.random_range(0..=max_faces) };
    let mut faces = Vec::new();
    for _ in 0..k {
        let size = rng.random_range(2..=3.min(n));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        faces.push(vs[..size].iter().fold(0u64, |acc, &v| acc | 1 << v));
    }
    build(n, &pa, &faces)
}

/// Plain DAG with explicit latent vertices, as parent bitmasks.
#[derive(Clone, Debug)]
pub struct Dag {
    pub pa: Vec<u64>,
}

impl Dag {
    /// One latent parent per facet, appended after the vertices of `g`.
    pub fn canonical(g: &MDag) -> Dag {
        let mut pa: Vec<u64> = (0..g.n()).map(|v| g.parents(v).bits()).collect();
        for f in g.facets() {
            let h = pa.len();
            pa.push(0);
            for v in f.iter() {
                pa[v] |= 1 << h;
            }
        }
        Dag { pa }
    }

    pub fn ancestors(&self, s: u64) -> u64 {
        let mut an = s;
        loop {
            let mut next = an;
            for v in 0..self.pa.len() {
                if an >> v & 1 == 1 {
                    next |= self.pa[v];
                }
            }
            if next == an {
                return an;
            }
            an = next;
        }
    }

    /// d-separation by moralising the ancestral subgraph.
    pub fn d_separated(&self, a: u64, b: u64, c: u64) -> bool {
        let n = self.pa.len();
        let keep = self.ancestors(a | b | c);
        let mut adj = vec![0u64; n];
        for v in 0..n {
            if keep >> v & 1 == 0 {
                continue;
            }
            let p = self.pa[v];
            adj[v] |= p;
            for u in 0..n {
                if p >> u & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[u] |= p & !(1 << u);
                }
            }
        }
        let mut seen = a;
        let mut stack: Vec<usize> = (0..n).filter(|&v| a >> v & 1 == 1).collect();
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v] >> w & 1 == 1 && keep >> w & 1 == 1 && c >> w & 1 == 0 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        seen & b == 0
    }
}

/// An edge of an mDAG seen as a mixed graph: `(u, v, kind)` where kind 0 is
/// `u -> v` and kind 1 is `u <-> v` (one per facet-sharing pair).
fn mixed_edges(g: &MDag, alive: u64) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::new();
    for v in 0..g.n() {
        for u in g.parents(v).iter() {
            if alive >> u & 1 == 1 && alive >> v & 1 == 1 {
                out.push((u, v, 0));
            }
        }
        for u in g.siblings(v).iter().filter(|&u| u < v) {
            if alive >> u & 1 == 1 && alive >> v & 1 == 1 {
                out.push((u, v, 1));
            }
        }
    }
    out
}

/// m-separation after deleting `d`, by enumerating every simple path.
pub fn path_separated(g: &MDag, a: u64, b: u64, c: u64, d: u64) -> bool {
    let n = g.n();
    let alive = ((1u64 << n) - 1) & !d;
    let edges = mixed_edges(g, alive);
    // ancestors of c inside the deleted graph
    let mut anc = c;
    loop {
        let mut next = anc;
        for &(u, v, k) in &edges {
            if k == 0 && anc >> v & 1 == 1 {
                next |= 1 << u;
            }
        }
        if next == anc {
            break;
        }
        anc = next;
    }
    // arrowhead at `at` for edge i
    let head_at = |i: usize, at: usize| {
        let (_, v, k) = edges[i];
        k == 1 || v == at
    };
    fn dfs(
        edges: &[(usize, usize, u8)],
        head_at: &dyn Fn(usize, usize) -> bool,
        cur: usize,
        prev_edge: Option<usize>,
        visited: u64,
        b: u64,
        c: u64,
        anc: u64,
    ) -> bool {
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            let next = if u == cur {
                v
            } else if v == cur {
                u
            } else {
                continue;
            };
            if visited >> next & 1 == 1 {
                continue;
            }
            if let Some(p) = prev_edge {
                let collider = head_at(p, cur) && head_at(i, cur);
                let ok = if collider { anc >> cur & 1 == 1 } else { c >> cur & 1 == 0 };
                if !ok {
                    continue;
                }
            }
            if b >> next & 1 == 1 {
                return true;
            }
            if dfs(edges, head_at, next, Some(i), visited | 1 << next, b, c, anc) {
                return true;
            }
        }
        false
    }
    for s in 0..n {
        if a >> s & 1 == 1 && alive >> s & 1 == 1 && dfs(&edges, &head_at, s, None, 1 << s, b, c, anc) {
            return false;
        }
    }
    true
}

/// Ordered triples `(A, B, C)` of disjoint subsets of `n` vertices with `A`,
/// `B` non-empty.
pub fn disjoint_triples(n: usize) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for mut code in 0..4u64.pow(n as u32) {
        let (mut a, mut b, mut c) = (0, 0, 0);
        for v in 0..n {
            match code % 4 {
                1 => a |= 1 << v,
                2 => b |= 1 << v,
                3 => c |= 1 << v,
                _ => {}
            }
            code /= 4;
        }
        if a != 0 && b != 0 {
            out.push((a, b, c));
        }
    }
    out
}

pub fn vs(bits: u64) -> VertexSet {
    VertexSet::from_bits(bits)
}

/// Mixed graph from an edge list and a base-3 orientation code: 0 is
/// `u -> v`, 1 is `u <- v`, 2 is `u <-> v`.
pub fn orient(n: usize, edges: &[(usize, usize)], mut code: u64) -> MarkedMixedGraph {
    let mut m = MarkedMixedGraph::new(&NAMES[..n]).unwrap();
    for &(u, v) in edges {
        match code % 3 {
            0 => m.set_edge(u, v, Mark::Tail, Mark::Arrow),
            1 => m.set_edge(u, v, Mark::Arrow, Mark::Tail),
            _ => m.set_edge(u, v, Mark::Arrow, Mark::Arrow),
        }
        code /= 3;
    }
    m
}

/// Acyclic and no vertex an ancestor of a spouse, checked directly.
pub fn ancestral(m: &MarkedMixedGraph) -> bool {
    let n = m.n();
    let pa: Vec<u64> = (0..n).map(|v| m.parents(v).bits()).collect();
    if !acyclic(&pa) {
        return false;
    }
    let d = Dag { pa };
    (0..n).all(|v| {
        let an = d.ancestors(1 << v) & !(1 << v);
        m.spouses(v).bits() & an == 0
    })
}

/// Separation table of a MAG over all pairs and conditioning sets, by
/// d-separation in the canonical DAG of its mDAG reading.
pub fn mag_signature(m: &MarkedMixedGraph) -> Vec<bool> {
    let g = m.to_mdag().unwrap();
    let dag = Dag::canonical(&g);
    let n = m.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rest = ((1u64 << n) - 1) & !(1 << a) & !(1 << b);
            let mut c = 0u64;
            loop {
                out.push(dag.d_separated(1 << a, 1 << b, c));
                if c == rest {
                    break;
                }
                c = (c.wrapping_sub(rest)) & rest;
            }
        }
    }
    out
}

/// Marks on which all graphs agree, circles elsewhere.
pub fn agreement(members: &[MarkedMixedGraph]) -> MarkedMixedGraph {
    let mut p = members[0].empty_like();
    for (u, v, _, _) in members[0].edges() {
        let at = |x: usize, y: usize| {
            let m0 = members[0].mark_at(x, y);
            if members.iter().all(|m| m.mark_at(x, y) == m0) {
                m0.unwrap()
            } else {
                Mark::Circle
            }
        };
        let (mu, mv) = (at(u, v), at(v, u));
        p.set_edge(u, v, mu, mv);
    }
    p
}

/// Every graph on `n` vertices up to isomorphism, as edge lists.
pub fn skeletons_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let pair_index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    let maps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| pair_index(p[u], p[v])).collect())
        .collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let canon = maps
            .iter()
            .map(|m| {
                (0..pairs.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .fold(0u32, |acc, i| acc | 1 << m[i])
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push((0..pairs.len()).filter(|&i| canon >> i & 1 == 1).map(|i| pairs[i]).collect());
        }
    }
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

/// Induced `a *-> v <-> b <-> c`, `v -> c`, `a` adjacent only to `v`,
/// searched over all ordered 4-tuples.
pub fn has_core(p: &MarkedMixedGraph) -> bool {
    let n = p.n();
    let arrow = |at: usize, o: usize| p.mark_at(at, o) == Some(Mark::Arrow);
    let tail = |at: usize, o: usize| p.mark_at(at, o) == Some(Mark::Tail);
    for a in 0..n {
        for v in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let t = [a, v, b, c];
                    if (0..4).any(|i| (i + 1..4).any(|j| t[i] == t[j])) {
                        continue;
                    }
                    if p.adjacent(a, v)
                        && !p.adjacent(a, b)
                        && !p.adjacent(a, c)
                        && p.adjacent(v, b)
                        && p.adjacent(b, c)
                        && p.adjacent(v, c)
                        && arrow(v, a)
                        && arrow(v, b)
                        && arrow(b, v)
                        && arrow(b, c)
                        && arrow(c, b)
                        && tail(v, c)
                        && arrow(c, v)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Directory of the shipped example graphs.
pub fn gallery_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../gallery")
}

pub fn gallery_graph(name: &str) -> MDag {
    let text = std::fs::read_to_string(gallery_dir().join(format!("{name}.mdag"))).unwrap();
    mdag::parse_mdag(&text).unwrap()
}

/// Every shipped graph, sorted by file name.
pub fn gallery() -> Vec<(String, MDag)> {
    let mut out: Vec<(String, MDag)> = std::fs::read_dir(gallery_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mdag"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name.clone(), gallery_graph(&name))
        })
        .collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Subsets of `bits`, as masks.
pub fn subsets(bits: u64) -> Vec<u64> {
    let mut out = vec![0];
    let mut s = bits;
    while s != 0 {
        out.push(s);
        s = (s - 1) & bits;
    }
    out
}

pub fn names(n: usize, bits: u64) -> Vec<&'static str> {
    (0..n).filter(|&v| bits >> v & 1 == 1).map(|v| NAMES[v]).collect()
}
