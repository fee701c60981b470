//! Exact discrete distributions: sampling from the marginal model of an
//! mDAG, conditional independence checks, fixing and CHSH values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MDag;
use crate::projection::canonical_dag;
use crate::separation::{is_fixable, markov_blanket};
use crate::vset::VertexSet;

/// Largest joint table built by [`StructuralModel::joint`].
pub const MAX_CELLS: usize = 10_000_000;

/// Tolerance for constraints that hold exactly by construction.
pub const EXACT_TOL: f64 = 1e-10;

/// Tolerance after the divisions of a fixing.
pub const FIXED_TOL: f64 = 1e-9;

/// Dense table over the product of the variables' state spaces; the last
/// variable varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    vars: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

fn cell_count(cards: &[usize]) -> Result<usize> {
    cards
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c).filter(|&x| x <= MAX_CELLS))
        .ok_or_else(|| Error::TooLarge(format!("state space exceeds {MAX_CELLS} cells")))
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

impl DiscreteDistribution {
    pub fn new(vars: Vec<String>, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let d = DiscreteDistribution { vars, cards, probs };
        d.check()?;
        Ok(d)
    }

    /// Checks the invariants of a table read from outside.
    pub fn check(&self) -> Result<()> {
        if self.vars.len() != self.cards.len() {
            return Err(Error::Distribution("vars and cards differ in length".into()));
        }
        let mut sorted = self.vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.vars.len() {
            return Err(Error::Distribution("repeated variable".into()));
        }
        if let Some(i) = self.cards.iter().position(|&c| c < 2) {
            return Err(Error::Distribution(format!(
                "variable `{}` has fewer than two states",
                self.vars[i]
            )));
        }
        if cell_count(&self.cards)? != self.probs.len() {
            return Err(Error::Distribution("table size does not match cards".into()));
        }
        if self.probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Distribution("negative or non-finite entry".into()));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Distribution(format!("total mass {total}")));
        }
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Probability of one joint state.
    pub fn prob(&self, state: &[usize]) -> f64 {
        let st = strides(&self.cards);
        self.probs[state.iter().zip(&st).map(|(s, k)| s * k).sum::<usize>()]
    }

    /// Sums out everything but `idx`, returning a table ordered as `idx`.
    fn project(&self, idx: &[usize]) -> Vec<f64> {
        let out_cards: Vec<usize> = idx.iter().map(|&i| self.cards[i]).collect();
        let out_strides = strides(&out_cards);
        let st = strides(&self.cards);
        let mut out = vec![0.0; out_cards.iter().product()];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut o = 0;
            for (k, &i) in idx.iter().enumerate() {
                o += (cell / st[i] % self.cards[i]) * out_strides[k];
            }
            out[o] += p;
        }
        out
    }

    /// Margin over `keep`, in the order given.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<DiscreteDistribution> {
        let idx = self.indices(keep)?;
        let mut seen = VertexSet::EMPTY;
        for &i in &idx {
            if seen.contains(i) {
                return Err(Error::Overlap(vec![self.vars[i].clone()]));
            }
            seen.insert(i);
        }
        Ok(DiscreteDistribution {
            vars: idx.iter().map(|&i| self.vars[i].clone()).collect(),
            cards: idx.iter().map(|&i| self.cards[i]).collect(),
            probs: self.project(&idx),
        })
    }

    /// Largest `|p(a,b|c) - p(a|c) p(b|c)|` over states with `p(c) > 0`.
    pub fn ci_violation<S: AsRef<str>>(&self, a: &[S], b: &[S], c: &[S]) -> Result<f64> {
        let (ia, ib, ic) = (self.indices(a)?, self.indices(b)?, self.indices(c)?);
        let mut seen = VertexSet::EMPTY;
        for &i in ia.iter().chain(&ib).chain(&ic) {
            if seen.contains(i) {
                return Err(Error::Overlap(vec![self.vars[i].clone()]));
            }
            seen.insert(i);
        }
        let size = |ix: &[usize]| ix.iter().map(|&i| self.cards[i]).product::<usize>();
        let (na, nb, nc) = (size(&ia), size(&ib), size(&ic));
        let idx: Vec<usize> = ia.iter().chain(&ib).chain(&ic).copied().collect();
        // q[(x * nb + y) * nc + z]
        let q = self.project(&idx);
        let mut worst: f64 = 0.0;
        for z in 0..nc {
            let pc: f64 = (0..na * nb).map(|xy| q[xy * nc + z]).sum();
            if pc <= 0.0 {
                continue;
            }
            for x in 0..na {
                let pa: f64 = (0..nb).map(|y| q[(x * nb + y) * nc + z]).sum();
                for y in 0..nb {
                    let pb: f64 = (0..na).map(|x2| q[(x2 * nb + y) * nc + z]).sum();
                    let joint = q[(x * nb + y) * nc + z] / pc;
                    worst = worst.max((joint - (pa / pc) * (pb / pc)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `X_A ⊥ X_B | X_C` within `tol`.
    pub fn ci_holds<S: AsRef<str>>(&self, a: &[S], b: &[S], c: &[S], tol: f64) -> Result<bool> {
        Ok(self.ci_violation(a, b, c)? <= tol)
    }
}

/// A DAG with one conditional table per vertex. `cpts[v]` is indexed by the
/// parent configuration (parents in ascending order, last fastest) times the
/// cardinality of `v`, plus the state of `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralModel {
    dag: MDag,
    cards: Vec<usize>,
    cpts: Vec<Vec<f64>>,
}

impl StructuralModel {
    /// Tables drawn from the flat Dirichlet distribution on each simplex.
    pub fn random<R: Rng + ?Sized>(dag: MDag, cards: Vec<usize>, rng: &mut R) -> Result<Self> {
        if dag.has_facets() {
            return Err(Error::Precondition("structural models need a DAG without facets".into()));
        }
        if cards.len() != dag.n() || cards.iter().any(|&c| c < 2) {
            return Err(Error::Distribution("one cardinality of at least 2 per vertex".into()));
        }
        let mut cpts = Vec::with_capacity(dag.n());
        for v in 0..dag.n() {
            let rows = cell_count(&dag.parents(v).iter().map(|p| cards[p]).collect::<Vec<_>>())?;
            let mut t = Vec::with_capacity(rows * cards[v]);
            for _ in 0..rows {
                let draws: Vec<f64> = (0..cards[v]).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let s: f64 = draws.iter().sum();
                t.extend(draws.iter().map(|x| x / s));
            }
            cpts.push(t);
        }
        Ok(StructuralModel { dag, cards, cpts })
    }

    pub fn from_tables(dag: MDag, cards: Vec<usize>, cpts: Vec<Vec<f64>>) -> Result<Self> {
        if dag.has_facets() || cards.len() != dag.n() || cpts.len() != dag.n() {
            return Err(Error::Distribution("tables do not match the DAG".into()));
        }
        for v in 0..dag.n() {
            let rows = dag.parents(v).iter().map(|p| cards[p]).product::<usize>();
            if cpts[v].len() != rows * cards[v] {
                return Err(Error::Distribution(format!("table of `{}` has the wrong size", dag.name(v))));
            }
            for r in cpts[v].chunks(cards[v]) {
                if r.iter().any(|&x| x < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::Distribution(format!("row of `{}` is not a distribution", dag.name(v))));
                }
            }
        }
        Ok(StructuralModel { dag, cards, cpts })
    }

    pub fn dag(&self) -> &MDag {
        &self.dag
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Exact joint over every vertex of the DAG.
    pub fn joint(&self) -> Result<DiscreteDistribution> {
        let n = self.dag.n();
        let total = cell_count(&self.cards)?;
        let st = strides(&self.cards);
        let parents: Vec<Vec<usize>> = (0..n).map(|v| self.dag.parents(v).iter().collect()).collect();
        let mut probs = vec![0.0; total];
        let mut state = vec![0usize; n];
        for (cell, slot) in probs.iter_mut().enumerate() {
            for v in 0..n {
                state[v] = cell / st[v] % self.cards[v];
            }
            let mut p = 1.0;
            for v in 0..n {
                let mut row = 0;
                for &u in &parents[v] {
                    row = row * self.cards[u] + state[u];
                }
                p *= self.cpts[v][row * self.cards[v] + state[v]];
                if p == 0.0 {
                    break;
                }
            }
            *slot = p;
        }
        Ok(DiscreteDistribution {
            vars: self.dag.names().to_vec(),
            cards: self.cards.clone(),
            probs,
        })
    }
}

/// A structural model on the canonical DAG of `g`: observed cardinalities
/// from `cards` (in vertex order), each latent with the product of its
/// children's cardinalities. Context vertices are roots like any other.
pub fn sample_model(g: &MDag, cards: &[usize], seed: u64) -> Result<(StructuralModel, VertexSet)> {
    if cards.len() != g.n() {
        return Err(Error::Distribution(format!(
            "{} cardinalities for {} vertices",
            cards.len(),
            g.n()
        )));
    }
    let canon = canonical_dag(g)?;
    let dag = canon.dag;
    let mut full = vec![0usize; dag.n()];
    for (i, v) in canon.observed.iter().enumerate() {
        full[v] = cards[i];
    }
    for h in (dag.all() - canon.observed).iter() {
        let prod = dag.children(h).iter().map(|c| full[c]).try_fold(1usize, |a, c| a.checked_mul(c));
        full[h] = prod.filter(|&p| p <= MAX_CELLS).ok_or_else(|| {
            Error::TooLarge(format!("latent `{}` needs too many states", dag.name(h)))
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = StructuralModel::random(dag, full, &mut rng)?;
    Ok((model, canon.observed))
}

/// A random member of the marginal model of `g`, over its vertices.
pub fn sample_marginal(g: &MDag, cards: &[usize], seed: u64) -> Result<DiscreteDistribution> {
    let (model, observed) = sample_model(g, cards, seed)?;
    let joint = model.joint()?;
    let keep: Vec<&str> = observed.iter().map(|v| model.dag().name(v)).collect();
    joint.marginalize(&keep)
}

/// `p*(x) = q_v(x_v) p(x) / p(x_v | x_mb(v))`. The result is checked to have
/// unit mass within [`FIXED_TOL`] and is not renormalized.
pub fn fix_distribution(
    p: &DiscreteDistribution,
    g: &MDag,
    v: usize,
    qv: &[f64],
) -> Result<DiscreteDistribution> {
    if g.is_context(v) {
        return Err(Error::ContextVertex(g.name(v).to_string()));
    }
    if !is_fixable(g, v)? {
        return Err(Error::NotFixable(g.name(v).to_string()));
    }
    let name = g.name(v);
    let pv = p.index_of(name)?;
    let cv = p.cards[pv];
    if qv.len() != cv || qv.iter().any(|&x| !(x > 0.0)) || (qv.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::Distribution(format!(
            "marginal for `{name}` must be {cv} positive numbers summing to 1"
        )));
    }
    let mb: Vec<usize> = markov_blanket(g, v)?
        .iter()
        .map(|w| p.index_of(g.name(w)))
        .collect::<Result<_>>()?;
    let mut idx = mb.clone();
    idx.push(pv);
    // joint of (mb, v) with v fastest
    let q = p.project(&idx);
    let st = strides(&p.cards);
    let mb_strides = strides(&idx.iter().map(|&i| p.cards[i]).collect::<Vec<_>>());
    for row in q.chunks(cv) {
        let pm: f64 = row.iter().sum();
        if pm > 0.0 && row.iter().any(|&x| x == 0.0) {
            return Err(Error::ZeroConditional(name.to_string()));
        }
    }
    let mut probs = vec![0.0; p.probs.len()];
    for (cell, &px) in p.probs.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let mut o = 0;
        for (k, &i) in idx.iter().enumerate() {
            o += (cell / st[i] % p.cards[i]) * mb_strides[k];
        }
        let xv = cell / st[pv] % cv;
        let row = &q[o - xv..o - xv + cv];
        let cond = q[o] / row.iter().sum::<f64>();
        probs[cell] = qv[xv] * px / cond;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > FIXED_TOL {
        return Err(Error::MassCheck(total));
    }
    Ok(DiscreteDistribution {
        vars: p.vars.clone(),
        cards: p.cards.clone(),
        probs,
    })
}

/// Uniform marginal over `k` states.
pub fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// `E[bd|-1,+1] + E[bd|+1,-1] + E[bd|-1,-1] - E[bd|+1,+1]`, conditioning
/// on `(X_a, X_c)`. State 0 reads as -1 and state 1 as +1.
pub fn chsh_value(p: &DiscreteDistribution, a: &str, b: &str, c: &str, d: &str) -> Result<f64> {
    let idx = p.indices(&[a, c, b, d])?;
    for &i in &idx {
        if p.cards[i] != 2 {
            return Err(Error::NotBinary(p.vars[i].clone()));
        }
    }
    let q = p.marginalize(&[a, c, b, d])?;
    let sign = |s: usize| if s == 0 { -1.0 } else { 1.0 };
    let e = |xa: usize, xc: usize| -> Result<f64> {
        let base = (xa * 2 + xc) * 4;
        let mass: f64 = q.probs[base..base + 4].iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroMassContext);
        }
        let mut s = 0.0;
        for xb in 0..2 {
            for xd in 0..2 {
                s += sign(xb) * sign(xd) * q.probs[base + xb * 2 + xd];
            }
        }
        Ok(s / mass)
    };
    Ok(e(0, 1)? + e(1, 0)? + e(0, 0)? - e(1, 1)?)
}

/// Four binary variables `a, b, c, d`: `X_a`, `X_c` uniform and independent;
/// `X_b = -X_d` when `X_a = X_c = +1` and `X_b = X_d` otherwise, the pair
/// uniform over its two allowed values.
pub fn pr_box_distribution() -> DiscreteDistribution {
    let vars: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let mut probs = vec![0.0; 16];
    for xa in 0..2 {
        for xb in 0..2 {
            for xc in 0..2 {
                for xd in 0..2 {
                    let flip = xa == 1 && xc == 1;
                    let allowed = if flip { xb != xd } else { xb == xd };
                    if allowed {
                        probs[((xa * 2 + xb) * 2 + xc) * 2 + xd] = 0.125;
                    }
                }
            }
        }
    }
    DiscreteDistribution {
        vars,
        cards: vec![2; 4],
        probs,
    }
}
