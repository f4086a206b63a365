//! Keys of commutative squares of chain complexes: sectors of surjective
//! quasi-isomorphisms, keys from split exact rows, half-key lifts, and the
//! key of the square of mapping complexes attached to a cofibration and a
//! fibring module map.
//!
//! Simplicial modules enter through their normalized chains, so every
//! object here is a bounded complex of finite-dimensional `F_p`-modules.

use rand::{Rng, RngCore};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::complex::{random_chain_map, random_complex, ChainComplex, ComplexMap, HomComplex};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::Matrix;
use crate::simplicial::{quotient, reduced_chain_map, reduced_chains, Crew, CrewMap};

/// `h ∘ s = id`, built degree by degree: a naive section is corrected by a
/// solution of `∂κ = E` inside the acyclic kernel of `h`.
pub fn sector(h: &ComplexMap) -> Result<ComplexMap> {
    sector_with(h, None::<&mut dyn RngCore>)
}

/// As [`sector`], with the naive section perturbed by random kernel
/// elements drawn from `rng`.
pub fn sector_with<R: RngCore + ?Sized>(h: &ComplexMap, mut rng: Option<&mut R>) -> Result<ComplexMap> {
    let (big, small) = (h.source(), h.target());
    let f = big.field();
    if let Some(q) = h.first_non_surjective_degree(0) {
        return Err(Error::precondition(format!("map is not surjective in degree {q}")));
    }
    if !h.is_chain_map() {
        return Err(Error::precondition("map does not commute with differentials"));
    }
    let (kernel, bases) = h.kernel_complex();
    if let Some(q) = (0..=kernel.top()).find(|&q| kernel.betti(q) != 0) {
        return Err(Error::precondition(format!("kernel has homology in degree {q}")));
    }
    let top = big.top().max(small.top());
    let mut s: Vec<Matrix> = Vec::with_capacity(top + 1);
    for q in 0..=top {
        let hq = h.component(q);
        let mut sq = Matrix::zeros(f, big.rank(q), small.rank(q));
        for c in 0..small.rank(q) {
            let mut e = vec![0; small.rank(q)];
            e[c] = 1 % f.p();
            let mut x = hq.solve(&e).expect("surjective in every degree");
            if let Some(rng) = rng.as_deref_mut() {
                if q < bases.len() {
                    for k in 0..bases[q].cols() {
                        let t = rng.gen_range(0..f.p());
                        for (xi, b) in x.iter_mut().zip(bases[q].column(k)) {
                            *xi = f.add(*xi, f.mul(t, b));
                        }
                    }
                }
            }
            for (r, v) in x.into_iter().enumerate() {
                sq.set(r, c, v);
            }
        }
        if q >= 1 && small.rank(q) > 0 && kernel.rank(q) > 0 {
            // E = s_{q-1} ∂ - ∂~ σ_q lies in the cycles of the kernel
            let e = s[q - 1]
                .mul(&small.differential(q))?
                .sub(&big.differential(q).mul(&sq)?)?;
            let dk = kernel.differential(q);
            for c in 0..e.cols() {
                let coords = bases[q - 1]
                    .solve(&e.column(c))
                    .ok_or_else(|| Error::structural("section defect leaves the kernel"))?;
                let kappa = dk
                    .solve(&coords)
                    .ok_or_else(|| Error::structural(format!("kernel cycle in degree {} is not a boundary", q - 1)))?;
                let fix = bases[q].mul_vec(&kappa);
                for (r, v) in fix.into_iter().enumerate() {
                    sq.add_at(r, c, v);
                }
            }
        }
        s.push(sq);
    }
    let s = ComplexMap::new(small.clone(), big.clone(), s)
        .map_err(|e| Error::structural(format!("sector is not a chain map: {e}")))?;
    if !h.compose(&s)?.agrees_with(&ComplexMap::identity(small)) {
        return Err(Error::structural("sector is not a right inverse"));
    }
    Ok(s)
}

/// A commutative square `f' ∘ g' = f'' ∘ g''` with `g' : W -> V'`,
/// `g'' : W -> V''`, `f' : V' -> U`, `f'' : V'' -> U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub f1: ComplexMap,
    pub f2: ComplexMap,
    pub g1: ComplexMap,
    pub g2: ComplexMap,
}

impl Square {
    pub fn new(f1: ComplexMap, f2: ComplexMap, g1: ComplexMap, g2: ComplexMap) -> Result<Self> {
        if !f1.compose(&g1)?.agrees_with(&f2.compose(&g2)?) {
            return Err(Error::precondition("square does not commute"));
        }
        Ok(Square { f1, f2, g1, g2 })
    }

    pub fn u(&self) -> &ChainComplex {
        self.f1.target()
    }

    pub fn v1(&self) -> &ChainComplex {
        self.f1.source()
    }

    pub fn v2(&self) -> &ChainComplex {
        self.f2.source()
    }

    pub fn w(&self) -> &ChainComplex {
        self.g1.source()
    }
}

/// `(s', s'', t', t'')` with `(-s', s'') ∘ (-f', f'') + (g', g'') ∘ (t', t'') = id`
/// on `V' ⊕ V''`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyQuadruple {
    pub s1: ComplexMap,
    pub s2: ComplexMap,
    pub t1: ComplexMap,
    pub t2: ComplexMap,
}

impl KeyQuadruple {
    /// Checks the defining identity block by block; the error names the
    /// failing block and degree.
    pub fn check(&self, sq: &Square) -> Result<()> {
        let blocks = [
            ("V'->V'", self.s1.compose(&sq.f1)?.add(&sq.g1.compose(&self.t1)?)?, Some(sq.v1())),
            ("V''->V'", sq.g1.compose(&self.t2)?.sub(&self.s1.compose(&sq.f2)?)?, None),
            ("V'->V''", sq.g2.compose(&self.t1)?.sub(&self.s2.compose(&sq.f1)?)?, None),
            ("V''->V''", self.s2.compose(&sq.f2)?.add(&sq.g2.compose(&self.t2)?)?, Some(sq.v2())),
        ];
        for (name, m, id) in blocks {
            let expected = match id {
                Some(c) => ComplexMap::identity(c),
                None => ComplexMap::zero(m.source(), m.target()),
            };
            let top = m.top().max(expected.top());
            if let Some(q) = (0..=top).find(|&q| m.component(q) != expected.component(q)) {
                return Err(Error::structural(format!("key identity fails on block {name} in degree {q}")));
            }
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for m in [&self.s1, &self.s2, &self.t1, &self.t2] {
            h.update(m.digest().as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// A split short exact row `0 <- U <-p- V <-q- W <- 0` with splittings
/// `k : U -> V`, `l : V -> W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRow {
    pub p: ComplexMap,
    pub q: ComplexMap,
    pub k: ComplexMap,
    pub l: ComplexMap,
}

impl SplitRow {
    /// Checks `p k = id`, `l q = id`, `k p + q l = id`, and that the four
    /// maps are chain maps; the error names the failing identity.
    pub fn check(&self, name: &str) -> Result<()> {
        for (m, label) in [(&self.p, "p"), (&self.q, "q"), (&self.k, "k"), (&self.l, "l")] {
            if !m.is_chain_map() {
                return Err(Error::precondition(format!("{name}: {label} is not a chain map")));
            }
        }
        let u = self.p.target();
        let v = self.p.source();
        let w = self.q.source();
        let is_id = |m: ComplexMap, c: &ChainComplex| m.agrees_with(&ComplexMap::identity(c));
        if !is_id(self.p.compose(&self.k)?, u) {
            return Err(Error::precondition(format!("{name}: p∘k = id fails")));
        }
        if !is_id(self.l.compose(&self.q)?, w) {
            return Err(Error::precondition(format!("{name}: l∘q = id fails")));
        }
        if !is_id(self.k.compose(&self.p)?.add(&self.q.compose(&self.l)?)?, v) {
            return Err(Error::precondition(format!("{name}: k∘p + q∘l = id fails")));
        }
        Ok(())
    }

    /// Completes `p`, `q` and a section `k` of `p` by the unique `l` with
    /// `q ∘ l = id - k ∘ p`.
    pub fn from_section(p: ComplexMap, q: ComplexMap, k: ComplexMap) -> Result<Self> {
        let rest = ComplexMap::identity(p.source()).sub(&k.compose(&p)?)?;
        let f = p.source().field();
        let top = rest.top();
        let mut maps = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let qd = q.component(d);
            let rd = rest.component(d);
            let mut ld = Matrix::zeros(f, q.source().rank(d), p.source().rank(d));
            for c in 0..rd.cols() {
                let x = qd
                    .solve(&rd.column(c))
                    .ok_or_else(|| Error::precondition(format!("row is not exact in the middle in degree {d}")))?;
                for (r, v) in x.into_iter().enumerate() {
                    ld.set(r, c, v);
                }
            }
            maps.push(ld);
        }
        let l = ComplexMap::new(p.source().clone(), q.source().clone(), maps)?;
        Ok(SplitRow { p, q, k, l })
    }
}

/// The left square of two split rows joined by `f : Ũ -> U`,
/// `g : Ṽ -> V`, `h : W̃ -> W`, and its key `(0, k, k̂, r)` with
/// `r = q̃ ∘ s ∘ l` and `k̂ = k̃ + r ∘ (k ∘ f - g ∘ k̃)`.
pub fn key_from_split_rows(
    upper: &SplitRow,
    lower: &SplitRow,
    f: &ComplexMap,
    g: &ComplexMap,
    h: &ComplexMap,
    s: &ComplexMap,
) -> Result<(Square, KeyQuadruple)> {
    upper.check("upper row")?;
    lower.check("lower row")?;
    if !lower.p.compose(g)?.agrees_with(&f.compose(&upper.p)?) || !g.compose(&upper.q)?.agrees_with(&lower.q.compose(h)?) {
        return Err(Error::precondition("diagram does not commute"));
    }
    if !h.compose(s)?.agrees_with(&ComplexMap::identity(h.target())) {
        return Err(Error::precondition("h∘s = id fails"));
    }
    let r = upper.q.compose(&s.compose(&lower.l)?)?;
    let correction = lower.k.compose(f)?.sub(&g.compose(&upper.k)?)?;
    let k_hat = upper.k.add(&r.compose(&correction)?)?;
    let square = Square::new(f.clone(), lower.p.clone(), upper.p.clone(), g.clone())?;
    let key = KeyQuadruple {
        s1: ComplexMap::zero(square.u(), square.v1()),
        s2: lower.k.clone(),
        t1: k_hat,
        t2: r,
    };
    key.check(&square)?;
    Ok((square, key))
}

/// `l = t' ∘ k' + t'' ∘ k''`, checked to satisfy `g' ∘ l = k'` and
/// `g'' ∘ l = k''`.
pub fn half_key_lift(
    sq: &Square,
    t1: &ComplexMap,
    t2: &ComplexMap,
    k1: &ComplexMap,
    k2: &ComplexMap,
) -> Result<ComplexMap> {
    if !sq.f1.compose(k1)?.agrees_with(&sq.f2.compose(k2)?) {
        return Err(Error::precondition("f'∘k' = f''∘k'' fails"));
    }
    let l = t1.compose(k1)?.add(&t2.compose(k2)?)?;
    if !sq.g1.compose(&l)?.agrees_with(k1) || !sq.g2.compose(&l)?.agrees_with(k2) {
        return Err(Error::structural("lift does not satisfy g'∘l = k' and g''∘l = k''"));
    }
    Ok(l)
}

/// Everything built for the square of mapping complexes.
#[derive(Debug, Clone)]
pub struct FunctionSquareKey {
    pub square: Square,
    pub key: KeyQuadruple,
    /// Ranks of `Hom(Ñ(N), Q)`, the mapping complex of the quotient.
    pub quotient_ranks: Vec<usize>,
}

/// Key of the square `Q^L <- Q^M`, `R^L <- R^M` for an injective map of
/// crews `j : L -> M` whose quotient is acyclic and a chain map
/// `c : Q -> R` between normalized chains of simplicial modules that is
/// onto in positive degrees. Mapping complexes are truncated Hom complexes
/// out of reduced chains.
pub fn key_for_function_square<R: RngCore + ?Sized>(
    j: &CrewMap,
    l: &Crew,
    m: &Crew,
    c: &ComplexMap,
    mut rng: Option<&mut R>,
) -> Result<FunctionSquareKey> {
    j.check(l, m)?;
    let mut hit = vec![Vec::new(); m.dim() + 1];
    for q in 0..=l.dim() {
        for x in &j.images[q] {
            if !x.is_nondegenerate() {
                return Err(Error::precondition(format!("j sends a {q}-simplex to a degenerate one")));
            }
            hit[q].push(x.base);
        }
    }
    for (q, level) in hit.iter_mut().enumerate() {
        let n = level.len();
        level.sort_unstable();
        level.dedup();
        if level.len() != n {
            return Err(Error::precondition(format!("j is not injective in degree {q}")));
        }
    }
    let field = c.source().field();
    let (n, k) = quotient(m, |q, i| hit.get(q).map_or(false, |h| h.binary_search(&i).is_ok()))?;
    let nc = reduced_chains(&n, field);
    if let Some(q) = (0..=nc.top()).find(|&q| nc.betti(q) != 0) {
        return Err(Error::precondition(format!("quotient M/L has reduced homology in degree {q}")));
    }
    if !c.is_chain_map() {
        return Err(Error::precondition("c does not commute with differentials"));
    }
    if let Some(q) = c.first_non_surjective_degree(1) {
        return Err(Error::precondition(format!("c is not surjective on normalized chains in degree {q}")));
    }
    let top = (m.dim() + 1).max(c.source().top()).max(c.target().top());
    let (q_cx, r_cx) = (c.source().extended_to(top), c.target().extended_to(top));
    let c = ComplexMap::unchecked(q_cx.clone(), r_cx.clone(), (0..=top).map(|d| c.component(d)).collect())?;
    let (cl, cm, cn) = (reduced_chains(l, field), reduced_chains(m, field), nc);
    let nj = reduced_chain_map(j, l, m, field);
    let nk = reduced_chain_map(&k, m, &n, field);
    let hom = |a: &ChainComplex, b: &ChainComplex| HomComplex::new(a, b);
    let (ql, qm, qn) = (hom(&cl, &q_cx), hom(&cm, &q_cx), hom(&cn, &q_cx));
    let (rl, rm, rn) = (hom(&cl, &r_cx), hom(&cm, &r_cx), hom(&cn, &r_cx));
    let pre = |from: &HomComplex, to: &HomComplex, by: &ComplexMap| HomComplex::induced(from, to, Some(by), None);
    let post = |from: &HomComplex, to: &HomComplex| HomComplex::induced(from, to, None, Some(&c));
    let (qj, qk) = (pre(&qm, &ql, &nj)?, pre(&qn, &qm, &nk)?);
    let (rj, rk) = (pre(&rm, &rl, &nj)?, pre(&rn, &rm, &nk)?);
    let (cl_map, cm_map, cn_map) = (post(&ql, &rl)?, post(&qm, &rm)?, post(&qn, &rn)?);
    let upper = SplitRow::from_section(qj.clone(), qk, sector_with(&qj, rng.as_deref_mut())?)?;
    let lower = SplitRow::from_section(rj.clone(), rk, sector_with(&rj, rng.as_deref_mut())?)?;
    let s = sector_with(&cn_map, rng.as_deref_mut())?;
    let (square, key) = key_from_split_rows(&upper, &lower, &cl_map, &cm_map, &cn_map, &s)?;
    Ok(FunctionSquareKey {
        square,
        key,
        quotient_ranks: qn.complex().ranks().to_vec(),
    })
}

/// A seeded split-exact diagram for trials: rows `Ũ ⊕ W̃` and `U ⊕ W`
/// with twisted splittings, `h = (id, χ) : W ⊕ A -> W` for an acyclic `A`,
/// and `g = [[f, 0], [b, h]]`.
#[derive(Debug, Clone)]
pub struct TrialDiagram {
    pub upper: SplitRow,
    pub lower: SplitRow,
    pub f: ComplexMap,
    pub g: ComplexMap,
    pub h: ComplexMap,
}

/// Block map between direct sums given by a grid of components (`None`
/// for zero).
fn block_map(
    source: &[&ChainComplex],
    target: &[&ChainComplex],
    grid: &[Vec<Option<&ComplexMap>>],
) -> Result<ComplexMap> {
    let sum = |cs: &[&ChainComplex]| cs[1..].iter().fold(cs[0].clone(), |acc, c| acc.direct_sum(c));
    let (src, dst) = (sum(source), sum(target));
    let f = src.field();
    let top = src.top().max(dst.top());
    let maps = (0..=top)
        .map(|q| {
            let mut m = Matrix::zeros(f, dst.rank(q), src.rank(q));
            let mut r0 = 0;
            for (i, t) in target.iter().enumerate() {
                let mut c0 = 0;
                for (k, s) in source.iter().enumerate() {
                    if let Some(map) = grid[i][k] {
                        m.put_block(r0, c0, &map.component(q));
                    }
                    c0 += s.rank(q);
                }
                r0 += t.rank(q);
            }
            m
        })
        .collect();
    ComplexMap::new(src, dst, maps)
}

/// A split row `U <- U ⊕ W <- W`, its splittings twisted by a random chain
/// map `φ : U -> W`.
fn random_row(rng: &mut impl Rng, u: &ChainComplex, w: &ChainComplex) -> Result<SplitRow> {
    let phi = random_chain_map(rng, u, w);
    let (iu, iw) = (ComplexMap::identity(u), ComplexMap::identity(w));
    let p = block_map(&[u, w], &[u], &[vec![Some(&iu), None]])?;
    let q = block_map(&[w], &[u, w], &[vec![None], vec![Some(&iw)]])?;
    let k = block_map(&[u], &[u, w], &[vec![Some(&iu)], vec![Some(&phi)]])?;
    let neg_phi = phi.neg();
    let l = block_map(&[u, w], &[w], &[vec![Some(&neg_phi), Some(&iw)]])?;
    Ok(SplitRow { p, q, k, l })
}

pub fn random_trial(rng: &mut impl Rng, field: Fp, top: usize, max_rank: usize) -> Result<TrialDiagram> {
    let u = random_complex(rng, field, top, max_rank);
    let w = random_complex(rng, field, top, max_rank);
    let ut = random_complex(rng, field, top, max_rank);
    let mut a = ChainComplex::zero(field).extended_to(top);
    for d in 0..top {
        if rng.gen_bool(0.5) {
            a = a.direct_sum(&ChainComplex::cone_of_point(field, d).extended_to(top));
        }
    }
    let wt = w.direct_sum(&a);
    let f = random_chain_map(rng, &ut, &u);
    let chi = random_chain_map(rng, &a, &w);
    let iw = ComplexMap::identity(&w);
    let h = block_map(&[&w, &a], &[&w], &[vec![Some(&iw), Some(&chi)]])?;
    let b = random_chain_map(rng, &ut, &w);
    let g = block_map(&[&ut, &wt], &[&u, &w], &[vec![Some(&f), None], vec![Some(&b), Some(&h)]])?;
    let upper = random_row(rng, &ut, &wt)?;
    let lower = random_row(rng, &u, &w)?;
    Ok(TrialDiagram { upper, lower, f, g, h })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyTrialReport {
    pub trials: usize,
    /// Sectors that are not chain maps or not right inverses.
    pub sector_failures: usize,
    pub identity_failures: usize,
    pub lift_failures: usize,
    pub digests: Vec<String>,
}

impl KeyTrialReport {
    pub fn passed(&self) -> bool {
        self.sector_failures == 0 && self.identity_failures == 0 && self.lift_failures == 0
    }
}

/// Seeded trials: sector of `h`, key from the split rows, and the half-key
/// lift of `(g', g'')` and of random compatible pairs.
pub fn run_key_trials(rng: &mut impl Rng, field: Fp, trials: usize, top: usize, max_rank: usize) -> Result<KeyTrialReport> {
    let mut report = KeyTrialReport {
        trials,
        sector_failures: 0,
        identity_failures: 0,
        lift_failures: 0,
        digests: Vec::with_capacity(trials),
    };
    for _ in 0..trials {
        let d = random_trial(rng, field, top, max_rank)?;
        let s = sector_with(&d.h, Some(rng))?;
        let id = ComplexMap::identity(d.h.target());
        if !s.is_chain_map() || !d.h.compose(&s)?.agrees_with(&id) {
            report.sector_failures += 1;
        }
        match key_from_split_rows(&d.upper, &d.lower, &d.f, &d.g, &d.h, &s) {
            Ok((sq, key)) => {
                report.digests.push(key.digest());
                let w = sq.w().clone();
                let x = random_chain_map(rng, &w, &w);
                let (k1, k2) = (sq.g1.compose(&x)?, sq.g2.compose(&x)?);
                if half_key_lift(&sq, &key.t1, &key.t2, &k1, &k2).is_err() {
                    report.lift_failures += 1;
                }
            }
            Err(_) => report.identity_failures += 1,
        }
    }
    Ok(report)
}
