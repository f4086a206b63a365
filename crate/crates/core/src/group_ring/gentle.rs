use std::ops::RangeInclusive;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{dot, Matrix, Subspace};

use super::group::FinGroup;
use super::ring::{pushforward, AugFiltration, GroupRingElt, PowerLimit};

/// A function `G -> F_p'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFunction {
    domain: Arc<FinGroup>,
    field: Fp,
    values: Vec<u32>,
}

impl GroupFunction {
    pub fn new(domain: Arc<FinGroup>, field: Fp, values: Vec<u32>) -> Result<Self> {
        if values.len() != domain.order() {
            return Err(Error::validation(format!(
                "function table has {} entries, group has {} elements",
                values.len(),
                domain.order()
            )));
        }
        if values.iter().any(|&v| v >= field.p()) {
            return Err(Error::validation(format!("function value out of range for {field}")));
        }
        Ok(GroupFunction { domain, field, values })
    }

    pub fn from_fn(domain: Arc<FinGroup>, field: Fp, f: impl Fn(usize) -> i64) -> Self {
        let values = (0..domain.order()).map(|g| field.from_i64(f(g))).collect();
        GroupFunction { domain, field, values }
    }

    pub fn constant(domain: Arc<FinGroup>, field: Fp, c: u32) -> Self {
        Self::from_fn(domain, field, |_| c as i64)
    }

    pub fn domain(&self) -> &Arc<FinGroup> {
        &self.domain
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, g: usize) -> u32 {
        self.values[g]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// `+f` applied to a coefficient vector.
    pub fn extend_linearly(&self, x: &[u32]) -> u32 {
        dot(self.field, &self.values, x)
    }

    /// The same table read as a map into the cyclic group `Z_p'`.
    pub fn as_group_map(&self) -> Result<GroupMap> {
        let codomain = Arc::new(FinGroup::cyclic(self.field.p())?);
        GroupMap::new(self.domain.clone(), codomain, self.values.iter().map(|&v| v as usize).collect())
    }

    /// `self ∘ map`.
    pub fn after(&self, map: &GroupMap) -> Result<GroupFunction> {
        if map.codomain.as_ref() != self.domain.as_ref() {
            return Err(Error::argument("codomain of the inner map is not the domain of the outer function"));
        }
        let values = map.images.iter().map(|&y| self.values[y]).collect();
        Ok(GroupFunction {
            domain: map.domain.clone(),
            field: self.field,
            values,
        })
    }

    /// All `p'^|G|` functions, in lexicographic order of value tables.
    pub fn all(domain: Arc<FinGroup>, field: Fp) -> Result<Vec<GroupFunction>> {
        let n = domain.order() as u32;
        let count = (field.p() as u64)
            .checked_pow(n)
            .filter(|&c| c <= 1 << 16)
            .ok_or_else(|| Error::cap("too many functions to enumerate"))?;
        Ok((0..count)
            .map(|mut i| {
                let mut values = vec![0; n as usize];
                for v in values.iter_mut().rev() {
                    *v = (i % field.p() as u64) as u32;
                    i /= field.p() as u64;
                }
                GroupFunction {
                    domain: domain.clone(),
                    field,
                    values,
                }
            })
            .collect())
    }

    pub fn random(rng: &mut impl Rng, domain: Arc<FinGroup>, field: Fp) -> Self {
        let values = (0..domain.order()).map(|_| rng.gen_range(0..field.p())).collect();
        GroupFunction { domain, field, values }
    }
}

/// A set map between finite groups, given by image indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    domain: Arc<FinGroup>,
    codomain: Arc<FinGroup>,
    images: Vec<usize>,
}

impl GroupMap {
    pub fn new(domain: Arc<FinGroup>, codomain: Arc<FinGroup>, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.order() || images.iter().any(|&y| y >= codomain.order()) {
            return Err(Error::validation("image table does not fit the groups"));
        }
        Ok(GroupMap { domain, codomain, images })
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// The linear map `R[U] -> R[V]`, `[u] ↦ [f(u)]`.
    pub fn pushforward(&self, field: Fp) -> Matrix {
        pushforward(&self.domain, &self.codomain, &self.images, field).expect("validated map")
    }
}

/// Outcome of a gentleness test: either `+f` vanishes on the ideal power, or
/// a product `(1-[g_1])⋯(1-[g_k])` (listed by element index) with nonzero
/// image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    Vanishes,
    Witness(Vec<usize>),
}

impl Defect {
    pub fn holds(&self) -> bool {
        matches!(self, Defect::Vanishes)
    }
}

fn check_field(filt: &AugFiltration, field: Fp) -> Result<()> {
    if filt.field() != field {
        return Err(Error::argument(format!(
            "function takes values in {field} but the filtration is over {}",
            filt.field()
        )));
    }
    Ok(())
}

/// Tests whether all of `functionals` vanish on `I^{r+1}`.
pub fn defect_of_functionals(filt: &AugFiltration, functionals: &[&[u32]], r: usize) -> Result<Defect> {
    let gens = filt
        .generators(r + 1)
        .ok_or_else(|| Error::structural(format!("I^{} has not been computed", r + 1)))?;
    for gen in &gens {
        if functionals.iter().any(|f| dot(filt.field(), f, &gen.vector) != 0) {
            return Ok(Defect::Witness(gen.word.clone()));
        }
    }
    Ok(Defect::Vanishes)
}

/// Least `r` with every functional vanishing on `I^{r+1}`; `None` when some
/// functional survives on the stable power.
pub fn degree_of_functionals(filt: &AugFiltration, functionals: &[&[u32]]) -> Result<Option<usize>> {
    let st = filt
        .stable_index()
        .ok_or_else(|| Error::structural("filtration has not stabilized"))?;
    if !defect_of_functionals(filt, functionals, st - 1)?.holds() {
        return Ok(None);
    }
    for r in 0..st {
        if defect_of_functionals(filt, functionals, r)?.holds() {
            return Ok(Some(r));
        }
    }
    unreachable!("vanishing on the stable power gives a bound")
}

pub fn gentle_defect(f: &GroupFunction, r: usize) -> Defect {
    let filt = AugFiltration::compute(f.domain.clone(), f.field, PowerLimit::UpTo(r + 1));
    defect_of_functionals(&filt, &[&f.values], r).expect("filtration computed to r+1")
}

pub fn gentle_defect_in(filt: &AugFiltration, f: &GroupFunction, r: usize) -> Result<Defect> {
    check_field(filt, f.field)?;
    defect_of_functionals(filt, &[&f.values], r)
}

pub fn gentle_degree(f: &GroupFunction) -> Option<usize> {
    let filt = AugFiltration::compute(f.domain.clone(), f.field, PowerLimit::Stabilize);
    degree_of_functionals(&filt, &[&f.values]).expect("stable filtration")
}

pub fn gentle_degree_in(filt: &AugFiltration, f: &GroupFunction) -> Result<Option<usize>> {
    check_field(filt, f.field)?;
    degree_of_functionals(filt, &[&f.values])
}

/// A function `G -> F_p'^k`, gentle when every coordinate is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFunction {
    domain: Arc<FinGroup>,
    field: Fp,
    coordinates: Vec<Vec<u32>>,
}

impl VectorFunction {
    /// `∏ f_i` on `∏ U_i`, `(x_i) ↦ (f_i(x_i))`.
    pub fn product(fs: &[GroupFunction]) -> Result<Self> {
        let field = fs.first().ok_or_else(|| Error::argument("empty product"))?.field;
        if fs.iter().any(|f| f.field != field) {
            return Err(Error::argument("factors take values in different fields"));
        }
        let mut domain = FinGroup::trivial();
        for f in fs {
            domain = FinGroup::direct_product(&domain, &f.domain)?;
        }
        let n = domain.order();
        let mut coordinates = vec![vec![0; n]; fs.len()];
        for x in 0..n {
            // mixed radix over the factor orders, first factor most significant
            let mut rest = x;
            for (i, f) in fs.iter().enumerate().rev() {
                let m = f.domain.order();
                coordinates[i][x] = f.values[rest % m];
                rest /= m;
            }
        }
        Ok(VectorFunction {
            domain: Arc::new(domain),
            field,
            coordinates,
        })
    }

    pub fn domain(&self) -> &Arc<FinGroup> {
        &self.domain
    }

    pub fn defect(&self, r: usize) -> Defect {
        let filt = AugFiltration::compute(self.domain.clone(), self.field, PowerLimit::UpTo(r + 1));
        let fs: Vec<&[u32]> = self.coordinates.iter().map(Vec::as_slice).collect();
        defect_of_functionals(&filt, &fs, r).expect("filtration computed to r+1")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotencyReport {
    pub p: u32,
    pub m: u32,
    /// `dim I^s` for `s = 1, 2, …` up to the first zero power.
    pub dims: Vec<usize>,
    /// `I^{(p-1)m+1} = 0`.
    pub vanishes: bool,
    /// `I^{(p-1)m} != 0`.
    pub sharp: bool,
}

impl NilpotencyReport {
    pub fn passed(&self) -> bool {
        self.vanishes
    }
}

/// Powers of the augmentation ideal of `F_p[Z_p^m]` against the bound
/// `(p-1)m + 1`.
pub fn check_elementary_nilpotency(p: u32, m: u32) -> Result<NilpotencyReport> {
    let field = Fp::new(p)?;
    if (p as u64).pow(m) > 256 {
        return Err(Error::cap(format!("{p}^{m} exceeds 256")));
    }
    let group = Arc::new(FinGroup::abelian(&vec![p; m as usize])?);
    let bound = ((p - 1) * m) as usize;
    let filt = AugFiltration::compute(group, field, PowerLimit::UpTo(bound + 1));
    let power = |s: usize| filt.power(s).expect("computed");
    Ok(NilpotencyReport {
        p,
        m,
        dims: filt.dims(),
        vanishes: power(bound + 1).is_zero(),
        sharp: !power(bound).is_zero(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionReport {
    pub inner_degree: Option<usize>,
    pub outer_degree: Option<usize>,
    /// `None` when one of the functions is not gentle.
    pub holds: Option<bool>,
    pub witness: Option<Vec<usize>>,
}

/// `g ∘ f` is `rs`-gentle when `f` is `r`-gentle and `g` is `s`-gentle.
/// `f` takes values in `F_p'`, read as the cyclic group `Z_p'` that `g` is
/// defined on.
pub fn check_composition_bound(f: &GroupFunction, g: &GroupFunction) -> Result<CompositionReport> {
    let inner = f.as_group_map()?;
    let composite = g.after(&inner)?;
    let (r, s) = (gentle_degree(f), gentle_degree(g));
    let (holds, witness) = match (r, s) {
        (Some(r), Some(s)) => match gentle_defect(&composite, r * s) {
            Defect::Vanishes => (Some(true), None),
            Defect::Witness(w) => (Some(false), Some(w)),
        },
        _ => (None, None),
    };
    Ok(CompositionReport {
        inner_degree: r,
        outer_degree: s,
        holds,
        witness,
    })
}

/// `f_R(I^{rs+1}) ⊆ I^{s+1}` for the pushforward along `f`.
pub fn check_pushforward_containment(f: &GroupMap, r: usize, s: usize, ring: Fp) -> Result<bool> {
    let src = AugFiltration::compute(f.domain.clone(), ring, PowerLimit::UpTo(r * s + 1));
    let dst = AugFiltration::compute(f.codomain.clone(), ring, PowerLimit::UpTo(s + 1));
    let image = src.power(r * s + 1).expect("computed").image(&f.pushforward(ring))?;
    Ok(image.leq(&dst.power(s + 1).expect("computed"))?.holds())
}

/// Builds `∏ f_i` and tests it for `r`-gentleness; each factor must be
/// `r`-gentle.
pub fn check_product_gentle(fs: &[GroupFunction], r: usize) -> Result<Defect> {
    for (i, f) in fs.iter().enumerate() {
        if !gentle_defect(f, r).holds() {
            return Err(Error::precondition(format!("factor {i} is not {r}-gentle")));
        }
    }
    Ok(VectorFunction::product(fs)?.defect(r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerfectReport {
    pub ideal_dim: usize,
    pub square_dim: usize,
    pub square_equals_ideal: bool,
    /// Every `[g] - [e]` lies in `I^2` (only tested when `I^2 = I`).
    pub differences_in_square: Option<bool>,
}

pub fn check_perfect_stability(group: Arc<FinGroup>, p: u32) -> Result<PerfectReport> {
    let field = Fp::new(p)?;
    let filt = AugFiltration::compute(group.clone(), field, PowerLimit::UpTo(2));
    let (i1, i2) = (filt.power(1).unwrap(), filt.power(2).unwrap());
    let equal = i1.rank() == i2.rank();
    let differences = equal.then(|| {
        let e = group.identity();
        (0..group.order()).all(|g| {
            let d = GroupRingElt::basic(group.clone(), field, g).sub(&GroupRingElt::basic(group.clone(), field, e));
            i2.contains(d.coeffs())
        })
    });
    Ok(PerfectReport {
        ideal_dim: i1.rank(),
        square_dim: i2.rank(),
        square_equals_ideal: equal,
        differences_in_square: differences,
    })
}

/// `[u1 + u2] - [u1] - [u2] + [0]` lies in the stable power of `F_p[U]`
/// when `u1` and `u2` have coprime orders.
pub fn check_coprime_relation(group: Arc<FinGroup>, u1: usize, u2: usize, p: u32) -> Result<bool> {
    let field = Fp::new(p)?;
    if !group.is_abelian() {
        return Err(Error::argument("group must be abelian"));
    }
    if u1 >= group.order() || u2 >= group.order() {
        return Err(Error::argument("element out of range"));
    }
    let (a, b) = (group.element_order(u1), group.element_order(u2));
    if a.gcd(&b) != 1 {
        return Err(Error::argument(format!("orders {a} and {b} are not coprime")));
    }
    let basic = |g| GroupRingElt::basic(group.clone(), field, g);
    let w = basic(group.mul(u1, u2))
        .sub(&basic(u1))
        .sub(&basic(u2))
        .add(&basic(group.identity()));
    let filt = AugFiltration::compute(group.clone(), field, PowerLimit::Stabilize);
    Ok(filt.stable_power().expect("stabilized").contains(w.coeffs()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceReport {
    pub tuples_checked: u64,
    /// A tuple `(a_1, …, a_{r+1})` with nonzero difference sum.
    pub failing: Option<Vec<i64>>,
}

impl DifferenceReport {
    pub fn passed(&self) -> bool {
        self.failing.is_none()
    }
}

/// The `(r+1)`-fold difference test
/// `Σ_{S ⊆ {1..r+1}} (-1)^{|S|} F(Σ_{i∈S} a_i) = 0` for a rational
/// polynomial `F` (coefficients by ascending degree) over all tuples from
/// `window`. The sum is symmetric, so only nondecreasing tuples are visited.
pub fn check_integer_polynomial(
    coeffs: &[Ratio<i64>],
    r: usize,
    window: RangeInclusive<i64>,
) -> Result<DifferenceReport> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo > hi {
        return Err(Error::argument("empty window"));
    }
    let k = r + 1;
    if k > 16 {
        return Err(Error::cap("at most 16 summands"));
    }
    let overflow = || Error::cap("polynomial values overflow 128-bit integers");
    // clear denominators
    let denom = coeffs.iter().fold(1i64, |acc, c| acc.lcm(c.denom()));
    let ints: Vec<i128> = coeffs
        .iter()
        .map(|c| *c.numer() as i128 * (denom / c.denom()) as i128)
        .collect();
    let (qlo, qhi) = (lo.min(0) * k as i64, hi.max(0) * k as i64);
    let mut table = Vec::with_capacity((qhi - qlo + 1) as usize);
    for q in qlo..=qhi {
        let mut acc: i128 = 0;
        for &c in ints.iter().rev() {
            acc = acc.checked_mul(q as i128).and_then(|x| x.checked_add(c)).ok_or_else(overflow)?;
        }
        table.push(acc);
    }
    let value = |q: i64| table[(q - qlo) as usize];
    let mut tuple = vec![lo; k];
    let mut checked = 0u64;
    loop {
        checked += 1;
        let mut sum: i128 = 0;
        for mask in 0u32..(1 << k) {
            let s: i64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| tuple[i]).sum();
            let v = value(s);
            sum = if mask.count_ones() % 2 == 0 { sum.checked_add(v) } else { sum.checked_sub(v) }
                .ok_or_else(overflow)?;
        }
        if sum != 0 {
            return Ok(DifferenceReport {
                tuples_checked: checked,
                failing: Some(tuple),
            });
        }
        // next nondecreasing tuple
        let Some(i) = (0..k).rev().find(|&i| tuple[i] < hi) else { break };
        let v = tuple[i] + 1;
        for t in &mut tuple[i..] {
            *t = v;
        }
    }
    Ok(DifferenceReport {
        tuples_checked: checked,
        failing: None,
    })
}

/// `C(n, k)` for `k >= 0` and any integer `n`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    if n < 0 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        return sign * binomial(k - n - 1, k);
    }
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub orders: Vec<u32>,
    pub p: u32,
    pub r: usize,
    pub identity_failures: Vec<String>,
    pub intersection_dim: usize,
    pub trials: usize,
    pub membership_failures: usize,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.identity_failures.is_empty() && self.membership_failures == 0
    }
}

/// For `U = ⊕_i Z_{n_i}` and the retractions `q_J` onto the coordinates in
/// `J`, checks that every element of `⋂_{|J| <= r} ker (q_J)_*` lies in
/// `I^{r+1}` (random samples), and that
/// `[u] - Σ_{|J|<=r} (-1)^{r-|J|} C(|I|-|J|-1, r-|J|) [q_J(u)]` lies in
/// `I^{r+1}` for every `u`.
pub fn check_projection_filtration(
    orders: &[u32],
    p: u32,
    r: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<ProjectionReport> {
    let field = Fp::new(p)?;
    let k = orders.len();
    if k > 4 {
        return Err(Error::cap("at most four factors"));
    }
    let group = Arc::new(FinGroup::abelian(orders)?);
    let n = group.order();
    let filt = AugFiltration::compute(group.clone(), field, PowerLimit::UpTo(r + 1));
    let target = filt.power(r + 1).expect("computed");
    let retract = |mask: u32, u: usize| -> usize {
        let mut t = group.tuple(u).expect("abelian presentation");
        for (i, x) in t.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *x = 0;
            }
        }
        group.from_tuple(&t).expect("valid tuple")
    };
    let small: Vec<u32> = (0u32..1 << k).filter(|m| m.count_ones() as usize <= r).collect();

    let mut identity_failures = Vec::new();
    for u in 0..n {
        let mut w = vec![0u32; n];
        w[u] = 1 % p;
        for &mask in &small {
            let j = mask.count_ones() as i64;
            let sign = if (r as i64 - j) % 2 == 0 { 1 } else { -1 };
            let c = sign * binomial(k as i64 - j - 1, r as i64 - j);
            let x = retract(mask, u);
            w[x] = field.sub(w[x], field.from_i64(c));
        }
        if !target.contains(&w) {
            identity_failures.push(group.label(u).to_string());
        }
    }

    let mut rows = Vec::new();
    for &mask in &small {
        let m = GroupMap::new(group.clone(), group.clone(), (0..n).map(|u| retract(mask, u)).collect())?;
        rows.extend(m.pushforward(field).to_rows());
    }
    let stacked = Matrix::from_rows(field, n, &rows)?;
    let kernel: Subspace = stacked.kernel();
    let mut membership_failures = 0;
    for _ in 0..trials {
        let w = crate::complex::random_element(rng, &kernel);
        if !target.contains(&w) {
            membership_failures += 1;
        }
    }
    Ok(ProjectionReport {
        orders: orders.to_vec(),
        p,
        r,
        identity_failures,
        intersection_dim: kernel.rank(),
        trials,
        membership_failures,
    })
}
