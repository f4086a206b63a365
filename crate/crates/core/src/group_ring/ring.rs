use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{Matrix, Subspace};

use super::group::FinGroup;

/// An element of `F_p[G]`, stored densely in the group's element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElt {
    group: Arc<FinGroup>,
    field: Fp,
    coeffs: Vec<u32>,
}

impl GroupRingElt {
    pub fn zero(group: Arc<FinGroup>, field: Fp) -> Self {
        let n = group.order();
        GroupRingElt {
            group,
            field,
            coeffs: vec![0; n],
        }
    }

    /// The basic element `[g]`.
    pub fn basic(group: Arc<FinGroup>, field: Fp, g: usize) -> Self {
        let mut x = Self::zero(group, field);
        x.coeffs[g] = 1 % field.p();
        x
    }

    /// `1 - [g]`.
    pub fn one_minus(group: Arc<FinGroup>, field: Fp, g: usize) -> Self {
        let e = group.identity();
        let mut x = Self::zero(group, field);
        x.coeffs[e] = field.add(x.coeffs[e], 1 % field.p());
        x.coeffs[g] = field.sub(x.coeffs[g], 1 % field.p());
        x
    }

    pub fn from_coeffs(group: Arc<FinGroup>, field: Fp, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::structural(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        if coeffs.iter().any(|&c| c >= field.p()) {
            return Err(Error::validation(format!("coefficient out of range for {field}")));
        }
        Ok(GroupRingElt { group, field, coeffs })
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        &self.group
    }

    pub fn augmentation(&self) -> u32 {
        self.coeffs.iter().fold(0, |acc, &c| self.field.add(acc, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| self.field.add(a, b)).collect();
        GroupRingElt { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| self.field.sub(a, b)).collect();
        GroupRingElt { coeffs, ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupRingElt {
            coeffs: convolve(&self.group, self.field, &self.coeffs, &other.coeffs),
            ..self.clone()
        }
    }
}

fn convolve(g: &FinGroup, f: Fp, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0; g.order()];
    for (x, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (y, &cb) in b.iter().enumerate() {
            if cb != 0 {
                let z = g.mul(x, y);
                out[z] = f.add(out[z], f.mul(ca, cb));
            }
        }
    }
    out
}

/// `v · (1 - [g])` on coefficient vectors.
fn times_one_minus(group: &FinGroup, f: Fp, v: &[u32], g: usize) -> Vec<u32> {
    let mut out = v.to_vec();
    for (x, &c) in v.iter().enumerate() {
        if c != 0 {
            let y = group.mul(x, g);
            out[y] = f.sub(out[y], c);
        }
    }
    out
}

/// `[g] · v` or `v · [g]` on coefficient vectors.
fn translate(group: &FinGroup, v: &[u32], g: usize, left: bool) -> Vec<u32> {
    let mut out = vec![0; v.len()];
    for (x, &c) in v.iter().enumerate() {
        let y = if left { group.mul(g, x) } else { group.mul(x, g) };
        out[y] = c;
    }
    out
}

/// A spanning generator of an ideal power: a product `(1-[g_1])⋯(1-[g_s])`
/// together with its expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub word: Vec<usize>,
    pub vector: Vec<u32>,
}

/// How far to compute the powers `I^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerLimit {
    /// Compute `I^1, …, I^s_max` (or fewer if the sequence stabilizes first).
    UpTo(usize),
    Stabilize,
}

/// The powers `I^1 ⊇ I^2 ⊇ …` of the augmentation ideal of `F_p[G]`.
///
/// `powers[s-1]` is `I^s`. Each power keeps a list of spanning products of
/// generators `1-[g]`, so failures can name an explicit product.
#[derive(Debug, Clone)]
pub struct AugFiltration {
    group: Arc<FinGroup>,
    field: Fp,
    powers: Vec<Subspace>,
    generators: Vec<Vec<Generator>>,
    stable_index: Option<usize>,
}

impl AugFiltration {
    pub fn compute(group: Arc<FinGroup>, field: Fp, limit: PowerLimit) -> Self {
        let n = group.order();
        let e = group.identity();
        let mut first = Subspace::zero(field, n);
        let mut gens = Vec::new();
        for g in 0..n {
            if g == e {
                continue;
            }
            let v = GroupRingElt::one_minus(group.clone(), field, g).coeffs;
            if first.insert(v.clone()) {
                gens.push(Generator { word: vec![g], vector: v });
            }
        }
        let mut filt = AugFiltration {
            group,
            field,
            powers: vec![first],
            generators: vec![gens],
            stable_index: None,
        };
        filt.extend(limit);
        filt
    }

    fn extend(&mut self, limit: PowerLimit) {
        while self.stable_index.is_none() {
            let s = self.powers.len();
            if let PowerLimit::UpTo(max) = limit {
                if s >= max {
                    break;
                }
            }
            let (next, gens) = self.lift(&self.generators[s - 1], self.powers[s - 1].rank());
            if next.rank() == self.powers[s - 1].rank() {
                // I^{s+1} ⊆ I^s with equal dimension
                self.stable_index = Some(s);
            } else {
                self.powers.push(next);
                self.generators.push(gens);
            }
        }
    }

    /// Spans `prev · I` by products `w·(1-[g])`, stopping once `bound` is
    /// reached.
    fn lift(&self, prev: &[Generator], bound: usize) -> (Subspace, Vec<Generator>) {
        let n = self.group.order();
        let e = self.group.identity();
        let mut next = Subspace::zero(self.field, n);
        let mut gens = Vec::new();
        for w in prev {
            for g in (0..n).filter(|&g| g != e) {
                if next.rank() == bound {
                    return (next, gens);
                }
                let v = times_one_minus(&self.group, self.field, &w.vector, g);
                if next.insert(v.clone()) {
                    let mut word = w.word.clone();
                    word.push(g);
                    gens.push(Generator { word, vector: v });
                }
            }
        }
        (next, gens)
    }

    /// Computes further powers, up to `limit`.
    pub fn ensure(&mut self, limit: PowerLimit) {
        self.extend(limit);
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        &self.group
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    /// Least `s` with `I^{s+1} = I^s`, if reached.
    pub fn stable_index(&self) -> Option<usize> {
        self.stable_index
    }

    /// Number of powers held; `I^1..=I^computed()` are available.
    pub fn computed(&self) -> usize {
        self.powers.len()
    }

    /// `I^s` for `s >= 0` (`I^0` is the whole ring). Powers beyond the stable
    /// index equal the stable power.
    pub fn power(&self, s: usize) -> Option<Subspace> {
        if s == 0 {
            return Some(Subspace::full(self.field, self.group.order()));
        }
        match (self.powers.get(s - 1), self.stable_index) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(st)) => Some(self.powers[st - 1].clone()),
            (None, None) => None,
        }
    }

    /// Spanning products of exactly `s >= 1` factors `1-[g]` for `I^s`.
    /// Beyond the stored range they are derived from the stable power.
    pub fn generators(&self, s: usize) -> Option<Vec<Generator>> {
        assert!(s >= 1);
        if let Some(g) = self.generators.get(s - 1) {
            return Some(g.clone());
        }
        let st = self.stable_index?;
        let bound = self.powers[st - 1].rank();
        let mut gens = self.generators[st - 1].clone();
        for _ in st..s {
            gens = self.lift(&gens, bound).1;
        }
        Some(gens)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.powers.iter().map(Subspace::rank).collect()
    }

    pub fn stable_power(&self) -> Option<Subspace> {
        self.stable_index.map(|s| self.powers[s - 1].clone())
    }

    /// Checks descent, two-sided ideal closure and `(1-[g]) I^s ⊆ I^{s+1}`
    /// on every computed power. Returns the first failure description.
    pub fn check_ideal_property(&self) -> Option<String> {
        let n = self.group.order();
        for (k, p) in self.powers.iter().enumerate() {
            let s = k + 1;
            if s >= 2 && !p.leq(&self.powers[k - 1]).map(|c| c.holds()).unwrap_or(false) {
                return Some(format!("I^{s} is not inside I^{}", s - 1));
            }
            let succ = self.power(s + 1);
            for v in p.basis() {
                for g in 0..n {
                    for left in [true, false] {
                        if !p.contains(&translate(&self.group, v, g, left)) {
                            return Some(format!("I^{s} is not closed under [{}]", self.group.label(g)));
                        }
                    }
                    if let Some(succ) = &succ {
                        if !succ.contains(&times_one_minus(&self.group, self.field, v, g)) {
                            return Some(format!("I^{s}·(1-[{}]) is not inside I^{}", self.group.label(g), s + 1));
                        }
                    }
                }
            }
        }
        None
    }
}

/// The matrix of the linear extension of a set map `G -> H` on group rings.
pub fn pushforward(domain: &FinGroup, codomain: &FinGroup, images: &[usize], field: Fp) -> Result<Matrix> {
    if images.len() != domain.order() || images.iter().any(|&y| y >= codomain.order()) {
        return Err(Error::structural("image table does not fit the groups"));
    }
    let mut m = Matrix::zeros(field, codomain.order(), domain.order());
    for (x, &y) in images.iter().enumerate() {
        m.add_at(y, x, 1 % field.p());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filt(orders: &[u32], p: u32) -> AugFiltration {
        let g = Arc::new(FinGroup::abelian(orders).unwrap());
        AugFiltration::compute(g, Fp::new(p).unwrap(), PowerLimit::Stabilize)
    }

    #[test]
    fn augmentation_examples() {
        let g = Arc::new(FinGroup::cyclic(3).unwrap());
        let f = Fp::new(3).unwrap();
        let a = GroupRingElt::basic(g.clone(), f, 1);
        let b = GroupRingElt::basic(g.clone(), f, 2);
        assert_eq!(a.augmentation(), 1);
        assert_eq!(GroupRingElt::zero(g.clone(), f).augmentation(), 0);
        assert_eq!(a.sub(&b).augmentation(), 0);
        assert_eq!(a.mul(&b), GroupRingElt::basic(g, f, 0));
    }

    #[test]
    fn cyclic_power_dims() {
        // Z_2 over F_2: I^1 = span{1-[g]}, I^2 = 0.
        let z2 = filt(&[2], 2);
        assert_eq!(z2.dims(), vec![1, 0]);
        assert_eq!(z2.stable_index(), Some(2));
        // Z_3 over F_3 is F_3[x]/(x^3): dims 2, 1, 0.
        let z3 = filt(&[3], 3);
        assert_eq!(z3.dims(), vec![2, 1, 0]);
        assert!(filt(&[], 2).power(1).unwrap().is_zero());
    }

    #[test]
    fn truncated_powers() {
        let g = Arc::new(FinGroup::abelian(&[2, 2, 2]).unwrap());
        let mut f = AugFiltration::compute(g, Fp::new(2).unwrap(), PowerLimit::UpTo(2));
        assert_eq!(f.computed(), 2);
        assert!(f.power(3).is_none());
        f.ensure(PowerLimit::Stabilize);
        assert_eq!(f.dims(), vec![7, 4, 1, 0]);
    }

    #[test]
    fn generator_words_expand_correctly() {
        let fl = filt(&[3, 3], 3);
        let g = fl.group().clone();
        let f = fl.field();
        for s in 1..=fl.computed() + 2 {
            for gen in fl.generators(s).unwrap() {
                assert_eq!(gen.word.len(), s);
                let prod = gen
                    .word
                    .iter()
                    .map(|&x| GroupRingElt::one_minus(g.clone(), f, x))
                    .reduce(|a, b| a.mul(&b))
                    .unwrap();
                assert_eq!(prod.coeffs(), &gen.vector[..]);
            }
        }
    }

    #[test]
    fn ideal_property_holds() {
        for (orders, p) in [(&[2u32, 2][..], 2), (&[3][..], 3), (&[2, 3][..], 2), (&[6][..], 3)] {
            assert_eq!(filt(orders, p).check_ideal_property(), None);
        }
        let a5 = AugFiltration::compute(Arc::new(FinGroup::a5()), Fp::new(2).unwrap(), PowerLimit::Stabilize);
        assert_eq!(a5.check_ideal_property(), None);
    }
}
