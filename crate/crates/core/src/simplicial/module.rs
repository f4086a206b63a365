use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{axpy, Matrix, Subspace};

use super::operators::{codegeneracy, coface, compose, epi_mono, surjections};
use super::target::Simplicial;

/// Highest level a module can materialize.
pub const MAX_LEVEL: usize = 32;

/// An element of level `q` of a simplicial module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModElem {
    pub q: usize,
    pub v: Vec<u32>,
}

#[derive(Debug)]
struct Layout {
    /// `(σ : [q] ->> [k], k, offset)`, identity first.
    blocks: Vec<(Vec<usize>, usize, usize)>,
    index: HashMap<Vec<usize>, usize>,
    dim: usize,
}

/// `Γ(C)`: the simplicial F_p-module with `Γ(C)_q = ⊕_{[q] ->> [k]} C_k`.
/// For `θ` with `σθ = δε` (epi-mono), the summand `(σ, c)` goes to
/// `(ε, c)` if `δ = id`, to `(ε, ∂c)` if `δ = δ^0`, and to 0 otherwise.
#[derive(Debug, Clone)]
pub struct SimplicialModule {
    complex: ChainComplex,
    layouts: Arc<Vec<OnceLock<Layout>>>,
}

impl SimplicialModule {
    pub fn dold_kan(complex: ChainComplex) -> Self {
        SimplicialModule {
            complex,
            layouts: Arc::new((0..=MAX_LEVEL).map(|_| OnceLock::new()).collect()),
        }
    }

    /// `K(Z/p, n)`: Γ of `F_p` concentrated in degree `n`.
    pub fn eilenberg_maclane(p: u32, n: usize) -> Result<Self> {
        let f = Fp::new(p)?;
        Ok(Self::dold_kan(ChainComplex::concentrated(f, n, 1)))
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn field(&self) -> Fp {
        self.complex.field()
    }

    fn layout(&self, q: usize) -> &Layout {
        assert!(q <= MAX_LEVEL, "level {q} beyond {MAX_LEVEL}");
        self.layouts[q].get_or_init(|| {
            let mut blocks = Vec::new();
            let mut index = HashMap::new();
            let mut at = 0;
            for sigma in surjections(q) {
                let k = sigma[q];
                let r = self.complex.rank(k);
                if r == 0 {
                    continue;
                }
                index.insert(sigma.clone(), blocks.len());
                blocks.push((sigma, k, at));
                at += r;
            }
            Layout { blocks, index, dim: at }
        })
    }

    /// Dimension of level `q` over F_p.
    pub fn level_dim(&self, q: usize) -> usize {
        self.layout(q).dim
    }

    /// Embeds `c ∈ C_q` as the identity summand of level `q`.
    pub fn from_chain(&self, q: usize, c: &[u32]) -> ModElem {
        let mut v = vec![0; self.level_dim(q)];
        if let Some(&b) = self.layout(q).index.get(&(0..=q).collect::<Vec<_>>()) {
            let off = self.layout(q).blocks[b].2;
            v[off..off + c.len()].copy_from_slice(c);
        }
        ModElem { q, v }
    }

    /// The identity-summand component of an element: its class in `C_q`.
    pub fn chain_component(&self, x: &ModElem) -> Vec<u32> {
        let r = self.complex.rank(x.q);
        x.v[..r].to_vec()
    }

    /// Matrix of `θ^* : Γ_q -> Γ_m` for `θ : [m] -> [q]`.
    pub fn operator_matrix(&self, theta: &[usize], q: usize) -> Matrix {
        let m = theta.len() - 1;
        let (src, dst) = (self.level_dim(q), self.level_dim(m));
        let f = self.field();
        let mut out = Matrix::zeros(f, dst, src);
        for c in 0..src {
            let mut e = vec![0; src];
            e[c] = 1 % f.p();
            let img = self.restrict(&ModElem { q, v: e }, theta);
            for (r, x) in img.v.into_iter().enumerate() {
                out.set(r, c, x);
            }
        }
        out
    }

    /// Checks the simplicial identities among faces and degeneracies on
    /// levels `0..=up_to`; returns a description of each failure.
    pub fn check_identities(&self, up_to: usize) -> Vec<String> {
        let mut bad = Vec::new();
        let face = |n: usize, i: usize| self.operator_matrix(&coface(n, i), n);
        let degen = |n: usize, j: usize| self.operator_matrix(&codegeneracy(n, j), n);
        for n in 1..=up_to {
            for j in 0..=n {
                for i in 0..j {
                    if n >= 2 && face(n - 1, i).mul(&face(n, j)).unwrap() != face(n - 1, j - 1).mul(&face(n, i)).unwrap() {
                        bad.push(format!("d_{i} d_{j} on level {n}"));
                    }
                }
            }
        }
        for n in 0..up_to {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let ds = face(n + 1, i).mul(&degen(n, j)).unwrap();
                    let expected = if i < j {
                        degen(n - 1, j - 1).mul(&face(n, i)).unwrap()
                    } else if i == j || i == j + 1 {
                        Matrix::identity(self.field(), self.level_dim(n))
                    } else {
                        degen(n - 1, j).mul(&face(n, i - 1)).unwrap()
                    };
                    if ds != expected {
                        bad.push(format!("d_{i} s_{j} on level {n}"));
                    }
                }
                for i in 0..=j {
                    if n + 1 <= up_to
                        && degen(n + 1, i).mul(&degen(n, j)).unwrap() != degen(n + 1, j + 1).mul(&degen(n, i)).unwrap()
                    {
                        bad.push(format!("s_{i} s_{j} on level {n}"));
                    }
                }
            }
        }
        bad
    }

    /// The normalized (Moore) complex `N_q = ⋂_{i>=1} ker d_i` with
    /// differential `d_0`, up to degree `up_to`, in a kernel basis.
    pub fn moore_complex(&self, up_to: usize) -> (ChainComplex, Vec<Subspace>) {
        let f = self.field();
        let spaces: Vec<Subspace> = (0..=up_to)
            .map(|q| {
                let mut rows = Vec::new();
                for i in 1..=q {
                    rows.extend(self.operator_matrix(&coface(q, i), q).to_rows());
                }
                if rows.is_empty() {
                    Subspace::full(f, self.level_dim(q))
                } else {
                    Matrix::from_rows(f, self.level_dim(q), &rows).unwrap().kernel()
                }
            })
            .collect();
        let ranks: Vec<usize> = spaces.iter().map(Subspace::rank).collect();
        let d = (1..=up_to)
            .map(|q| {
                let d0 = self.operator_matrix(&coface(q, 0), q);
                let target = Matrix::from_columns(f, self.level_dim(q - 1), spaces[q - 1].basis());
                let mut m = Matrix::zeros(f, ranks[q - 1], ranks[q]);
                for (c, b) in spaces[q].basis().iter().enumerate() {
                    let img = d0.mul_vec(b);
                    let coords = target.solve(&img).expect("d_0 preserves the normalized part");
                    for (r, x) in coords.into_iter().enumerate() {
                        m.set(r, c, x);
                    }
                }
                m
            })
            .collect();
        (ChainComplex::new(f, ranks, d).expect("Moore complex"), spaces)
    }

    /// Checks `N(Γ(C)) = C` through degree `up_to`: the identity summands
    /// span the normalized part and `d_0` restricts to `∂`.
    pub fn round_trip(&self, up_to: usize) -> Result<()> {
        let (_, spaces) = self.moore_complex(up_to);
        let f = self.field();
        for q in 0..=up_to {
            let r = self.complex.rank(q);
            if spaces[q].rank() != r {
                return Err(Error::structural(format!(
                    "normalized part of level {q} has dimension {}, expected {r}",
                    spaces[q].rank()
                )));
            }
            for i in 0..r {
                let mut c = vec![0; r];
                c[i] = 1 % f.p();
                let x = self.from_chain(q, &c);
                if !spaces[q].contains(&x.v) {
                    return Err(Error::structural(format!("identity summand of level {q} is not normalized")));
                }
                if q >= 1 {
                    let d0 = self.face(&x, 0);
                    let dc = self.complex.differential(q).mul_vec(&c);
                    if d0 != self.from_chain(q - 1, &dc) {
                        return Err(Error::structural(format!("d_0 differs from the differential in degree {q}")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Simplicial for SimplicialModule {
    type Elem = ModElem;

    fn dim_of(&self, x: &ModElem) -> usize {
        x.q
    }

    fn restrict(&self, x: &ModElem, theta: &[usize]) -> ModElem {
        let m = theta.len() - 1;
        let f = self.field();
        let src = self.layout(x.q);
        let dst = self.layout(m);
        let mut out = vec![0; dst.dim];
        for (sigma, k, off) in &src.blocks {
            let r = self.complex.rank(*k);
            let c = &x.v[*off..off + r];
            if c.iter().all(|&a| a == 0) {
                continue;
            }
            let (eps, delta) = epi_mono(&compose(sigma, theta));
            let j = eps[m];
            let image: Vec<u32> = if j == *k {
                c.to_vec()
            } else if j + 1 == *k && delta[0] == 1 {
                self.complex.differential(*k).mul_vec(c)
            } else {
                continue;
            };
            if let Some(&b) = dst.index.get(&eps) {
                let o = dst.blocks[b].2;
                axpy(f, &mut out[o..o + image.len()], 1 % f.p(), &image);
            }
        }
        ModElem { q: m, v: out }
    }

    fn base_simplex(&self, q: usize) -> ModElem {
        ModElem {
            q,
            v: vec![0; self.level_dim(q)],
        }
    }

    fn elements(&self, q: usize, cap: usize) -> Result<Vec<ModElem>> {
        let dim = self.level_dim(q) as u32;
        let p = self.field().p() as u64;
        let count = p
            .checked_pow(dim)
            .filter(|&c| c <= cap as u64)
            .ok_or_else(|| Error::cap(format!("level {q} has more than {cap} elements")))?;
        Ok((0..count)
            .map(|mut i| {
                let mut v = vec![0; dim as usize];
                for x in v.iter_mut().rev() {
                    *x = (i % p) as u32;
                    i /= p;
                }
                ModElem { q, v }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::random_complex;
    use rand::SeedableRng;

    #[test]
    fn em_level_dims() {
        let m = SimplicialModule::eilenberg_maclane(2, 1).unwrap();
        let dims: Vec<usize> = (0..6).map(|q| m.level_dim(q)).collect();
        assert_eq!(dims, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(m.elements(3, 100).unwrap().len(), 8);
        let m = SimplicialModule::eilenberg_maclane(3, 2).unwrap();
        assert_eq!(m.level_dim(1), 0);
        assert_eq!(m.elements(1, 10).unwrap().len(), 1);
        assert_eq!(m.level_dim(3), 3);
    }

    #[test]
    fn em_round_trip() {
        let m = SimplicialModule::eilenberg_maclane(3, 2).unwrap();
        m.round_trip(3).unwrap();
        let (n, _) = m.moore_complex(3);
        assert_eq!(n.ranks(), &[0, 0, 1, 0]);
        assert!(m.check_identities(4).is_empty());
    }

    #[test]
    fn random_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [2, 3] {
            let f = Fp::new(p).unwrap();
            for _ in 0..4 {
                let c = random_complex(&mut rng, f, 2, 2);
                let m = SimplicialModule::dold_kan(c);
                m.round_trip(3).unwrap();
                assert_eq!(m.check_identities(3), Vec::<String>::new());
            }
        }
    }

    #[test]
    fn level_one_of_em21_has_closed_loops() {
        let m = SimplicialModule::eilenberg_maclane(2, 1).unwrap();
        for x in m.elements(1, 10).unwrap() {
            assert_eq!(m.face(&x, 0), m.base_simplex(0));
            assert_eq!(m.face(&x, 1), m.base_simplex(0));
        }
    }
}
