//! Bounded chain complexes of finite-dimensional F_p-vector spaces in
//! non-negative degrees, chain maps between them, and truncated Hom
//! complexes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{Matrix, Subspace};

/// `C_0 <- C_1 <- ... <- C_top`. `d[q]` is the differential `C_q -> C_{q-1}`
/// as a `rank(q-1) x rank(q)` matrix; `d[0]` has no rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    field: Fp,
    ranks: Vec<usize>,
    d: Vec<Matrix>,
}

impl ChainComplex {
    pub fn new(field: Fp, ranks: Vec<usize>, mut boundaries: Vec<Matrix>) -> Result<Self> {
        // boundaries[k] is d_{k+1}
        if boundaries.len() + 1 != ranks.len().max(1) {
            return Err(Error::structural(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        let ranks = if ranks.is_empty() { vec![0] } else { ranks };
        let mut d = vec![Matrix::zeros(field, 0, ranks[0])];
        for (k, m) in boundaries.drain(..).enumerate() {
            let q = k + 1;
            if m.shape() != (ranks[q - 1], ranks[q]) {
                return Err(Error::structural(format!(
                    "d_{q} has shape {:?}, expected {:?}",
                    m.shape(),
                    (ranks[q - 1], ranks[q])
                )));
            }
            d.push(m);
        }
        let c = ChainComplex { field, ranks, d };
        for q in 2..=c.top() {
            if !c.d[q - 1].mul(&c.d[q])?.is_zero() {
                return Err(Error::validation(format!("d_{} d_{q} != 0", q - 1)));
            }
        }
        Ok(c)
    }

    pub fn zero(field: Fp) -> Self {
        ChainComplex {
            field,
            ranks: vec![0],
            d: vec![Matrix::zeros(field, 0, 0)],
        }
    }

    /// `F_p^rank` in a single degree.
    pub fn concentrated(field: Fp, degree: usize, rank: usize) -> Self {
        let mut ranks = vec![0; degree + 1];
        ranks[degree] = rank;
        Self::from_ranks_zero_d(field, ranks)
    }

    fn from_ranks_zero_d(field: Fp, ranks: Vec<usize>) -> Self {
        let d = (0..ranks.len())
            .map(|q| {
                if q == 0 {
                    Matrix::zeros(field, 0, ranks[0])
                } else {
                    Matrix::zeros(field, ranks[q - 1], ranks[q])
                }
            })
            .collect();
        ChainComplex { field, ranks, d }
    }

    /// The cone of the identity on `F_p` placed in `degree`: `F_p` in
    /// degrees `degree` and `degree + 1` joined by the identity.
    pub fn cone_of_point(field: Fp, degree: usize) -> Self {
        let mut ranks = vec![0; degree + 2];
        ranks[degree] = 1;
        ranks[degree + 1] = 1;
        let mut c = Self::from_ranks_zero_d(field, ranks);
        c.d[degree + 1] = Matrix::identity(field, 1);
        c
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, q: usize) -> usize {
        self.ranks.get(q).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// `d_q : C_q -> C_{q-1}` (the zero map outside the stored range).
    pub fn differential(&self, q: usize) -> Matrix {
        if q >= 1 && q <= self.top() {
            self.d[q].clone()
        } else {
            Matrix::zeros(self.field, if q == 0 { 0 } else { self.rank(q - 1) }, self.rank(q))
        }
    }

    /// Whether every composite `d_{q-1} d_q` vanishes.
    pub fn is_complex(&self) -> bool {
        (2..=self.top()).all(|q| self.d[q - 1].mul(&self.d[q]).map(|m| m.is_zero()).unwrap_or(false))
    }

    pub fn cycles(&self, q: usize) -> Subspace {
        self.differential(q).kernel()
    }

    pub fn boundaries(&self, q: usize) -> Subspace {
        self.differential(q + 1).column_space()
    }

    pub fn betti(&self, q: usize) -> usize {
        self.rank(q) - self.differential(q).rank() - self.differential(q + 1).rank()
    }

    /// First degree with nonzero homology, if any.
    pub fn first_homology(&self) -> Option<usize> {
        (0..=self.top()).find(|&q| self.betti(q) != 0)
    }

    pub fn is_acyclic(&self) -> bool {
        self.first_homology().is_none()
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.top().max(other.top());
        let ranks: Vec<usize> = (0..=top).map(|q| self.rank(q) + other.rank(q)).collect();
        let mut c = Self::from_ranks_zero_d(self.field, ranks);
        for q in 1..=top {
            let (a, b) = (self.differential(q), other.differential(q));
            let mut m = Matrix::zeros(self.field, c.rank(q - 1), c.rank(q));
            m.put_block(0, 0, &a);
            m.put_block(a.rows(), a.cols(), &b);
            c.d[q] = m;
        }
        c
    }

    /// Pads the complex with zero modules up to degree `top`.
    pub fn extended_to(&self, top: usize) -> ChainComplex {
        if top <= self.top() {
            return self.clone();
        }
        let mut ranks = self.ranks.clone();
        ranks.resize(top + 1, 0);
        let mut c = Self::from_ranks_zero_d(self.field, ranks);
        for q in 1..=self.top() {
            c.d[q] = self.d[q].clone();
        }
        c
    }
}

/// A degree-preserving linear map between chain complexes, one matrix per
/// degree (`target.rank(q) x source.rank(q)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexMap {
    source: ChainComplex,
    target: ChainComplex,
    maps: Vec<Matrix>,
}

impl ComplexMap {
    /// Builds a map and checks that it commutes with the differentials.
    pub fn new(source: ChainComplex, target: ChainComplex, maps: Vec<Matrix>) -> Result<Self> {
        let m = Self::unchecked(source, target, maps)?;
        if let Some(q) = m.first_noncommuting_degree() {
            return Err(Error::validation(format!(
                "map does not commute with differentials in degree {q}"
            )));
        }
        Ok(m)
    }

    /// Builds a degreewise map without the chain-map check.
    pub fn unchecked(source: ChainComplex, target: ChainComplex, mut maps: Vec<Matrix>) -> Result<Self> {
        let top = source.top().max(target.top());
        let f = source.field();
        maps.resize_with(top + 1, || Matrix::zeros(f, 0, 0));
        for (q, m) in maps.iter_mut().enumerate() {
            let shape = (target.rank(q), source.rank(q));
            if m.shape() == (0, 0) && shape != (0, 0) {
                *m = Matrix::zeros(f, shape.0, shape.1);
            }
            if m.shape() != shape {
                return Err(Error::structural(format!(
                    "component in degree {q} has shape {:?}, expected {shape:?}",
                    m.shape()
                )));
            }
        }
        Ok(ComplexMap { source, target, maps })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let maps = (0..=c.top()).map(|q| Matrix::identity(c.field(), c.rank(q))).collect();
        ComplexMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        Self::unchecked(source.clone(), target.clone(), Vec::new()).expect("zero map has valid shapes")
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn top(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn component(&self, q: usize) -> Matrix {
        self.maps
            .get(q)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.source.field(), self.target.rank(q), self.source.rank(q)))
    }

    pub fn first_noncommuting_degree(&self) -> Option<usize> {
        (1..=self.top()).find(|&q| {
            let lhs = self.target.differential(q).mul(&self.component(q)).unwrap();
            let rhs = self.component(q - 1).mul(&self.source.differential(q)).unwrap();
            lhs != rhs
        })
    }

    pub fn is_chain_map(&self) -> bool {
        self.first_noncommuting_degree().is_none()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ComplexMap) -> Result<ComplexMap> {
        if other.target.ranks() != self.source.ranks() && !same_ranks(&other.target, &self.source) {
            return Err(Error::structural("composable maps must share the middle complex"));
        }
        let top = self.top().max(other.top());
        let maps = (0..=top)
            .map(|q| self.component(q).mul(&other.component(q)))
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(other.source.clone(), self.target.clone(), maps)
    }

    pub fn add(&self, other: &ComplexMap) -> Result<ComplexMap> {
        self.zip(other, Matrix::add)
    }

    pub fn sub(&self, other: &ComplexMap) -> Result<ComplexMap> {
        self.zip(other, Matrix::sub)
    }

    pub fn neg(&self) -> ComplexMap {
        ComplexMap {
            maps: self.maps.iter().map(Matrix::neg).collect(),
            ..self.clone()
        }
    }

    fn zip(&self, other: &ComplexMap, op: impl Fn(&Matrix, &Matrix) -> Result<Matrix>) -> Result<ComplexMap> {
        if !same_ranks(&self.source, &other.source) || !same_ranks(&self.target, &other.target) {
            return Err(Error::structural("maps have different sources or targets"));
        }
        let top = self.top().max(other.top());
        let maps = (0..=top)
            .map(|q| op(&self.component(q), &other.component(q)))
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(self.source.clone(), self.target.clone(), maps)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(Matrix::is_zero)
    }

    /// Equality of the underlying degreewise maps, ignoring how far each
    /// side is padded with zero components.
    pub fn agrees_with(&self, other: &ComplexMap) -> bool {
        same_ranks(&self.source, &other.source)
            && same_ranks(&self.target, &other.target)
            && (0..=self.top().max(other.top())).all(|q| self.component(q) == other.component(q))
    }

    /// Degrees (within the source's range) where the map fails to be onto.
    pub fn first_non_surjective_degree(&self, from: usize) -> Option<usize> {
        (from..=self.target.top()).find(|&q| self.component(q).rank() != self.target.rank(q))
    }

    pub fn first_non_injective_degree(&self) -> Option<usize> {
        (0..=self.source.top()).find(|&q| self.component(q).rank() != self.source.rank(q))
    }

    /// Kernel complex, with the inclusion as a list of basis matrices
    /// (columns are kernel basis vectors in source coordinates).
    pub fn kernel_complex(&self) -> (ChainComplex, Vec<Matrix>) {
        let f = self.source.field();
        let top = self.source.top();
        let bases: Vec<Matrix> = (0..=top)
            .map(|q| {
                let k = self.component(q).kernel();
                Matrix::from_columns(f, self.source.rank(q), k.basis())
            })
            .collect();
        let ranks: Vec<usize> = bases.iter().map(Matrix::cols).collect();
        let mut d = Vec::new();
        for q in 1..=top {
            // d restricted to the kernel, expressed in kernel coordinates
            let image = self.source.differential(q).mul(&bases[q]).unwrap();
            let mut m = Matrix::zeros(f, ranks[q - 1], ranks[q]);
            for c in 0..ranks[q] {
                let coords = bases[q - 1]
                    .solve(&image.column(c))
                    .expect("differential preserves the kernel of a chain map");
                for (r, x) in coords.into_iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            d.push(m);
        }
        let k = ChainComplex::new(f, ranks, d).expect("kernel of a chain map is a complex");
        (k, bases)
    }

    /// Stable hex digest of the matrices, used to fingerprint results.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for (q, m) in self.maps.iter().enumerate() {
            h.update((q as u64).to_le_bytes());
            h.update((m.rows() as u64).to_le_bytes());
            h.update((m.cols() as u64).to_le_bytes());
            for r in 0..m.rows() {
                for &x in m.row(r) {
                    h.update(x.to_le_bytes());
                }
            }
        }
        hex::encode(&h.finalize()[..8])
    }
}

fn same_ranks(a: &ChainComplex, b: &ChainComplex) -> bool {
    let top = a.top().max(b.top());
    (0..=top).all(|q| a.rank(q) == b.rank(q))
}

/// `Hom(A, B)` truncated to non-negative degrees: degree `n >= 1` is the
/// full `∏_q Hom(A_q, B_{q+n})`, degree 0 is the space of chain maps.
/// Differential `D φ = ∂_B φ - (-1)^n φ ∂_A`.
#[derive(Debug, Clone)]
pub struct HomComplex {
    source: ChainComplex,
    target: ChainComplex,
    complex: ChainComplex,
    /// Basis of chain maps in flattened degree-0 coordinates.
    cycle_basis: Vec<Vec<u32>>,
}

impl HomComplex {
    pub fn new(source: &ChainComplex, target: &ChainComplex) -> Self {
        let f = source.field();
        let top = target.top();
        let z0 = hom_differential(source, target, 0).kernel();
        let cycle_basis = z0.basis().to_vec();
        let mut ranks = vec![cycle_basis.len()];
        for n in 1..=top {
            ranks.push(hom_dim(source, target, n as isize));
        }
        let mut d = Vec::new();
        let zmat = Matrix::from_columns(f, hom_dim(source, target, 0), &cycle_basis);
        for n in 1..=top {
            let dn = hom_differential(source, target, n as isize);
            if n == 1 {
                let mut m = Matrix::zeros(f, ranks[0], ranks[1]);
                for c in 0..ranks[1] {
                    let coords = zmat.solve(&dn.column(c)).expect("boundaries are cycles");
                    for (r, x) in coords.into_iter().enumerate() {
                        m.set(r, c, x);
                    }
                }
                d.push(m);
            } else {
                d.push(dn);
            }
        }
        let complex = ChainComplex::new(f, ranks, d).expect("Hom differential squares to zero");
        HomComplex {
            source: source.clone(),
            target: target.clone(),
            complex,
            cycle_basis,
        }
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn cycle_basis(&self) -> &[Vec<u32>] {
        &self.cycle_basis
    }

    /// Chain maps `A -> B` as a subspace of flattened degree-0 coordinates.
    pub fn zero_cycles(&self) -> Subspace {
        Subspace::span(
            self.source.field(),
            hom_dim(&self.source, &self.target, 0),
            self.cycle_basis.iter().cloned(),
        )
        .unwrap()
    }

    /// Null-homotopic chain maps, in flattened degree-0 coordinates.
    pub fn zero_boundaries(&self) -> Subspace {
        hom_differential(&self.source, &self.target, 1).column_space()
    }

    /// Coordinates of a chain map (flattened) in the cycle basis.
    pub fn cycle_coordinates(&self, flat: &[u32]) -> Option<Vec<u32>> {
        let f = self.source.field();
        let zmat = Matrix::from_columns(f, flat.len(), &self.cycle_basis);
        zmat.solve(flat)
    }

    /// Map induced on truncated Hom complexes by `φ ↦ post ∘ φ ∘ pre`.
    pub fn induced(
        from: &HomComplex,
        to: &HomComplex,
        pre: Option<&ComplexMap>,
        post: Option<&ComplexMap>,
    ) -> Result<ComplexMap> {
        let f = from.source.field();
        let top = from.complex.top().max(to.complex.top());
        let mut maps = Vec::new();
        for n in 0..=top {
            let src_dim = hom_dim(&from.source, &from.target, n as isize);
            let dst_dim = hom_dim(&to.source, &to.target, n as isize);
            let columns: Vec<Vec<u32>> = if n == 0 {
                from.cycle_basis.clone()
            } else if n <= from.complex.top() {
                (0..src_dim)
                    .map(|i| {
                        let mut v = vec![0; src_dim];
                        v[i] = 1;
                        v
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let rows = to.complex.rank(n);
            let mut m = Matrix::zeros(f, rows, columns.len());
            for (c, col) in columns.iter().enumerate() {
                let blocks = unflatten(&from.source, &from.target, n, col);
                let mut out = Vec::new();
                for q in 0..=to.source.top() {
                    // (post ∘ φ ∘ pre)_q = post_{q+n} φ_{q'} pre_q
                    let mut block = match pre {
                        Some(pre) => {
                            let phi = blocks_at(&blocks, &from.source, &from.target, q, n, f);
                            phi.mul(&pre.component(q))?
                        }
                        None => blocks_at(&blocks, &from.source, &from.target, q, n, f),
                    };
                    if let Some(post) = post {
                        block = post.component(q + n).mul(&block)?;
                    }
                    out.push(block);
                }
                let flat = flatten(&out);
                debug_assert_eq!(flat.len(), dst_dim);
                let coords = if n == 0 {
                    to.cycle_coordinates(&flat)
                        .ok_or_else(|| Error::structural("induced map does not preserve chain maps"))?
                } else {
                    flat
                };
                for (r, x) in coords.into_iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            maps.push(m);
        }
        ComplexMap::new(from.complex.clone(), to.complex.clone(), maps)
    }
}

/// Dimension of `∏_q Hom(A_q, B_{q+n})`.
pub fn hom_dim(a: &ChainComplex, b: &ChainComplex, n: isize) -> usize {
    (0..=a.top())
        .filter_map(|q| {
            let t = q as isize + n;
            (t >= 0).then(|| a.rank(q) * b.rank(t as usize))
        })
        .sum()
}

fn blocks_at(blocks: &[Matrix], a: &ChainComplex, b: &ChainComplex, q: usize, n: usize, f: Fp) -> Matrix {
    blocks
        .get(q)
        .cloned()
        .unwrap_or_else(|| Matrix::zeros(f, b.rank(q + n), a.rank(q)))
}

/// Splits flattened degree-`n` coordinates into one block per source degree.
pub fn unflatten(a: &ChainComplex, b: &ChainComplex, n: usize, flat: &[u32]) -> Vec<Matrix> {
    let f = a.field();
    let mut at = 0;
    (0..=a.top())
        .map(|q| {
            let (rows, cols) = (b.rank(q + n), a.rank(q));
            let mut m = Matrix::zeros(f, rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, flat[at]);
                    at += 1;
                }
            }
            m
        })
        .collect()
}

pub fn flatten(blocks: &[Matrix]) -> Vec<u32> {
    blocks.iter().flat_map(|m| m.to_rows().into_iter().flatten()).collect()
}

/// Matrix of `D : Hom_n -> Hom_{n-1}` in flattened coordinates.
pub fn hom_differential(a: &ChainComplex, b: &ChainComplex, n: isize) -> Matrix {
    let f = a.field();
    let src = hom_dim(a, b, n);
    let dst = hom_dim(a, b, n - 1);
    let offsets = |deg: isize| -> Vec<Option<usize>> {
        let mut at = 0;
        (0..=a.top())
            .map(|q| {
                let t = q as isize + deg;
                if t < 0 {
                    None
                } else {
                    let o = at;
                    at += a.rank(q) * b.rank(t as usize);
                    Some(o)
                }
            })
            .collect()
    };
    let src_off = offsets(n);
    let dst_off = offsets(n - 1);
    let sign = f.sign(n.rem_euclid(2) == 1);
    let mut m = Matrix::zeros(f, dst, src);
    for q in 0..=a.top() {
        let Some(so) = src_off[q] else { continue };
        let t = (q as isize + n) as usize;
        let cols_q = a.rank(q);
        let rows_t = b.rank(t);
        // φ_q : A_q -> B_t contributes ∂_B φ_q to block q of degree n-1
        // and -(-1)^n φ_q ∂_A to block q+1.
        for r in 0..rows_t {
            for c in 0..cols_q {
                let var = so + r * cols_q + c;
                if t >= 1 {
                    if let Some(dofs) = dst_off[q] {
                        let db = b.differential(t);
                        for r2 in 0..db.rows() {
                            let x = db.get(r2, r);
                            if x != 0 {
                                m.add_at(dofs + r2 * cols_q + c, var, x);
                            }
                        }
                    }
                }
                if q < a.top() {
                    if let Some(dofs) = dst_off[q + 1] {
                        let da = a.differential(q + 1);
                        let cols_next = a.rank(q + 1);
                        for c2 in 0..cols_next {
                            let x = da.get(c, c2);
                            if x != 0 {
                                m.add_at(dofs + r * cols_next + c2, var, f.neg(f.mul(sign, x)));
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

/// Random complex in degrees `0..=top` with ranks `<= max_rank`.
pub fn random_complex(rng: &mut impl Rng, field: Fp, top: usize, max_rank: usize) -> ChainComplex {
    let ranks: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=max_rank)).collect();
    let p = field.p();
    let mut d: Vec<Matrix> = Vec::new();
    for q in 1..=top {
        let m = if q == 1 {
            random_matrix(rng, field, ranks[0], ranks[1])
        } else {
            // columns drawn from ker d_{q-1}
            let k = d[q - 2].kernel();
            let mut m = Matrix::zeros(field, ranks[q - 1], ranks[q]);
            for c in 0..ranks[q] {
                let mut col = vec![0; ranks[q - 1]];
                for b in k.basis() {
                    crate::linalg::axpy(field, &mut col, rng.gen_range(0..p), b);
                }
                for (r, x) in col.into_iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            m
        };
        d.push(m);
    }
    ChainComplex::new(field, ranks, d).expect("random differentials square to zero")
}

pub fn random_matrix(rng: &mut impl Rng, field: Fp, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.gen_range(0..field.p()));
        }
    }
    m
}

/// Uniformly random element of a subspace, from its basis.
pub fn random_element(rng: &mut impl Rng, space: &Subspace) -> Vec<u32> {
    let f = space.field();
    let mut v = vec![0; space.ambient_dim()];
    for b in space.basis() {
        crate::linalg::axpy(f, &mut v, rng.gen_range(0..f.p()), b);
    }
    v
}

/// Random chain map `a -> b`.
pub fn random_chain_map(rng: &mut impl Rng, a: &ChainComplex, b: &ChainComplex) -> ComplexMap {
    let z = hom_differential(a, b, 0).kernel();
    let flat = random_element(rng, &z);
    let blocks = unflatten(a, b, 0, &flat);
    ComplexMap::new(a.clone(), b.clone(), blocks).expect("cycles of Hom are chain maps")
}
