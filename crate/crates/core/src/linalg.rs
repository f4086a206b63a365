//! Exact linear algebra over prime fields.
//!
//! Vectors live in `F_p^n` with a fixed ordered basis `0..n`; callers that
//! carry labelled bases (group elements, simplices, function-complex
//! vertices) keep their own canonical label order and index into it.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Fp;

/// A vector stored as its sorted nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, u32)>,
}

impl SparseVector {
    pub fn zero(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from `(index, value)` pairs, summing repeats and
    /// dropping zeros.
    pub fn from_entries(
        field: Fp,
        dim: usize,
        entries: impl IntoIterator<Item = (usize, u32)>,
    ) -> Result<Self> {
        let mut dense = vec![0u32; dim];
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::structural(format!(
                    "index {i} outside ambient basis of size {dim}"
                )));
            }
            dense[i] = field.add(dense[i], v % field.p());
        }
        Ok(Self::from_dense(&dense))
    }

    pub fn from_dense(v: &[u32]) -> Self {
        SparseVector {
            dim: v.len(),
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i, x))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let mut v = vec![0; self.dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries
            .binary_search_by_key(&i, |&(j, _)| j)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().copied()
    }
}

pub fn dot(field: Fp, a: &[u32], b: &[u32]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    let p = field.p() as u64;
    let mut acc = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        acc = (acc + x as u64 * y as u64) % p;
    }
    acc as u32
}

/// `a += c * b`
pub fn axpy(field: Fp, a: &mut [u32], c: u32, b: &[u32]) {
    if c == 0 {
        return;
    }
    for (x, &y) in a.iter_mut().zip(b) {
        if y != 0 {
            *x = field.add(*x, field.mul(c, y));
        }
    }
}

pub fn scale(field: Fp, a: &mut [u32], c: u32) {
    for x in a.iter_mut() {
        *x = field.mul(*x, c);
    }
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::structural(format!(
                    "row {r} has length {}, expected {cols}",
                    row.len()
                )));
            }
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, x % field.p());
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &x) in col.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: u32) {
        let x = self.get(r, c);
        self.set(r, c, self.field.add(x, v));
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::structural(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    axpy(self.field, out_row, a, other.row(k));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| dot(self.field, self.row(r), v))
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(Fp, u32, u32) -> u32) -> Result<Matrix> {
        if self.shape() != other.shape() || self.field != other.field {
            return Err(Error::structural(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = self.field;
        Ok(Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(f, a, b))
                .collect(),
        })
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: u32) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.get(r0 + r, c0 + c));
            }
        }
        m
    }

    pub fn row_space(&self) -> Subspace {
        let mut s = Subspace::zero(self.field, self.cols);
        for r in 0..self.rows {
            s.insert(self.row(r).to_vec());
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    /// `{ v : M v = 0 }`.
    pub fn kernel(&self) -> Subspace {
        self.row_space().annihilator()
    }

    pub fn column_space(&self) -> Subspace {
        self.transpose().row_space()
    }

    /// Some `x` with `M x = b`, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let w = self.cols + 1;
        let mut aug: Vec<Vec<u32>> = (0..self.rows)
            .map(|r| {
                let mut row = Vec::with_capacity(w);
                row.extend_from_slice(self.row(r));
                row.push(b[r]);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            let Some(pr) = (lead..aug.len()).find(|&r| aug[r][col] != 0) else {
                continue;
            };
            aug.swap(lead, pr);
            let inv = f.inv(aug[lead][col]);
            scale(f, &mut aug[lead], inv);
            let pivot_row = aug[lead].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != lead && row[col] != 0 {
                    let c = f.neg(row[col]);
                    axpy(f, row, c, &pivot_row);
                }
            }
            pivots.push(col);
            lead += 1;
        }
        if aug[lead..].iter().any(|row| row[self.cols] != 0) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug[i][self.cols];
        }
        Some(x)
    }
}

/// A subspace of `F_p^dim`, held as a reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Fp,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(rank {} in {}^{}: {:?})",
            self.rank(),
            self.field,
            self.dim,
            self.rows
        )
    }
}

/// Outcome of a containment test `A ⊆ B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Containment {
    Contained,
    /// A vector of `A` that is not in `B`.
    Witness(Vec<u32>),
}

impl Containment {
    pub fn holds(&self) -> bool {
        matches!(self, Containment::Contained)
    }
}

impl Subspace {
    pub fn zero(field: Fp, dim: usize) -> Self {
        Subspace {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Fp, dim: usize) -> Self {
        let mut s = Self::zero(field, dim);
        for i in 0..dim {
            let mut v = vec![0; dim];
            v[i] = 1;
            s.insert(v);
        }
        s
    }

    /// Row space of dense rows, all of length `dim`.
    pub fn span(field: Fp, dim: usize, rows: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut s = Self::zero(field, dim);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::structural(format!(
                    "row {k} has length {}, ambient dimension is {dim}",
                    row.len()
                )));
            }
            s.insert(row);
        }
        Ok(s)
    }

    /// Row-reduces sparse rows sharing one ambient basis.
    pub fn rref(field: Fp, dim: usize, rows: &[SparseVector]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::structural(format!(
                "row over basis of size {} mixed with ambient size {dim}",
                bad.dim()
            )));
        }
        Self::span(field, dim, rows.iter().map(SparseVector::to_dense))
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` modulo the subspace (zero iff `v` is a member).
    pub fn reduce(&self, v: &mut [u32]) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let x = v[c];
            if x != 0 {
                axpy(self.field, v, self.field.neg(x), row);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.dim, "ambient mismatch in membership test");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        is_zero(&w)
    }

    /// Adds `v` to the span, keeping the basis fully reduced. Returns whether
    /// the rank grew.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        if self.is_full() {
            return false;
        }
        self.reduce(&mut v);
        let Some(lead) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(v[lead]);
        scale(f, &mut v, inv);
        for row in self.rows.iter_mut() {
            let x = row[lead];
            if x != 0 {
                axpy(f, row, f.neg(x), &v);
            }
        }
        let at = self.pivots.partition_point(|&c| c < lead);
        self.pivots.insert(at, lead);
        self.rows.insert(at, v);
        true
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.dim != other.dim || self.field != other.field {
            return Err(Error::structural(format!(
                "ambient mismatch: {}^{} vs {}^{}",
                self.field, self.dim, other.field, other.dim
            )));
        }
        Ok(())
    }

    /// Tests `self ⊆ other`, returning a witness basis vector on failure.
    pub fn leq(&self, other: &Subspace) -> Result<Containment> {
        self.check_ambient(other)?;
        for row in &self.rows {
            if !other.contains(row) {
                return Ok(Containment::Witness(row.clone()));
            }
        }
        Ok(Containment::Contained)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for row in &other.rows {
            s.insert(row.clone());
        }
        Ok(s)
    }

    /// `{ v : <v, w> = 0 for all w in self }`.
    pub fn annihilator(&self) -> Subspace {
        let f = self.field;
        let mut out = Subspace::zero(f, self.dim);
        let mut is_pivot = vec![false; self.dim];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        for free in (0..self.dim).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.dim];
            v[free] = 1;
            for (row, &c) in self.rows.iter().zip(&self.pivots) {
                v[c] = f.neg(row[free]);
            }
            out.insert(v);
        }
        out
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        // (A ∩ B) = (A^⊥ + B^⊥)^⊥
        Ok(self
            .annihilator()
            .sum(&other.annihilator())?
            .annihilator())
    }

    /// Image of the subspace under a linear map given as a matrix acting on
    /// column vectors.
    pub fn image(&self, map: &Matrix) -> Result<Subspace> {
        if map.cols() != self.dim {
            return Err(Error::structural("map domain does not match ambient"));
        }
        Subspace::span(self.field, map.rows(), self.rows.iter().map(|r| map.mul_vec(r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    /// All vectors of F_p^n.
    fn all_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..p).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn rref_examples() {
        let s = Subspace::rref(f(2), 3, &[]).unwrap();
        assert_eq!(s.rank(), 0);
        let id: Vec<_> = (0..3)
            .map(|i| {
                let mut v = vec![0; 3];
                v[i] = 1;
                SparseVector::from_dense(&v)
            })
            .collect();
        assert_eq!(Subspace::rref(f(2), 3, &id).unwrap().rank(), 3);

        let rows = [vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        let sparse: Vec<_> = rows.iter().map(|r| SparseVector::from_dense(r)).collect();
        let s = Subspace::rref(f(2), 3, &sparse).unwrap();
        // Oracle: enumerate the span by brute force.
        let mut spanned = std::collections::BTreeSet::new();
        for coeffs in all_vectors(2, 3) {
            let mut v = vec![0; 3];
            for (c, r) in coeffs.iter().zip(&rows) {
                axpy(f(2), &mut v, *c, r);
            }
            spanned.insert(v);
        }
        assert_eq!(spanned.len(), 4);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rref_rejects_mixed_ambients() {
        let a = SparseVector::zero(3);
        let b = SparseVector::zero(4);
        assert!(matches!(
            Subspace::rref(f(2), 3, &[a, b]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn kernel_examples() {
        let z = Matrix::zeros(f(3), 2, 4);
        assert_eq!(z.kernel().rank(), 4);
        assert_eq!(Matrix::identity(f(5), 3).kernel().rank(), 0);
        let m = Matrix::from_rows(f(2), 2, &[vec![1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.rank(), 1);
        assert!(k.contains(&[1, 1]));
        assert!(!k.contains(&[1, 0]));
    }

    #[test]
    fn leq_examples() {
        let zero = Subspace::zero(f(2), 2);
        let a = Subspace::span(f(2), 2, [vec![1, 0]]).unwrap();
        let b = Subspace::span(f(2), 2, [vec![0, 1]]).unwrap();
        assert!(zero.leq(&b).unwrap().holds());
        assert!(a.leq(&a).unwrap().holds());
        assert_eq!(a.leq(&b).unwrap(), Containment::Witness(vec![1, 0]));
        let c = Subspace::zero(f(2), 3);
        assert!(a.leq(&c).is_err());
    }

    #[test]
    fn solve_and_intersection() {
        let m = Matrix::from_rows(f(3), 3, &[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let x = m.solve(&[2, 1]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![2, 1]);
        let singular = Matrix::from_rows(f(3), 2, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(singular.solve(&[1, 0]).is_none());

        let a = Subspace::span(f(2), 3, [vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let b = Subspace::span(f(2), 3, [vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.basis(), &[vec![0, 1, 0]]);
    }

    #[test]
    fn kernel_exhaustive_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [2u32, 3] {
            for n in 1..=5usize {
                for _ in 0..6 {
                    let rows = rng.gen_range(0..=n + 1);
                    let data: Vec<Vec<u32>> = (0..rows)
                        .map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect())
                        .collect();
                    let m = Matrix::from_rows(f(p), n, &data).unwrap();
                    let k = m.kernel();
                    for v in all_vectors(p, n) {
                        let in_kernel = is_zero(&m.mul_vec(&v));
                        assert_eq!(in_kernel, k.contains(&v), "p={p} m={m:?} v={v:?}");
                    }
                    assert_eq!(k.rank() + m.rank(), n);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_with(p: u32, c: usize) -> impl Strategy<Value = Matrix> {
            (0usize..6).prop_flat_map(move |r| {
                proptest::collection::vec(proptest::collection::vec(0..p, c), r)
                    .prop_map(move |rows| Matrix::from_rows(Fp::new(p).unwrap(), c, &rows).unwrap())
            })
        }

        fn matrix(p: u32) -> impl Strategy<Value = Matrix> {
            (1usize..7).prop_flat_map(move |c| matrix_with(p, c))
        }

        fn triple(p: u32) -> impl Strategy<Value = (Matrix, Matrix, Matrix)> {
            (1usize..6).prop_flat_map(move |c| (matrix_with(p, c), matrix_with(p, c), matrix_with(p, c)))
        }

        proptest! {
            #[test]
            fn rank_nullity(m in matrix(3)) {
                prop_assert_eq!(m.rank() + m.kernel().rank(), m.cols());
            }

            #[test]
            fn rref_idempotent(m in matrix(5)) {
                let s = m.row_space();
                let again = Subspace::span(m.field(), m.cols(), s.basis().iter().cloned()).unwrap();
                prop_assert_eq!(s, again);
            }

            #[test]
            fn leq_partial_order((a, b, c) in triple(2)) {
                let (a, b, c) = (a.row_space(), b.row_space(), c.row_space());
                prop_assert!(a.leq(&a).unwrap().holds());
                if a.leq(&b).unwrap().holds() && b.leq(&a).unwrap().holds() {
                    prop_assert_eq!(&a, &b);
                }
                if a.leq(&b).unwrap().holds() && b.leq(&c).unwrap().holds() {
                    prop_assert!(a.leq(&c).unwrap().holds());
                }
                let ab = a.sum(&b).unwrap();
                prop_assert!(a.leq(&ab).unwrap().holds());
            }
        }
    }
}
