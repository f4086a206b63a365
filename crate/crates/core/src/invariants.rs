//! The homomorphisms `μ_r : C_0(T^K) -> Hom_0(C_*(K^r), C_*(T^r))` and
//! `ν : C_0(T^K) -> F_p[π_0]`, simplicial degree of invariants and
//! separation of homotopy classes.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::group_ring::{gentle_degree, AugFiltration, FinGroup, GroupFunction, PowerLimit};
use crate::linalg::{Matrix, SparseVector, Subspace};
use crate::parallel::par_map;
use crate::simplicial::{
    chain_of_map, enumerate_maps, module_hom, pi0_enumerated, pi0_module, power, Caps, Crew, CrewMap,
    FunctionComplexSlice, Pi0, Product, Simplex, Simplicial, SimplicialMap, SimplicialModule, Wedge,
};

/// Default bound on the power `r` searched by degree computations.
pub const DEFAULT_R_MAX: usize = 4;

/// An element of `C_0(T^K)` in the basis of enumerated maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroChain {
    pub coefficients: SparseVector,
}

impl ZeroChain {
    pub fn vertex(n: usize, b: usize) -> Self {
        let mut v = vec![0; n];
        v[b] = 1;
        ZeroChain {
            coefficients: SparseVector::from_dense(&v),
        }
    }

    pub fn from_dense(v: &[u32]) -> Self {
        ZeroChain {
            coefficients: SparseVector::from_dense(v),
        }
    }
}

/// `μ_r(B)`: for each nondegenerate simplex of `K^r` (by dimension and
/// index), a chain of `T^r` as a sparse sum of nondegenerate simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTransform<E> {
    pub r: usize,
    pub images: Vec<Vec<BTreeMap<Vec<E>, u32>>>,
}

impl<E> ChainTransform<E> {
    pub fn is_zero(&self) -> bool {
        self.images.iter().flatten().all(BTreeMap::is_empty)
    }
}

/// An `F_p`-valued function on homotopy classes, indexed like `Pi0::classes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantTable {
    pub p: u32,
    pub values: Vec<u32>,
}

impl InvariantTable {
    pub fn constant(p: u32, classes: usize, c: u32) -> Self {
        InvariantTable {
            p,
            values: vec![c % p; classes],
        }
    }
}

/// One coordinate of `μ_r`: the coefficient of the simplex `b^r(k)` in the
/// image of the cell `k` of `K^r`, where `b` is the vertex `via`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuCoordinate {
    pub degree: usize,
    pub cell: usize,
    pub cell_name: String,
    pub via: usize,
}

/// A linear functional `l` on the image of `μ_r` with `+f = l ∘ μ_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub r: usize,
    pub terms: Vec<(MuCoordinate, u32)>,
}

impl Factorization {
    /// Hex fingerprint of the functional.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update((self.r as u64).to_le_bytes());
        for (c, x) in &self.terms {
            for n in [c.degree, c.cell, c.via] {
                h.update((n as u64).to_le_bytes());
            }
            h.update(x.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    /// `None` when the degree exceeds the searched range.
    pub degree: Option<usize>,
    pub r_max: usize,
    pub factorization: Option<Factorization>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub r: usize,
    pub table: InvariantTable,
}

#[derive(Debug)]
struct MuLevel {
    /// Distinct coordinate rows of `μ_r`, each an indicator on vertices.
    rows: Vec<(MuCoordinate, Vec<u32>)>,
    row_space: Subspace,
    /// Indices into `rows` forming a basis of the row space.
    independent: Vec<usize>,
    kernel: Subspace,
}

/// A function complex `T^K` together with its `π_0` and cached `μ_r` data.
pub struct Context<T: Simplicial> {
    source: Crew,
    target: T,
    field: Fp,
    caps: Caps,
    slice: FunctionComplexSlice<T::Elem>,
    pi0: Pi0,
    edge_quotient: bool,
    levels: Mutex<HashMap<usize, Arc<MuLevel>>>,
    powers: Mutex<HashMap<usize, Arc<Product>>>,
}

impl Context<SimplicialModule> {
    /// Function complex into a Dold–Kan module; `π_0` is cross-checked
    /// against `H_0` of the mapping complex.
    pub fn module(source: &Crew, target: &SimplicialModule, caps: Caps) -> Result<Self> {
        let (slice, pi0) = pi0_module(source, target, &caps)?;
        Ok(Self::assemble(source, target.clone(), target.field(), caps, slice, pi0, false))
    }
}

impl Context<Crew> {
    /// Function complex into a crew with coefficients in `F_p`. Components
    /// are taken modulo elementary homotopies ("edge-quotient" `π_0`).
    pub fn crew(source: &Crew, target: &Crew, field: Fp, caps: Caps) -> Result<Self> {
        let (slice, pi0) = pi0_enumerated(source, target, &caps)?;
        Ok(Self::assemble(source, target.clone(), field, caps, slice, pi0, true))
    }
}

impl<T: Simplicial> Context<T> {
    fn assemble(
        source: &Crew,
        target: T,
        field: Fp,
        caps: Caps,
        slice: FunctionComplexSlice<T::Elem>,
        pi0: Pi0,
        edge_quotient: bool,
    ) -> Self {
        Context {
            source: source.clone(),
            target,
            field,
            caps,
            slice,
            pi0,
            edge_quotient,
            levels: Mutex::new(HashMap::new()),
            powers: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &Crew {
        &self.source
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn vertices(&self) -> &[SimplicialMap<T::Elem>] {
        &self.slice.vertices
    }

    pub fn slice(&self) -> &FunctionComplexSlice<T::Elem> {
        &self.slice
    }

    pub fn pi0(&self) -> &Pi0 {
        &self.pi0
    }

    /// Whether `π_0` is only the quotient by elementary homotopies (crew
    /// targets, which need not be fibrant).
    pub fn is_edge_quotient(&self) -> bool {
        self.edge_quotient
    }

    fn power(&self, r: usize) -> Result<Arc<Product>> {
        if let Some(p) = self.powers.lock().unwrap().get(&r) {
            return Ok(p.clone());
        }
        let p = Arc::new(power(&self.source, r, self.caps.cells)?);
        self.powers.lock().unwrap().insert(r, p.clone());
        Ok(p)
    }

    /// `b^r(k)` for the cell `(q, i)` of `K^r`, or `None` when degenerate.
    fn image_tuple(&self, prod: &Product, q: usize, i: usize, b: &SimplicialMap<T::Elem>) -> Option<Vec<T::Elem>> {
        let t: Vec<T::Elem> = prod.components(q, i).iter().map(|c| b.eval(&self.target, c)).collect();
        let degenerate = (0..q).any(|j| !t.is_empty() && t.iter().all(|x| self.target.degenerate_at(x, j)));
        (!degenerate).then_some(t)
    }

    fn cells_of(prod: &Product) -> Vec<(usize, usize)> {
        let k = prod.crew();
        (0..=k.dim()).flat_map(|q| (0..k.cells(q).len()).map(move |i| (q, i))).collect()
    }

    /// `μ_r(B)`, evaluated simplex by simplex.
    pub fn mu(&self, r: usize, b: &ZeroChain) -> Result<ChainTransform<T::Elem>> {
        let n = self.slice.vertices.len();
        if b.coefficients.dim() != n {
            return Err(Error::argument(format!(
                "zero-chain has {} coordinates, function complex has {n} vertices",
                b.coefficients.dim()
            )));
        }
        let prod = self.power(r)?;
        let f = self.field;
        let k = prod.crew();
        let mut images: Vec<Vec<BTreeMap<Vec<T::Elem>, u32>>> =
            (0..=k.dim()).map(|q| vec![BTreeMap::new(); k.cells(q).len()]).collect();
        let support: Vec<(usize, u32)> = b.coefficients.iter().collect();
        let cells = Self::cells_of(&prod);
        let chains = par_map(&cells, |&(q, i)| {
            let mut chain: BTreeMap<Vec<T::Elem>, u32> = BTreeMap::new();
            for &(v, c) in &support {
                if let Some(t) = self.image_tuple(&prod, q, i, &self.slice.vertices[v]) {
                    let e = chain.entry(t).or_insert(0);
                    *e = f.add(*e, c % f.p());
                }
            }
            chain.retain(|_, c| *c != 0);
            chain
        });
        for (&(q, i), chain) in cells.iter().zip(chains) {
            images[q][i] = chain;
        }
        Ok(ChainTransform { r, images })
    }

    fn level(&self, r: usize) -> Result<Arc<MuLevel>> {
        if let Some(l) = self.levels.lock().unwrap().get(&r) {
            return Ok(l.clone());
        }
        let prod = self.power(r)?;
        let n = self.slice.vertices.len();
        let cells = Self::cells_of(&prod);
        let groups = par_map(&cells, |&(q, i)| {
            let mut by_image: BTreeMap<Vec<T::Elem>, Vec<usize>> = BTreeMap::new();
            for (v, b) in self.slice.vertices.iter().enumerate() {
                if let Some(t) = self.image_tuple(&prod, q, i, b) {
                    by_image.entry(t).or_default().push(v);
                }
            }
            by_image.into_values().collect::<Vec<_>>()
        });
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        let mut rows = Vec::new();
        for (&(q, i), gs) in cells.iter().zip(groups) {
            for g in gs {
                let mut row = vec![0; n];
                for &v in &g {
                    row[v] = 1;
                }
                if seen.insert(row.clone(), ()).is_none() {
                    let coord = MuCoordinate {
                        degree: q,
                        cell: i,
                        cell_name: prod.crew().cell(q, i).name.clone(),
                        via: g[0],
                    };
                    rows.push((coord, row));
                }
            }
        }
        let mut row_space = Subspace::zero(self.field, n);
        let mut independent = Vec::new();
        for (idx, (_, row)) in rows.iter().enumerate() {
            if row_space.insert(row.clone()) {
                independent.push(idx);
            }
        }
        let kernel = row_space.annihilator();
        let level = Arc::new(MuLevel {
            rows,
            row_space,
            independent,
            kernel,
        });
        self.levels.lock().unwrap().insert(r, level.clone());
        Ok(level)
    }

    /// `ker μ_r` inside `C_0(T^K)`.
    pub fn mu_kernel(&self, r: usize) -> Result<Subspace> {
        Ok(self.level(r)?.kernel.clone())
    }

    /// `ν(B)`: coefficients pushed forward to classes.
    pub fn nu(&self, b: &ZeroChain) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0; self.pi0.class_count()];
        for (v, c) in b.coefficients.iter() {
            let k = self.pi0.class_of[v];
            out[k] = f.add(out[k], c % f.p());
        }
        out
    }

    /// `ker ν`, spanned by differences of maps in a common class.
    pub fn nu_kernel(&self) -> Subspace {
        let f = self.field;
        let n = self.slice.vertices.len();
        let rows = self.pi0.classes.iter().flat_map(|c| {
            let rep = c[0];
            c[1..].iter().map(move |&v| {
                let mut row = vec![0; n];
                row[v] = 1;
                row[rep] = f.neg(1);
                row
            })
        });
        Subspace::span(f, n, rows).expect("rows have the ambient length")
    }

    /// Least `r <= r_max` with `ker μ_r ⊆ ker ν`.
    pub fn stabilization_r(&self, r_max: usize) -> Result<Option<usize>> {
        let nu = self.nu_kernel();
        for r in 0..=r_max {
            if self.level(r)?.kernel.leq(&nu)?.holds() {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    /// `+f` as a functional on `C_0(T^K)`.
    pub fn lift_table(&self, f: &InvariantTable) -> Result<Vec<u32>> {
        self.check_table(f)?;
        Ok(self.pi0.class_of.iter().map(|&c| f.values[c]).collect())
    }

    fn check_table(&self, f: &InvariantTable) -> Result<()> {
        if f.p != self.field.p() {
            return Err(Error::argument(format!("table is over F_{}, context over {}", f.p, self.field)));
        }
        if f.values.len() != self.pi0.class_count() {
            return Err(Error::argument(format!(
                "table has {} values for {} classes",
                f.values.len(),
                self.pi0.class_count()
            )));
        }
        if f.values.iter().any(|&v| v >= f.p) {
            return Err(Error::validation("table value out of range"));
        }
        Ok(())
    }

    /// Least `r <= r_max` with `ker μ_r ⊆ ker(+f)`, with a functional `l`
    /// satisfying `+f = l ∘ μ_r`, re-verified by evaluation on every vertex.
    pub fn simp_degree(&self, f: &InvariantTable, r_max: usize) -> Result<DegreeReport> {
        let plus = self.lift_table(f)?;
        for r in 0..=r_max {
            let level = self.level(r)?;
            if !level.row_space.contains(&plus) {
                continue;
            }
            let cols: Vec<Vec<u32>> = level.independent.iter().map(|&i| level.rows[i].1.clone()).collect();
            let lambda = Matrix::from_columns(self.field, plus.len(), &cols)
                .solve(&plus)
                .ok_or_else(|| Error::structural("functional in the row space has no coordinates"))?;
            let terms: Vec<(MuCoordinate, u32)> = level
                .independent
                .iter()
                .zip(lambda)
                .filter(|(_, c)| *c != 0)
                .map(|(&i, c)| (level.rows[i].0.clone(), c))
                .collect();
            let fact = Factorization { r, terms };
            self.verify_factorization(&fact, &plus)?;
            return Ok(DegreeReport {
                degree: Some(r),
                r_max,
                factorization: Some(fact),
            });
        }
        Ok(DegreeReport {
            degree: None,
            r_max,
            factorization: None,
        })
    }

    /// Checks `l(μ_r[b]) = +f(b)` for every vertex `b` directly from the
    /// images `b^r(k)`.
    fn verify_factorization(&self, fact: &Factorization, plus: &[u32]) -> Result<()> {
        let prod = self.power(fact.r)?;
        let fld = self.field;
        let targets: Vec<Option<Vec<T::Elem>>> = fact
            .terms
            .iter()
            .map(|(c, _)| self.image_tuple(&prod, c.degree, c.cell, &self.slice.vertices[c.via]))
            .collect();
        for (v, b) in self.slice.vertices.iter().enumerate() {
            let mut total = 0;
            for ((c, lam), t) in fact.terms.iter().zip(&targets) {
                if t.is_some() && self.image_tuple(&prod, c.degree, c.cell, b) == *t {
                    total = fld.add(total, *lam);
                }
            }
            if total != plus[v] {
                return Err(Error::structural(format!("factorization fails on vertex {v}")));
            }
        }
        Ok(())
    }

    /// Least `r <= r_max` at which an invariant of simplicial degree `<= r`
    /// separates classes `u1` and `u2`, with one such table, normalised to
    /// `f(u1) = 0`, `f(u2) = 1`.
    pub fn separate(&self, u1: usize, u2: usize, r_max: usize) -> Result<Option<Separation>> {
        let classes = self.pi0.class_count();
        if u1 >= classes || u2 >= classes {
            return Err(Error::argument(format!("there are only {classes} classes")));
        }
        if u1 == u2 {
            return Err(Error::argument("cannot separate a class from itself"));
        }
        let f = self.field;
        let n = self.slice.vertices.len();
        let class_functionals = Subspace::span(
            f,
            n,
            self.pi0.classes.iter().map(|c| {
                let mut row = vec![0; n];
                for &v in c {
                    row[v] = 1;
                }
                row
            }),
        )?;
        let (a, b) = (self.pi0.representative(u1), self.pi0.representative(u2));
        for r in 0..=r_max {
            let level = self.level(r)?;
            let w = level.row_space.intersection(&class_functionals)?;
            if let Some(x) = w.basis().iter().find(|x| x[a] != x[b]) {
                let scale = f.inv(f.sub(x[b], x[a]));
                let values = self
                    .pi0
                    .classes
                    .iter()
                    .map(|c| f.mul(f.sub(x[c[0]], x[a]), scale))
                    .collect();
                let table = InvariantTable { p: f.p(), values };
                let check = self.simp_degree(&table, r)?;
                if check.degree != Some(r) {
                    return Err(Error::structural(format!("separating table has degree {:?}, expected {r}", check.degree)));
                }
                return Ok(Some(Separation { r, table }));
            }
        }
        Ok(None)
    }

    /// `ker μ_{r+1} ⊆ ker μ_r`.
    pub fn kernels_decrease(&self, r: usize) -> Result<bool> {
        Ok(self.level(r + 1)?.kernel.leq(&self.level(r)?.kernel)?.holds())
    }

    /// `ν` kills `[b] - [b']` for every elementary homotopy `b ~ b'`.
    pub fn nu_kills_homotopies(&self) -> bool {
        let n = self.slice.vertices.len();
        let f = self.field;
        self.slice.edges.iter().all(|&(a, b)| {
            let mut v = vec![0; n];
            v[a] = f.add(v[a], 1);
            v[b] = f.sub(v[b], 1);
            self.nu(&ZeroChain::from_dense(&v)).iter().all(|&x| x == 0)
        })
    }
}

impl Context<SimplicialModule> {
    /// Coordinates of each class in `H_0 ≅ F_p^h` (a basis read off the
    /// class residues).
    pub fn class_coordinates(&self) -> Result<Vec<Vec<u32>>> {
        let module = self
            .pi0
            .module
            .as_ref()
            .ok_or_else(|| Error::structural("module structure missing"))?;
        let f = self.field;
        let dim = module.residues.first().map_or(0, Vec::len);
        let span = Subspace::span(f, dim, module.residues.iter().cloned())?;
        if span.rank() != module.h0_dim {
            return Err(Error::structural("class residues do not span H_0"));
        }
        let basis = Matrix::from_columns(f, dim, span.basis());
        module
            .residues
            .iter()
            .map(|r| basis.solve(r).ok_or_else(|| Error::structural("residue outside its span")))
            .collect()
    }

    /// Group of vertices `(U^K)_0` under pointwise addition, with the group
    /// element of each vertex.
    pub fn vertex_group(&self) -> Result<(Arc<FinGroup>, Vec<usize>)> {
        let hom = module_hom(&self.source, &self.target);
        let d = hom.cycle_basis().len();
        let p = self.field.p();
        let group = Arc::new(FinGroup::abelian(&vec![p; d])?);
        let mut elements = Vec::with_capacity(self.slice.vertices.len());
        for b in &self.slice.vertices {
            let coords = hom
                .cycle_coordinates(&chain_of_map(&self.source, &self.target, b))
                .ok_or_else(|| Error::structural("vertex is not a chain map"))?;
            elements.push(group.from_tuple(&coords).expect("coordinates lie in the group"));
        }
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != group.order() || elements.len() != group.order() {
            return Err(Error::structural("vertices do not biject with chain maps"));
        }
        Ok((group, elements))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelFiltrationReport {
    pub r: usize,
    pub kernel_dim: usize,
    pub power_dim: usize,
    pub holds: bool,
}

/// `ker μ_r ⊆ I^{r+1}` inside `F_p[(U^K)_0]`, the group ring of the
/// vertex group.
pub fn check_kernel_in_power(ctx: &Context<SimplicialModule>, r: usize) -> Result<KernelFiltrationReport> {
    let (group, elements) = ctx.vertex_group()?;
    let f = ctx.field();
    let filt = AugFiltration::compute(group.clone(), f, PowerLimit::UpTo(r + 1));
    let power = filt.power(r + 1).expect("computed to r+1");
    let kernel = ctx.mu_kernel(r)?;
    let moved = kernel.basis().iter().map(|v| {
        let mut w = vec![0; group.order()];
        for (vertex, &c) in v.iter().enumerate() {
            w[elements[vertex]] = c;
        }
        w
    });
    let moved = Subspace::span(f, group.order(), moved)?;
    Ok(KernelFiltrationReport {
        r,
        kernel_dim: kernel.rank(),
        power_dim: power.rank(),
        holds: moved.leq(&power)?.holds(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternatingSumReport {
    pub r: usize,
    pub summands: usize,
    pub simplices_checked: usize,
    /// Name of the first simplex of `W^r` whose alternating sum is nonzero.
    pub failing: Option<String>,
}

impl AlternatingSumReport {
    pub fn holds(&self) -> bool {
        self.failing.is_none()
    }
}

/// For the wedge `W` of `r + 1` summands, checks over the integers that
/// `Σ_e (-1)^{|e|} (M_e)^r(w) = 0` for every nondegenerate `w` of `W^r` up
/// to dimension `q_max`, where `M_e` collapses the summands with `e_s = 0`.
pub fn check_wedge_alternating_sum(
    summands: Vec<Crew>,
    r: usize,
    q_max: usize,
    caps: &Caps,
) -> Result<AlternatingSumReport> {
    let count = summands.len();
    if count != r + 1 {
        return Err(Error::argument(format!("need {} summands for r = {r}, got {count}", r + 1)));
    }
    if count > 16 {
        return Err(Error::cap("more than 16 wedge summands"));
    }
    let wedge = Wedge::new(summands)?;
    let w = wedge.crew();
    let operators: Vec<(i64, CrewMap)> = (0..1u32 << count)
        .map(|mask| {
            let e: Vec<bool> = (0..count).map(|s| mask >> s & 1 == 1).collect();
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            wedge.me_operator(&e).map(|m| (sign, m))
        })
        .collect::<Result<_>>()?;
    let prod = power(w, r, caps.cells)?;
    let top = q_max.min(prod.crew().dim());
    let cells: Vec<(usize, usize)> = (0..=top)
        .flat_map(|q| (0..prod.crew().cells(q).len()).map(move |i| (q, i)))
        .collect();
    let failures = par_map(&cells, |&(q, i)| {
        let comps = prod.components(q, i);
        let mut sum: HashMap<Vec<Simplex>, i64> = HashMap::new();
        for (sign, m) in &operators {
            let t: Vec<Simplex> = comps.iter().map(|c| m.eval(w, c)).collect();
            *sum.entry(t).or_insert(0) += sign;
        }
        sum.values().any(|&c| c != 0)
    });
    let failing = cells
        .iter()
        .zip(failures)
        .find(|(_, bad)| *bad)
        .map(|(&(q, i), _)| prod.crew().cell(q, i).name.clone());
    Ok(AlternatingSumReport {
        r,
        summands: count,
        simplices_checked: cells.len(),
        failing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GentleVsSimplicial {
    pub p: u32,
    pub n: usize,
    pub tables: usize,
    /// `(values on Z_p, gentle degree, simplicial degree)` for each table
    /// where the gentle degree exceeds the simplicial one.
    pub failures: Vec<(Vec<u32>, Option<usize>, Option<usize>)>,
    /// Largest simplicial degree met.
    pub max_simplicial: Option<usize>,
}

/// For `[S^n, K(Z/p, n)] ≅ Z_p`, every table `f` has gentle degree (as a
/// function on `Z_p`) at most its simplicial degree.
///
/// The sphere is modelled by a chain of `p` top simplices. With a single
/// top simplex every map is seen whole by `μ_1`, so all tables would have
/// simplicial degree at most 1; a sum of `p` independent top values lets
/// `μ_r` see only `r` of them at a time, which is what the bound needs
/// (gentle degrees on `Z_p` are below `p`).
pub fn check_gentle_below_simplicial(p: u32, n: usize, r_max: usize, caps: Caps) -> Result<GentleVsSimplicial> {
    if (p as u64).pow(p) > 1 << 12 {
        return Err(Error::cap(format!("{p}^{p} tables is too many")));
    }
    let sphere = Crew::sphere_chain(n, p as usize)?;
    let target = SimplicialModule::eilenberg_maclane(p, n)?;
    let ctx = Context::module(&sphere, &target, caps)?;
    let coords = ctx.class_coordinates()?;
    if coords.iter().any(|c| c.len() != 1) || coords.len() != p as usize {
        return Err(Error::structural("classes are not a copy of Z_p"));
    }
    let f = ctx.field();
    let zp = Arc::new(FinGroup::cyclic(p)?);
    let mut failures = Vec::new();
    let mut max_simplicial = Some(0);
    let tables = GroupFunction::all(zp, f)?;
    for g in &tables {
        let table = InvariantTable {
            p,
            values: coords.iter().map(|c| g.value(c[0] as usize)).collect(),
        };
        let simp = ctx.simp_degree(&table, r_max)?.degree;
        let gentle = gentle_degree(g);
        max_simplicial = match (max_simplicial, simp) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let ok = match (gentle, simp) {
            (_, None) => true,
            (Some(a), Some(b)) => a <= b,
            (None, Some(_)) => false,
        };
        if !ok {
            failures.push((g.values().to_vec(), gentle, simp));
        }
    }
    Ok(GentleVsSimplicial {
        p,
        n,
        tables: tables.len(),
        failures,
        max_simplicial,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub degree: Option<usize>,
    pub pulled_degree: Option<usize>,
    pub pulled_table: InvariantTable,
    pub holds: bool,
}

/// For `k : K -> K̃` and a levelwise simplicial map `h : T̃ -> T`, the
/// invariant `f̃(u) = f([h ∘ u ∘ k])` on `[K̃, T̃]` has simplicial degree at
/// most that of `f`.
pub fn check_pullback_degree<T: Simplicial, U: Simplicial>(
    base: &Context<T>,
    pulled: &Context<U>,
    k: &CrewMap,
    h: impl Fn(&U::Elem) -> T::Elem,
    f: &InvariantTable,
    r_max: usize,
) -> Result<PullbackReport> {
    if base.field() != pulled.field() {
        return Err(Error::argument("contexts use different fields"));
    }
    k.check(base.source(), pulled.source())?;
    let mut values: Vec<Option<u32>> = vec![None; pulled.pi0().class_count()];
    for (v, u) in pulled.vertices().iter().enumerate() {
        let images = k
            .images
            .iter()
            .map(|level| level.iter().map(|x| h(&u.eval(pulled.target(), x))).collect())
            .collect();
        let composite = SimplicialMap { images };
        let at = base
            .vertices()
            .binary_search(&composite)
            .map_err(|_| Error::precondition("composite is not a simplicial map into the target"))?;
        let value = f.values[base.pi0().class_of[at]];
        let class = pulled.pi0().class_of[v];
        match values[class] {
            None => values[class] = Some(value),
            Some(w) if w != value => {
                return Err(Error::precondition(
                    "pulled-back invariant is not constant on edge-quotient classes",
                ))
            }
            _ => {}
        }
    }
    let pulled_table = InvariantTable {
        p: f.p,
        values: values.into_iter().map(|v| v.expect("every class has a vertex")).collect(),
    };
    let degree = base.simp_degree(f, r_max)?.degree;
    let pulled_degree = pulled.simp_degree(&pulled_table, r_max)?.degree;
    let holds = match (pulled_degree, degree) {
        (_, None) => true,
        (Some(a), Some(b)) => a <= b,
        (None, Some(_)) => false,
    };
    Ok(PullbackReport {
        degree,
        pulled_degree,
        pulled_table,
        holds,
    })
}

/// All pointed maps between two crews, as candidates for `k` above.
pub fn crew_maps(source: &Crew, target: &Crew, caps: &Caps) -> Result<Vec<CrewMap>> {
    enumerate_maps(source, target, caps)
}
