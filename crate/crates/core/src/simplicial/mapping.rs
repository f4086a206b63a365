use serde::Serialize;

use crate::complex::{flatten, HomComplex};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::parallel::par_map;

use super::chains::{reduced_chains, reduced_index};
use super::construct::{reduced_cylinder, DEFAULT_CELL_CAP};
use super::crew::{Crew, Simplex};
use super::maps::{CrewMap, SimplicialMap};
use super::module::SimplicialModule;
use super::target::Simplicial;

/// Limits for function-complex computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Most simplices listed per target level.
    pub level_elements: usize,
    /// Most maps returned by one enumeration.
    pub maps: usize,
    /// Most nondegenerate simplices in a constructed crew.
    pub cells: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            level_elements: 1 << 16,
            maps: 1 << 16,
            cells: DEFAULT_CELL_CAP,
        }
    }
}

/// All pointed simplicial maps `K -> T`, in canonical (sorted) order.
pub fn enumerate_maps<T: Simplicial>(k: &Crew, t: &T, caps: &Caps) -> Result<Vec<SimplicialMap<T::Elem>>> {
    let levels: Vec<Vec<T::Elem>> = (0..=k.dim())
        .map(|q| t.elements(q, caps.level_elements))
        .collect::<Result<_>>()?;
    let order: Vec<(usize, usize)> = (0..=k.dim())
        .flat_map(|q| (0..k.cells(q).len()).map(move |i| (q, i)))
        .filter(|&(q, i)| !(q == 0 && i == k.basepoint()))
        .collect();
    let mut start: Vec<Vec<Option<T::Elem>>> = (0..=k.dim()).map(|q| vec![None; k.cells(q).len()]).collect();
    start[0][k.basepoint()] = Some(t.base_simplex(0));

    let search = Search { k, t, levels: &levels, order: &order, cap: caps.maps };
    let mut found = match order.first() {
        None => vec![start],
        Some(&(q, i)) => {
            let roots: Vec<T::Elem> = search.candidates(&start, q, i);
            let branches = par_map(&roots, |x| {
                let mut a = start.clone();
                a[q][i] = Some(x.clone());
                let mut out = Vec::new();
                search.run(&mut a, 1, &mut out).map(|_| out)
            });
            let mut all = Vec::new();
            for b in branches {
                all.extend(b?);
                if all.len() > caps.maps {
                    return Err(Error::cap(format!("more than {} maps", caps.maps)));
                }
            }
            all
        }
    };
    let mut maps: Vec<SimplicialMap<T::Elem>> = found
        .drain(..)
        .map(|a| SimplicialMap {
            images: a.into_iter().map(|l| l.into_iter().map(Option::unwrap).collect()).collect(),
        })
        .collect();
    maps.sort();
    Ok(maps)
}

struct Search<'a, T: Simplicial> {
    k: &'a Crew,
    t: &'a T,
    levels: &'a [Vec<T::Elem>],
    order: &'a [(usize, usize)],
    cap: usize,
}

type Partial<E> = Vec<Vec<Option<E>>>;

impl<T: Simplicial> Search<'_, T> {
    fn image_of(&self, a: &Partial<T::Elem>, x: &Simplex) -> T::Elem {
        let y = a[x.base_dim()][x.base].as_ref().expect("faces are assigned first");
        self.t.restrict(y, &x.sigma)
    }

    fn candidates(&self, a: &Partial<T::Elem>, q: usize, i: usize) -> Vec<T::Elem> {
        let faces: Vec<T::Elem> = self.k.cell(q, i).faces.iter().map(|f| self.image_of(a, f)).collect();
        self.levels[q]
            .iter()
            .filter(|x| faces.iter().enumerate().all(|(j, f)| self.t.face(x, j) == *f))
            .cloned()
            .collect()
    }

    fn run(&self, a: &mut Partial<T::Elem>, pos: usize, out: &mut Vec<Partial<T::Elem>>) -> Result<()> {
        if pos == self.order.len() {
            out.push(a.clone());
            if out.len() > self.cap {
                return Err(Error::cap(format!("more than {} maps", self.cap)));
            }
            return Ok(());
        }
        let (q, i) = self.order[pos];
        for x in self.candidates(a, q, i) {
            a[q][i] = Some(x);
            self.run(a, pos + 1, out)?;
        }
        a[q][i] = None;
        Ok(())
    }
}

/// Vertices and edges of the function complex `T^K` in dimensions 0 and 1.
#[derive(Debug, Clone)]
pub struct FunctionComplexSlice<E> {
    pub vertices: Vec<SimplicialMap<E>>,
    /// Endpoints of each elementary homotopy (a map from the reduced
    /// cylinder), as vertex indices.
    pub edges: Vec<(usize, usize)>,
}

pub fn function_complex<T: Simplicial>(k: &Crew, t: &T, caps: &Caps) -> Result<FunctionComplexSlice<T::Elem>> {
    let vertices = enumerate_maps(k, t, caps)?;
    let cyl = reduced_cylinder(k, caps.cells)?;
    let homotopies = enumerate_maps(&cyl.crew, t, caps)?;
    let find = |m: &SimplicialMap<T::Elem>| {
        vertices
            .binary_search(m)
            .map_err(|_| Error::structural("homotopy endpoint is not a listed map"))
    };
    let mut edges = Vec::with_capacity(homotopies.len());
    for h in &homotopies {
        let a = cyl.ends[0].then(h, t);
        let b = cyl.ends[1].then(h, t);
        edges.push((find(&a)?, find(&b)?));
    }
    edges.sort();
    edges.dedup();
    Ok(FunctionComplexSlice { vertices, edges })
}

/// Module structure on `π_0` for a module target: `H_0` of the mapping
/// complex, with each class's canonical residue modulo null-homotopic maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleStructure {
    pub h0_dim: usize,
    pub residues: Vec<Vec<u32>>,
}

/// Connected components of the function complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pi0 {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Classes as sorted vertex lists, ordered by first vertex.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub module: Option<ModuleStructure>,
}

impl Pi0 {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; n];
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = root(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[slot[r]].push(v);
            class_of[v] = slot[r];
        }
        Pi0 {
            vertex_count: n,
            edge_count: edges.len(),
            classes,
            class_of,
            module: None,
        }
    }
}

/// `π_0` by enumeration: maps modulo the equivalence generated by
/// elementary homotopies.
pub fn pi0_enumerated<T: Simplicial>(k: &Crew, t: &T, caps: &Caps) -> Result<(FunctionComplexSlice<T::Elem>, Pi0)> {
    let slice = function_complex(k, t, caps)?;
    let pi0 = Pi0::from_edges(slice.vertices.len(), &slice.edges);
    Ok((slice, pi0))
}

/// The chain map `Ñ(K) -> C` of a map `K -> Γ(C)`, as flattened degree-0
/// coordinates of `Hom(Ñ(K), C)`.
pub fn chain_of_map(k: &Crew, m: &SimplicialModule, b: &SimplicialMap<super::module::ModElem>) -> Vec<u32> {
    let f = m.field();
    let c = m.complex();
    let blocks: Vec<Matrix> = (0..=k.dim())
        .map(|q| {
            let cols = k.cells(q).len() - usize::from(q == 0);
            let mut mat = Matrix::zeros(f, c.rank(q), cols);
            for (i, x) in b.images[q].iter().enumerate() {
                if let Some(col) = reduced_index(k, q, i) {
                    for (r, v) in m.chain_component(x).into_iter().enumerate() {
                        mat.set(r, col, v);
                    }
                }
            }
            mat
        })
        .collect();
    flatten(&blocks)
}

/// `Hom(Ñ(K), C)` for a module target `Γ(C)`, with `C` padded to the
/// dimension of `K` so that every chain-map component is present.
pub fn module_hom(k: &Crew, m: &SimplicialModule) -> HomComplex {
    let chains = reduced_chains(k, m.field());
    HomComplex::new(&chains, &m.complex().extended_to(k.dim() + 1))
}

/// `π_0` for a module target, computed by enumeration and independently as
/// `H_0` of `Hom(Ñ(K), N(T))`; the two must agree.
pub fn pi0_module(
    k: &Crew,
    m: &SimplicialModule,
    caps: &Caps,
) -> Result<(FunctionComplexSlice<super::module::ModElem>, Pi0)> {
    let (slice, mut pi0) = pi0_enumerated(k, m, caps)?;
    let hom = module_hom(k, m);
    let (z0, b0): (Subspace, Subspace) = (hom.zero_cycles(), hom.zero_boundaries());
    let p = m.field().p() as u128;
    let h0 = z0.rank() - b0.rank();
    let mismatch = |what: String| Err(Error::structural(format!("enumeration and chain-level π_0 disagree: {what}")));
    if p.checked_pow(z0.rank() as u32) != Some(slice.vertices.len() as u128) {
        return mismatch(format!("{} maps but {} chain maps", slice.vertices.len(), p.pow(z0.rank() as u32)));
    }
    if p.checked_pow(h0 as u32) != Some(pi0.class_count() as u128) {
        return mismatch(format!("{} classes but H_0 of dimension {h0}", pi0.class_count()));
    }
    let chains_of: Vec<Vec<u32>> = slice.vertices.iter().map(|b| chain_of_map(k, m, b)).collect();
    let residue = |v: &[u32]| {
        let mut r = v.to_vec();
        b0.reduce(&mut r);
        r
    };
    let residues: Vec<Vec<u32>> = pi0.classes.iter().map(|c| residue(&chains_of[c[0]])).collect();
    for (ci, class) in pi0.classes.iter().enumerate() {
        for &v in class {
            if !z0.contains(&chains_of[v]) {
                return mismatch(format!("map {v} is not a chain map"));
            }
            if residue(&chains_of[v]) != residues[ci] {
                return mismatch(format!("map {v} is not homologous to its class representative"));
            }
        }
    }
    let mut sorted = residues.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != residues.len() {
        return mismatch("two classes have the same homology class".into());
    }
    pi0.module = Some(ModuleStructure { h0_dim: h0, residues });
    Ok((slice, pi0))
}

/// Induced map on vertex lists: `b ↦ h ∘ b ∘ k`.
pub fn transport<E: Clone + Ord, T: Simplicial<Elem = E>>(
    vertices_from: &[SimplicialMap<E>],
    vertices_to: &[SimplicialMap<E>],
    k: &CrewMap,
    h: impl Fn(&SimplicialMap<E>) -> SimplicialMap<E>,
    target: &T,
) -> Result<Vec<usize>> {
    vertices_to
        .iter()
        .map(|b| {
            let moved = k.then(&h(b), target);
            vertices_from
                .binary_search(&moved)
                .map_err(|_| Error::structural("transported map is not listed"))
        })
        .collect()
}
