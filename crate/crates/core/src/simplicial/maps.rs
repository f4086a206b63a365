use crate::complex::ComplexMap;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::Matrix;

use super::chains::normalized_chains;
use super::crew::{Crew, Simplex};
use super::target::Simplicial;

/// A pointed simplicial map out of a crew, given by the images of the
/// nondegenerate simplices (`images[q][i]` is the image of cell `i` in
/// dimension `q`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplicialMap<E> {
    pub images: Vec<Vec<E>>,
}

/// A map between crews.
pub type CrewMap = SimplicialMap<Simplex>;

impl<E: Clone> SimplicialMap<E> {
    /// The image of an arbitrary simplex of the source, in normal form.
    pub fn eval<T: Simplicial<Elem = E>>(&self, target: &T, x: &Simplex) -> E {
        target.restrict(&self.images[x.base_dim()][x.base], &x.sigma)
    }

    /// The constant map to the basepoint.
    pub fn constant<T: Simplicial<Elem = E>>(source: &Crew, target: &T) -> Self {
        SimplicialMap {
            images: (0..=source.dim())
                .map(|q| vec![target.base_simplex(q); source.cells(q).len()])
                .collect(),
        }
    }

    /// Checks dimensions, face compatibility and the basepoint.
    pub fn check<T: Simplicial<Elem = E>>(&self, source: &Crew, target: &T) -> Result<()>
    where
        E: PartialEq,
    {
        if self.images.len() != source.dim() + 1 {
            return Err(Error::validation("map has the wrong number of dimensions"));
        }
        for q in 0..=source.dim() {
            if self.images[q].len() != source.cells(q).len() {
                return Err(Error::validation(format!("map misses simplices in dimension {q}")));
            }
            for (i, cell) in source.cells(q).iter().enumerate() {
                let y = &self.images[q][i];
                if target.dim_of(y) != q {
                    return Err(Error::validation(format!("image of {} has the wrong dimension", cell.name)));
                }
                for (k, face) in cell.faces.iter().enumerate() {
                    if target.face(y, k) != self.eval(target, face) {
                        return Err(Error::validation(format!("map does not commute with d_{k} on {}", cell.name)));
                    }
                }
            }
        }
        if self.images[0][source.basepoint()] != target.base_simplex(0) {
            return Err(Error::validation("map does not preserve the basepoint"));
        }
        Ok(())
    }
}

impl CrewMap {
    pub fn identity(k: &Crew) -> Self {
        SimplicialMap {
            images: (0..=k.dim())
                .map(|q| (0..k.cells(q).len()).map(|i| Simplex::nondegenerate(q, i)).collect())
                .collect(),
        }
    }

    /// `g ∘ self`, where `self : K -> L` and `g : L -> T`.
    pub fn then<E: Clone, T: Simplicial<Elem = E>>(&self, g: &SimplicialMap<E>, target: &T) -> SimplicialMap<E> {
        SimplicialMap {
            images: self
                .images
                .iter()
                .map(|level| level.iter().map(|x| g.eval(target, x)).collect())
                .collect(),
        }
    }

    /// The induced map on unreduced normalized chains over `field`.
    pub fn chain_map(&self, source: &Crew, target: &Crew, field: Fp) -> ComplexMap {
        let (a, b) = (normalized_chains(source, field), normalized_chains(target, field));
        let maps = (0..=source.dim())
            .map(|q| {
                let mut m = Matrix::zeros(field, b.rank(q), a.rank(q));
                for (i, x) in self.images[q].iter().enumerate() {
                    if x.is_nondegenerate() {
                        m.set(x.base, i, 1 % field.p());
                    }
                }
                m
            })
            .collect();
        ComplexMap::new(a, b, maps).expect("simplicial maps induce chain maps")
    }
}
