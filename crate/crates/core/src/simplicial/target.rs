use std::fmt::Debug;
use std::hash::Hash;

use crate::error::Result;

use super::operators::{codegeneracy, coface};

/// A pointed simplicial set whose simplices can be listed degreewise.
/// Implemented by crews and by simplicial modules.
pub trait Simplicial: Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn dim_of(&self, x: &Self::Elem) -> usize;

    /// `θ^*(x)` for a monotone `θ : [m] -> [dim x]`.
    fn restrict(&self, x: &Self::Elem, theta: &[usize]) -> Self::Elem;

    /// The basepoint, degenerated to dimension `q`.
    fn base_simplex(&self, q: usize) -> Self::Elem;

    /// All `q`-simplices (degenerate ones included), in canonical order.
    /// Fails when there are more than `cap`.
    fn elements(&self, q: usize, cap: usize) -> Result<Vec<Self::Elem>>;

    fn face(&self, x: &Self::Elem, i: usize) -> Self::Elem {
        let q = self.dim_of(x);
        self.restrict(x, &coface(q, i))
    }

    fn degeneracy(&self, x: &Self::Elem, j: usize) -> Self::Elem {
        let q = self.dim_of(x);
        self.restrict(x, &codegeneracy(q, j))
    }

    /// Whether `x` lies in the image of `s_j`.
    fn degenerate_at(&self, x: &Self::Elem, j: usize) -> bool {
        self.degeneracy(&self.face(x, j), j) == *x
    }

    fn is_degenerate(&self, x: &Self::Elem) -> bool {
        (0..self.dim_of(x)).any(|j| self.degenerate_at(x, j))
    }
}
