//! Finite-degree homotopy invariants on finite simplicial models.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`], [`linalg`]: exact arithmetic and linear algebra over F_p.
//! * [`complex`]: bounded chain complexes, chain maps and Hom complexes.
//! * [`group_ring`]: finite groups, augmentation-ideal powers and gentle
//!   (polynomial) functions.
//! * [`simplicial`]: pointed finite simplicial sets, Dold–Kan modules and
//!   function complexes.
//! * [`invariants`]: the maps `μ_r` and `ν`, simplicial degree and class
//!   separation.
//! * [`keys`]: sectors, half-keys and keys of commutative squares of chain
//!   complexes.
//! * [`catalog`], [`suites`]: object references, file formats and the
//!   verification suites driven by the CLI.

pub mod error;
pub mod field;
pub mod linalg;
pub mod complex;
pub mod group_ring;
pub mod simplicial;
pub mod invariants;
pub mod keys;
pub mod catalog;
pub mod suites;
mod parallel;

pub use error::{Error, Result};
pub use field::{Fp, FpScalar};
