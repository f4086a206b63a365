//! Pointed finite simplicial sets ("crews") in Eilenberg–Zilber normal form,
//! their products, wedges and cylinders, normalized chains, Dold–Kan
//! simplicial modules, and function complexes.

pub mod chains;
pub mod construct;
pub mod crew;
pub mod mapping;
pub mod maps;
pub mod module;
pub mod operators;
pub mod target;

pub use chains::{normalized_chains, normalized_chains_up_to, reduced_chain_map, reduced_chains};
pub use construct::{power, quotient, reduced_cylinder, simplex_name, Cylinder, Product, Wedge, DEFAULT_CELL_CAP};
pub use crew::{Cell, Crew, CrewFile, Simplex, Violation};
pub use mapping::{
    chain_of_map, enumerate_maps, module_hom, function_complex, pi0_enumerated, pi0_module, Caps, FunctionComplexSlice,
    ModuleStructure, Pi0,
};
pub use maps::{CrewMap, SimplicialMap};
pub use module::{ModElem, SimplicialModule};
pub use target::Simplicial;
