//! Finite groups, group rings over F_p, powers of the augmentation ideal and
//! gentle (polynomial) functions.

mod gentle;
mod group;
mod ring;

pub use gentle::{
    binomial, check_composition_bound, check_coprime_relation, check_elementary_nilpotency,
    check_integer_polynomial, check_perfect_stability, check_product_gentle, check_projection_filtration,
    check_pushforward_containment, defect_of_functionals, degree_of_functionals, gentle_defect, gentle_defect_in,
    gentle_degree, gentle_degree_in, CompositionReport, Defect, DifferenceReport, GroupFunction, GroupMap,
    NilpotencyReport, PerfectReport, ProjectionReport, VectorFunction,
};
pub use group::{FinGroup, MAX_GROUP_ORDER};
pub use ring::{pushforward, AugFiltration, Generator, GroupRingElt, PowerLimit};
