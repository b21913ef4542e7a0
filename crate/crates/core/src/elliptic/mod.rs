//! The elliptic kernel E₁, its periodic and modular companions, the elliptic
//! cocycle, q-expansions and the weight-2 span check.

mod e1;
mod qexp;
mod sell;
mod span;

pub use e1::{
    e1, e1_mod_defect, e1_period_defects, e1_periodic_n, e1_star, e1_star_distribution_defect, hecke_tm, random_tau_z, slash,
    TauPoint,
};
pub use qexp::{e1_qexp, eisenstein2_basis, DirichletCharacter, EisensteinSeries, QExpansion};
pub use sell::{
    default_offset, partial_eisenstein_product, sell_cocycle, sell_cocycle_defect, sell_distribution_defect,
    sell_modularity_defect, sell_star, sell_star_unchecked,
};
pub use span::{admissible_triples, bg_product_check, bg_span_check, least_squares, LeastSquares, SpanReport};
