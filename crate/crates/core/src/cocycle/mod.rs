//! The affine and trigonometric cocycles, their scalar shadows Ψ_δ and Φ_N,
//! and the unit matrices of real quadratic fields.

mod affine;
mod mult;
mod scalar;
mod trigsum;

pub use affine::{omega_wedge, orlik_solomon_defect, saff, saff_symbol, RatFunSum, RatFunValue};
pub use mult::{
    cocycle_defect_n, delta_dual, eval_at, guarded_samples, max_abs_on_samples, sdelta_cocycle_defects,
    sdelta_star, sdelta_star_counted, smult_cocycle, smult_star, smult_star_unchecked, symbol_of_tuple,
    DEFAULT_DET_CAP,
};
pub use scalar::{phi_n, psi_delta, unit_matrix};
pub use trigsum::{abs_f64, mean, spread, LinearFormQ, TrigFactor, TrigFormalSum};
