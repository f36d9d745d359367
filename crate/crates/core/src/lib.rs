//! Numerical geometry of dense complex matrices: operator norm, numerical
//! radius, Crawford number and Davis–Wielandt radius, Birkhoff–James
//! orthogonality and norm-parallelism deciders, and verifiers for the
//! identities and equivalences that connect them.
//!
//! Loops over angles, directions, grid points and ensemble members run on
//! rayon when the `parallel` feature is on. Every reduction is by index, so
//! results do not depend on the thread count.

pub mod config;
pub mod error;
pub mod dw_suite;
pub mod ensemble;
pub mod exec;
pub mod identities;
pub mod io;
mod joint;
pub mod operator;
pub mod ortho;
mod optim;
pub mod radii;
pub mod range;
pub mod rng;
pub mod spectral;
pub mod verdict;

pub use config::ToleranceConfig;
pub use dw_suite::{
    attained_radius_battery, identity_parallel_battery, norm_attainment_battery, power_radius_battery,
    rank_one_battery, shift_truncation_table, ShiftRow,
};
pub use error::{Error, Result};
pub use operator::{
    adjoint, min_modulus, norming_basis, op_norm, rank_one, rayleigh, ComplexMatrix, ComplexVector,
    NormingBasis, RadiusResult, Unimodular, UnitVector, C64,
};
pub use radii::{check_radius_bounds, crawford_number, davis_wielandt_radius, numerical_radius};
pub use identities::{
    best_approximation_identity, buzano_check, gram_shift_residual, norm_crawford_radius_check,
    norm_radius_gap_bound, real_gram_shift_residual, scalar_shift_bound, square_radius_gap_bound,
};
pub use ortho::{
    bj_pythagoras_equivalence, compressed_form, in_numerical_range, is_bj_orthogonal, is_parallel,
    is_r_orthogonal, parallel_dependence_equivalence, r_pythagoras_equivalence,
};
pub use range::{support_profile, SupportProfile};
pub use verdict::{
    Condition, Consistency, DecisionCertificate, EquivalenceBattery, InequalityReport, OptimizerTrace, Verdict,
};
