//! Numerical toolkit for Bohr-type inequalities of integral operators on bounded
//! analytic functions of the unit disk.
//!
//! * [`series`]: truncated power series and the binomial weights of `(1-x)^(-β)`.
//! * [`corpus`]: Schur-class test functions and the extremal automorphisms.
//! * [`operators`]: β-Cesàro, `C_β`, Bernardi, Libera, Alexander and primitive
//!   operators, their majorant series and a quadrature cross-check.
//! * [`radii`]: sup bounds, radius equations and the certified root finder.
//! * [`sharpness`]: extremal decompositions, remainder checks and violation search.

// Guards are written as `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod operators;
pub mod quadrature;
pub mod radii;
pub mod series;
pub mod sharpness;
pub mod summation;

pub use corpus::{random_schur, schwarz_factor, taylor_coeffs, validate_membership, BoundedFunction};
pub use error::{BohrError, Result};
pub use operators::{majorant_of, majorant_value, operator_coeffs, quadrature_value, OperatorKind};
pub use radii::{closed_bound, radius_equation, solve_radius, RadiusFamily, RadiusProblem, RadiusResult};
pub use series::{binomial_coeffs, cauchy_product, cumulative_identity_residual, BinomialWeights, CoefficientSequence};
pub use sharpness::{Decomposition, ExtremalProblem};

/// Mixes a master seed with a sample index (SplitMix64 finalizer over
/// `seed + (index + 1) * 0x9E3779B97F4A7C15`).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
