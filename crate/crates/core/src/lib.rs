//! Terms of the internal language of imperative categories, their semantics
//! in relations, partial functions and subprobability kernels, and program
//! logics checked against those semantics.

pub mod backends;
pub mod combinators;
pub mod kernel;
pub mod logics;
pub mod models;
pub mod surface;

pub use num_rational::BigRational;

/// Exact scalar used by the probabilistic backend.
pub type Scalar = BigRational;
/// Subprobability kernels over arbitrary precision rationals.
pub type StochQ = models::Stoch<BigRational>;
/// Subprobability kernels over `i64` rationals (panics on overflow).
pub type Stoch64 = models::Stoch<num_rational::Rational64>;
pub type RelMorphism = backends::Morphism<models::Rel>;
pub type ParMorphism = backends::Morphism<models::Par>;
pub type StochMorphism = backends::Morphism<StochQ>;
