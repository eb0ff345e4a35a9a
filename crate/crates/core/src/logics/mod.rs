//! Program logics over the three backends: triples, couplings, and the
//! randomized rule and law campaigns.

pub mod coupling;
pub mod lp;
pub mod ops;
pub mod sem;
pub mod triple;
pub mod random;
pub mod rules;
pub mod campaign;
pub mod laws;
pub mod suites;
