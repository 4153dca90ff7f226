//! Support-constrained linearized Reed-Solomon codes over finite-field towers,
//! and their use for distributed multi-source network coding.

pub mod constraints;
pub mod construct;
pub mod gf;
pub mod linalg;
pub mod lrs;
pub mod netsim;
pub mod skewpoly;
pub mod sumrank;
