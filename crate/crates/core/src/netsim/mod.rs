//! Distributed multi-source network coding with a `(t, rho)` adversary.
//!
//! [`design`] turns a network instance into source lengths, field parameters
//! and a support-constrained code; [`channel`] simulates the adversarial
//! linear network and audits the sum-rank weights it produces.

pub mod channel;
pub mod design;

use thiserror::Error;

use crate::constraints::ConstraintError;
use crate::construct::ConstructError;
use crate::gf::FieldError;
use crate::sumrank::SumRankError;

pub use channel::{
    audit_weights, lift, lossless_trial, micro_decode_trial, monte_carlo_audit, random_error,
    sample_channel, transmit, trial_rng, AuditParams, AuditReport, ChannelRealization,
    MonteCarloReport,
};
pub use design::{
    build_distributed_code, check_lengths, design_lengths, design_parameters, mincut, split_blocks,
    DesignParameters, DesignResult, LengthViolation, NetworkInstance,
};

/// Largest number of messages or sources handled by the exhaustive designer.
pub const INSTANCE_GUARD: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{what} = {got} exceeds the guard {guard}")]
    Guard {
        what: &'static str,
        got: usize,
        guard: usize,
    },
    #[error("no feasible lengths up to n = {max_n}; constraint on messages {} unmet", one_based(.witness))]
    Infeasible { max_n: usize, witness: Vec<usize> },
    #[error("channel needs N >= n - rho, got N = {big_n}, n = {n}, rho = {rho}")]
    ChannelShape { n: usize, big_n: usize, rho: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    SumRank(#[from] SumRankError),
}

fn one_based(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(|x| (x + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}
