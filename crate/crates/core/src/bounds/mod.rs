//! Dimension rules, the search for the multiples `r₁, r₂, r₃`, the
//! composition into a birationality bound, and certificates for all of it.

mod audit;
mod certificate;
mod dim;
mod r0;
mod search;
mod solve;
mod verify;

use thiserror::Error;

use crate::bundle::BundleError;
use crate::derive::DeriveError;
use crate::hrr::HrrError;

pub use audit::{audit, AuditReport};
pub use certificate::{
    claims, rules, BoundRecord, BranchWitness, Certificate, ComposeWitness, DimStepWitness,
    FactWitness, GrowthRecord, HrrValuesWitness, Input, MergeWitness, Mode, OracleValuesWitness,
    R0ConcreteWitness, R0WorstWitness, SplitWitness, Step, TailRecord, TermRecord, ValueRecord,
    CERTIFICATE_VERSION,
};
pub use dim::{
    lemma2_check, lemma2_form, lemma2_threshold, lemma2_worstcase, nonvanishing_rule,
    slack_on_boundary, DimRule, DimWitness, Evidence,
};
pub use r0::{certify_r0, certify_r0_poly, R0Certificate, R0_FLOOR};
pub use search::{minimal_r, BundleOracle, DimSource, H0Oracle, DEFAULT_M_MAX, R_MAX};
pub use solve::{
    compose_bound, dimension_basis, example1_bound, oracle_polynomial, solve_concrete,
    solve_oracle, solve_with_oracle, solve_worst_case, Selection, SolveOptions, EXAMPLE_PRINTED_R,
};
pub use verify::{verify, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    Hrr(#[from] HrrError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("no witness for dim >= {target_dim} with m <= {m_max}")]
    Exhausted { target_dim: u8, m_max: i64 },
    #[error("no witness for dim >= {target_dim} at m = {m}")]
    NoWitness { target_dim: u8, m: i64 },
    #[error("cannot certify nonvanishing from r0 = {r0}: {reason}")]
    R0 { r0: i64, reason: String },
    #[error("step {step} failed: {reason}")]
    Step { step: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl BoundsError {
    pub fn step(step: &str, reason: impl Into<String>) -> Self {
        BoundsError::Step {
            step: step.to_string(),
            reason: reason.into(),
        }
    }
}
