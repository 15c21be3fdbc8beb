//! Linear-constraint reasoning over the Riemann–Roch parameters `(a, b)`.

mod constraint;
mod fact;
mod fm;
mod monotone;
mod prop1;
mod split;

use thiserror::Error;

use crate::exact::Rat;

pub use constraint::{
    AxiomSet, Constraint, ConstraintSystem, Origin, OriginParseError, Rel, Sense,
};
pub use fact::{
    derive_lower_bound, fact_to_constraint, merge_branch_facts, strengthen_integral,
    DerivationStep, Fact,
};
pub use fm::{fm_minimize, FmOutcome, Infeasibility, LowerBound, Term};
pub use monotone::{
    difference_form, monotone_concrete, monotone_from, ConcreteMonotone, MonotoneCertificate,
    RayTail, TailPolys, DEFAULT_M_CERT,
};
pub use prop1::{prop1_replay, Prop1Item, Prop1Report};
pub use split::{bound_over_split, split_on_p1, Branch, CaseSplit, P1Case, SplitBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("the hypotheses are contradictory")]
    Infeasible,
    #[error("P({m}) is unbounded below over the system")]
    Unbounded { m: i64 },
    #[error("P({}) - P({m}) is not certified positive (infimum {})", m + 1, fmt_inf(.infimum))]
    NotIncreasing { m: i64, infimum: Option<Rat> },
    #[error("ray positivity test inconclusive from m = {start}; raise the horizon")]
    TailUnknown { start: i64 },
    #[error("derivation replay failed: {0}")]
    Replay(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn fmt_inf(x: &Option<Rat>) -> String {
    x.as_ref().map_or("-inf".to_string(), Rat::to_string)
}
