use std::fmt;

use super::constraint::{Constraint, ConstraintSystem, Origin, Sense};
use super::fm::{fm_minimize, FmOutcome, LowerBound};
use super::DeriveError;
use crate::exact::Rat;
use crate::hrr::p_affine;

/// How a fact was obtained. Replaying the steps in order reproduces the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationStep {
    /// Exact minimization of `P(m)` over the owning system.
    Minimize(LowerBound),
    /// Integer rounding under A3.
    RoundIntegral,
    /// Minimum over the branches of a covering case split.
    MergeBranches(Vec<String>),
}

impl DerivationStep {
    pub fn label(&self) -> &'static str {
        match self {
            DerivationStep::Minimize(_) => "fm_minimize",
            DerivationStep::RoundIntegral => "strengthen_integral",
            DerivationStep::MergeBranches(_) => "merge_branches",
        }
    }
}

/// `P(m) ≥ bound`, or `P(m) > bound` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub m: i64,
    pub bound: Rat,
    pub strict: bool,
    pub derivation: Vec<DerivationStep>,
}

impl Fact {
    pub fn sense(&self) -> Sense {
        Sense::from_strict(self.strict)
    }

    /// Whether this fact implies `P(m) ≥ n` for the integer `n`, given
    /// integrality of `P(m)`.
    pub fn implies_at_least(&self, n: i64) -> bool {
        let least = if self.strict {
            self.bound.floor() + 1
        } else {
            self.bound.ceil()
        };
        least >= n.into()
    }

    /// Re-executes the recorded steps against `cs` and compares the result.
    pub fn replay(&self, cs: &ConstraintSystem) -> Result<(), DeriveError> {
        let mut current: Option<Fact> = None;
        for step in &self.derivation {
            current = Some(match step {
                DerivationStep::Minimize(_) => minimized(cs, self.m)?,
                DerivationStep::RoundIntegral => {
                    let f = current
                        .take()
                        .ok_or(DeriveError::Replay("rounding before a bound"))?;
                    strengthen_integral(&f, cs)
                }
                DerivationStep::MergeBranches(_) => {
                    return Err(DeriveError::Replay("merged facts replay per branch"));
                }
            });
        }
        match current {
            Some(f) if f.bound == self.bound && f.strict == self.strict => Ok(()),
            Some(_) => Err(DeriveError::Replay("replayed bound differs")),
            None => Err(DeriveError::Replay("empty derivation")),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}) {} {}", self.m, self.sense().symbol(), self.bound)
    }
}

fn minimized(cs: &ConstraintSystem, m: i64) -> Result<Fact, DeriveError> {
    match fm_minimize(cs, &p_affine(m)) {
        FmOutcome::Minimum {
            value,
            attained,
            certificate,
        } => Ok(Fact {
            m,
            bound: value,
            strict: !attained,
            derivation: vec![DerivationStep::Minimize(certificate)],
        }),
        FmOutcome::UnboundedBelow => Err(DeriveError::Unbounded { m }),
        FmOutcome::Infeasible(_) => Err(DeriveError::Infeasible),
    }
}

/// Rounds a bound on the integer `P(m)` up to the next admissible integer.
/// Leaves the fact unchanged when `cs` does not assert integrality.
pub fn strengthen_integral(fact: &Fact, cs: &ConstraintSystem) -> Fact {
    if !cs.p_integral() {
        return fact.clone();
    }
    let rounded = if fact.strict {
        fact.bound.floor() + 1
    } else if !fact.bound.is_integer() {
        fact.bound.ceil()
    } else {
        return fact.clone();
    };
    let mut derivation = fact.derivation.clone();
    derivation.push(DerivationStep::RoundIntegral);
    Fact {
        m: fact.m,
        bound: Rat::int(rounded),
        strict: false,
        derivation,
    }
}

/// Minimization followed by integral strengthening.
pub fn derive_lower_bound(cs: &ConstraintSystem, m: i64) -> Result<Fact, DeriveError> {
    if m < 0 {
        return Err(DeriveError::InvalidArgument(format!(
            "m = {m} must be nonnegative"
        )));
    }
    Ok(strengthen_integral(&minimized(cs, m)?, cs))
}

/// `P(m) − bound ≥ 0` (normalized), tagged with the fact it came from.
pub fn fact_to_constraint(fact: &Fact) -> Constraint {
    Origin::Fact {
        m: fact.m,
        bound: fact.bound.clone(),
        strict: fact.strict,
    }
    .constraint()
}

/// Global bound from per-branch facts on the same `P(m)`: the weakest of them.
pub fn merge_branch_facts(labels: Vec<String>, facts: &[Fact]) -> Option<Fact> {
    let first = facts.first()?;
    debug_assert!(facts.iter().all(|f| f.m == first.m));
    let bound = facts.iter().map(|f| &f.bound).min()?.clone();
    let strict = facts.iter().filter(|f| f.bound == bound).all(|f| f.strict);
    Some(Fact {
        m: first.m,
        bound,
        strict,
        derivation: vec![DerivationStep::MergeBranches(labels)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::constraint::AxiomSet;
    use crate::exact::AffineForm;

    fn base() -> ConstraintSystem {
        ConstraintSystem::from_axioms(AxiomSet::full())
    }

    fn bare(m: i64, bound: Rat, strict: bool) -> Fact {
        Fact {
            m,
            bound,
            strict,
            derivation: vec![],
        }
    }

    #[test]
    fn strict_five_rounds_to_six() {
        let f = strengthen_integral(&bare(2, Rat::int(5), true), &base());
        assert_eq!((f.bound, f.strict), (Rat::int(6), false));
    }

    #[test]
    fn integral_bound_unchanged() {
        let f = strengthen_integral(&bare(3, Rat::int(7), false), &base());
        assert_eq!((f.bound, f.strict), (Rat::int(7), false));
        assert!(f.derivation.is_empty());
    }

    #[test]
    fn half_rounds_up() {
        let f = strengthen_integral(&bare(3, Rat::frac(13, 2), false), &base());
        assert_eq!(f.bound, Rat::int(7));
        let f = strengthen_integral(&bare(3, Rat::frac(13, 2), true), &base());
        assert_eq!(f.bound, Rat::int(7));
    }

    #[test]
    fn no_rounding_without_integrality() {
        let cs = ConstraintSystem::from_axioms(AxiomSet::volume_only());
        let f = strengthen_integral(&bare(3, Rat::frac(13, 2), false), &cs);
        assert_eq!(f.bound, Rat::frac(13, 2));
    }

    #[test]
    fn case_p1_two() {
        let cs = base().with_value(1, 2).with_lower(2, 2);
        let f = derive_lower_bound(&cs, 3).unwrap();
        assert_eq!(f.bound, Rat::int(7));
        f.replay(&cs).unwrap();
    }

    #[test]
    fn forced_case_gives_fourteen() {
        let cs = base().with_value(1, 3).with_value(2, 6);
        let f = derive_lower_bound(&cs, 3).unwrap();
        assert_eq!(f.bound, Rat::int(14));
    }

    #[test]
    fn constant_form_at_zero() {
        let f = derive_lower_bound(&base(), 0).unwrap();
        assert_eq!((f.bound, f.strict), (Rat::one(), false));
    }

    #[test]
    fn p2_rounds_after_minimization() {
        let cs = base().with_value(1, 3);
        let f = derive_lower_bound(&cs, 2).unwrap();
        assert_eq!(f.bound, Rat::int(6));
        assert_eq!(
            f.derivation
                .iter()
                .map(DerivationStep::label)
                .collect::<Vec<_>>(),
            ["fm_minimize", "strengthen_integral"]
        );
        f.replay(&cs).unwrap();
    }

    #[test]
    fn infeasible_hypotheses_error() {
        let cs = base().with_value(1, 2).with_lower(1, 3);
        assert_eq!(derive_lower_bound(&cs, 3), Err(DeriveError::Infeasible));
        assert!(derive_lower_bound(&cs, -1).is_err());
    }

    #[test]
    fn fact_constraints() {
        let c = fact_to_constraint(&bare(3, Rat::int(7), false));
        assert_eq!(c.form, AffineForm::from_ints(35, 1, 0));
        let c = fact_to_constraint(&bare(0, Rat::int(1), false));
        assert!(c.form.is_constant() && c.form.constant.is_zero());
        assert_eq!(c.origin.to_string(), "fact:P(0)>=1");
        let c = fact_to_constraint(&bare(1, Rat::zero(), false));
        assert_eq!(
            c.form,
            AffineForm::new(Rat::int(5), Rat::one(), Rat::frac(1, 2))
        );
    }

    #[test]
    fn merge_takes_weakest() {
        let facts = [
            bare(3, Rat::int(35), false),
            bare(3, Rat::int(7), false),
            bare(3, Rat::int(21), false),
        ];
        let merged = merge_branch_facts(vec![], &facts).unwrap();
        assert_eq!(merged.bound, Rat::int(7));
    }

    #[test]
    fn implied_integers() {
        assert!(bare(3, Rat::int(7), false).implies_at_least(7));
        assert!(!bare(3, Rat::int(7), false).implies_at_least(8));
        assert!(bare(3, Rat::frac(13, 2), true).implies_at_least(7));
        assert!(bare(3, Rat::int(1), true).implies_at_least(2));
    }
}
