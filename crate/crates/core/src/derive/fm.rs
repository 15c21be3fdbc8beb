//! Exact minimization of an affine form over a two-variable polyhedron.
//!
//! The objective is lifted into a third variable `t` with the row `t − f ≥ 0`;
//! eliminating `b` and then `a` leaves bounds on `t` alone. Every row carries
//! its nonnegative multipliers over the input constraints, so each reported
//! bound comes with a Farkas combination that can be checked by substitution.

use serde::{Deserialize, Serialize};

use super::constraint::{Constraint, ConstraintSystem, Origin, Sense};
use crate::exact::{AffineForm, Rat};

/// One weighted hypothesis in a [`LowerBound`] combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub origin: Origin,
    pub form: AffineForm,
    pub strict: bool,
    pub multiplier: Rat,
}

/// `objective − bound = Σ multiplierᵢ · formᵢ`, with every `formᵢ ≥ 0` (or `> 0`)
/// and every multiplier nonnegative. Hence `objective ≥ bound`, strictly when
/// a strict form carries positive weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub objective: AffineForm,
    pub bound: Rat,
    pub strict: bool,
    pub terms: Vec<Term>,
}

impl LowerBound {
    /// Re-checks the combination by arithmetic alone.
    pub fn check(&self) -> Result<(), String> {
        let mut sum = AffineForm::default();
        let mut strict_weight = false;
        for t in &self.terms {
            if t.multiplier.is_negative() {
                return Err(format!("negative multiplier on {}", t.origin));
            }
            if t.strict && t.multiplier.is_positive() {
                strict_weight = true;
            }
            sum = &sum + &t.form.scale(&t.multiplier);
        }
        let target = &self.objective - &AffineForm::constant(self.bound.clone());
        if sum != target {
            return Err(format!(
                "combination {sum} does not equal objective − bound {target}"
            ));
        }
        if self.strict && !strict_weight {
            return Err("strict bound claimed without a weighted strict hypothesis".into());
        }
        Ok(())
    }
}

/// `Σ multiplierᵢ · formᵢ` is a constant that violates its own sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub constant: Rat,
    pub strict: bool,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmOutcome {
    /// Infimum of the objective; `attained` is false when only a strict bound holds.
    Minimum {
        value: Rat,
        attained: bool,
        certificate: LowerBound,
    },
    UnboundedBelow,
    Infeasible(Infeasibility),
}

impl FmOutcome {
    pub fn minimum(&self) -> Option<&Rat> {
        match self {
            FmOutcome::Minimum { value, .. } => Some(value),
            _ => None,
        }
    }
}

const A: usize = 0;
const B: usize = 1;
const T: usize = 2;

#[derive(Clone, PartialEq, Eq)]
struct Row {
    coeffs: [Rat; 3],
    constant: Rat,
    strict: bool,
    multipliers: Vec<Rat>,
}

impl Row {
    fn scaled(&self, k: &Rat) -> Row {
        Row {
            coeffs: [
                &self.coeffs[0] * k,
                &self.coeffs[1] * k,
                &self.coeffs[2] * k,
            ],
            constant: &self.constant * k,
            strict: self.strict,
            multipliers: self.multipliers.iter().map(|x| x * k).collect(),
        }
    }

    fn plus(&self, other: &Row) -> Row {
        Row {
            coeffs: [
                &self.coeffs[0] + &other.coeffs[0],
                &self.coeffs[1] + &other.coeffs[1],
                &self.coeffs[2] + &other.coeffs[2],
            ],
            constant: &self.constant + &other.constant,
            strict: self.strict || other.strict,
            multipliers: self
                .multipliers
                .iter()
                .zip(&other.multipliers)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    /// Scale so the leading nonzero of `(t, a, b, constant)` has magnitude one.
    fn normalize(self) -> Row {
        let pivot = [
            &self.coeffs[T],
            &self.coeffs[A],
            &self.coeffs[B],
            &self.constant,
        ]
        .into_iter()
        .find(|c| !c.is_zero())
        .map(Rat::abs);
        match pivot {
            Some(p) => self.scaled(&p.recip().expect("nonzero pivot")),
            None => self,
        }
    }

    fn same_inequality(&self, other: &Row) -> bool {
        self.coeffs == other.coeffs
            && self.constant == other.constant
            && self.strict == other.strict
    }
}

fn eliminate(rows: Vec<Row>, var: usize) -> Vec<Row> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        if r.coeffs[var].is_positive() {
            pos.push(r);
        } else if r.coeffs[var].is_negative() {
            neg.push(r);
        } else {
            out.push(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let combined = p.scaled(&-&n.coeffs[var]).plus(&n.scaled(&p.coeffs[var]));
            out.push(combined);
        }
    }
    let mut deduped: Vec<Row> = Vec::with_capacity(out.len());
    for r in out.into_iter().map(Row::normalize) {
        // a vacuous constant row adds nothing
        if r.coeffs.iter().all(Rat::is_zero)
            && (r.constant.is_positive() || (!r.strict && r.constant.is_zero()))
        {
            continue;
        }
        if !deduped.iter().any(|d| d.same_inequality(&r)) {
            deduped.push(r);
        }
    }
    deduped
}

fn terms(constraints: &[Constraint], row: &Row, scale: &Rat) -> Vec<Term> {
    constraints
        .iter()
        .zip(&row.multipliers)
        .filter(|(_, m)| !m.is_zero())
        .map(|(c, m)| Term {
            origin: c.origin.clone(),
            form: c.form.clone(),
            strict: c.sense.is_strict(),
            multiplier: m * scale,
        })
        .collect()
}

/// Exact infimum of `f` over the feasible region of `cs`.
pub fn fm_minimize(cs: &ConstraintSystem, f: &AffineForm) -> FmOutcome {
    let constraints = cs.constraints();
    let n = constraints.len();
    let unit = |i: usize| {
        let mut v = vec![Rat::zero(); n + 1];
        v[i] = Rat::one();
        v
    };
    let mut rows: Vec<Row> = constraints
        .iter()
        .enumerate()
        .map(|(i, c)| Row {
            coeffs: [c.form.coeff_a.clone(), c.form.coeff_b.clone(), Rat::zero()],
            constant: c.form.constant.clone(),
            strict: c.sense == Sense::Strict,
            multipliers: unit(i),
        })
        .collect();
    rows.push(Row {
        coeffs: [-&f.coeff_a, -&f.coeff_b, Rat::one()],
        constant: -&f.constant,
        strict: false,
        multipliers: unit(n),
    });

    let rows = eliminate(eliminate(rows, B), A);

    // rows are now c·t + k (≥ or >) 0 with c ≥ 0
    for r in rows.iter().filter(|r| r.coeffs[T].is_zero()) {
        let violated = r.constant.is_negative() || (r.strict && r.constant.is_zero());
        if violated {
            return FmOutcome::Infeasible(Infeasibility {
                constant: r.constant.clone(),
                strict: r.strict,
                terms: terms(constraints, r, &Rat::one()),
            });
        }
    }
    let lower: Vec<(Rat, &Row)> = rows
        .iter()
        .filter(|r| r.coeffs[T].is_positive())
        .map(|r| (-&r.constant / &r.coeffs[T], r))
        .collect();
    let Some(best) = lower.iter().map(|(q, _)| q).max().cloned() else {
        return FmOutcome::UnboundedBelow;
    };
    let at_best: Vec<&Row> = lower
        .iter()
        .filter(|(q, _)| *q == best)
        .map(|(_, r)| *r)
        .collect();
    let attained = at_best.iter().all(|r| !r.strict);
    // prefer a strict witness when the infimum is not attained
    let witness = at_best
        .iter()
        .find(|r| r.strict == !attained)
        .copied()
        .unwrap_or(at_best[0]);
    let scale = witness.coeffs[T].recip().expect("positive t coefficient");
    let certificate = LowerBound {
        objective: f.clone(),
        bound: best.clone(),
        strict: witness.strict,
        terms: terms(constraints, witness, &scale),
    };
    debug_assert!(certificate.check().is_ok());
    FmOutcome::Minimum {
        value: best,
        attained,
        certificate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::constraint::{AxiomSet, Rel};
    use crate::hrr::p_affine;

    fn base() -> ConstraintSystem {
        ConstraintSystem::from_axioms(AxiomSet::full())
    }

    fn min_of(cs: &ConstraintSystem, f: &AffineForm) -> (Rat, bool) {
        match fm_minimize(cs, f) {
            FmOutcome::Minimum {
                value,
                attained,
                certificate,
            } => {
                certificate.check().unwrap();
                (value, attained)
            }
            other => panic!("expected a minimum, got {other:?}"),
        }
    }

    #[test]
    fn case_p1_zero() {
        let cs = base().with_value(1, 0).with_lower(2, 0);
        assert_eq!(min_of(&cs, &p_affine(3)), (Rat::int(35), true));
    }

    #[test]
    fn case_p1_one() {
        let cs = base().with_value(1, 1).with_lower(2, 1);
        assert_eq!(min_of(&cs, &p_affine(3)), (Rat::int(21), true));
    }

    #[test]
    fn volume_axiom_alone() {
        let cs = ConstraintSystem::from_axioms(AxiomSet::volume_only());
        assert_eq!(min_of(&cs, &AffineForm::var_a()), (Rat::frac(1, 720), true));
        assert_eq!(
            fm_minimize(&cs, &AffineForm::var_b()),
            FmOutcome::UnboundedBelow
        );
    }

    #[test]
    fn strict_infimum_not_attained() {
        let cs = ConstraintSystem::from_axioms(AxiomSet::volume_only())
            .with_origin(Origin::hypothesis(1, Rel::Gt, 3))
            .with_origin(Origin::hypothesis(1, Rel::Le, 4));
        // P(1) = 30a + 6b + 3 > 3 has infimum 3, never reached
        let (v, attained) = min_of(&cs, &p_affine(1));
        assert_eq!(v, Rat::int(3));
        assert!(!attained);
    }

    #[test]
    fn contradictory_hypotheses() {
        let cs = base().with_value(1, 2).with_lower(1, 3);
        assert!(matches!(
            fm_minimize(&cs, &p_affine(3)),
            FmOutcome::Infeasible(_)
        ));
        let cs = ConstraintSystem::from_axioms(AxiomSet::volume_only())
            .with_origin(Origin::hypothesis(1, Rel::Gt, 3))
            .with_origin(Origin::hypothesis(1, Rel::Le, 3));
        match fm_minimize(&cs, &AffineForm::var_a()) {
            FmOutcome::Infeasible(inf) => assert!(inf.strict),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_objective() {
        assert_eq!(min_of(&base(), &p_affine(0)), (Rat::one(), true));
    }

    #[test]
    fn tampered_combination_is_rejected() {
        let cs = base().with_value(1, 0).with_lower(2, 0);
        let FmOutcome::Minimum {
            mut certificate, ..
        } = fm_minimize(&cs, &p_affine(3))
        else {
            panic!()
        };
        certificate.bound = Rat::int(36);
        assert!(certificate.check().is_err());
        certificate.bound = Rat::int(35);
        certificate.strict = true;
        assert!(certificate.check().is_err());
        certificate.strict = false;
        certificate.terms[0].multiplier = -&certificate.terms[0].multiplier;
        assert!(certificate.check().is_err());
    }
}
