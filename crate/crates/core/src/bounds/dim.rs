//! The two dimension rules.
//!
//! * Nonvanishing: two independent sections of `−mK` give a pencil, so
//!   `P(m) ≥ 2` implies `dim Φ_{|−mK|}(X) ≥ 1`.
//! * Matsusaka–Maehara: `h⁰(mD) > m^r·Dⁿ + r` implies `dim Φ_{|mD|}(X) > r`.
//!   Here `D = −K` and `D⁵ = 720a`; the inequality is strict, and equality
//!   is not a pass.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::derive::{fm_minimize, ConstraintSystem, DerivationStep, Fact, FmOutcome, LowerBound};
use crate::exact::{AffineForm, Rat};
use crate::hrr::p_affine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimRule {
    Nonvanishing,
    Lemma2,
}

impl DimRule {
    pub fn name(self) -> &'static str {
        match self {
            DimRule::Nonvanishing => "nonvanishing",
            DimRule::Lemma2 => "lemma2",
        }
    }
}

/// What a dimension witness rests on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// A lower bound over a constraint system, rounded up when `rounded`.
    Derived {
        certificate: LowerBound,
        rounded: bool,
    },
    /// A fact whose derivation is recorded elsewhere.
    Stated { bound: Rat, strict: bool },
    /// An exact `h⁰` compared with the threshold it has to beat.
    Value { h0: BigInt, threshold: BigInt },
}

/// `dim Φ_{|−mK|}(X) ≥ target_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimWitness {
    pub target_dim: u8,
    pub m: i64,
    pub rule: DimRule,
    pub r_used: Option<i64>,
    /// Slack of the inequality that was checked; always positive.
    pub margin: Rat,
    pub evidence: Evidence,
}

fn least_integer(bound: &Rat, strict: bool) -> BigInt {
    if strict {
        bound.floor() + 1
    } else {
        bound.ceil()
    }
}

/// `P(m) ≥ 2` gives a pencil. Section counts are integers, so a bound is
/// read as the least integer it allows.
pub fn nonvanishing_rule(fact: &Fact) -> Option<DimWitness> {
    if !fact.implies_at_least(2) {
        return None;
    }
    let least = least_integer(&fact.bound, fact.strict);
    let evidence = match fact.derivation.first() {
        Some(DerivationStep::Minimize(lb)) => Evidence::Derived {
            certificate: lb.clone(),
            rounded: fact
                .derivation
                .iter()
                .any(|s| matches!(s, DerivationStep::RoundIntegral)),
        },
        _ => Evidence::Stated {
            bound: fact.bound.clone(),
            strict: fact.strict,
        },
    };
    Some(DimWitness {
        target_dim: 1,
        m: fact.m,
        rule: DimRule::Nonvanishing,
        r_used: None,
        margin: Rat::int(least) - Rat::one(),
        evidence,
    })
}

/// `m^r · d5 + r`.
pub fn lemma2_threshold(m: i64, r: i64, d5: &BigInt) -> BigInt {
    let r_exp = u32::try_from(r).expect("r must be nonnegative");
    BigInt::from(m).pow(r_exp) * d5 + r
}

fn target_for(r: i64) -> u8 {
    u8::try_from(r + 1).expect("r is small")
}

/// Strict comparison of an exact `h⁰` with the threshold.
pub fn lemma2_check(h0: &BigInt, m: i64, r: i64, d5: &BigInt) -> Option<DimWitness> {
    let threshold = lemma2_threshold(m, r, d5);
    (h0 > &threshold).then(|| DimWitness {
        target_dim: target_for(r),
        m,
        rule: DimRule::Lemma2,
        r_used: Some(r),
        margin: Rat::int(h0 - &threshold),
        evidence: Evidence::Value {
            h0: h0.clone(),
            threshold,
        },
    })
}

/// `P(m) − (m^r · 720a + r)` as an affine form in `(a, b)`.
pub fn lemma2_form(m: i64, r: i64) -> AffineForm {
    let r_exp = u32::try_from(r).expect("r must be nonnegative");
    let mr = Rat::int(BigInt::from(m).pow(r_exp));
    let threshold = AffineForm::new(Rat::int(720) * mr, Rat::zero(), Rat::int(r));
    &p_affine(m) - &threshold
}

/// Passes iff the worst-case slack of the strict inequality is positive.
pub fn lemma2_worstcase(cs: &ConstraintSystem, m: i64, r: i64) -> Option<DimWitness> {
    match fm_minimize(cs, &lemma2_form(m, r)) {
        FmOutcome::Minimum {
            value, certificate, ..
        } if value.is_positive() => Some(DimWitness {
            target_dim: target_for(r),
            m,
            rule: DimRule::Lemma2,
            r_used: Some(r),
            margin: value,
            evidence: Evidence::Derived {
                certificate,
                rounded: false,
            },
        }),
        _ => None,
    }
}

/// The slack `lemma2_form(m, r)` with `b` replaced by `slope·a`; the
/// boundary of a constraint `b ≥ slope·a`.
pub fn slack_on_boundary(m: i64, r: i64, slope: &Rat) -> AffineForm {
    let f = lemma2_form(m, r);
    AffineForm::new(&f.coeff_a + slope * &f.coeff_b, Rat::zero(), f.constant)
}
