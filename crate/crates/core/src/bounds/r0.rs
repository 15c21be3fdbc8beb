//! Nonvanishing of `|−rK|` for every `r ≥ r0`.

use super::BoundsError;
use crate::derive::{
    derive_lower_bound, monotone_from, ConstraintSystem, Fact, MonotoneCertificate,
};
use crate::exact::{poly_nonneg_on_ray, Poly, Rat, RayCheck};

/// The smallest admissible `r0` in the composition rule.
pub const R0_FLOOR: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum R0Certificate {
    /// `P(r0) ≥ 1` over a system, plus growth from `r0` on.
    WorstCase {
        r0: i64,
        base: Fact,
        growth: MonotoneCertificate,
    },
    /// `p(m) ≥ 1` checked on `[r0, m_cert]` and by a ray test beyond.
    Concrete { r0: i64, m_cert: i64, poly: Poly },
}

impl R0Certificate {
    pub fn r0(&self) -> i64 {
        match self {
            R0Certificate::WorstCase { r0, .. } | R0Certificate::Concrete { r0, .. } => *r0,
        }
    }
}

fn check_floor(r0: i64) -> Result<(), BoundsError> {
    if r0 < R0_FLOOR {
        return Err(BoundsError::InvalidArgument(format!(
            "r0 = {r0} is below the admissible floor {R0_FLOOR}"
        )));
    }
    Ok(())
}

pub fn certify_r0(
    cs: &ConstraintSystem,
    r0: i64,
    m_cert: i64,
) -> Result<R0Certificate, BoundsError> {
    check_floor(r0)?;
    let base = derive_lower_bound(cs, r0)?;
    if !base.implies_at_least(1) {
        return Err(BoundsError::R0 {
            r0,
            reason: format!("only {base} is derivable"),
        });
    }
    let growth = monotone_from(cs, r0, m_cert)?;
    Ok(R0Certificate::WorstCase { r0, base, growth })
}

/// For a known section-count polynomial.
pub fn certify_r0_poly(p: &Poly, r0: i64, m_cert: i64) -> Result<R0Certificate, BoundsError> {
    check_floor(r0)?;
    if m_cert < r0 {
        return Err(BoundsError::InvalidArgument(format!(
            "m_cert = {m_cert} is below r0 = {r0}"
        )));
    }
    for m in r0..=m_cert {
        let v = p.eval(&Rat::int(m));
        if v < Rat::one() {
            return Err(BoundsError::R0 {
                r0,
                reason: format!("h0(-{m}K) = {v}"),
            });
        }
    }
    let shifted = p - &Poly::constant(Rat::one());
    if poly_nonneg_on_ray(&shifted, &Rat::int(m_cert + 1)) != RayCheck::CertifiedNonneg {
        return Err(BoundsError::R0 {
            r0,
            reason: format!("ray test inconclusive from m = {}", m_cert + 1),
        });
    }
    Ok(R0Certificate::Concrete {
        r0,
        m_cert,
        poly: p.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{AxiomSet, Origin};
    use crate::hrr::ChernData;

    fn basis() -> ConstraintSystem {
        ConstraintSystem::from_axioms(AxiomSet::integral_only()).with_origin(Origin::Fact {
            m: 3,
            bound: Rat::int(7),
            strict: false,
        })
    }

    #[test]
    fn worst_case_from_three() {
        let cert = certify_r0(&basis(), 3, 64).unwrap();
        assert_eq!(cert.r0(), 3);
        if let R0Certificate::WorstCase { base, growth, .. } = cert {
            assert_eq!(base.bound, Rat::int(7));
            assert_eq!(growth.tail.start, 65);
        }
    }

    #[test]
    fn floor_is_enforced() {
        assert!(matches!(
            certify_r0(&basis(), 2, 64),
            Err(BoundsError::InvalidArgument(_))
        ));
    }

    #[test]
    fn concrete_by_evaluation() {
        let p = ChernData::new(6250, 2750).unwrap().hilbert_poly();
        assert!(certify_r0_poly(&p, 3, 64).is_ok());
        assert!(certify_r0_poly(&Poly::zero(), 3, 64).is_err());
    }
}
