//! Certified growth `P(m+1) > P(m)` from some `m0` on.
//!
//! A finite range is checked one `m` at a time; everything beyond `m_cert`
//! is covered by a single ray certificate on univariate polynomials in `m`.

use serde::{Deserialize, Serialize};

use super::constraint::{Constraint, ConstraintSystem};
use super::fm::{fm_minimize, FmOutcome, LowerBound};
use super::DeriveError;
use crate::exact::{poly_nonneg_on_ray, poly_pos_on_ray, AffineForm, Poly, Rat, RayCheck};
use crate::hrr::{coefficient_polys, p_affine};

pub const DEFAULT_M_CERT: i64 = 64;

/// `P(m+1) − P(m)` as an affine form.
pub fn difference_form(m: i64) -> AffineForm {
    &p_affine(m + 1) - &p_affine(m)
}

/// Polynomials bounding `P(m+1) − P(m)` from below on a ray, given
/// `b ≥ slope_b·a + offset_b` and `a ≥ a_min`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailPolys {
    /// Coefficient of `b` in the difference; must be ≥ 0 to substitute the b floor.
    pub b_weight: Poly,
    /// Coefficient of `a` after substituting the b floor; must be ≥ 0.
    pub a_weight: Poly,
    /// The resulting lower bound; must be > 0.
    pub floor: Poly,
}

impl TailPolys {
    pub fn new(b_floor: &AffineForm, a_floor: &AffineForm) -> Option<TailPolys> {
        if !b_floor.coeff_b.is_positive()
            || !a_floor.coeff_b.is_zero()
            || !a_floor.coeff_a.is_positive()
        {
            return None;
        }
        let slope_b = -&b_floor.coeff_a / &b_floor.coeff_b;
        let offset_b = -&b_floor.constant / &b_floor.coeff_b;
        let a_min = -&a_floor.constant / &a_floor.coeff_a;
        let (pa, pb, pc) = coefficient_polys();
        let alpha = pa.forward_difference();
        let beta = pb.forward_difference();
        let gamma = pc.forward_difference();
        let a_weight = &alpha + &beta.scale(&slope_b);
        let floor = &(&a_weight.scale(&a_min) + &beta.scale(&offset_b)) + &gamma;
        Some(TailPolys {
            b_weight: beta,
            a_weight,
            floor,
        })
    }

    pub fn certified_from(&self, start: i64) -> bool {
        let s = Rat::int(start);
        poly_nonneg_on_ray(&self.b_weight, &s) == RayCheck::CertifiedNonneg
            && poly_nonneg_on_ray(&self.a_weight, &s) == RayCheck::CertifiedNonneg
            && poly_pos_on_ray(&self.floor, &s) == RayCheck::CertifiedNonneg
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayTail {
    pub start: i64,
    pub b_floor: Constraint,
    pub a_floor: Constraint,
    pub polys: TailPolys,
}

/// Growth certificate over a constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneCertificate {
    pub m0: i64,
    pub m_cert: i64,
    /// `P(m+1) − P(m) ≥ bound` (bound > 0, or strict at 0) for `m0 ≤ m ≤ m_cert`.
    pub steps: Vec<(i64, LowerBound)>,
    pub tail: RayTail,
}

fn step_check(cs: &ConstraintSystem, m: i64) -> Result<LowerBound, DeriveError> {
    match fm_minimize(cs, &difference_form(m)) {
        FmOutcome::Minimum {
            value,
            attained,
            certificate,
        } if value.is_positive() || (value.is_zero() && !attained) => Ok(certificate),
        FmOutcome::Minimum { value, .. } => Err(DeriveError::NotIncreasing {
            m,
            infimum: Some(value),
        }),
        FmOutcome::UnboundedBelow => Err(DeriveError::NotIncreasing { m, infimum: None }),
        FmOutcome::Infeasible(_) => Err(DeriveError::Infeasible),
    }
}

fn find_tail(cs: &ConstraintSystem, start: i64) -> Option<RayTail> {
    let b_floors = cs
        .constraints()
        .iter()
        .filter(|c| c.form.coeff_b.is_positive());
    for b_floor in b_floors {
        let a_floors = cs
            .constraints()
            .iter()
            .filter(|c| c.form.coeff_b.is_zero() && c.form.coeff_a.is_positive());
        for a_floor in a_floors {
            let Some(polys) = TailPolys::new(&b_floor.form, &a_floor.form) else {
                continue;
            };
            if polys.certified_from(start) {
                return Some(RayTail {
                    start,
                    b_floor: b_floor.clone(),
                    a_floor: a_floor.clone(),
                    polys,
                });
            }
        }
    }
    None
}

/// Certifies `P(m+1) > P(m)` for every `m ≥ m0` over `cs`.
pub fn monotone_from(
    cs: &ConstraintSystem,
    m0: i64,
    m_cert: i64,
) -> Result<MonotoneCertificate, DeriveError> {
    if m0 < 1 || m_cert < m0 {
        return Err(DeriveError::InvalidArgument(format!(
            "need 1 <= m0 <= m_cert, got m0={m0}, m_cert={m_cert}"
        )));
    }
    let steps = (m0..=m_cert)
        .map(|m| step_check(cs, m).map(|c| (m, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let tail = find_tail(cs, m_cert + 1).ok_or(DeriveError::TailUnknown { start: m_cert + 1 })?;
    Ok(MonotoneCertificate {
        m0,
        m_cert,
        steps,
        tail,
    })
}

/// Growth certificate for a fixed polynomial `h(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteMonotone {
    pub m0: i64,
    pub m_cert: i64,
    pub difference: Poly,
}

/// Checks `h(m+1) > h(m)` pointwise on `[m0, m_cert]` and by the ray test beyond.
pub fn monotone_concrete(h: &Poly, m0: i64, m_cert: i64) -> Result<ConcreteMonotone, DeriveError> {
    if m_cert < m0 {
        return Err(DeriveError::InvalidArgument(format!(
            "need m0 <= m_cert, got m0={m0}, m_cert={m_cert}"
        )));
    }
    let difference = h.forward_difference();
    for m in m0..=m_cert {
        let d = difference.eval(&Rat::int(m));
        if !d.is_positive() {
            return Err(DeriveError::NotIncreasing {
                m,
                infimum: Some(d),
            });
        }
    }
    if poly_pos_on_ray(&difference, &Rat::int(m_cert + 1)) != RayCheck::CertifiedNonneg {
        return Err(DeriveError::TailUnknown { start: m_cert + 1 });
    }
    Ok(ConcreteMonotone {
        m0,
        m_cert,
        difference,
    })
}
