//! The anticanonical Hilbert polynomial of a smooth 5-fold.
//!
//! With `720a = (−K)^5` and `144b = (−K)^3·c2`,
//!
//! ```text
//! P(m) = (2m+1)·{ m(m+1)·[(3m²+3m−1)·a + b] + 1 }
//! ```
//!
//! and `P(m) = h⁰(−mK)` for `m ≥ 0` by Kawamata–Viehweg vanishing, which is
//! taken as an axiom here.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{AffineForm, Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HrrError {
    #[error("(-K)^5 = {0} is not positive; -K must be big")]
    NonPositiveVolume(i64),
    #[error("P({m}) = {value} is not an integer; the Chern data is inconsistent")]
    NonIntegral { m: i64, value: Rat },
    #[error("P({m}) = {value} is negative, contradicting vanishing for m >= 0")]
    NegativeValue { m: i64, value: BigInt },
    #[error("m = {0} and m = {1} do not determine (a, b)")]
    SingularPair(i64, i64),
}

/// The intersection numbers `((−K)^5, (−K)^3·c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernData {
    pub k5: i64,
    pub k3c2: i64,
}

impl ChernData {
    pub fn new(k5: i64, k3c2: i64) -> Result<Self, HrrError> {
        if k5 < 1 {
            return Err(HrrError::NonPositiveVolume(k5));
        }
        Ok(ChernData { k5, k3c2 })
    }

    pub fn a(&self) -> Rat {
        Rat::frac(self.k5, 720)
    }

    pub fn b(&self) -> Rat {
        Rat::frac(self.k3c2, 144)
    }

    /// `P(m)` as a polynomial in `m`.
    pub fn hilbert_poly(&self) -> Poly {
        hilbert_poly(&self.a(), &self.b())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PValue {
    pub m: i64,
    pub value: BigInt,
}

fn coefficient_parts(m: &Rat) -> (Rat, Rat, Rat) {
    let odd = Rat::int(2) * m + Rat::one();
    let pair = m * &(m + &Rat::one());
    let quad = Rat::int(3) * &pair - Rat::one();
    let b_coeff = &odd * &pair;
    (&b_coeff * &quad, b_coeff, odd)
}

/// Exact affine form of `P(m)` in `(a, b)`; `m` may be negative.
pub fn p_affine(m: i64) -> AffineForm {
    let (ca, cb, c0) = coefficient_parts(&Rat::int(m));
    AffineForm::new(ca, cb, c0)
}

/// Polynomials `(A(m), B(m), C(m))` with `P(m) = A(m)·a + B(m)·b + C(m)`.
pub fn coefficient_polys() -> (Poly, Poly, Poly) {
    let m = Poly::x();
    let odd = Poly::from_ints(&[1, 2]);
    let pair = &m * &Poly::from_ints(&[1, 1]);
    let quad = &pair.scale(&Rat::int(3)) - &Poly::from_ints(&[1]);
    let b_poly = &odd * &pair;
    (&b_poly * &quad, b_poly, odd)
}

/// `P(m)` as a polynomial in `m` for fixed `(a, b)`.
pub fn hilbert_poly(a: &Rat, b: &Rat) -> Poly {
    let (pa, pb, pc) = coefficient_polys();
    &(&pa.scale(a) + &pb.scale(b)) + &pc
}

/// `P(m)` for the given Chern data, checked for integrality and, when
/// `m ≥ 0`, for nonnegativity.
pub fn p_eval(c: &ChernData, m: i64) -> Result<BigInt, HrrError> {
    let value = p_affine(m).eval(&c.a(), &c.b());
    let Some(n) = value.to_integer() else {
        return Err(HrrError::NonIntegral { m, value });
    };
    if m >= 0 && n.is_negative() {
        return Err(HrrError::NegativeValue { m, value: n });
    }
    Ok(n)
}

pub fn p_table(c: &ChernData, m_max: u32) -> Result<Vec<PValue>, HrrError> {
    (0..=i64::from(m_max))
        .map(|m| p_eval(c, m).map(|value| PValue { m, value }))
        .collect()
}

/// Recovers `(a, b)` from two values of `P` by solving the 2×2 system.
pub fn fit_ab(v1: &PValue, v2: &PValue) -> Result<(Rat, Rat), HrrError> {
    let singular = HrrError::SingularPair(v1.m, v2.m);
    let f1 = p_affine(v1.m);
    let f2 = p_affine(v2.m);
    let det = &f1.coeff_a * &f2.coeff_b - &f2.coeff_a * &f1.coeff_b;
    if det.is_zero() {
        return Err(singular);
    }
    let r1 = Rat::int(v1.value.clone()) - &f1.constant;
    let r2 = Rat::int(v2.value.clone()) - &f2.constant;
    let a = (&r1 * &f2.coeff_b - &r2 * &f1.coeff_b) / det.clone();
    let b = (&f1.coeff_a * &r2 - &f2.coeff_a * &r1) / det;
    Ok((a, b))
}
