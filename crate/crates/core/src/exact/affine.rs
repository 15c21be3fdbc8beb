use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rat;

/// `coeff_a·a + coeff_b·b + constant` over the two Riemann–Roch parameters.
///
/// Serializes as the triple `[coeff_a, coeff_b, constant]`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[Rat; 3]", into = "[Rat; 3]")]
pub struct AffineForm {
    pub coeff_a: Rat,
    pub coeff_b: Rat,
    pub constant: Rat,
}

impl AffineForm {
    pub fn new(coeff_a: Rat, coeff_b: Rat, constant: Rat) -> Self {
        AffineForm {
            coeff_a,
            coeff_b,
            constant,
        }
    }

    pub fn from_ints(coeff_a: i64, coeff_b: i64, constant: i64) -> Self {
        AffineForm::new(Rat::int(coeff_a), Rat::int(coeff_b), Rat::int(constant))
    }

    pub fn constant(c: Rat) -> Self {
        AffineForm::new(Rat::zero(), Rat::zero(), c)
    }

    /// The coordinate function `a`.
    pub fn var_a() -> Self {
        AffineForm::from_ints(1, 0, 0)
    }

    /// The coordinate function `b`.
    pub fn var_b() -> Self {
        AffineForm::from_ints(0, 1, 0)
    }

    pub fn eval(&self, a: &Rat, b: &Rat) -> Rat {
        &self.coeff_a * a + &self.coeff_b * b + &self.constant
    }

    pub fn scale(&self, k: &Rat) -> AffineForm {
        AffineForm::new(&self.coeff_a * k, &self.coeff_b * k, &self.constant * k)
    }

    pub fn is_constant(&self) -> bool {
        self.coeff_a.is_zero() && self.coeff_b.is_zero()
    }

    /// Divides by `|coeff_b|`, or by `|coeff_a|` when `b` is absent, so that
    /// `35a + b ≥ 0` and `84·(35a + b) ≥ 0` share one representative. Constant
    /// forms are returned unchanged.
    pub fn normalized(&self) -> AffineForm {
        let pivot = if !self.coeff_b.is_zero() {
            self.coeff_b.abs()
        } else if !self.coeff_a.is_zero() {
            self.coeff_a.abs()
        } else {
            return self.clone();
        };
        self.scale(&pivot.recip().expect("nonzero pivot"))
    }
}

/// Exact value `f(a, b)`.
pub fn affine_eval(f: &AffineForm, a: &Rat, b: &Rat) -> Rat {
    f.eval(a, b)
}

impl From<[Rat; 3]> for AffineForm {
    fn from([coeff_a, coeff_b, constant]: [Rat; 3]) -> Self {
        AffineForm::new(coeff_a, coeff_b, constant)
    }
}

impl From<AffineForm> for [Rat; 3] {
    fn from(f: AffineForm) -> Self {
        [f.coeff_a, f.coeff_b, f.constant]
    }
}

impl Add for &AffineForm {
    type Output = AffineForm;
    fn add(self, rhs: &AffineForm) -> AffineForm {
        AffineForm::new(
            &self.coeff_a + &rhs.coeff_a,
            &self.coeff_b + &rhs.coeff_b,
            &self.constant + &rhs.constant,
        )
    }
}

impl Sub for &AffineForm {
    type Output = AffineForm;
    fn sub(self, rhs: &AffineForm) -> AffineForm {
        AffineForm::new(
            &self.coeff_a - &rhs.coeff_a,
            &self.coeff_b - &rhs.coeff_b,
            &self.constant - &rhs.constant,
        )
    }
}

impl Neg for &AffineForm {
    type Output = AffineForm;
    fn neg(self) -> AffineForm {
        self.scale(&Rat::int(-1))
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})a + ({})b + ({})",
            self.coeff_a, self.coeff_b, self.constant
        )
    }
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
