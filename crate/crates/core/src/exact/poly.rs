//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rat;

/// Coefficients indexed by degree, trailing zeros trimmed. The zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

/// Outcome of the sufficient positivity test on a ray `[m0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayCheck {
    CertifiedNonneg,
    Unknown,
}

impl Poly {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rat::int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `m`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `m + c`.
    pub fn linear(c: Rat) -> Self {
        Poly::new(vec![c, Rat::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Rat::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(x + shift)` expanded in the new variable.
    pub fn shift(&self, shift: &Rat) -> Poly {
        let step = Poly::linear(shift.clone());
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * &step) + &Poly::constant(c.clone())
        })
    }

    /// `p(x + 1) - p(x)`.
    pub fn forward_difference(&self) -> Poly {
        &self.shift(&Rat::one()) - self
    }

    /// Newton interpolation through `(x_i, y_i)`; abscissae must be distinct.
    pub fn interpolate(points: &[(Rat, Rat)]) -> Option<Poly> {
        let n = points.len();
        let mut table: Vec<Rat> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                let dx = &points[i].0 - &points[i - level].0;
                let dy = &table[i] - &table[i - 1];
                table[i] = dy.checked_div(&dx).ok()?;
            }
        }
        let mut result = Poly::zero();
        let mut basis = Poly::constant(Rat::one());
        for (i, coeff) in table.iter().enumerate() {
            result = &result + &basis.scale(coeff);
            basis = &basis * &Poly::linear(-&points[i].0);
        }
        Some(result)
    }
}

/// Sufficient test for `p >= 0` on `[m0, ∞)`: every coefficient of `p(m0 + t)`
/// is nonnegative. Never certifies a polynomial that dips below zero.
pub fn poly_nonneg_on_ray(p: &Poly, m0: &Rat) -> RayCheck {
    if p.shift(m0).coeffs().iter().all(|c| !c.is_negative()) {
        RayCheck::CertifiedNonneg
    } else {
        RayCheck::Unknown
    }
}

/// Strict variant: nonnegative shifted coefficients and a positive constant term.
pub fn poly_pos_on_ray(p: &Poly, m0: &Rat) -> RayCheck {
    let shifted = p.shift(m0);
    if shifted.coeff(0).is_positive() && shifted.coeffs().iter().all(|c| !c.is_negative()) {
        RayCheck::CertifiedNonneg
    } else {
        RayCheck::Unknown
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(x * y);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})m"),
                _ => format!("({c})m^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn perfect_square_at_its_root() {
        let p = Poly::from_ints(&[9, -6, 1]);
        assert_eq!(p.shift(&Rat::int(3)), Poly::from_ints(&[0, 0, 1]));
        assert_eq!(
            poly_nonneg_on_ray(&p, &Rat::int(3)),
            RayCheck::CertifiedNonneg
        );
        // nonneg but not strictly positive at the root
        assert_eq!(poly_pos_on_ray(&p, &Rat::int(3)), RayCheck::Unknown);
    }

    #[test]
    fn negative_constant_is_unknown() {
        let p = Poly::from_ints(&[-1]);
        for m0 in [-5, 0, 3, 100] {
            assert_eq!(poly_nonneg_on_ray(&p, &Rat::int(m0)), RayCheck::Unknown);
        }
    }

    #[test]
    fn sufficient_test_can_miss_but_not_lie() {
        // (m - 1)^2 + 1 is positive everywhere; at m0 = 0 the shift keeps a
        // negative coefficient so the test declines.
        let p = Poly::from_ints(&[2, -2, 1]);
        assert_eq!(poly_nonneg_on_ray(&p, &Rat::zero()), RayCheck::Unknown);
        assert_eq!(
            poly_nonneg_on_ray(&p, &Rat::one()),
            RayCheck::CertifiedNonneg
        );
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = Poly::from_ints(&[4, -1, 0, 2]);
        let pts: Vec<_> = (0..4)
            .map(|i| (Rat::int(i), p.eval(&Rat::int(i))))
            .collect();
        assert_eq!(Poly::interpolate(&pts).unwrap(), p);
        assert!(
            Poly::interpolate(&[(Rat::one(), Rat::one()), (Rat::one(), Rat::zero())]).is_none()
        );
    }

    #[test]
    fn forward_difference_of_square() {
        let p = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(p.forward_difference(), Poly::from_ints(&[1, 2]));
    }

    fn poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-20i64..20, 0..7).prop_map(|c| Poly::from_ints(&c))
    }

    proptest! {
        #[test]
        fn ray_certificate_is_sound(p in poly(), m0 in -6i64..8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let m0 = Rat::int(m0);
            if poly_nonneg_on_ray(&p, &m0) == RayCheck::CertifiedNonneg {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..1000 {
                    let x = &m0 + Rat::frac(rng.gen_range(0..1_000_000), rng.gen_range(1..1000));
                    prop_assert!(!p.eval(&x).is_negative());
                }
            }
        }

        #[test]
        fn shift_preserves_values(p in poly(), s in -10i64..10, x in -10i64..10) {
            let shifted = p.shift(&Rat::int(s));
            prop_assert_eq!(shifted.eval(&Rat::int(x)), p.eval(&Rat::int(x + s)));
        }

        #[test]
        fn multiplication_evaluates_pointwise(p in poly(), q in poly(), x in -10i64..10) {
            let x = Rat::int(x);
            prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        }
    }
}
