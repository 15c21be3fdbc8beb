//! Arbitrary-precision rationals in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ExactError;

/// An exact rational number.
///
/// The denominator is always positive and coprime to the numerator; every
/// constructor and operator normalizes eagerly.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ExactError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num.into(), den)))
    }

    /// Builds `num/den`, panicking on a zero denominator. For literals.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("literal fraction with zero denominator")
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.0.numer()).div_floor(self.0.denom()))
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rat, ExactError> {
        Rat::one().checked_div(self)
    }

    pub fn pow(&self, exp: u32) -> Rat {
        Rat(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| ExactError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => Rat::new(parse(n)?, parse(d)?),
            None => Ok(Rat::int(parse(s)?)),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

// Panics on a zero divisor, like integer division. Use `checked_div` when the
// divisor is not known to be nonzero.
impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        &self / rhs
    }
}

impl Div<Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        self / &rhs
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Self {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Total order comparison, spelled out for call sites that read better with it.
pub fn cmp(x: &Rat, y: &Rat) -> Ordering {
    x.cmp(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn canonical(x: &Rat) -> bool {
        x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
    }

    #[test]
    fn substitution_value() {
        // b = -5a at a = 1/60
        let a = Rat::frac(1, 60);
        assert_eq!(Rat::int(-5) * &a, Rat::frac(-1, 12));
    }

    #[test]
    fn long_hand_difference() {
        assert_eq!(Rat::frac(125, 2) - Rat::frac(3125, 72), Rat::frac(1375, 72));
    }

    #[test]
    fn additive_identity() {
        let x = Rat::frac(-7, 9);
        assert_eq!(Rat::zero() + &x, x);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            Rat::one().checked_div(&Rat::zero()),
            Err(ExactError::DivisionByZero)
        );
        assert!(Rat::new(1, 0).is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(Rat::frac(13, 2).ceil(), BigInt::from(7));
        assert_eq!(Rat::frac(13, 2).floor(), BigInt::from(6));
        assert_eq!(Rat::frac(-13, 2).ceil(), BigInt::from(-6));
        assert_eq!(Rat::frac(-13, 2).floor(), BigInt::from(-7));
        assert_eq!(Rat::int(5).ceil(), BigInt::from(5));
    }

    #[test]
    fn string_forms() {
        assert_eq!(Rat::frac(6, -4).to_string(), "-3/2");
        assert_eq!(Rat::int(12).to_string(), "12");
        assert_eq!("-3/2".parse::<Rat>().unwrap(), Rat::frac(-3, 2));
        assert_eq!("4/2".parse::<Rat>().unwrap(), Rat::int(2));
        assert_eq!("17".parse::<Rat>().unwrap(), Rat::int(17));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    fn rat() -> impl Strategy<Value = Rat> {
        (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| Rat::frac(n, d))
    }

    proptest! {
        #[test]
        fn operations_stay_canonical(xs in proptest::collection::vec(rat(), 1..12)) {
            let mut acc = Rat::one();
            for (i, x) in xs.iter().enumerate() {
                acc = match i % 4 {
                    0 => &acc + x,
                    1 => &acc * x,
                    2 => &acc - x,
                    _ => if x.is_zero() { acc } else { &acc / x },
                };
                prop_assert!(canonical(&acc));
            }
        }

        #[test]
        fn field_axioms(x in rat(), y in rat(), z in rat()) {
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
        }

        #[test]
        fn order_is_total_and_consistent(x in rat(), y in rat()) {
            let d = &x - &y;
            match cmp(&x, &y) {
                Ordering::Less => prop_assert!(d.is_negative()),
                Ordering::Equal => prop_assert!(d.is_zero()),
                Ordering::Greater => prop_assert!(d.is_positive()),
            }
        }

        #[test]
        fn display_parses_back(x in rat()) {
            prop_assert_eq!(x.to_string().parse::<Rat>().unwrap(), x);
        }
    }
}
