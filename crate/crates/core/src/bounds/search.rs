//! Smallest multiple `m` with `dim Φ_{|−mK|}(X) ≥ target`.

use num_bigint::BigInt;

use super::dim::{
    lemma2_check, lemma2_worstcase, nonvanishing_rule, DimRule, DimWitness, Evidence,
};
use super::BoundsError;
use crate::bundle::{anticanonical_volume, h0_anti, RankConvention, SplitBundle};
use crate::derive::{derive_lower_bound, ConstraintSystem, DeriveError};
use crate::exact::Rat;
use crate::hrr::{p_eval, ChernData};

/// Largest `r` tried in the Matsusaka–Maehara test.
pub const R_MAX: i64 = 4;
pub const DEFAULT_M_MAX: i64 = 32;

/// Exact section counts `h⁰(X, −mK)` for `m ≥ 1`, together with `(−K)⁵`.
pub trait H0Oracle {
    fn h0(&self, m: i64) -> Result<BigInt, BoundsError>;
    fn d5(&self) -> BigInt;
}

impl H0Oracle for ChernData {
    fn h0(&self, m: i64) -> Result<BigInt, BoundsError> {
        p_eval(self, m).map_err(BoundsError::Hrr)
    }

    fn d5(&self) -> BigInt {
        BigInt::from(self.k5)
    }
}

/// Section counts of a split-bundle projectivization under a rank convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundleOracle {
    pub bundle: SplitBundle,
    pub convention: RankConvention,
}

impl H0Oracle for BundleOracle {
    fn h0(&self, m: i64) -> Result<BigInt, BoundsError> {
        h0_anti(&self.bundle, m, self.convention)
            .map(|h| h.value)
            .map_err(BoundsError::Bundle)
    }

    fn d5(&self) -> BigInt {
        anticanonical_volume(&self.bundle)
    }
}

/// Anything that can certify a dimension at a given `m`.
pub trait DimSource {
    /// A witness for `dim ≥ target_dim` at exactly `m`, if one exists.
    fn witness_at(&self, target_dim: u8, m: i64) -> Result<Option<DimWitness>, BoundsError>;
}

fn lemma2_rs(target_dim: u8) -> std::ops::RangeInclusive<i64> {
    i64::from(target_dim) - 1..=R_MAX
}

fn retarget(mut w: DimWitness, target_dim: u8) -> DimWitness {
    w.target_dim = target_dim;
    w
}

impl DimSource for ConstraintSystem {
    fn witness_at(&self, target_dim: u8, m: i64) -> Result<Option<DimWitness>, BoundsError> {
        if target_dim == 1 {
            return match derive_lower_bound(self, m) {
                Ok(fact) => Ok(nonvanishing_rule(&fact)),
                Err(DeriveError::Unbounded { .. }) => Ok(None),
                Err(e) => Err(BoundsError::Derive(e)),
            };
        }
        Ok(lemma2_rs(target_dim)
            .find_map(|r| lemma2_worstcase(self, m, r))
            .map(|w| retarget(w, target_dim)))
    }
}

impl<O: H0Oracle> DimSource for O {
    fn witness_at(&self, target_dim: u8, m: i64) -> Result<Option<DimWitness>, BoundsError> {
        let h0 = self.h0(m)?;
        if target_dim == 1 {
            let threshold = BigInt::from(1);
            return Ok((h0 >= BigInt::from(2)).then(|| DimWitness {
                target_dim: 1,
                m,
                rule: DimRule::Nonvanishing,
                r_used: None,
                margin: Rat::int(&h0 - &threshold),
                evidence: Evidence::Value { h0, threshold },
            }));
        }
        let d5 = self.d5();
        Ok(lemma2_rs(target_dim)
            .find_map(|r| lemma2_check(&h0, m, r, &d5))
            .map(|w| retarget(w, target_dim)))
    }
}

/// Smallest `m ≤ m_max` admitting a witness; ties go to the smallest `r`.
pub fn minimal_r<S: DimSource + ?Sized>(
    source: &S,
    target_dim: u8,
    m_max: i64,
) -> Result<(i64, DimWitness), BoundsError> {
    if !(1..=3).contains(&target_dim) || m_max < 1 {
        return Err(BoundsError::InvalidArgument(format!(
            "target_dim {target_dim} must be in 1..=3 and m_max {m_max} at least 1"
        )));
    }
    for m in 1..=m_max {
        if let Some(w) = source.witness_at(target_dim, m)? {
            return Ok((m, w));
        }
    }
    Err(BoundsError::Exhausted { target_dim, m_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{AxiomSet, Origin};

    fn prop2_basis() -> ConstraintSystem {
        ConstraintSystem::from_axioms(AxiomSet::integral_only()).with_origin(Origin::Fact {
            m: 3,
            bound: Rat::int(7),
            strict: false,
        })
    }

    #[test]
    fn worst_case_minimal_multiples() {
        let cs = prop2_basis();
        let got: Vec<i64> = (1..=3).map(|t| minimal_r(&cs, t, 32).unwrap().0).collect();
        assert_eq!(got, [3, 4, 6]);
        let (_, w) = minimal_r(&cs, 3, 32).unwrap();
        assert_eq!(w.r_used, Some(2));
    }

    #[test]
    fn concrete_minimal_multiples() {
        let c = ChernData::new(6250, 2750).unwrap();
        let got: Vec<i64> = (1..=3).map(|t| minimal_r(&c, t, 32).unwrap().0).collect();
        assert_eq!(got, [1, 3, 5]);
    }

    #[test]
    fn printed_convention_oracle() {
        let o = BundleOracle {
            bundle: SplitBundle::example(),
            convention: RankConvention::Paper,
        };
        let got: Vec<i64> = (1..=3).map(|t| minimal_r(&o, t, 32).unwrap().0).collect();
        assert_eq!(got, [1, 4, 5]);
    }

    #[test]
    fn budget_exhaustion() {
        let cs = prop2_basis();
        assert_eq!(
            minimal_r(&cs, 3, 5).unwrap_err(),
            BoundsError::Exhausted {
                target_dim: 3,
                m_max: 5
            }
        );
        assert!(minimal_r(&cs, 0, 5).is_err());
    }

    #[test]
    fn larger_budget_never_increases_the_answer() {
        let c = ChernData::new(6250, 2750).unwrap();
        let cs = prop2_basis();
        let sources: [&dyn DimSource; 2] = [&c, &cs];
        for source in sources {
            for t in 1..=3 {
                let found: Vec<Option<i64>> = (1..=10)
                    .map(|budget| minimal_r(source, t, budget).ok().map(|(m, _)| m))
                    .collect();
                for pair in found.windows(2) {
                    if let Some(small) = pair[0] {
                        assert_eq!(pair[1], Some(small));
                    }
                }
            }
        }
    }
}
