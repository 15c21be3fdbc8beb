use super::constraint::{ConstraintSystem, Origin, Rel};
use super::fact::{derive_lower_bound, merge_branch_facts, Fact};
use super::DeriveError;
use crate::exact::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P1Case {
    Exactly(i64),
    /// The tail branch `P(1) ≥ l`, closed using A1.
    AtLeast(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub label: String,
    pub case: P1Case,
    pub system: ConstraintSystem,
}

impl Branch {
    /// The hypotheses this branch adds to its parent.
    pub fn hypotheses(&self) -> Vec<Origin> {
        match self.case {
            P1Case::Exactly(l) => vec![
                Origin::hypothesis(1, Rel::Ge, l),
                Origin::hypothesis(1, Rel::Le, l),
            ],
            P1Case::AtLeast(l) => vec![Origin::hypothesis(1, Rel::Ge, l)],
        }
    }

    /// Whether `(a, b)` lies in this branch's slice of `P(1)` values.
    pub fn contains(&self, a: &Rat, b: &Rat) -> bool {
        self.system.satisfied_by(a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSplit {
    pub branches: Vec<Branch>,
    /// Why the branches cover the parent.
    pub coverage: String,
}

/// Splits on `P(1) = 0, …, lmax` plus the tail `P(1) ≥ lmax + 1`.
pub fn split_on_p1(cs: &ConstraintSystem, lmax: u32) -> CaseSplit {
    let lmax = i64::from(lmax);
    let mut branches: Vec<Branch> = (0..=lmax)
        .map(|l| Branch {
            label: format!("P(1)={l}"),
            case: P1Case::Exactly(l),
            system: cs.with_value(1, l),
        })
        .collect();
    branches.push(Branch {
        label: format!("P(1)>={} [engine-completed]", lmax + 1),
        case: P1Case::AtLeast(lmax + 1),
        system: cs.with_lower(1, lmax + 1),
    });
    CaseSplit {
        branches,
        coverage: format!(
            "P(1) is a nonnegative integer (A3, A4 at m=1); values 0..={lmax} and >={} exhaust it",
            lmax + 1
        ),
    }
}

/// Per-branch bounds on `P(m)` and their merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBound {
    pub per_branch: Vec<(String, Fact)>,
    pub merged: Fact,
}

/// Derives `P(m) ≥ q` in every branch and merges to the weakest bound.
pub fn bound_over_split(split: &CaseSplit, m: i64) -> Result<SplitBound, DeriveError> {
    let per_branch = split
        .branches
        .iter()
        .map(|br| derive_lower_bound(&br.system, m).map(|f| (br.label.clone(), f)))
        .collect::<Result<Vec<_>, _>>()?;
    let facts: Vec<Fact> = per_branch.iter().map(|(_, f)| f.clone()).collect();
    let labels = per_branch.iter().map(|(l, _)| l.clone()).collect();
    let merged = merge_branch_facts(labels, &facts).ok_or(DeriveError::Infeasible)?;
    Ok(SplitBound { per_branch, merged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::constraint::AxiomSet;
    use crate::derive::fm::{fm_minimize, FmOutcome};
    use crate::hrr::p_affine;
    use rand::{Rng, SeedableRng};

    fn base() -> ConstraintSystem {
        ConstraintSystem::from_axioms(AxiomSet::full())
    }

    #[test]
    fn five_branches_for_lmax_three() {
        let split = split_on_p1(&base(), 3);
        let labels: Vec<_> = split.branches.iter().map(|b| b.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "P(1)=0",
                "P(1)=1",
                "P(1)=2",
                "P(1)=3",
                "P(1)>=4 [engine-completed]"
            ]
        );
        assert_eq!(split_on_p1(&base(), 0).branches.len(), 2);
    }

    #[test]
    fn merged_bound_is_seven() {
        let split = split_on_p1(&base(), 3);
        let sb = bound_over_split(&split, 3).unwrap();
        let bounds: Vec<Rat> = sb.per_branch.iter().map(|(_, f)| f.bound.clone()).collect();
        assert_eq!(bounds, [35, 21, 7, 11, 25].map(Rat::int).to_vec());
        assert_eq!(sb.merged.bound, Rat::int(7));
    }

    #[test]
    fn split_only_strengthens() {
        let cs = base();
        let merged = bound_over_split(&split_on_p1(&cs, 3), 3).unwrap().merged;
        let FmOutcome::Minimum { value, .. } = fm_minimize(&cs, &p_affine(3)) else {
            panic!()
        };
        assert!(value <= merged.bound);
    }

    #[test]
    fn branches_partition_integral_points() {
        let cs = base();
        let split = split_on_p1(&cs, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let a = Rat::frac(rng.gen_range(1..20_000), 720);
            let l = rng.gen_range(0..40);
            // P(1) = l  ⇔  b = (l − 3)/6 − 5a
            let b = Rat::frac(l - 3, 6) - Rat::int(5) * &a;
            if !cs.satisfied_by(&a, &b) {
                continue;
            }
            checked += 1;
            let hits = split
                .branches
                .iter()
                .filter(|br| br.contains(&a, &b))
                .count();
            assert_eq!(hits, 1, "a={a} b={b}");
        }
    }
}
