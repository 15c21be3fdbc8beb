//! Replays the six a-priori estimates on `P(m)` item by item.

use num_bigint::BigInt;

use super::constraint::{AxiomSet, ConstraintSystem, Origin};
use super::fact::{derive_lower_bound, Fact};
use super::monotone::monotone_from;
use super::DeriveError;
use crate::exact::Rat;
use crate::hrr::{fit_ab, p_affine, PValue};
use crate::report::Status;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Item {
    pub item: &'static str,
    pub paper_claim: &'static str,
    pub derived: String,
    pub status: Status,
    /// Named exact values behind `derived`, for programmatic checks.
    pub values: Vec<(&'static str, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Report {
    pub items: Vec<Prop1Item>,
}

impl Prop1Report {
    pub fn item(&self, name: &str) -> Option<&Prop1Item> {
        self.items.iter().find(|i| i.item == name)
    }
}

fn lower_item(
    item: &'static str,
    paper_claim: &'static str,
    cs: &ConstraintSystem,
    m: i64,
    claimed: i64,
) -> Result<Prop1Item, DeriveError> {
    let fact = derive_lower_bound(cs, m)?;
    let claimed = Rat::int(claimed);
    let status = match fact.bound.cmp(&claimed) {
        std::cmp::Ordering::Equal => Status::Confirmed,
        std::cmp::Ordering::Greater => Status::Stronger,
        std::cmp::Ordering::Less => Status::Discrepancy,
    };
    Ok(Prop1Item {
        item,
        paper_claim,
        derived: fact.to_string(),
        status,
        values: vec![("bound", fact.bound)],
    })
}

fn forced_case(base: &ConstraintSystem) -> Result<Prop1Item, DeriveError> {
    let cs = base.with_value(1, 3).with_value(2, 6);
    let low = derive_lower_bound(&cs, 3)?;
    let pv = |m, v: i64| PValue {
        m,
        value: BigInt::from(v),
    };
    let (a, b) = fit_ab(&pv(1, 3), &pv(2, 6)).map_err(|_| DeriveError::Infeasible)?;
    let p3 = p_affine(3).eval(&a, &b);
    debug_assert_eq!(p3, low.bound);
    let (claimed_a, claimed_b) = (Rat::frac(1, 60), Rat::frac(-1, 12));
    let claimed_p3 = p_affine(3).eval(&claimed_a, &claimed_b);
    let status = if a == claimed_a && p3 == claimed_p3 {
        Status::Confirmed
    } else {
        Status::Discrepancy
    };
    Ok(Prop1Item {
        item: "(v)",
        paper_claim: "P(1)=3, P(2)=6 => a=1/60, b=-1/12, P(3)=49",
        derived: format!(
            "a={a}, b={b}, P(3)={p3} (claimed: a={claimed_a}, P(3)={claimed_p3}); both satisfy P(3)>=7"
        ),
        status,
        values: vec![
            ("a", a),
            ("b", b),
            ("P(3)", p3),
            ("claimed a", claimed_a),
            ("claimed P(3)", claimed_p3),
        ],
    })
}

fn growth(base: &ConstraintSystem, m_cert: i64) -> Result<Prop1Item, DeriveError> {
    let p3 = Fact {
        m: 3,
        bound: Rat::int(7),
        strict: false,
        derivation: vec![],
    };
    let cs = base.with_origin(Origin::Fact {
        m: p3.m,
        bound: p3.bound.clone(),
        strict: false,
    });
    let cert = monotone_from(&cs, 3, m_cert)?;
    Ok(Prop1Item {
        item: "(vi)",
        paper_claim: "P(m+1) > P(m) when m > 3 and P(3) >= 7",
        derived: format!(
            "P(m+1) > P(m) for all m >= {} (checked m={}..={}, ray tail from m={})",
            cert.m0, cert.m0, cert.m_cert, cert.tail.start
        ),
        // the claim is for m > 3; m = 3 is certified as well
        status: Status::Stronger,
        values: vec![("m0", Rat::int(cert.m0))],
    })
}

/// Item-by-item replay under the default axiom set.
pub fn prop1_replay(m_cert: i64) -> Result<Prop1Report, DeriveError> {
    let base = ConstraintSystem::from_axioms(AxiomSet::full());
    let items = vec![
        lower_item(
            "(i)",
            "P(1)=0, P(2)>=0 => P(3)>=35",
            &base.with_value(1, 0).with_lower(2, 0),
            3,
            35,
        )?,
        lower_item(
            "(ii)",
            "P(1)=1, P(2)>=1 => P(3)>=21",
            &base.with_value(1, 1).with_lower(2, 1),
            3,
            21,
        )?,
        lower_item(
            "(iii)",
            "P(1)=2, P(2)>=2 => P(3)>=7",
            &base.with_value(1, 2).with_lower(2, 2),
            3,
            7,
        )?,
        lower_item("(iv)", "P(1)=3 => P(2)>=6", &base.with_value(1, 3), 2, 6)?,
        forced_case(&base)?,
        growth(&base, m_cert)?,
    ];
    Ok(Prop1Report { items })
}
