//! Certificate artifact: an ordered chain of steps, each with the exact data
//! needed to re-derive its claim.
//!
//! The JSON form has sorted keys and rationals as `"p/q"` strings, so equal
//! certificates serialize to identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::derive::{LowerBound, Origin};
use crate::exact::{AffineForm, Poly, Rat};
use crate::hrr::ChernData;

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    WorstCase,
    Concrete,
}

/// A step input: an earlier step id or a named external fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Step(u32),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub id: u32,
    pub rule: String,
    pub inputs: Vec<Input>,
    pub claim: String,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub mode: Mode,
    pub chern: Option<ChernData>,
    pub axioms: Vec<String>,
    pub steps: Vec<Step>,
    pub r0: i64,
    pub r: [i64; 3],
    pub bound: i64,
}

impl Certificate {
    /// Pretty JSON with keys sorted at every level, newline-terminated.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("certificate serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn step(&self, id: u32) -> Option<&Step> {
        self.steps.iter().find(|s| s.id == id)
    }

    pub fn steps_with_rule<'a>(&'a self, rule: &'a str) -> impl Iterator<Item = &'a Step> + 'a {
        self.steps.iter().filter(move |s| s.rule == rule)
    }
}

pub mod rules {
    pub const SPLIT: &str = "split_on_p1";
    pub const BRANCH_BOUND: &str = "derive_lower_bound";
    pub const MERGE: &str = "merge_branches";
    pub const FACT: &str = "fact_to_constraint";
    pub const HRR_VALUES: &str = "hrr_values";
    pub const ORACLE_VALUES: &str = "h0_oracle";
    pub const NONVANISHING: &str = "nonvanishing";
    pub const LEMMA2: &str = "lemma2";
    pub const R0: &str = "certify_r0";
    pub const COMPOSE: &str = "compose_bound";
}

/// `Σ multiplier · constraint(origin) = objective − infimum`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub origin: String,
    pub multiplier: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub objective: AffineForm,
    pub infimum: Rat,
    pub strict: bool,
    pub terms: Vec<TermRecord>,
}

impl From<&LowerBound> for BoundRecord {
    fn from(lb: &LowerBound) -> Self {
        BoundRecord {
            objective: lb.objective.clone(),
            infimum: lb.bound.clone(),
            strict: lb.strict,
            terms: lb
                .terms
                .iter()
                .filter(|t| !t.multiplier.is_zero())
                .map(|t| TermRecord {
                    origin: t.origin.to_string(),
                    multiplier: t.multiplier.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWitness {
    pub lmax: u32,
    pub branches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchWitness {
    pub branch: String,
    pub m: i64,
    pub derivation: BoundRecord,
    pub rounded: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeWitness {
    pub m: i64,
    pub branch_bounds: Vec<Rat>,
    pub merged: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactWitness {
    pub m: i64,
    pub bound: Rat,
    pub form: AffineForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub m: i64,
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HrrValuesWitness {
    pub a: Rat,
    pub b: Rat,
    pub d5: Rat,
    pub values: Vec<ValueRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleValuesWitness {
    pub bundle: String,
    pub convention: String,
    pub d5: Rat,
    pub h1_vanishes: bool,
    pub values: Vec<ValueRecord>,
}

/// Worst-case witnesses carry `derivation`/`rounded`; concrete ones `h0`/`threshold`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimStepWitness {
    pub target_dim: u8,
    pub m: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    pub margin: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<BoundRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounded: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub m: i64,
    pub derivation: BoundRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailRecord {
    pub start: i64,
    pub b_floor: String,
    pub a_floor: String,
    pub b_weight: Poly,
    pub a_weight: Poly,
    pub floor: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct R0WorstWitness {
    pub r0: i64,
    pub m_cert: i64,
    pub base: BoundRecord,
    pub base_rounded: Rat,
    pub growth: Vec<GrowthRecord>,
    pub tail: TailRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct R0ConcreteWitness {
    pub r0: i64,
    pub m_cert: i64,
    /// `hilbert` or `interpolant`.
    pub poly_source: String,
    pub poly: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeWitness {
    pub r0: i64,
    pub r: [i64; 3],
    pub bound: i64,
}

/// Claim strings, shared by the prover and the verifier so that both sides
/// render a claim from the same data.
pub mod claims {
    use super::*;

    pub fn split(branches: &[String]) -> String {
        branches.join(" | ")
    }

    pub fn branch(m: i64, bound: &Rat, branch: &str) -> String {
        format!("P({m}) >= {bound} given {branch}")
    }

    pub fn merged(m: i64, bound: &Rat) -> String {
        format!("P({m}) >= {bound}")
    }

    pub fn fact(form: &AffineForm) -> String {
        format!("{form} >= 0")
    }

    pub fn values(first: i64, last: i64, source: &str) -> String {
        format!("h0(-mK) for {first} <= m <= {last} from {source}")
    }

    pub fn dim(target: u8, m: i64, r: Option<i64>) -> String {
        match r {
            Some(r) => format!("dim Phi(-{m}K) >= {target} via r={r}"),
            None => format!("dim Phi(-{m}K) >= {target}"),
        }
    }

    pub fn r0(r0: i64) -> String {
        format!("h0(-mK) >= 1 for all m >= {r0}")
    }

    pub fn compose(bound: i64) -> String {
        format!("Phi(-mK) is birational for all m >= {bound}")
    }
}

/// The origin string of a derived fact, as it appears in later terms.
pub fn fact_origin(m: i64, bound: &Rat) -> String {
    Origin::Fact {
        m,
        bound: bound.clone(),
        strict: false,
    }
    .to_string()
}
