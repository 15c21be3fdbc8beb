//! Linear constraints over `(a, b)` and the axiom sets that seed them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::{AffineForm, Rat};
use crate::hrr::p_affine;

/// `form ≥ 0` or `form > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    NonStrict,
    Strict,
}

impl Sense {
    pub fn is_strict(self) -> bool {
        self == Sense::Strict
    }

    pub fn from_strict(strict: bool) -> Self {
        if strict {
            Sense::Strict
        } else {
            Sense::NonStrict
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::NonStrict => ">=",
            Sense::Strict => ">",
        }
    }

    /// Whether `value sense 0` holds.
    pub fn holds(self, value: &Rat) -> bool {
        match self {
            Sense::NonStrict => !value.is_negative(),
            Sense::Strict => value.is_positive(),
        }
    }
}

/// Relation in a hypothesis `P(m) rel value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Le => "<=",
            Rel::Lt => "<",
        }
    }
}

/// Where a constraint comes from. Every origin determines its constraint
/// exactly, so a reader can recompute the form without trusting a record.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    /// A1: `720a ≥ 1`.
    VolumePositive,
    /// A4 at one `m`: `P(m) ≥ 0`.
    Vanishing(i64),
    /// A5: `P(2) ≥ P(1)`.
    SecondExceedsFirst,
    /// A stated hypothesis `P(m) rel value`.
    Hypothesis { m: i64, rel: Rel, value: Rat },
    /// `P(m) ≥ bound` (or `>`) turned back into a constraint.
    Fact { m: i64, bound: Rat, strict: bool },
}

impl Origin {
    pub fn hypothesis(m: i64, rel: Rel, value: impl Into<Rat>) -> Self {
        Origin::Hypothesis {
            m,
            rel,
            value: value.into(),
        }
    }

    /// The constraint this origin stands for.
    pub fn constraint(&self) -> Constraint {
        let (form, sense) = match self {
            Origin::VolumePositive => (AffineForm::from_ints(720, 0, -1), Sense::NonStrict),
            Origin::Vanishing(m) => (p_affine(*m), Sense::NonStrict),
            Origin::SecondExceedsFirst => (&p_affine(2) - &p_affine(1), Sense::NonStrict),
            Origin::Hypothesis { m, rel, value } => {
                let shifted = &p_affine(*m) - &AffineForm::constant(value.clone());
                match rel {
                    Rel::Ge => (shifted, Sense::NonStrict),
                    Rel::Gt => (shifted, Sense::Strict),
                    Rel::Le => (-&shifted, Sense::NonStrict),
                    Rel::Lt => (-&shifted, Sense::Strict),
                }
            }
            Origin::Fact { m, bound, strict } => (
                (&p_affine(*m) - &AffineForm::constant(bound.clone())).normalized(),
                Sense::from_strict(*strict),
            ),
        };
        Constraint {
            form,
            sense,
            origin: self.clone(),
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::VolumePositive => write!(f, "A1"),
            Origin::Vanishing(m) => write!(f, "A4[m={m}]"),
            Origin::SecondExceedsFirst => write!(f, "A5"),
            Origin::Hypothesis { m, rel, value } => {
                write!(f, "hyp:P({m}){}{value}", rel.symbol())
            }
            Origin::Fact { m, bound, strict } => {
                write!(
                    f,
                    "fact:P({m}){}{bound}",
                    Sense::from_strict(*strict).symbol()
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized constraint origin {0:?}")]
pub struct OriginParseError(pub String);

impl FromStr for Origin {
    type Err = OriginParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OriginParseError(s.to_string());
        match s {
            "A1" => return Ok(Origin::VolumePositive),
            "A5" => return Ok(Origin::SecondExceedsFirst),
            _ => {}
        }
        if let Some(m) = s.strip_prefix("A4[m=").and_then(|r| r.strip_suffix(']')) {
            return m.parse().map(Origin::Vanishing).map_err(|_| bad());
        }
        let (is_fact, body) = if let Some(body) = s.strip_prefix("hyp:") {
            (false, body)
        } else if let Some(body) = s.strip_prefix("fact:") {
            (true, body)
        } else {
            return Err(bad());
        };
        let body = body.strip_prefix("P(").ok_or_else(bad)?;
        let (m, rest) = body.split_once(')').ok_or_else(bad)?;
        let m: i64 = m.parse().map_err(|_| bad())?;
        // two-character operators first
        let (rel, value) = [
            (">=", Rel::Ge),
            ("<=", Rel::Le),
            (">", Rel::Gt),
            ("<", Rel::Lt),
        ]
        .iter()
        .find_map(|(sym, rel)| rest.strip_prefix(sym).map(|v| (*rel, v)))
        .ok_or_else(bad)?;
        let value: Rat = value.parse().map_err(|_| bad())?;
        if is_fact {
            match rel {
                Rel::Ge => Ok(Origin::Fact {
                    m,
                    bound: value,
                    strict: false,
                }),
                Rel::Gt => Ok(Origin::Fact {
                    m,
                    bound: value,
                    strict: true,
                }),
                _ => Err(bad()),
            }
        } else {
            Ok(Origin::Hypothesis { m, rel, value })
        }
    }
}

impl Serialize for Origin {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Origin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub form: AffineForm,
    pub sense: Sense,
    pub origin: Origin,
}

impl Constraint {
    pub fn satisfied_by(&self, a: &Rat, b: &Rat) -> bool {
        self.sense.holds(&self.form.eval(a, b))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} 0  [{}]",
            self.form,
            self.sense.symbol(),
            self.origin
        )
    }
}

/// Which axioms seed a [`ConstraintSystem`].
///
/// A1 (`720a ∈ ℤ`, `720a ≥ 1`) and A2 (`144b ∈ ℤ`) always hold. A3 is the
/// integrality of every `P(m)`; A4 is vanishing, instantiated as `P(m) ≥ 0`
/// for `m = 1..=vanishing_horizon`; A5 is the hypothesis `P(2) ≥ P(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxiomSet {
    pub integral_values: bool,
    pub vanishing_horizon: u32,
    pub second_exceeds_first: bool,
}

impl AxiomSet {
    pub const DEFAULT_VANISHING_HORIZON: u32 = 8;

    /// The default set, matching the hypotheses used in the derivations.
    pub fn full() -> Self {
        AxiomSet {
            integral_values: true,
            vanishing_horizon: Self::DEFAULT_VANISHING_HORIZON,
            second_exceeds_first: true,
        }
    }

    /// A1 and A2 only.
    pub fn volume_only() -> Self {
        AxiomSet {
            integral_values: false,
            vanishing_horizon: 0,
            second_exceeds_first: false,
        }
    }

    /// A1–A3 without any vanishing or growth hypotheses.
    pub fn integral_only() -> Self {
        AxiomSet {
            integral_values: true,
            ..AxiomSet::volume_only()
        }
    }

    /// Inverse of [`AxiomSet::identifiers`]. Unknown identifiers are rejected.
    pub fn from_identifiers<S: AsRef<str>>(ids: &[S]) -> Option<Self> {
        let mut set = AxiomSet::volume_only();
        let mut saw_a1 = false;
        for id in ids {
            let id = id.as_ref();
            let (tag, rest) = id.split_once(':')?;
            match tag {
                "A1" => saw_a1 = true,
                "A2" => {}
                "A3" => set.integral_values = true,
                "A4" => {
                    set.vanishing_horizon =
                        rest.strip_prefix("P(m)>=0 for 1<=m<=")?.parse().ok()?;
                }
                "A5" => set.second_exceeds_first = true,
                _ => return None,
            }
        }
        (saw_a1 && set.identifiers().iter().eq(ids.iter().map(|s| s.as_ref()))).then_some(set)
    }

    pub fn identifiers(&self) -> Vec<String> {
        let mut ids = vec![
            "A1:720a>=1,720a in Z".to_string(),
            "A2:144b in Z".to_string(),
        ];
        if self.integral_values {
            ids.push("A3:P(m) in Z".to_string());
        }
        if self.vanishing_horizon > 0 {
            ids.push(format!("A4:P(m)>=0 for 1<=m<={}", self.vanishing_horizon));
        }
        if self.second_exceeds_first {
            ids.push("A5:P(2)>=P(1) [hypothesis]".to_string());
        }
        ids
    }

    /// Whether a constraint with this origin is an axiom of this set.
    pub fn admits(&self, origin: &Origin) -> bool {
        match origin {
            Origin::VolumePositive => true,
            Origin::Vanishing(m) => *m >= 1 && *m <= i64::from(self.vanishing_horizon),
            Origin::SecondExceedsFirst => self.second_exceeds_first,
            _ => false,
        }
    }
}

impl Default for AxiomSet {
    fn default() -> Self {
        AxiomSet::full()
    }
}

/// An immutable set of constraints over `(a, b)` with its integrality facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    axioms: AxiomSet,
    constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn from_axioms(axioms: AxiomSet) -> Self {
        let mut origins = vec![Origin::VolumePositive];
        origins.extend((1..=i64::from(axioms.vanishing_horizon)).map(Origin::Vanishing));
        if axioms.second_exceeds_first {
            origins.push(Origin::SecondExceedsFirst);
        }
        ConstraintSystem {
            axioms,
            constraints: origins.iter().map(Origin::constraint).collect(),
        }
    }

    pub fn axioms(&self) -> &AxiomSet {
        &self.axioms
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// A new system with one more constraint. Duplicate origins are skipped.
    pub fn with(&self, c: Constraint) -> Self {
        let mut next = self.clone();
        if !next.constraints.iter().any(|k| k.origin == c.origin) {
            next.constraints.push(c);
        }
        next
    }

    pub fn with_origin(&self, origin: Origin) -> Self {
        self.with(origin.constraint())
    }

    /// Adds `P(m) = value` as two opposing non-strict constraints.
    pub fn with_value(&self, m: i64, value: impl Into<Rat>) -> Self {
        let value = value.into();
        self.with_origin(Origin::hypothesis(m, Rel::Ge, value.clone()))
            .with_origin(Origin::hypothesis(m, Rel::Le, value))
    }

    pub fn with_lower(&self, m: i64, value: impl Into<Rat>) -> Self {
        self.with_origin(Origin::hypothesis(m, Rel::Ge, value))
    }

    /// A3: every `P(m)` is an integer.
    pub fn p_integral(&self) -> bool {
        self.axioms.integral_values
    }

    pub fn satisfied_by(&self, a: &Rat, b: &Rat) -> bool {
        self.constraints.iter().all(|c| c.satisfied_by(a, b))
    }

    /// Integrality facts that hold at `(a, b)`: A1/A2 always, A3 when enabled.
    pub fn integrality_holds(&self, a: &Rat, b: &Rat) -> bool {
        let lattice = (Rat::int(720) * a).is_integer() && (Rat::int(144) * b).is_integer();
        // P is integer-valued everywhere iff it is at six consecutive integers
        lattice && (!self.p_integral() || (0..6).all(|m| p_affine(m).eval(a, b).is_integer()))
    }
}
