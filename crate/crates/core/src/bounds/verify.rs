//! Independent re-checking of a certificate.
//!
//! Every step is replayed from its recorded data by substitution, exact sign
//! tests and table lookups. No minimization or search is run here.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::de::DeserializeOwned;

use super::certificate::{
    claims, rules, BoundRecord, BranchWitness, Certificate, ComposeWitness, DimStepWitness,
    FactWitness, HrrValuesWitness, Input, MergeWitness, Mode, OracleValuesWitness,
    R0ConcreteWitness, R0WorstWitness, SplitWitness, Step, ValueRecord, CERTIFICATE_VERSION,
};
use crate::bundle::{anticanonical_volume, h0_anti, RankConvention, SplitBundle};
use crate::derive::{AxiomSet, Origin, Rel, TailPolys};
use crate::exact::{poly_nonneg_on_ray, AffineForm, Poly, Rat, RayCheck};
use crate::hrr::{hilbert_poly, p_affine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid {
        step_id: Option<u32>,
        reason: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid {
                step_id: Some(id),
                reason,
            } => write!(f, "invalid at step {id}: {reason}"),
            Verdict::Invalid {
                step_id: None,
                reason,
            } => write!(f, "invalid: {reason}"),
        }
    }
}

type Check<T = ()> = Result<T, String>;

fn ensure(cond: bool, reason: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(reason())
    }
}

fn witness<T: DeserializeOwned>(step: &Step) -> Check<T> {
    serde_json::from_value(step.witness.clone()).map_err(|e| format!("malformed witness: {e}"))
}

fn check_claim(step: &Step, expected: String) -> Check {
    ensure(step.claim == expected, || {
        format!(
            "claim {:?} does not match the witness ({expected:?})",
            step.claim
        )
    })
}

/// `Σ μᵢ·gᵢ = objective − infimum` with `μᵢ ≥ 0` and every `gᵢ` an allowed hypothesis.
fn check_combination(
    rec: &BoundRecord,
    objective: &AffineForm,
    allowed: &dyn Fn(&Origin) -> bool,
) -> Check {
    ensure(&rec.objective == objective, || {
        format!("objective {} should be {objective}", rec.objective)
    })?;
    let mut sum = AffineForm::default();
    let mut strict_weight = false;
    for t in &rec.terms {
        let origin: Origin = t.origin.parse().map_err(|e| format!("{e}"))?;
        ensure(allowed(&origin), || {
            format!("hypothesis {origin} is not available here")
        })?;
        ensure(!t.multiplier.is_negative(), || {
            format!("negative multiplier {} on {origin}", t.multiplier)
        })?;
        let c = origin.constraint();
        strict_weight |= c.sense.is_strict() && t.multiplier.is_positive();
        sum = &sum + &c.form.scale(&t.multiplier);
    }
    let target = objective - &AffineForm::constant(rec.infimum.clone());
    ensure(sum == target, || {
        format!("combination {sum} differs from objective minus bound {target}")
    })?;
    ensure(!rec.strict || strict_weight, || {
        "strict bound without a weighted strict hypothesis".to_string()
    })
}

/// Least value the bound allows, rounding when the quantity is an integer.
fn least(rec: &BoundRecord, integral: bool) -> Rat {
    if !integral {
        rec.infimum.clone()
    } else if rec.strict {
        Rat::int(rec.infimum.floor() + 1)
    } else {
        Rat::int(rec.infimum.ceil())
    }
}

fn branch_hypotheses(label: &str) -> Option<Vec<Origin>> {
    if let Some(l) = label.strip_prefix("P(1)=") {
        let l: i64 = l.parse().ok()?;
        return Some(vec![
            Origin::hypothesis(1, Rel::Ge, l),
            Origin::hypothesis(1, Rel::Le, l),
        ]);
    }
    let l = label
        .strip_prefix("P(1)>=")?
        .strip_suffix(" [engine-completed]")?;
    Some(vec![Origin::hypothesis(1, Rel::Ge, l.parse::<i64>().ok()?)])
}

fn expected_branches(lmax: u32) -> Vec<String> {
    let mut labels: Vec<String> = (0..=lmax).map(|l| format!("P(1)={l}")).collect();
    labels.push(format!("P(1)>={} [engine-completed]", lmax + 1));
    labels
}

struct Values {
    by_m: BTreeMap<i64, Rat>,
    d5: Rat,
    /// `(source, polynomial)` the values are known to follow.
    poly: (&'static str, Poly),
    /// Largest `m` at which the polynomial was checked against the values.
    checked_to: i64,
}

#[derive(Default)]
struct Ledger {
    split: Option<(u32, Vec<String>)>,
    branch_bounds: BTreeMap<u32, (String, i64, Rat)>,
    merged: BTreeMap<u32, (i64, Rat)>,
    facts: BTreeMap<u32, Origin>,
    values: Option<(u32, Values)>,
    dims: BTreeMap<u32, (u8, i64)>,
    r0s: BTreeMap<u32, i64>,
    composed: Option<u32>,
}

struct Verifier<'a> {
    cert: &'a Certificate,
    axioms: Option<AxiomSet>,
    ledger: Ledger,
}

impl<'a> Verifier<'a> {
    fn step_inputs(&self, step: &Step) -> Check<Vec<u32>> {
        step.inputs
            .iter()
            .filter_map(|i| match i {
                Input::Step(id) => Some(*id),
                Input::Name(_) => None,
            })
            .map(|id| {
                ensure(id < step.id, || {
                    format!("input {id} does not precede step {}", step.id)
                })
                .map(|_| id)
            })
            .collect()
    }

    fn worst_axioms(&self) -> Check<AxiomSet> {
        self.axioms
            .ok_or_else(|| "rule requires a worst-case axiom list".to_string())
    }

    fn facts_from(&self, inputs: &[u32]) -> Vec<Origin> {
        inputs
            .iter()
            .filter_map(|id| self.ledger.facts.get(id).cloned())
            .collect()
    }

    fn values_from(&self, inputs: &[u32]) -> Check<&Values> {
        match &self.ledger.values {
            Some((id, v)) if inputs.contains(id) => Ok(v),
            _ => Err("step does not cite the value table".to_string()),
        }
    }

    fn run(&mut self, step: &Step) -> Check {
        match step.rule.as_str() {
            rules::SPLIT => self.split(step),
            rules::BRANCH_BOUND => self.branch(step),
            rules::MERGE => self.merge(step),
            rules::FACT => self.fact(step),
            rules::HRR_VALUES => self.hrr_values(step),
            rules::ORACLE_VALUES => self.oracle_values(step),
            rules::NONVANISHING | rules::LEMMA2 => self.dim(step),
            rules::R0 => self.r0(step),
            rules::COMPOSE => self.compose(step),
            other => Err(format!("unknown rule {other:?}")),
        }
    }

    fn split(&mut self, step: &Step) -> Check {
        let axioms = self.worst_axioms()?;
        let w: SplitWitness = witness(step)?;
        ensure(w.branches == expected_branches(w.lmax), || {
            "branches do not partition the values of P(1)".to_string()
        })?;
        ensure(
            axioms.integral_values && axioms.vanishing_horizon >= 1,
            || "coverage needs P(1) to be a nonnegative integer (A3, A4)".to_string(),
        )?;
        check_claim(step, claims::split(&w.branches))?;
        self.ledger.split = Some((step.id, w.branches));
        Ok(())
    }

    fn branch(&mut self, step: &Step) -> Check {
        let axioms = self.worst_axioms()?;
        let w: BranchWitness = witness(step)?;
        let inputs = self.step_inputs(step)?;
        let (split_id, branches) = self
            .ledger
            .split
            .as_ref()
            .ok_or("no case split precedes this bound")?;
        ensure(inputs == [*split_id], || {
            "must cite the case split".to_string()
        })?;
        ensure(branches.contains(&w.branch), || {
            format!("unknown branch {}", w.branch)
        })?;
        let hyps = branch_hypotheses(&w.branch).ok_or("unparsable branch label")?;
        let allowed = |o: &Origin| axioms.admits(o) || hyps.contains(o);
        check_combination(&w.derivation, &p_affine(w.m), &allowed)?;
        let expected = least(&w.derivation, axioms.integral_values);
        ensure(w.rounded == expected, || {
            format!("rounded bound {} should be {expected}", w.rounded)
        })?;
        check_claim(step, claims::branch(w.m, &w.rounded, &w.branch))?;
        self.ledger
            .branch_bounds
            .insert(step.id, (w.branch, w.m, w.rounded));
        Ok(())
    }

    fn merge(&mut self, step: &Step) -> Check {
        let w: MergeWitness = witness(step)?;
        let inputs = self.step_inputs(step)?;
        let (_, branches) = self.ledger.split.as_ref().ok_or("no case split to merge")?;
        let cited: Vec<&(String, i64, Rat)> = inputs
            .iter()
            .map(|id| {
                self.ledger
                    .branch_bounds
                    .get(id)
                    .ok_or(format!("step {id} is not a branch bound"))
            })
            .collect::<Check<_>>()?;
        let labels: Vec<&String> = cited.iter().map(|(l, _, _)| l).collect();
        ensure(labels.iter().copied().eq(branches.iter()), || {
            "merge must cite every branch exactly once, in order".to_string()
        })?;
        ensure(cited.iter().all(|(_, m, _)| *m == w.m), || {
            "branches bound different P(m)".to_string()
        })?;
        let bounds: Vec<Rat> = cited.iter().map(|(_, _, b)| b.clone()).collect();
        ensure(bounds == w.branch_bounds, || {
            "recorded branch bounds differ from the cited steps".to_string()
        })?;
        let min = bounds.iter().min().ok_or("empty merge")?;
        ensure(&w.merged == min, || {
            format!("merged bound {} should be {min}", w.merged)
        })?;
        check_claim(step, claims::merged(w.m, &w.merged))?;
        self.ledger.merged.insert(step.id, (w.m, w.merged));
        Ok(())
    }

    fn fact(&mut self, step: &Step) -> Check {
        let w: FactWitness = witness(step)?;
        let inputs = self.step_inputs(step)?;
        let source = match inputs.as_slice() {
            [id] => self
                .ledger
                .merged
                .get(id)
                .ok_or("must cite a merged bound")?,
            _ => return Err("must cite exactly one merged bound".to_string()),
        };
        ensure(*source == (w.m, w.bound.clone()), || {
            "fact differs from the cited bound".to_string()
        })?;
        let form = (&p_affine(w.m) - &AffineForm::constant(w.bound.clone())).normalized();
        ensure(form == w.form, || {
            format!("constraint {} should be {form}", w.form)
        })?;
        check_claim(step, claims::fact(&w.form))?;
        let origin = Origin::Fact {
            m: w.m,
            bound: w.bound,
            strict: false,
        };
        self.ledger.facts.insert(step.id, origin);
        Ok(())
    }

    fn hrr_values(&mut self, step: &Step) -> Check {
        let chern = self.cert.chern.ok_or("value table needs Chern data")?;
        let w: HrrValuesWitness = witness(step)?;
        ensure(chern.k5 >= 1, || "(-K)^5 must be positive".to_string())?;
        let (a, b) = (Rat::frac(chern.k5, 720), Rat::frac(chern.k3c2, 144));
        ensure(w.a == a && w.b == b, || {
            "a, b do not match the Chern data".to_string()
        })?;
        ensure(w.d5 == Rat::int(chern.k5), || {
            "d5 must equal k5".to_string()
        })?;
        for v in &w.values {
            let exact = p_affine(v.m).eval(&a, &b);
            ensure(exact.is_integer(), || {
                format!("P({}) = {exact} is not an integer", v.m)
            })?;
            ensure(v.value == exact, || {
                format!("P({}) should be {exact}", v.value)
            })?;
        }
        let last = consecutive_from_one(&w.values)?;
        check_claim(step, claims::values(1, last, "the Riemann-Roch polynomial"))?;
        self.ledger.values = Some((
            step.id,
            Values {
                by_m: w.values.into_iter().map(|v| (v.m, v.value)).collect(),
                d5: w.d5,
                poly: ("hilbert", hilbert_poly(&a, &b)),
                checked_to: i64::MAX,
            },
        ));
        Ok(())
    }

    fn oracle_values(&mut self, step: &Step) -> Check {
        let w: OracleValuesWitness = witness(step)?;
        let bundle: SplitBundle = w.bundle.parse().map_err(|e| format!("{e}"))?;
        let convention: RankConvention = w.convention.parse()?;
        ensure(w.d5 == Rat::int(anticanonical_volume(&bundle)), || {
            "d5 differs from the intersection number (-K)^5".to_string()
        })?;
        let mut h1 = true;
        for v in &w.values {
            let h = h0_anti(&bundle, v.m, convention).map_err(|e| e.to_string())?;
            h1 &= h.h1_vanishes;
            ensure(v.value == Rat::int(h.value.clone()), || {
                format!("h0(-{}K) should be {}", v.m, h.value)
            })?;
        }
        ensure(h1 == w.h1_vanishes, || {
            "h1 vanishing flag is wrong".to_string()
        })?;
        let last = consecutive_from_one(&w.values)?;
        ensure(last >= 6, || "need at least six values".to_string())?;
        let points: Vec<(Rat, Rat)> = w.values[..6]
            .iter()
            .map(|v| (Rat::int(v.m), v.value.clone()))
            .collect();
        let poly = Poly::interpolate(&points).ok_or("interpolation failed")?;
        ensure(
            w.values
                .iter()
                .all(|v| poly.eval(&Rat::int(v.m)) == v.value),
            || "section counts do not follow one polynomial of degree <= 5".to_string(),
        )?;
        check_claim(
            step,
            claims::values(1, last, &format!("split bundle ({convention} ranks)")),
        )?;
        self.ledger.values = Some((
            step.id,
            Values {
                by_m: w.values.into_iter().map(|v| (v.m, v.value)).collect(),
                d5: w.d5,
                poly: ("interpolant", poly),
                checked_to: last,
            },
        ));
        Ok(())
    }

    fn dim(&mut self, step: &Step) -> Check {
        let w: DimStepWitness = witness(step)?;
        let inputs = self.step_inputs(step)?;
        let lemma2 = step.rule == rules::LEMMA2;
        ensure((1..=3).contains(&w.target_dim), || {
            "target_dim must be 1, 2 or 3".to_string()
        })?;
        ensure(w.m >= 1, || "m must be positive".to_string())?;
        match (lemma2, w.r) {
            (false, None) => ensure(w.target_dim == 1, || {
                "a pencil only gives dim >= 1".to_string()
            })?,
            (true, Some(r)) => {
                ensure(r >= 0 && r <= 4 && i64::from(w.target_dim) <= r + 1, || {
                    format!("r = {r} cannot give dim >= {}", w.target_dim)
                })?
            }
            _ => return Err("r is required exactly for lemma2 steps".to_string()),
        }
        ensure(w.margin.is_positive(), || {
            format!("margin {} is not positive", w.margin)
        })?;

        if let Some(rec) = &w.derivation {
            let axioms = self.worst_axioms()?;
            let facts = self.facts_from(&inputs);
            ensure(!facts.is_empty(), || {
                "worst-case step must cite a derived fact".to_string()
            })?;
            let allowed = |o: &Origin| axioms.admits(o) || facts.contains(o);
            if let Some(r) = w.r {
                check_combination(rec, &lemma2_objective(w.m, r), &allowed)?;
                ensure(w.margin == rec.infimum, || {
                    format!("margin {} should be {}", w.margin, rec.infimum)
                })?;
            } else {
                check_combination(rec, &p_affine(w.m), &allowed)?;
                // section counts are integers
                let least = least(rec, true);
                ensure(w.margin == &least - Rat::one(), || {
                    format!("margin {} should be {}", w.margin, &least - Rat::one())
                })?;
            }
        } else {
            let values = self.values_from(&inputs)?;
            let h0 = w.h0.as_ref().ok_or("missing h0")?;
            let threshold = w.threshold.as_ref().ok_or("missing threshold")?;
            let table = values
                .by_m
                .get(&w.m)
                .ok_or(format!("no value for m = {}", w.m))?;
            ensure(h0 == table, || {
                format!("h0 {h0} differs from the table value {table}")
            })?;
            let expected = match w.r {
                Some(r) => Rat::int(BigInt::from(w.m).pow(r as u32)) * &values.d5 + Rat::int(r),
                None => Rat::one(),
            };
            ensure(threshold == &expected, || {
                format!("threshold should be {expected}")
            })?;
            ensure(w.margin == h0 - threshold, || {
                format!("margin {} should be {}", w.margin, h0 - threshold)
            })?;
        }
        check_claim(step, claims::dim(w.target_dim, w.m, w.r))?;
        self.ledger.dims.insert(step.id, (w.target_dim, w.m));
        Ok(())
    }

    fn r0(&mut self, step: &Step) -> Check {
        let inputs = self.step_inputs(step)?;
        let r0 = match self.cert.mode {
            Mode::WorstCase => self.r0_worst(step, &inputs)?,
            Mode::Concrete => self.r0_concrete(step, &inputs)?,
        };
        check_claim(step, claims::r0(r0))?;
        self.ledger.r0s.insert(step.id, r0);
        Ok(())
    }

    fn r0_worst(&self, step: &Step, inputs: &[u32]) -> Check<i64> {
        let axioms = self.worst_axioms()?;
        let w: R0WorstWitness = witness(step)?;
        ensure(w.r0 >= 3, || format!("r0 = {} is below 3", w.r0))?;
        let facts = self.facts_from(inputs);
        let allowed = |o: &Origin| axioms.admits(o) || facts.contains(o);
        check_combination(&w.base, &p_affine(w.r0), &allowed)?;
        let base = least(&w.base, axioms.integral_values);
        ensure(w.base_rounded == base && base >= Rat::one(), || {
            format!("P({}) >= {base} does not give a section", w.r0)
        })?;
        let ms: Vec<i64> = w.growth.iter().map(|g| g.m).collect();
        ensure(ms == (w.r0..=w.m_cert).collect::<Vec<_>>(), || {
            "growth steps must cover r0..=m_cert".to_string()
        })?;
        for g in &w.growth {
            let diff = &p_affine(g.m + 1) - &p_affine(g.m);
            check_combination(&g.derivation, &diff, &allowed)
                .map_err(|e| format!("growth at m={}: {e}", g.m))?;
            let inf = &g.derivation.infimum;
            ensure(
                inf.is_positive() || (inf.is_zero() && g.derivation.strict),
                || format!("P({}) - P({}) is not shown positive", g.m + 1, g.m),
            )?;
        }
        let t = &w.tail;
        ensure(t.start == w.m_cert + 1, || {
            "tail must start right after m_cert".to_string()
        })?;
        let b_floor: Origin = t.b_floor.parse().map_err(|e| format!("{e}"))?;
        let a_floor: Origin = t.a_floor.parse().map_err(|e| format!("{e}"))?;
        ensure(allowed(&b_floor) && allowed(&a_floor), || {
            "tail floors are not available".to_string()
        })?;
        let polys = TailPolys::new(&b_floor.constraint().form, &a_floor.constraint().form)
            .ok_or("tail floors have the wrong shape")?;
        ensure(
            polys.b_weight == t.b_weight && polys.a_weight == t.a_weight && polys.floor == t.floor,
            || "tail polynomials do not match their floors".to_string(),
        )?;
        ensure(polys.certified_from(t.start), || {
            format!("ray test fails from m = {}", t.start)
        })?;
        Ok(w.r0)
    }

    fn r0_concrete(&self, step: &Step, inputs: &[u32]) -> Check<i64> {
        let w: R0ConcreteWitness = witness(step)?;
        ensure(w.r0 >= 3, || format!("r0 = {} is below 3", w.r0))?;
        let values = self.values_from(inputs)?;
        let (source, poly) = &values.poly;
        ensure(w.poly_source == *source && &w.poly == poly, || {
            "polynomial does not match the value table".to_string()
        })?;
        ensure(w.m_cert >= w.r0 && w.m_cert <= values.checked_to, || {
            "m_cert outside the checked range".to_string()
        })?;
        for m in w.r0..=w.m_cert {
            ensure(poly.eval(&Rat::int(m)) >= Rat::one(), || {
                format!("h0(-{m}K) < 1")
            })?;
        }
        let shifted = poly - &Poly::constant(Rat::one());
        ensure(
            poly_nonneg_on_ray(&shifted, &Rat::int(w.m_cert + 1)) == RayCheck::CertifiedNonneg,
            || format!("ray test fails from m = {}", w.m_cert + 1),
        )?;
        Ok(w.r0)
    }

    fn compose(&mut self, step: &Step) -> Check {
        let w: ComposeWitness = witness(step)?;
        let inputs = self.step_inputs(step)?;
        let [r0_id, d1, d2, d3] = inputs.as_slice() else {
            return Err("compose must cite r0 and three dimension steps".to_string());
        };
        let r0 = self
            .ledger
            .r0s
            .get(r0_id)
            .ok_or("first input is not an r0 step")?;
        let mut rs = [0i64; 3];
        for (i, id) in [d1, d2, d3].into_iter().enumerate() {
            let (target, m) = self
                .ledger
                .dims
                .get(id)
                .ok_or(format!("step {id} is not a dimension step"))?;
            ensure(usize::from(*target) == i + 1, || {
                format!("step {id} certifies the wrong dimension")
            })?;
            rs[i] = *m;
        }
        ensure(w.r0 == *r0 && w.r == rs, || {
            "r0 and r differ from the cited steps".to_string()
        })?;
        let bound = w.r0 + rs.iter().sum::<i64>();
        ensure(w.bound == bound, || {
            format!("composed bound {} should be {bound}", w.bound)
        })?;
        check_claim(step, claims::compose(bound))?;
        ensure(
            self.cert.r0 == w.r0 && self.cert.r == w.r && self.cert.bound == w.bound,
            || {
                format!(
                    "certificate states r0={}, r={:?}, bound={} but the steps give r0={}, r={:?}, bound={}",
                    self.cert.r0, self.cert.r, self.cert.bound, w.r0, w.r, w.bound
                )
            },
        )?;
        self.ledger.composed = Some(step.id);
        Ok(())
    }
}

fn lemma2_objective(m: i64, r: i64) -> AffineForm {
    let mr = Rat::int(BigInt::from(m).pow(r as u32));
    &p_affine(m) - &AffineForm::new(Rat::int(720) * mr, Rat::zero(), Rat::int(r))
}

fn consecutive_from_one(values: &[ValueRecord]) -> Check<i64> {
    ensure(
        values.iter().enumerate().all(|(i, v)| v.m == i as i64 + 1),
        || "values must be listed for m = 1, 2, ... in order".to_string(),
    )?;
    values
        .last()
        .map(|v| v.m)
        .ok_or_else(|| "empty value table".to_string())
}

/// Replays every step of `cert`; reports the first failing step.
pub fn verify(cert: &Certificate) -> Verdict {
    let invalid = |step_id: Option<u32>, reason: String| Verdict::Invalid { step_id, reason };
    if cert.version != CERTIFICATE_VERSION {
        return invalid(None, format!("unsupported version {}", cert.version));
    }
    let axioms = match cert.mode {
        Mode::WorstCase => match AxiomSet::from_identifiers(&cert.axioms) {
            Some(a) => Some(a),
            None => return invalid(None, format!("unrecognized axiom list {:?}", cert.axioms)),
        },
        Mode::Concrete => None,
    };
    let mut v = Verifier {
        cert,
        axioms,
        ledger: Ledger::default(),
    };
    for (i, step) in cert.steps.iter().enumerate() {
        if step.id != i as u32 + 1 {
            return invalid(
                Some(step.id),
                format!(
                    "step ids must run 1..n, found {} at position {}",
                    step.id,
                    i + 1
                ),
            );
        }
        if v.ledger.composed.is_some() {
            return invalid(Some(step.id), "steps after the composition".to_string());
        }
        if let Err(reason) = v.run(step) {
            return invalid(Some(step.id), reason);
        }
    }
    if v.ledger.composed.is_none() {
        return invalid(None, "no composition step".to_string());
    }
    Verdict::Valid
}
