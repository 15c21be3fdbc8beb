//! End-to-end certification: case split, bounds on `P(3)`, the three
//! dimension multiples, nonvanishing from `r0` on, and the composition.

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use super::certificate::{
    claims, fact_origin, rules, BoundRecord, BranchWitness, Certificate, ComposeWitness,
    DimStepWitness, FactWitness, GrowthRecord, HrrValuesWitness, Input, MergeWitness, Mode,
    OracleValuesWitness, R0ConcreteWitness, R0WorstWitness, SplitWitness, Step, TailRecord,
    ValueRecord, CERTIFICATE_VERSION,
};
use super::dim::{DimWitness, Evidence};
use super::r0::{certify_r0, certify_r0_poly, R0Certificate};
use super::search::{minimal_r, BundleOracle, DimSource, H0Oracle, DEFAULT_M_MAX};
use super::BoundsError;
use crate::bundle::{h0_anti, RankConvention, SplitBundle};
use crate::derive::{
    bound_over_split, fact_to_constraint, split_on_p1, AxiomSet, ConstraintSystem, DerivationStep,
    Fact, DEFAULT_M_CERT,
};
use crate::exact::{Poly, Rat};
use crate::hrr::ChernData;

/// The multiples at which the printed example reads off its dimensions.
pub const EXAMPLE_PRINTED_R: [i64; 3] = [3, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub axioms: AxiomSet,
    /// Case split on `P(1) = 0..=lmax` plus the tail.
    pub lmax: u32,
    pub m_max: i64,
    pub m_cert: i64,
    pub r0: i64,
    /// Keep every axiom of `axioms` in the dimension and nonvanishing steps,
    /// instead of only integrality and the bound on `P(3)`.
    pub full_basis: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            axioms: AxiomSet::full(),
            lmax: 3,
            m_max: DEFAULT_M_MAX,
            m_cert: DEFAULT_M_CERT,
            r0: super::r0::R0_FLOOR,
            full_basis: false,
        }
    }
}

/// How the three multiples are chosen in concrete mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Smallest certified multiple for each dimension.
    #[default]
    Minimal,
    /// Certify exactly these multiples.
    Fixed([i64; 3]),
}

pub fn compose_bound(r0: i64, rs: [i64; 3]) -> i64 {
    r0 + rs.iter().sum::<i64>()
}

fn to_value<T: Serialize>(w: &T) -> Value {
    serde_json::to_value(w).expect("witness serializes")
}

#[derive(Default)]
struct Chain {
    steps: Vec<Step>,
}

impl Chain {
    fn push<W: Serialize>(
        &mut self,
        rule: &str,
        inputs: Vec<Input>,
        claim: String,
        witness: &W,
    ) -> u32 {
        let id = self.steps.len() as u32 + 1;
        self.steps.push(Step {
            id,
            rule: rule.to_string(),
            inputs,
            claim,
            witness: to_value(witness),
        });
        id
    }
}

fn minimize_record(fact: &Fact) -> Result<(BoundRecord, bool), BoundsError> {
    match fact.derivation.first() {
        Some(DerivationStep::Minimize(lb)) => Ok((
            BoundRecord::from(lb),
            fact.derivation
                .iter()
                .any(|s| matches!(s, DerivationStep::RoundIntegral)),
        )),
        _ => Err(BoundsError::step(
            rules::BRANCH_BOUND,
            "fact without a recorded minimization",
        )),
    }
}

fn dim_step(chain: &mut Chain, w: &DimWitness, inputs: Vec<Input>) -> u32 {
    let mut record = DimStepWitness {
        target_dim: w.target_dim,
        m: w.m,
        r: w.r_used,
        margin: w.margin.clone(),
        derivation: None,
        rounded: None,
        h0: None,
        threshold: None,
    };
    match &w.evidence {
        Evidence::Derived {
            certificate,
            rounded,
        } => {
            record.derivation = Some(BoundRecord::from(certificate));
            if *rounded {
                record.rounded = Some(&w.margin + Rat::one());
            }
        }
        Evidence::Stated { bound, .. } => record.rounded = Some(bound.clone()),
        Evidence::Value { h0, threshold } => {
            record.h0 = Some(Rat::int(h0.clone()));
            record.threshold = Some(Rat::int(threshold.clone()));
        }
    }
    chain.push(
        w.rule.name(),
        inputs,
        claims::dim(w.target_dim, w.m, w.r_used),
        &record,
    )
}

fn failing<E: std::fmt::Display>(rule: &'static str) -> impl Fn(E) -> BoundsError {
    move |e| BoundsError::step(rule, e.to_string())
}

/// Constraint system for the dimension and nonvanishing steps: the derived
/// bound on `P(3)` over integrality alone, or over all of `axioms`.
pub fn dimension_basis(p3: &Fact, axioms: &AxiomSet, full: bool) -> ConstraintSystem {
    let base = if full {
        *axioms
    } else {
        AxiomSet::integral_only()
    };
    ConstraintSystem::from_axioms(base).with(fact_to_constraint(p3))
}

/// Certificate valid for every 5-fold satisfying `opts.axioms`.
pub fn solve_worst_case(opts: &SolveOptions) -> Result<Certificate, BoundsError> {
    let cs = ConstraintSystem::from_axioms(opts.axioms);
    let mut chain = Chain::default();

    let split = split_on_p1(&cs, opts.lmax);
    let labels: Vec<String> = split.branches.iter().map(|b| b.label.clone()).collect();
    let split_id = chain.push(
        rules::SPLIT,
        vec![],
        claims::split(&labels),
        &SplitWitness {
            lmax: opts.lmax,
            branches: labels.clone(),
        },
    );

    let bounds = bound_over_split(&split, 3).map_err(failing(rules::BRANCH_BOUND))?;
    let mut branch_ids = Vec::new();
    for (label, fact) in &bounds.per_branch {
        let (derivation, _) = minimize_record(fact)?;
        let id = chain.push(
            rules::BRANCH_BOUND,
            vec![Input::Step(split_id)],
            claims::branch(fact.m, &fact.bound, label),
            &BranchWitness {
                branch: label.clone(),
                m: fact.m,
                derivation,
                rounded: fact.bound.clone(),
            },
        );
        branch_ids.push(Input::Step(id));
    }

    let p3 = bounds.merged;
    let merge_id = chain.push(
        rules::MERGE,
        branch_ids,
        claims::merged(p3.m, &p3.bound),
        &MergeWitness {
            m: p3.m,
            branch_bounds: bounds
                .per_branch
                .iter()
                .map(|(_, f)| f.bound.clone())
                .collect(),
            merged: p3.bound.clone(),
        },
    );
    let constraint = fact_to_constraint(&p3);
    let fact_id = chain.push(
        rules::FACT,
        vec![Input::Step(merge_id)],
        claims::fact(&constraint.form),
        &FactWitness {
            m: p3.m,
            bound: p3.bound.clone(),
            form: constraint.form.clone(),
        },
    );

    let basis = dimension_basis(&p3, &opts.axioms, opts.full_basis);
    let mut rs = [0i64; 3];
    let mut dim_ids = Vec::new();
    for (i, target) in (1u8..=3).enumerate() {
        let rule = if target == 1 {
            rules::NONVANISHING
        } else {
            rules::LEMMA2
        };
        let (m, w) = minimal_r(&basis, target, opts.m_max).map_err(failing(rule))?;
        rs[i] = m;
        dim_ids.push(dim_step(&mut chain, &w, vec![Input::Step(fact_id)]));
    }

    let r0_cert = certify_r0(&basis, opts.r0, opts.m_cert).map_err(failing(rules::R0))?;
    let R0Certificate::WorstCase { r0, base, growth } = &r0_cert else {
        unreachable!("worst-case r0 certificate");
    };
    let (base_record, _) = minimize_record(base)?;
    let tail = &growth.tail;
    let r0_id = chain.push(
        rules::R0,
        vec![Input::Step(fact_id)],
        claims::r0(*r0),
        &R0WorstWitness {
            r0: *r0,
            m_cert: growth.m_cert,
            base: base_record,
            base_rounded: base.bound.clone(),
            growth: growth
                .steps
                .iter()
                .map(|(m, lb)| GrowthRecord {
                    m: *m,
                    derivation: BoundRecord::from(lb),
                })
                .collect(),
            tail: TailRecord {
                start: tail.start,
                b_floor: tail.b_floor.origin.to_string(),
                a_floor: tail.a_floor.origin.to_string(),
                b_weight: tail.polys.b_weight.clone(),
                a_weight: tail.polys.a_weight.clone(),
                floor: tail.polys.floor.clone(),
            },
        },
    );

    let bound = finish(&mut chain, *r0, rs, r0_id, &dim_ids);
    debug_assert_eq!(fact_origin(p3.m, &p3.bound), constraint.origin.to_string());
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        mode: Mode::WorstCase,
        chern: None,
        axioms: opts.axioms.identifiers(),
        steps: chain.steps,
        r0: *r0,
        r: rs,
        bound,
    })
}

fn finish(chain: &mut Chain, r0: i64, rs: [i64; 3], r0_id: u32, dim_ids: &[u32]) -> i64 {
    let bound = compose_bound(r0, rs);
    let mut inputs = vec![Input::Step(r0_id)];
    inputs.extend(dim_ids.iter().map(|&id| Input::Step(id)));
    chain.push(
        rules::COMPOSE,
        inputs,
        claims::compose(bound),
        &ComposeWitness { r0, r: rs, bound },
    );
    bound
}

fn select<S: DimSource + ?Sized>(
    source: &S,
    selection: Selection,
    m_max: i64,
) -> Result<Vec<DimWitness>, BoundsError> {
    (1u8..=3)
        .map(|target| {
            let rule = if target == 1 {
                rules::NONVANISHING
            } else {
                rules::LEMMA2
            };
            match selection {
                Selection::Minimal => minimal_r(source, target, m_max).map(|(_, w)| w),
                Selection::Fixed(rs) => {
                    let m = rs[usize::from(target - 1)];
                    source
                        .witness_at(target, m)?
                        .ok_or_else(|| BoundsError::NoWitness {
                            target_dim: target,
                            m,
                        })
                }
            }
            .map_err(failing(rule))
        })
        .collect()
}

fn concrete_tail(
    mut chain: Chain,
    values_id: u32,
    r0_cert: &R0Certificate,
    poly_source: &str,
    witnesses: &[DimWitness],
) -> (Vec<Step>, i64, [i64; 3], i64) {
    let R0Certificate::Concrete { r0, m_cert, poly } = r0_cert else {
        unreachable!("concrete r0 certificate");
    };
    let r0_id = chain.push(
        rules::R0,
        vec![Input::Step(values_id)],
        claims::r0(*r0),
        &R0ConcreteWitness {
            r0: *r0,
            m_cert: *m_cert,
            poly_source: poly_source.to_string(),
            poly: poly.clone(),
        },
    );
    let dim_ids: Vec<u32> = witnesses
        .iter()
        .map(|w| dim_step(&mut chain, w, vec![Input::Step(values_id)]))
        .collect();
    let rs = [witnesses[0].m, witnesses[1].m, witnesses[2].m];
    let bound = finish(&mut chain, *r0, rs, r0_id, &dim_ids);
    (chain.steps, *r0, rs, bound)
}

fn value_records(oracle: &dyn H0Oracle, last: i64) -> Result<Vec<ValueRecord>, BoundsError> {
    (1..=last)
        .map(|m| {
            oracle.h0(m).map(|v| ValueRecord {
                m,
                value: Rat::int(v),
            })
        })
        .collect()
}

/// Certificate for fixed Chern numbers, from exact values of `P(m)`.
pub fn solve_concrete(
    chern: &ChernData,
    selection: Selection,
    opts: &SolveOptions,
) -> Result<Certificate, BoundsError> {
    let failing_values = failing(rules::HRR_VALUES);
    for m in 0..6 {
        chern.h0(m).map_err(&failing_values)?;
    }
    let poly = chern.hilbert_poly();
    let r0_cert = certify_r0_poly(&poly, opts.r0, opts.m_cert).map_err(failing(rules::R0))?;
    let witnesses = select(chern, selection, opts.m_max)?;
    let last = witnesses
        .iter()
        .map(|w| w.m)
        .max()
        .unwrap_or(1)
        .max(opts.r0);

    let mut chain = Chain::default();
    let values_id = chain.push(
        rules::HRR_VALUES,
        vec![Input::Name(format!(
            "chern:k5={},k3c2={}",
            chern.k5, chern.k3c2
        ))],
        claims::values(1, last, "the Riemann-Roch polynomial"),
        &HrrValuesWitness {
            a: chern.a(),
            b: chern.b(),
            d5: Rat::int(chern.d5()),
            values: value_records(chern, last)?,
        },
    );
    let (steps, r0, r, bound) = concrete_tail(chain, values_id, &r0_cert, "hilbert", &witnesses);
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        mode: Mode::Concrete,
        chern: Some(*chern),
        axioms: AxiomSet::integral_only().identifiers(),
        steps,
        r0,
        r,
        bound,
    })
}

/// The degree-≤5 interpolant through `h⁰` at `m = 1..=6`, checked against
/// every recorded value.
pub fn oracle_polynomial(values: &[ValueRecord]) -> Option<Poly> {
    if values.len() < 6 {
        return None;
    }
    let points: Vec<(Rat, Rat)> = values[..6]
        .iter()
        .map(|v| (Rat::int(v.m), v.value.clone()))
        .collect();
    let p = Poly::interpolate(&points)?;
    values
        .iter()
        .all(|v| p.eval(&Rat::int(v.m)) == v.value)
        .then_some(p)
}

/// Certificate for a split bundle, from section counts under `oracle.convention`.
pub fn solve_oracle(
    oracle: &BundleOracle,
    selection: Selection,
    opts: &SolveOptions,
) -> Result<Certificate, BoundsError> {
    solve_with_oracle(oracle, Some(oracle), selection, opts)
}

/// As [`solve_oracle`] for any oracle; only bundle oracles can be re-checked
/// by the verifier.
pub fn solve_with_oracle(
    oracle: &dyn H0Oracle,
    bundle: Option<&BundleOracle>,
    selection: Selection,
    opts: &SolveOptions,
) -> Result<Certificate, BoundsError> {
    let last = opts.m_cert.max(6);
    let values = value_records(oracle, last).map_err(failing(rules::ORACLE_VALUES))?;
    let poly = oracle_polynomial(&values).ok_or_else(|| {
        BoundsError::step(
            rules::R0,
            "section counts are not a polynomial of degree <= 5",
        )
    })?;
    let r0_cert = certify_r0_poly(&poly, opts.r0, opts.m_cert).map_err(failing(rules::R0))?;
    let witnesses = select(&OracleRef(oracle), selection, opts.m_max)?;

    let (name, convention, h1_vanishes) = match bundle {
        Some(b) => (
            b.bundle.to_string(),
            b.convention.to_string(),
            (1..=last).all(|m| {
                h0_anti(&b.bundle, m, b.convention)
                    .map(|h| h.h1_vanishes)
                    .unwrap_or(false)
            }),
        ),
        None => ("opaque".to_string(), String::new(), false),
    };
    let mut chain = Chain::default();
    let values_id = chain.push(
        rules::ORACLE_VALUES,
        vec![Input::Name(format!("bundle:{name}"))],
        claims::values(1, last, &format!("split bundle ({convention} ranks)")),
        &OracleValuesWitness {
            bundle: name,
            convention,
            d5: Rat::int(oracle.d5()),
            h1_vanishes,
            values,
        },
    );
    let (steps, r0, r, bound) =
        concrete_tail(chain, values_id, &r0_cert, "interpolant", &witnesses);
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        mode: Mode::Concrete,
        chern: None,
        axioms: vec![format!(
            "oracle:h0(-mK) of P(E) over P1, E=O({}) (sum of twists)",
            bundle.map_or("?".to_string(), |b| b.bundle.to_string())
        )],
        steps,
        r0,
        r,
        bound,
    })
}

struct OracleRef<'a>(&'a dyn H0Oracle);

impl H0Oracle for OracleRef<'_> {
    fn h0(&self, m: i64) -> Result<BigInt, BoundsError> {
        self.0.h0(m)
    }

    fn d5(&self) -> BigInt {
        self.0.d5()
    }
}

/// The split-bundle example: printed-rank certificate at the printed
/// multiples, and the standard-rank certificate with minimal multiples.
pub fn example1_bound(opts: &SolveOptions) -> Result<(Certificate, Certificate), BoundsError> {
    let bundle = SplitBundle::example();
    let printed = solve_oracle(
        &BundleOracle {
            bundle,
            convention: RankConvention::Paper,
        },
        Selection::Fixed(EXAMPLE_PRINTED_R),
        opts,
    )?;
    let standard = solve_oracle(
        &BundleOracle {
            bundle,
            convention: RankConvention::Standard,
        },
        Selection::Minimal,
        opts,
    )?;
    Ok((printed, standard))
}
