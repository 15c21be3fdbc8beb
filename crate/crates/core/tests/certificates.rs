use fanobound_core::bounds::{
    rules, solve_concrete, solve_oracle, solve_worst_case, verify, BundleOracle, Certificate, Mode,
    Selection, SolveOptions, Verdict,
};
use fanobound_core::bundle::{RankConvention, SplitBundle};
use fanobound_core::hrr::ChernData;
use serde_json::Value;

fn worst() -> Certificate {
    solve_worst_case(&SolveOptions::default()).unwrap()
}

fn failing_step(v: &Verdict) -> Option<u32> {
    match v {
        Verdict::Invalid { step_id, .. } => *step_id,
        Verdict::Valid => panic!("tampered certificate was accepted"),
    }
}

fn step_id(cert: &Certificate, rule: &str) -> u32 {
    cert.steps_with_rule(rule).next().unwrap().id
}

#[test]
fn every_mode_round_trips_through_the_verifier() {
    let chern = ChernData::new(6250, 2750).unwrap();
    let printed = BundleOracle {
        bundle: SplitBundle::example(),
        convention: RankConvention::Paper,
    };
    let standard = BundleOracle {
        bundle: SplitBundle::example(),
        convention: RankConvention::Standard,
    };
    let opts = SolveOptions::default();
    let certs = [
        worst(),
        solve_concrete(&chern, Selection::Minimal, &opts).unwrap(),
        solve_oracle(&printed, Selection::Fixed([3, 4, 5]), &opts).unwrap(),
        solve_oracle(&standard, Selection::Minimal, &opts).unwrap(),
    ];
    let bounds: Vec<i64> = certs.iter().map(|c| c.bound).collect();
    assert_eq!(bounds, [16, 12, 15, 12]);
    for cert in &certs {
        assert_eq!(verify(cert), Verdict::Valid);
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(&back, cert);
        assert_eq!(verify(&back), Verdict::Valid);
    }
    assert_eq!(certs[0].mode, Mode::WorstCase);
    assert_eq!(certs[1].mode, Mode::Concrete);
}

#[test]
fn serialization_is_deterministic_and_sorted() {
    let a = worst().to_json();
    let b = worst().to_json();
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
    let v: Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // rationals are "p/q" strings, never JSON floats
    assert!(a.contains("\"173/4\""));
    assert!(!a.lines().any(|l| l.trim_end_matches(',').ends_with(".0")));
}

#[test]
fn tampered_bound_is_rejected_at_compose() {
    let mut cert = worst();
    let compose = step_id(&cert, rules::COMPOSE);
    cert.bound = 15;
    assert_eq!(failing_step(&verify(&cert)), Some(compose));

    let mut cert = worst();
    cert.r = [3, 4, 5];
    assert_eq!(failing_step(&verify(&cert)), Some(compose));
}

#[test]
fn tampered_margin_is_rejected_at_its_step() {
    let mut cert = worst();
    let step = cert
        .steps
        .iter_mut()
        .find(|s| s.rule == rules::LEMMA2)
        .unwrap();
    let id = step.id;
    let margin = step.witness["margin"].as_str().unwrap().to_string();
    step.witness["margin"] = Value::String(format!("-{margin}"));
    assert_eq!(failing_step(&verify(&cert)), Some(id));
}

#[test]
fn tampered_farkas_multiplier_is_rejected() {
    let mut cert = worst();
    let step = cert
        .steps
        .iter_mut()
        .find(|s| s.rule == rules::LEMMA2)
        .unwrap();
    let id = step.id;
    let terms = step.witness["derivation"]["terms"].as_array_mut().unwrap();
    terms[0]["multiplier"] = Value::String("1000".into());
    assert_eq!(failing_step(&verify(&cert)), Some(id));
}

#[test]
fn tampered_hrr_value_is_rejected() {
    let chern = ChernData::new(6250, 2750).unwrap();
    let mut cert = solve_concrete(&chern, Selection::Minimal, &SolveOptions::default()).unwrap();
    let step = cert
        .steps
        .iter_mut()
        .find(|s| s.rule == rules::HRR_VALUES)
        .unwrap();
    let id = step.id;
    let m1 = step.witness["values"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|v| v["m"] == 1)
        .unwrap();
    m1["value"] = Value::String("379".into());
    assert_eq!(failing_step(&verify(&cert)), Some(id));
}

#[test]
fn tampered_oracle_value_is_rejected() {
    let oracle = BundleOracle {
        bundle: SplitBundle::example(),
        convention: RankConvention::Paper,
    };
    let mut cert = solve_oracle(
        &oracle,
        Selection::Fixed([3, 4, 5]),
        &SolveOptions::default(),
    )
    .unwrap();
    let step = cert
        .steps
        .iter_mut()
        .find(|s| s.rule == rules::ORACLE_VALUES)
        .unwrap();
    let id = step.id;
    let m4 = step.witness["values"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|v| v["m"] == 4)
        .unwrap();
    m4["value"] = Value::String("62910".into());
    assert_eq!(failing_step(&verify(&cert)), Some(id));
}

#[test]
fn structural_tampering_is_rejected() {
    let mut cert = worst();
    cert.steps.remove(0);
    assert!(!verify(&cert).is_valid());

    let mut cert = worst();
    cert.version += 1;
    assert!(!verify(&cert).is_valid());

    let mut cert = worst();
    cert.axioms.pop();
    assert!(!verify(&cert).is_valid());

    let mut cert = worst();
    let last = cert.steps.pop().unwrap();
    assert_eq!(last.rule, rules::COMPOSE);
    assert!(!verify(&cert).is_valid());

    let mut cert = worst();
    let mut extra = cert.steps[0].clone();
    extra.id = cert.steps.len() as u32 + 1;
    cert.steps.push(extra);
    assert!(!verify(&cert).is_valid());
}

#[test]
fn truncated_json_does_not_parse() {
    let json = worst().to_json();
    assert!(Certificate::from_json(&json[..json.len() / 2]).is_err());
    assert!(Certificate::from_json("").is_err());
}
