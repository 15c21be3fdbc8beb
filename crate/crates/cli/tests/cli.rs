use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fanobound(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanobound"))
        .args(args)
        .current_dir(dir)
        .env_remove("FANOBOUND_MCERT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_prints_the_bounds() {
    let dir = tempfile::tempdir().unwrap();
    for (args, bound) in [
        (&["solve", "--worst-case"][..], "16"),
        (&["solve", "--worst-case", "--full-basis"], "15"),
        (
            &["solve", "--bundle", "0,0,0,0,1", "--convention", "paper"],
            "15",
        ),
        (
            &[
                "solve",
                "--bundle",
                "0,0,0,0,1",
                "--convention",
                "paper",
                "--select",
                "minimal",
            ],
            "13",
        ),
        (&["solve", "--bundle", "0,0,0,0,1"], "12"),
        (&["solve", "--k5", "6250", "--k3c2", "2750"], "12"),
    ] {
        let out = fanobound(args, dir.path());
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(stdout(&out).trim(), bound, "{args:?}");
    }
}

#[test]
fn solve_output_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = fanobound(&["solve", "--worst-case", "--out", "w.json"], dir.path());
    assert_eq!(code(&out), 0);
    let ok = fanobound(&["verify", "w.json"], dir.path());
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("16"));

    let text = fs::read_to_string(dir.path().join("w.json")).unwrap();
    let mut cert: Value = serde_json::from_str(&text).unwrap();
    cert["bound"] = Value::from(15);
    fs::write(dir.path().join("t.json"), cert.to_string()).unwrap();
    let bad = fanobound(&["verify", "t.json"], dir.path());
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("step"), "{}", stdout(&bad));

    fs::write(dir.path().join("cut.json"), &text[..text.len() / 3]).unwrap();
    assert_eq!(code(&fanobound(&["verify", "cut.json"], dir.path())), 2);
    assert_eq!(code(&fanobound(&["verify", "missing.json"], dir.path())), 2);
}

#[test]
fn every_solve_mode_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--k5", "6250", "--k3c2", "2750", "--out", "c.json"][..],
        &[
            "solve",
            "--bundle",
            "0,0,0,0,1",
            "--convention",
            "paper",
            "--out",
            "c.json",
        ],
        &["solve", "--bundle", "0,0,0,0,2", "--out", "c.json"],
    ] {
        assert_eq!(code(&fanobound(args, dir.path())), 0, "{args:?}");
        assert_eq!(
            code(&fanobound(&["verify", "c.json"], dir.path())),
            0,
            "{args:?}"
        );
    }
}

#[test]
fn invalid_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &[][..],
        &["solve"],
        &["solve", "--worst-case", "--k5", "1", "--k3c2", "2"],
        &["solve", "--k5", "6250"],
        &["solve", "--worst-case", "--convention", "paper"],
        &["solve", "--worst-case", "--select", "printed"],
        &["solve", "--bundle", "0,0,0,0,1", "--full-basis"],
        &["solve", "--k5", "1", "--k3c2", "0"],
        &["solve", "--k5", "0", "--k3c2", "0"],
        &["solve", "--bundle", "1,0,0,0,1", "--convention", "paper"],
        &["solve", "--bundle", "0,0,1"],
        &["table", "--k5", "6", "--k3c2", "1", "--max-m", "-1"],
        &["table", "--k5", "1", "--k3c2", "0", "--max-m", "3"],
        &[
            "table", "--k5", "6250", "--k3c2", "2750", "--max-m", "2", "--format", "xml",
        ],
        &["oracle", "--bundle", "0,0,0,0,1", "--m", "0"],
        &[
            "oracle",
            "--bundle",
            "0,0,0,0,1",
            "--m",
            "1",
            "--convention",
            "other",
        ],
        &["bogus"],
    ] {
        assert_eq!(code(&fanobound(args, dir.path())), 2, "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_fanobound"))
        .args(["solve", "--worst-case"])
        .env("FANOBOUND_MCERT", "soon")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn certification_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // -K is not nef here, so h1 survives and h0 is no Hilbert polynomial
    let out = fanobound(&["solve", "--bundle", "0,0,0,0,5"], dir.path());
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("certify_r0"));
}

#[test]
fn mcert_override_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let run = |m_cert: &str| {
        Command::new(env!("CARGO_BIN_EXE_fanobound"))
            .args(["solve", "--worst-case", "--out", &format!("w{m_cert}.json")])
            .current_dir(dir.path())
            .env("FANOBOUND_MCERT", m_cert)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("3")), 0);
    assert_eq!(code(&run("10")), 0);
    let short = fs::read_to_string(dir.path().join("w10.json")).unwrap();
    let cert: Value = serde_json::from_str(&short).unwrap();
    let r0 = cert["steps"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["rule"] == "certify_r0")
        .unwrap();
    assert_eq!(r0["witness"]["m_cert"], 10);
    assert_eq!(r0["witness"]["tail"]["start"], 11);
    assert_eq!(code(&fanobound(&["verify", "w10.json"], dir.path())), 0);
    assert_eq!(code(&run("2")), 2);
}

#[test]
fn tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = fanobound(
        &["table", "--k5", "6250", "--k3c2", "2750", "--max-m", "2"],
        dir.path(),
    );
    assert_eq!(stdout(&out), "m,P(m)\n0,1\n1,378\n2,5005\n");
    assert!(out.stderr.is_empty());

    let out = fanobound(
        &["table", "--k5", "7", "--k3c2", "-3", "--max-m", "0"],
        dir.path(),
    );
    assert_eq!(stdout(&out), "m,P(m)\n0,1\n");

    let out = fanobound(
        &[
            "table", "--k5", "6250", "--k3c2", "-4138", "--max-m", "1", "--format", "json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[1]["m"], 1);
    assert_eq!(rows[1]["P(m)"], "91");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn oracle_values() {
    let dir = tempfile::tempdir().unwrap();
    let q = |args: &[&str]| stdout(&fanobound(args, dir.path())).trim().to_string();
    assert_eq!(
        q(&[
            "oracle",
            "--bundle",
            "0,0,0,0,1",
            "--m",
            "4",
            "--convention",
            "paper"
        ]),
        "62909"
    );
    assert_eq!(
        q(&[
            "oracle",
            "--bundle",
            "0,0,0,0,1",
            "--m",
            "1",
            "--convention",
            "standard"
        ]),
        "378"
    );
    assert_eq!(q(&["oracle", "--bundle", "0,0,0,0,1", "--m", "1"]), "378");
    // P^1 x P^4 with -K = O(2, 5): 3 * C(9, 4)
    assert_eq!(q(&["oracle", "--bundle", "0,0,0,0,0", "--m", "1"]), "378");
    // the order of the summands does not matter
    assert_eq!(
        q(&["oracle", "--bundle", "-1,0,0,0,1", "--m", "2"]),
        q(&["oracle", "--bundle", "0,0,1,0,-1", "--m", "2"])
    );
}

#[test]
fn audit_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = fanobound(&["audit", "--out", "audit.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("discrepancy"));
    let text = fs::read_to_string(dir.path().join("audit.json")).unwrap();
    let entries: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert!(entries.len() > 20);
    for e in &entries {
        let keys: Vec<&String> = e.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["engine_result", "location", "paper_claim", "status"]);
    }
    let status = |loc: &str| {
        entries
            .iter()
            .find(|e| e["location"] == loc)
            .map(|e| e["status"].as_str().unwrap().to_string())
    };
    assert_eq!(
        status("a-priori estimate (i)").as_deref(),
        Some("confirmed")
    );
    assert_eq!(
        status("a-priori estimate (v)").as_deref(),
        Some("discrepancy")
    );
    assert_eq!(
        status("split example: rank convention").as_deref(),
        Some("discrepancy")
    );
}
