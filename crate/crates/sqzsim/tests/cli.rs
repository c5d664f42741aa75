use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sqzsim::trace_csv::read_trace;

fn sqzsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqzsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_netlist(dir: &Path, text: &str) -> String {
    let path = dir.join("circuit.nl");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn stdout_number(o: &Output) -> f64 {
    stdout(o).trim().parse().unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = sqzsim(&["validate", &fixture("paper_chip.nl")]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("4 channels"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_netlist(dir.path(), "modes: sig\nloss sig eta=1.2\n");
    let o = sqzsim(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("out-of-range") && err.contains(":2:14:"),
        "{err}"
    );
    assert_eq!(err.lines().count(), 1);

    let o = sqzsim(&[
        "validate",
        &dir.path().join("missing.nl").display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_reproduces_raw_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let o = sqzsim(&[
        "simulate",
        &fixture("paper_chip.nl"),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("phase_rad,variance_db\n") && !text.contains('\r'));
    let rows = read_trace(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 400);
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    assert!((min + 2.00).abs() < 0.005, "{min}");
    assert!((max - 2.80).abs() < 0.005, "{max}");

    let report = json(&o);
    assert_eq!(report["raw_sq_db"].as_f64().unwrap(), min);
    assert_eq!(report["trace"]["noiseless"], Value::Bool(true));
    assert_eq!(report["budget"]["fresnel"].as_f64(), Some(0.85777));
    assert!((report["inferred_sq_db"].as_f64().unwrap() + 3.2).abs() < 0.05);
}

#[test]
fn simulate_vacuum_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let nl = write_netlist(
        dir.path(),
        "modes: a\nhomodyne a eta_pd=0.9 eta_e=0.95 ratio=0.5 sweep=0:3.14159:32\n",
    );
    let csv = dir.path().join("t.csv");
    let o = sqzsim(&["simulate", &nl, "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_trace(std::fs::File::open(csv).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.1 == 0.0));
}

#[test]
fn simulate_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, seed: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let report = dir.path().join(format!("{tag}.json"));
        let o = sqzsim(&[
            "simulate",
            &fixture("paper_chip.nl"),
            "--seed",
            seed,
            "--csv",
            csv.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
        (std::fs::read(csv).unwrap(), std::fs::read(report).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "2");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);

    let report: Value = serde_json::from_slice(&a.1).unwrap();
    let unc = report["raw_sq_unc_db"].as_f64().unwrap();
    let expected = (2.0f64 * 30.0 / 100e3).sqrt() * 10.0 / std::f64::consts::LN_10;
    assert!((unc - expected).abs() < 1e-8);
    assert_eq!(report["trace"]["noiseless"], Value::Bool(false));
}

#[test]
fn simulate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let nl = write_netlist(
        dir.path(),
        "modes: a\nsqueezer a r=2\nhomodyne a eta_pd=1 eta_e=1 ratio=0.5 sweep=0:1:4 vbw=1e6\n",
    );
    let o = sqzsim(&["simulate", &nl]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("out-of-range"));

    let o = sqzsim(&[
        "simulate",
        &fixture("paper_chip.nl"),
        "--csv",
        "/nonexistent/dir/t.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn analyze_examples() {
    let o = sqzsim(&[
        "analyze", "--sq-db", "-2.00", "--asq-db", "2.80", "--unc-db", "0.05", "--eta", "0.71",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert!((r["inferred_sq_db"].as_f64().unwrap() + 3.185).abs() < 0.001);
    assert!((r["inferred_asq_db"].as_f64().unwrap() - 3.570).abs() < 0.001);
    assert!((r["purity_product"].as_f64().unwrap() - 1.0927).abs() < 1e-4);
    assert!(stdout(&o).contains("\"eta_total\": 0.710000000"));

    let r = json(&sqzsim(&[
        "analyze", "--sq-db", "0", "--asq-db", "0", "--eta", "0.5",
    ]));
    assert_eq!(r["inferred_sq_db"].as_f64(), Some(0.0));
    assert_eq!(r["inferred_asq_db"].as_f64(), Some(0.0));

    let o = sqzsim(&[
        "analyze",
        "--sq-db",
        "-2",
        "--asq-db",
        "2.8",
        "--budget",
        "fresnel=0.86,filter=0.99,pd=0.88,e=0.95",
    ]);
    let r = json(&o);
    assert!((r["eta_total"].as_f64().unwrap() - 0.7117704).abs() < 1e-9);
    assert_eq!(r["budget"]["pd"].as_f64(), Some(0.88));
}

#[test]
fn analyze_infeasible() {
    let o = sqzsim(&["analyze", "--sq-db", "-6", "--eta", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("infeasible"));
    let o = sqzsim(&["analyze", "--sq-db", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extrapolate_examples() {
    let o = sqzsim(&[
        "extrapolate",
        "--gain",
        "0.058014",
        "--pump-mw",
        "500",
        "--eta-eff",
        "0.95",
    ]);
    assert!((stdout_number(&o) + 9.17).abs() < 0.005);
    let o = sqzsim(&[
        "extrapolate",
        "--gain",
        "0.058014",
        "--pump-mw",
        "0",
        "--eta-eff",
        "0.95",
    ]);
    assert_eq!(stdout_number(&o), 0.0);
    let o = sqzsim(&[
        "extrapolate",
        "--gain",
        "0.058014",
        "--pump-mw",
        "40",
        "--eta-eff",
        "1",
    ]);
    assert!((stdout_number(&o) + 3.19).abs() < 0.005);
    let o = sqzsim(&["extrapolate", "--gain", "0.05", "--pump-mw", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calibrate_examples() {
    let o = sqzsim(&["calibrate", "--snr-db", "12.8", "--n-chip", "2.211"]);
    assert_eq!(
        stdout(&o),
        "electronic_efficiency 0.947519254\nfresnel_efficiency 0.857764608\n"
    );
    let o = sqzsim(&["calibrate", "--n-chip", "1.0"]);
    assert_eq!(stdout(&o), "fresnel_efficiency 1.000000000\n");
    assert_eq!(sqzsim(&["calibrate"]).status.code(), Some(2));
}
