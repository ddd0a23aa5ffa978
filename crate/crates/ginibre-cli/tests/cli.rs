use std::path::Path;
use std::process::{Command, Output};

fn ginibre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginibre")).args(args).env_remove("GINIBRE_PRECISION").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as field vectors, keyed by the header.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines.map(|l| header.iter().zip(l.split(',')).map(|(h, v)| (h.to_string(), v.to_string())).collect()).collect()
}

fn field(o: &Output, name: &str) -> f64 {
    rows(&stdout(o))[0][name].parse().unwrap()
}

#[test]
fn exact_single_entry_matrix() {
    let o = ginibre(&["exact", "--n", "1", "--x", "0.5", "--gamma", "2"]);
    assert!(o.status.success());
    assert!((field(&o, "log_mag") - 1.25f64.ln()).abs() < 1e-12);
    // 17 significant digits.
    assert!(stdout(&o).contains("2.2314355131420971e-1") || stdout(&o).contains("2.2314355131420976e-1"));
}

#[test]
fn zero_exponent_is_zero() {
    let o = ginibre(&["exact", "--n", "6", "--x", "0.5", "--gamma", "0"]);
    assert_eq!(field(&o, "log_mag"), 0.0);
    let o = ginibre(&["compare", "--n", "16", "--x", "0.3", "--gamma", "0"]);
    assert_eq!(field(&o, "residual_re"), 0.0);
}

#[test]
fn compare_predicts_barnes_at_two() {
    let o = ginibre(&["compare", "--n", "16", "--x", "0.5", "--gamma", "2"]);
    let n = 16f64;
    let predicted = 0.5 * n.ln() + n * (0.25 - 1.0) + 0.5 * (2.0 * std::f64::consts::PI).ln();
    assert!((field(&o, "log_asymptotic_re") - predicted).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = ginibre(&["exact", "--n", "4,8", "--x", "0.4", "--gamma", "1+0.5i", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
        assert!(Path::new(&format!("{}.manifest.json", out.display())).exists());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert!(rows(&text).iter().all(|r| r["status"] == "ok" && r["log_mag"].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    ginibre(&["mc", "--n", "2", "--z", "0.1", "--gamma", "1", "--samples", "2000", "--seed", "9", "--out", out.to_str().unwrap()]);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{}.manifest.json", out.display())).unwrap()).unwrap();
    assert_eq!(m["command"], "mc");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["samples"], 2000);
    assert_eq!(m["precision"], "double");
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["contour"]["nodes_start"].as_u64().unwrap() > 0);
}

#[test]
fn exit_codes() {
    assert_eq!(ginibre(&["exact", "--n", "2", "--x", "0.5"]).status.code(), Some(2));
    assert_eq!(ginibre(&["exact", "--n", "0", "--x", "0.5", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(ginibre(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(ginibre(&["mc", "--n", "1", "--z", "0", "--gamma", "1", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(ginibre(&["mc", "conjecture", "--n", "4", "--z", "0.1,0.2", "--gamma", "1"]).status.code(), Some(2));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_ginibre"))
        .args(["exact", "--n", "1", "--x", "0.5", "--gamma", "1"])
        .env("GINIBRE_PRECISION", "quad")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));

    let o = ginibre(&["exact", "--n", "4", "--x", "0.5", "--gamma", "1,-3"]);
    assert_eq!(o.status.code(), Some(1));
    let r = rows(&stdout(&o));
    assert_eq!(r[0]["status"], "ok");
    assert!(r[1]["status"].starts_with("\"error") || r[1]["status"].starts_with("error"));
}

#[test]
fn precision_flag_beats_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ginibre"));
        c.args(["exact", "--n", "4", "--x", "0.5", "--gamma", "1"]).env_remove("GINIBRE_PRECISION");
        if let Some(e) = env {
            c.env("GINIBRE_PRECISION", e);
        }
        if let Some(f) = flag {
            c.args(["--precision", f]);
        }
        rows(&stdout(&c.output().unwrap()))[0]["precision_used"].clone()
    };
    assert_eq!(run(None, None), "double");
    assert_eq!(run(Some("extended"), None), "extended");
    assert_eq!(run(Some("extended"), Some("double")), "double");
}

#[test]
fn verify_suites() {
    let o = ginibre(&["verify", "diffid", "--n", "6", "--x", "0.5", "--gamma", "1"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    let first = &doc["checks"][0];
    assert!(first["residual"].as_f64().unwrap() < 1e-5);
    assert_eq!(first["tolerance"].as_f64().unwrap(), 1e-5);

    let o = ginibre(&["verify", "sigma"]);
    assert!(o.status.success());
}

#[test]
fn mc_is_seed_deterministic() {
    let args = |seed: &str| ginibre(&["mc", "--n", "3", "--z", "0.2+0.1i", "--gamma", "1.5", "--samples", "5000", "--seed", seed]).stdout;
    assert_eq!(args("42"), args("42"));
    assert_ne!(args("42"), args("43"));
}

#[test]
fn mc_single_entry_second_moment() {
    let o = ginibre(&["mc", "--n", "1", "--z", "0.5", "--gamma", "2", "--samples", "1000000"]);
    let (mean, se) = (field(&o, "mean_re"), field(&o, "std_error"));
    assert!((mean - 1.25).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn mc_clt_and_conjecture_rows() {
    let o = ginibre(&["mc", "clt", "--n", "50", "--z", "0.5", "--samples", "1000"]);
    assert!(o.status.success());
    assert!(field(&o, "variance") > 0.0);

    let o = ginibre(&["mc", "conjecture", "--n", "8", "--z", "0.3,-0.3", "--gamma", "1,1", "--samples", "20000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().starts_with("CONJECTURE,8,"));
}

#[test]
fn rhp_sweep_rows_follow_grid_order() {
    let o = ginibre(&["rhp-sweep", "--n", "16,24", "--gamma", "1", "--r", "0,1"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let keys: Vec<(String, String)> = r.iter().map(|r| (r["N"].clone(), r["r"].clone())).collect();
    assert_eq!(keys, [("16", "0"), ("16", "1"), ("24", "0"), ("24", "1")].map(|(a, b)| (a.to_string(), b.to_string())));
    assert!(r.iter().all(|r| r["status"] == "ok"));
}
