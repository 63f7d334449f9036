use std::path::Path;
use std::process::{Command, Output};

fn pairquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairquant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const HEADER: &str = "p,g,energy,rho11,rho22,rho33,rho44,rho23,concurrence,mutual_info,classical,discord,s1,s2,theta,branch";

#[test]
fn csv_header_and_row_count() {
    let o = pairquant(&["pbcs-scan", "--omega", "4", "-t", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    assert_eq!(lines.count(), 9);
}

#[test]
fn extra_columns_follow_the_base_header() {
    let o = pairquant(&["pbcs-scan", "--omega", "3", "--a-side"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), format!("{HEADER},discord_a"));

    let o = pairquant(&["gscan", "--omega", "5", "--p", "2", "--g-values", "0.5,0.6"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",discord_ratio"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn sidecar_written_next_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = pairquant(&["exact-scan", "--omega", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("scan.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "exact-scan");
    assert_eq!(meta["rows"], 7);
    assert!(meta["error_rows"].as_array().unwrap().is_empty());
}

#[test]
fn json_output_parses() {
    let o = pairquant(&["one-level", "--omega", "10", "--p-range", "2:4", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["p"], 2);
    assert!(rows[2]["discord"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        &["pbcs-scan", "--p-range", "5:4"][..],
        &["pbcs-scan", "--omega", "2", "--p-range", "0:9"],
        &["pbcs-scan", "-t", "7"],
        &["pbcs-scan", "--format", "xml"],
        &["no-such-command"],
        &["gscan", "--method", "magic"],
    ] {
        let o = pairquant(args);
        assert_eq!(code(&o), 1, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&pairquant(&["--help"])), 0);
    assert_eq!(code(&pairquant(&["--version"])), 0);
}

#[test]
fn unwritable_output_exits_three() {
    let o = pairquant(&["pbcs-scan", "--omega", "2", "-o", "/nonexistent/dir/out.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.toml");
    std::fs::write(&cfg, "omega1 = 5\nomega2 = 5\np_range = \"0:10\"\npair_type = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = pairquant(&["--config", cfg, "pbcs-scan"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(String::from_utf8(from_file.stdout).unwrap().lines().count(), 12);

    let flagged = pairquant(&["--config", cfg, "pbcs-scan", "--p-range", "1:2"]);
    assert_eq!(String::from_utf8(flagged.stdout).unwrap().lines().count(), 3);
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "omeg = 5\n").unwrap();
    let o = pairquant(&["--config", cfg.to_str().unwrap(), "pbcs-scan"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bcs_prints_solution() {
    let o = pairquant(&["bcs", "--omega", "6", "--p", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p"], 3);
    assert!(v["energy"].as_f64().is_some());
}

#[test]
fn validate_passes() {
    let o = pairquant(&["validate"]);
    assert_eq!(code(&o), 0);
    assert!(!String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn repeated_runs_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = pairquant(&["pbcs-scan", "--omega", "8", "--format", "json", "-o", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
}
