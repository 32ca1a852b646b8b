use std::path::Path;
use std::process::{Command, Output};

fn gplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gplab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV, header first.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let r = rows(csv);
    let i = r[0].iter().position(|c| c == name).unwrap();
    r[1..].iter().map(|row| row[i].clone()).collect()
}

#[test]
fn kummer_d13_lists_the_closed_form_levels() {
    let o = gplab(&["kummer", "--d", "13"]);
    assert_eq!(o.status.code(), Some(0));
    let sigma: Vec<f64> = column(&stdout(&o), "sigma").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(sigma, vec![3.0, 7.0, 11.0, 15.0]);
    let err: Vec<f64> = column(&stdout(&o), "relative_error").iter().map(|s| s.parse().unwrap()).collect();
    assert!(err.iter().all(|&e| e < 5e-3));
}

#[test]
fn morse_d16_counts_one() {
    let o = gplab(&["morse", "--d", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(column(&out, "count").iter().all(|c| c == "1"));
    assert!(column(&out, "morse_index").iter().all(|c| c == "1"));
    assert_eq!(column(&out, "verdict")[0], "nondegenerate");
}

#[test]
fn nonexistence_exits_3_after_writing_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = gplab(&["ground", "--d", "5", "--omega", "5.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no positive decaying solution"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(column(&text, "status"), vec!["NoSolution"]);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["kummer", "--d", "2"][..],
        &["green", "--d", "7"],
        &["ground", "--d", "5"],
        &["ground", "--d", "5", "--omega", "2", "--grid-n", "10"],
        &["ground", "--d", "5", "--omega", "2", "--tol", "0"],
        &["morse", "--d", "16", "--policy", "per-oscillation"],
        &["frobnicate", "--d", "5"],
        &["kummer", "--d", "13", "--nonsense"],
        &[],
    ] {
        let o = gplab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"subcommand": "kummer", "d": 16, "levels": 2}"#).unwrap();
    let from_file = gplab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(column(&stdout(&from_file), "d"), vec!["16", "16"]);

    let overridden = gplab(&["--config", cfg.to_str().unwrap(), "--d", "13"]);
    let text = stdout(&overridden);
    assert_eq!(column(&text, "d"), vec!["13", "13"]);
    let hash = |s: &str| s.lines().find(|l| l.starts_with("# config")).unwrap().to_string();
    assert_ne!(hash(&text), hash(&stdout(&from_file)));

    std::fs::write(&cfg, r#"{"subcommand": "kummer", "d": 16, "colour": "red"}"#).unwrap();
    assert_eq!(gplab(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(gplab(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = gplab(&["constants", "--d", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# gplab "));
    for v in column(&text, "value") {
        let mantissa = v.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{v}");
    }
    // nothing but the two outputs is left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&gplab(&["kummer", "--d", "20", "--levels", "3"]));
    let json = stdout(&gplab(&["kummer", "--d", "20", "--levels", "3", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let jrows = doc["rows"].as_array().unwrap();
    let sigma = column(&csv, "sigma");
    assert_eq!(jrows.len(), sigma.len());
    for (r, s) in jrows.iter().zip(&sigma) {
        assert_eq!(r["sigma"].as_f64().unwrap(), s.parse::<f64>().unwrap());
    }
    assert_eq!(doc["subcommand"], "kummer");
    let hash_line = csv.lines().find(|l| l.starts_with("# config")).unwrap();
    assert!(hash_line.ends_with(doc["config_sha256"].as_str().unwrap()));
}

fn report(dir: &Path) -> Output {
    gplab(&["report", "--input", dir.to_str().unwrap()])
}

#[test]
fn report_skips_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["13", "16", "20"] {
        let out = dir.path().join(format!("kummer_d{d}.csv"));
        assert_eq!(gplab(&["kummer", "--d", d, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    }
    let o = report(dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let status = column(&text, "status");
    assert_eq!(status.len(), 11);
    assert_eq!(status[0], "pass");
    assert!(status[1..].iter().all(|s| s == "skipped"), "{status:?}");
}

#[test]
fn report_rejects_corrupted_inputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("kummer_d13.csv"), "# gplab\nd,n,sigma\n13,0\n").unwrap();
    assert_eq!(report(dir.path()).status.code(), Some(2));
    assert_eq!(report(&dir.path().join("absent")).status.code(), Some(2));
}

#[test]
fn sweep_b_keeps_order() {
    let o = gplab(&["sweep-b", "--d", "8", "--b-list", "100,10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let b: Vec<f64> = column(&text, "b").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(b, vec![100.0, 10.0]);
    let w_inf: Vec<f64> = column(&text, "omega_inf").iter().map(|s| s.parse().unwrap()).collect();
    assert!(w_inf.iter().all(|&w| w > 4.0 && w < 8.0));
}
