//! Pass/fail table over the outputs of earlier runs in one directory.
//!
//! Files are looked up by name: `<subcommand>_d<d>.csv`, and
//! `ground_d<d>_omega<ω>.csv` for single ground-state runs.

use std::path::Path;

use gplab_core::TridiagonalOperator;

use crate::commands::{Failure, Outcome};
use crate::config::RunConfig;
use crate::output::{fmt_num, ParsedCsv, Table};

enum Load {
    Missing,
    Found(ParsedCsv),
}

fn load(dir: &Path, name: &str) -> Result<Load, Failure> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(Load::Missing);
    }
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    ParsedCsv::parse(&text)
        .map(Load::Found)
        .map_err(|e| Failure::Config(format!("{} is not a gplab table: {e}", path.display())))
}

/// Loads every file or reports the first missing one.
fn load_all(dir: &Path, names: &[String]) -> Result<Result<Vec<ParsedCsv>, String>, Failure> {
    let mut out = Vec::new();
    for n in names {
        match load(dir, n)? {
            Load::Found(c) => out.push(c),
            Load::Missing => return Ok(Err(format!("missing {n}"))),
        }
    }
    Ok(Ok(out))
}

fn col<T>(r: Result<T, String>, file: &str) -> Result<T, Failure> {
    r.map_err(|e| Failure::Config(format!("{file}: {e}")))
}

struct Row {
    status: &'static str,
    measured: String,
    tolerance: &'static str,
}

fn verdict(pass: bool, measured: String, tolerance: &'static str) -> Row {
    Row { status: if pass { "pass" } else { "fail" }, measured, tolerance }
}

fn skipped(why: String, tolerance: &'static str) -> Row {
    Row { status: "skipped", measured: why, tolerance }
}

fn names(prefix: &str, ds: &[u32]) -> Vec<String> {
    ds.iter().map(|d| format!("{prefix}_d{d}.csv")).collect()
}

fn sign_changes(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

fn ok_rows(c: &ParsedCsv, file: &str) -> Result<Vec<usize>, Failure> {
    let status = col(c.text("status"), file)?;
    Ok((0..status.len()).filter(|&i| status[i] == "ok").collect())
}

fn kummer_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "relative error < 5e-3 for n = 0..3";
    let files = names("kummer", &[13, 16, 20]);
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let mut worst: f64 = 0.0;
    let mut levels = true;
    for (t, f) in tables.iter().zip(&files) {
        let e = col(t.nums("relative_error"), f)?;
        levels &= e.len() >= 4;
        worst = worst.max(e.iter().take(4).copied().fold(0.0, f64::max));
    }
    Ok(verdict(levels && worst < 5e-3, format!("max relative error {}", fmt_num(worst)), TOL))
}

fn morse_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "d=16,20: 1; d=13..15: 1 or 2; d=5,8,12: unbounded under r_min halving";
    let ds = [5u32, 8, 12, 13, 14, 15, 16, 20];
    let files = names("morse", &ds);
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for ((t, f), &d) in tables.iter().zip(&files).zip(&ds) {
        let index = col(t.text("morse_index"), f)?;
        let policy = col(t.text("policy"), f)?;
        let counts = col(t.nums("count"), f)?;
        let m = index.first().cloned().unwrap_or_default();
        let ok = match d {
            16 | 20 => m == "1",
            13..=15 => m == "1" || m == "2",
            _ => m == "unbounded" && policy.first().map(String::as_str) == Some("halving"),
        };
        pass &= ok;
        let trace: Vec<String> = counts.iter().map(|c| format!("{c}")).collect();
        parts.push(format!("d{d}={m} [{}]{}", trace.join(" "), if policy[0] == "halving" { "" } else { " per-oscillation" }));
    }
    Ok(verdict(pass, parts.join("; "), TOL))
}

fn singular_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "omega_inf in (d-4, d); r u decreasing, ≤ √(d-3); r0 halving shift ≤ 1e-6";
    let ds = [8u32, 13, 16];
    let files = names("singular", &ds);
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for ((t, f), &d) in tables.iter().zip(&files).zip(&ds) {
        let w = col(t.nums("omega_inf"), f)?[0];
        let half = col(t.nums("omega_inf_half_r0"), f)?[0];
        let fmax = col(t.nums("f_max"), f)?[0];
        let dec = col(t.bools("f_decreasing"), f)?[0];
        let df = f64::from(d);
        let shift = (w - half).abs();
        pass &= w > df - 4.0 && w < df && dec && fmax <= (df - 3.0).sqrt() && shift <= 1e-6;
        parts.push(format!("d{d}: omega_inf {}, shift {}", fmt_num(w), fmt_num(shift)));
    }
    Ok(verdict(pass, parts.join("; "), TOL))
}

fn oscillation_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "d=8: ≥ 3 sign changes; d=16: none, |delta| decreasing on the upper half";
    let files = names("sweep-b", &[8, 16]);
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let d8 = col(tables[0].nums("delta"), &files[0])?;
    let d16 = col(tables[1].nums("delta"), &files[1])?;
    let all_finite = d8.iter().chain(&d16).all(|v| v.is_finite());
    let (c8, c16) = (sign_changes(&d8), sign_changes(&d16));
    let upper = &d16[d16.len() / 2..];
    let decreasing = upper.windows(2).all(|w| w[1].abs() < w[0].abs());
    let pass = all_finite && d8.len() >= 40 && d16.len() >= 40 && c8 >= 3 && c16 == 0 && decreasing;
    Ok(verdict(
        pass,
        format!("d8 sign changes {c8} of {} points; d16 sign changes {c16}, upper half decreasing {decreasing}", d8.len()),
        TOL,
    ))
}

/// `(ω, column)` of the accepted rows, ordered from the farthest to the
/// nearest `ω*`.
fn sweep_samples(t: &ParsedCsv, f: &str, column: &str, omega_star: f64) -> Result<Vec<(f64, f64)>, Failure> {
    let rows = ok_rows(t, f)?;
    let w = col(t.nums("omega"), f)?;
    let v = col(t.nums(column), f)?;
    let mut s: Vec<(f64, f64)> = rows.iter().map(|&i| (w[i], v[i])).collect();
    s.sort_by(|a, b| (b.0 - omega_star).abs().total_cmp(&(a.0 - omega_star).abs()));
    Ok(s)
}

fn monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0]) || v.windows(2).all(|w| w[1] > w[0])
}

fn d7_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "eps ratio² in [0.95, 1.05] at the smallest ω after a monotone trend; energy within 10%";
    let f = "sweep-omega_d7.csv";
    let t = match load(dir, f)? {
        Load::Found(t) => t,
        Load::Missing => return Ok(skipped(format!("missing {f}"), TOL)),
    };
    let eps: Vec<f64> = sweep_samples(&t, f, "ratio_to_law", 0.0)?.iter().map(|s| s.1 * s.1).collect();
    let energy: Vec<f64> = sweep_samples(&t, f, "energy_ratio_to_law", 0.0)?.iter().map(|s| s.1).collect();
    let (Some(&e), Some(&g)) = (eps.last(), energy.last()) else {
        return Ok(verdict(false, "no accepted samples".into(), TOL));
    };
    let pass = eps.len() >= 4 && monotone(&eps) && (0.95..=1.05).contains(&e) && (g - 1.0).abs() <= 0.1;
    Ok(verdict(pass, format!("eps ratio² {}, energy ratio {}", fmt_num(e), fmt_num(g)), TOL))
}

fn d3_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "eps ratio in [0.90, 1.10] at the smallest ω-1; |H(0)| ≤ 1e-4";
    let files = vec!["sweep-omega_d3.csv".to_string(), "green_d3.csv".to_string()];
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let ratios: Vec<f64> = sweep_samples(&tables[0], &files[0], "ratio_to_law", 1.0)?.iter().map(|s| s.1).collect();
    let h0 = green_value(&tables[1], &files[1], "h_at_zero")?;
    let Some(&r) = ratios.last() else {
        return Ok(verdict(false, "no accepted samples".into(), TOL));
    };
    let pass = ratios.len() >= 4 && (0.9..=1.1).contains(&r) && h0.abs() <= 1e-4;
    Ok(verdict(pass, format!("eps ratio {}, H(0) {}", fmt_num(r), fmt_num(h0)), TOL))
}

fn green_value(t: &ParsedCsv, f: &str, name: &str) -> Result<f64, Failure> {
    let q = col(t.text("quantity"), f)?;
    let v = col(t.nums("value"), f)?;
    q.iter()
        .position(|x| x == name)
        .map(|i| v[i])
        .ok_or_else(|| Failure::Config(format!("{f}: no {name} row")))
}

fn green_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "H(0) > 0 for d=4,5; log coefficient -0.25 ± 0.01 for d=6; G > 0 with σ > 0";
    let ds = [4u32, 5, 6];
    let files = names("green", &ds);
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let h4 = green_value(&tables[0], &files[0], "h_at_zero")?;
    let h5 = green_value(&tables[1], &files[1], "h_at_zero")?;
    let c6 = green_value(&tables[2], &files[2], "log_coeff")?;
    let mut positive = true;
    for (t, f) in tables.iter().zip(&files) {
        positive &= green_value(t, f, "g_min")? > 0.0 && green_value(t, f, "decay_sigma")? > 0.0;
    }
    let pass = h4 > 0.0 && h5 > 0.0 && (c6 + 0.25).abs() <= 0.01 && positive;
    Ok(verdict(
        pass,
        format!("H(0) d4 {}, d5 {}; d6 log coefficient {}; positive with decay {positive}", fmt_num(h4), fmt_num(h5), fmt_num(c6)),
        TOL,
    ))
}

fn nonexistence_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "NoSolution for (5, 5.5), (3, 0.5), (5, -1)";
    let files: Vec<String> =
        ["ground_d5_omega5.5.csv", "ground_d3_omega0.5.csv", "ground_d5_omega-1.csv"].map(String::from).to_vec();
    let tables = match load_all(dir, &files)? {
        Ok(t) => t,
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let mut statuses = Vec::new();
    for (t, f) in tables.iter().zip(&files) {
        statuses.push(col(t.text("status"), f)?.first().cloned().unwrap_or_default());
    }
    let pass = statuses.iter().all(|s| s == "NoSolution");
    Ok(verdict(pass, statuses.join(", "), TOL))
}

fn ordering_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "0 < I_ω < S and S - I_ω decreasing toward ω* on every sweep";
    let mut entries: Vec<_> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.starts_with("sweep-omega_d") && n.ends_with(".csv"))
            .collect(),
        Err(e) => return Err(Failure::Config(format!("cannot list {}: {e}", dir.display()))),
    };
    entries.sort();
    if entries.is_empty() {
        return Ok(skipped("no sweep-omega files".into(), TOL));
    }
    let mut pass = true;
    let mut samples = 0;
    for f in &entries {
        let Load::Found(t) = load(dir, f)? else { continue };
        let d: u32 = f["sweep-omega_d".len()..f.len() - 4]
            .parse()
            .map_err(|_| Failure::Config(format!("{f}: cannot read d from the name")))?;
        let star = if d == 3 { 1.0 } else { 0.0 };
        let gaps: Vec<f64> = sweep_samples(&t, f, "S_minus_I", star)?.iter().map(|s| s.1).collect();
        let levels: Vec<f64> = sweep_samples(&t, f, "I_omega", star)?.iter().map(|s| s.1).collect();
        samples += gaps.len();
        pass &= levels.iter().all(|&i| i > 0.0) && gaps.iter().all(|&g| g > 0.0);
        pass &= gaps.windows(2).all(|w| w[1] < w[0]);
    }
    Ok(verdict(pass, format!("{samples} samples in {} sweeps", entries.len()), TOL))
}

/// Sturm counts of three matrices with known spectra.
fn sturm_oracles() -> bool {
    let count = |diag: Vec<f64>, off: Vec<f64>, x: f64| TridiagonalOperator::new(diag, off).unwrap().count_eigs_below(x).below;
    // diag(1, 2, 3)
    let a = (0..5).map(|k| count(vec![1.0, 2.0, 3.0], vec![0.0, 0.0], 0.5 + k as f64)).collect::<Vec<_>>();
    // [[2, 1], [1, 2]] has 1 and 3
    let b = [count(vec![2.0, 2.0], vec![1.0], 0.99), count(vec![2.0, 2.0], vec![1.0], 1.01), count(vec![2.0, 2.0], vec![1.0], 3.01)];
    // second difference, n = 5: 2 - 2cos(kπ/6)
    let lap = |x: f64| count(vec![2.0; 5], vec![-1.0; 4], x);
    let c = (1..=5).all(|k| {
        let ev = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 6.0).cos();
        lap(ev - 1e-9) == k - 1 && lap(ev + 1e-9) == k
    });
    a == [0, 1, 2, 3, 3] && b == [0, 1, 2] && c
}

fn algebra_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "bubble norms vs quadrature ≤ 1e-10; Sturm counts exact; Kummer residuals ≤ 1e-6";
    let mut constants = Vec::new();
    if let Ok(rd) = std::fs::read_dir(dir) {
        let mut names: Vec<String> = rd
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.starts_with("constants_d") && n.ends_with(".csv"))
            .collect();
        names.sort();
        constants = names;
    }
    let kummer = names("kummer", &[13, 16, 20]);
    let tables = match load_all(dir, &kummer)? {
        Ok(t) if !constants.is_empty() => t,
        Ok(_) => return Ok(skipped("no constants files".into(), TOL)),
        Err(why) => return Ok(skipped(why, TOL)),
    };
    let mut worst_bubble: f64 = 0.0;
    for f in &constants {
        let Load::Found(t) = load(dir, f)? else { continue };
        for v in col(t.nums("relative_difference"), f)? {
            if !v.is_nan() {
                worst_bubble = worst_bubble.max(v);
            }
        }
    }
    let mut worst_kummer: f64 = 0.0;
    for (t, f) in tables.iter().zip(&kummer) {
        worst_kummer = col(t.nums("eigenfunction_residual"), f)?.into_iter().fold(worst_kummer, f64::max);
    }
    let sturm = sturm_oracles();
    let pass = worst_bubble <= 1e-10 && worst_kummer <= 1e-6 && sturm;
    Ok(verdict(
        pass,
        format!(
            "bubble {} over {} files; Sturm {sturm}; Kummer residual {}",
            fmt_num(worst_bubble),
            constants.len(),
            fmt_num(worst_kummer)
        ),
        TOL,
    ))
}

fn nondegeneracy_row(dir: &Path) -> Result<Row, Failure> {
    const TOL: &str = "tau1 < omega_inf < tau2 with margin ≥ 10× error";
    let f = "morse_d16.csv";
    let t = match load(dir, f)? {
        Load::Found(t) => t,
        Load::Missing => return Ok(skipped(format!("missing {f}"), TOL)),
    };
    let v = col(t.text("verdict"), f)?.first().cloned().unwrap_or_default();
    let tau1 = col(t.nums("tau1"), f)?[0];
    let tau2 = col(t.nums("tau2"), f)?[0];
    let w = col(t.nums("omega_inf"), f)?[0];
    Ok(verdict(
        v == "nondegenerate",
        format!("tau1 {} < omega_inf {} < tau2 {}: {v}", fmt_num(tau1), fmt_num(w), fmt_num(tau2)),
        TOL,
    ))
}

pub fn report(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let dir = cfg.input.as_deref().expect("validated");
    if !dir.is_dir() {
        return Err(Failure::Config(format!("{} is not a directory", dir.display())));
    }
    let checks: [(&str, fn(&Path) -> Result<Row, Failure>); 11] = [
        ("1 kummer oracle", kummer_row),
        ("2 morse index", morse_row),
        ("3 singular solution", singular_row),
        ("4 oscillation vs monotonicity", oscillation_row),
        ("5 critical law d=7", d7_row),
        ("6 critical law d=3", d3_row),
        ("7 green regular part", green_row),
        ("8 nonexistence", nonexistence_row),
        ("9 energy ordering", ordering_row),
        ("10 oracle algebra", algebra_row),
        ("11 nondegeneracy d=16", nondegeneracy_row),
    ];
    let mut t = Table::new(&["criterion", "status", "measured", "tolerance"]);
    for (name, check) in checks {
        let r = check(dir)?;
        t.push(vec![name.into(), r.status.into(), r.measured.into(), r.tolerance.into()]);
    }
    Ok(Outcome { table: t, failure: None })
}
