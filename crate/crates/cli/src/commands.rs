use gplab_core::asymptotics::{energy_level, extract_eps, remainder_norm, target_constants, TargetLaws};
use gplab_core::bubble::{bubble_constants, bubble_constants_by_quadrature, Moment};
use gplab_core::greenfn::{default_green_grid, solve_green, GreenData};
use gplab_core::shooting::{
    find_ground_state, find_singular, omega_inf_only, sweep_b, ShootingOptions, ShotSolution,
};
use gplab_core::spectral::{
    eigenfunction_residual, kummer_fd_check, kummer_spec, morse_index, nondegeneracy_gap, GapVerdict, MorseIndex,
    RefinementPolicy,
};
use gplab_core::Error;

use crate::config::{Command, Policy, RunConfig};
use crate::output::{Cell, Table};
use crate::report;

/// How a run ended badly; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Dimension { .. } => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// A finished table, plus the failure to report after it is written.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<Failure>,
}

impl Outcome {
    fn ok(table: Table) -> Result<Self, Failure> {
        Ok(Self { table, failure: None })
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cfg.command() {
        Command::Constants => constants(cfg),
        Command::Green => green(cfg),
        Command::Ground => ground(cfg),
        Command::SweepOmega => sweep_omega(cfg),
        Command::Singular => singular(cfg),
        Command::SweepB => sweep_b_cmd(cfg),
        Command::Morse => morse(cfg),
        Command::Kummer => kummer(cfg),
        Command::Report => report::report(cfg),
    }
}

fn shooting_options(cfg: &RunConfig) -> ShootingOptions {
    ShootingOptions {
        rtol: cfg.tol.unwrap_or(ShootingOptions::default().rtol),
        grid_n: cfg.grid_n,
        r_max: cfg.r_max,
        r_min: cfg.r_min,
    }
}

fn green_for(d: u32) -> Result<Option<GreenData>, Failure> {
    if d > 6 {
        return Ok(None);
    }
    Ok(Some(solve_green(d, &default_green_grid(d)?)?))
}

fn laws_for(d: u32) -> Result<TargetLaws, Failure> {
    let green = green_for(d)?;
    Ok(target_constants(d, green.as_ref(), &bubble_constants::<f64>(d)?)?)
}

fn moment(m: Moment<f64>) -> f64 {
    m.finite().unwrap_or(f64::INFINITY)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn constants(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let beta = bubble_constants::<f64>(d)?;
    let quad = bubble_constants_by_quadrature(d)?;
    let mut t = Table::new(&["d", "quantity", "value", "quadrature", "relative_difference"]);
    let pairs = [
        ("norm_u_l2_sq", moment(beta.norm_l2_sq), moment(quad.norm_l2_sq)),
        ("norm_xu_l2_sq", moment(beta.norm_xu_sq), moment(quad.norm_xu_sq)),
        ("norm_u_source", beta.norm_source, quad.norm_source),
        ("grad_u_l2_sq", beta.grad_sq, quad.grad_sq),
        ("sobolev_s", beta.sobolev_s, quad.sobolev_s),
    ];
    for (name, a, b) in pairs {
        t.push(vec![d.into(), name.into(), a.into(), b.into(), rel_diff(a, b).into()]);
    }
    let laws = laws_for(d)?;
    let nan = f64::NAN;
    t.push(vec![d.into(), "omega_star".into(), laws.omega_star.into(), nan.into(), nan.into()]);
    t.push(vec![d.into(), format!("eps_coeff_{}", laws.kind.name()).into(), laws.eps_coeff.into(), nan.into(), nan.into()]);
    t.push(vec![d.into(), "gap_coeff".into(), laws.gap_coeff.into(), nan.into(), nan.into()]);
    if let Some(alt) = laws.gap_coeff_alt {
        t.push(vec![d.into(), "gap_coeff_alt".into(), alt.into(), nan.into(), nan.into()]);
    }
    Outcome::ok(t)
}

fn green(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let g = green_for(d)?.expect("d ≤ 6 validated");
    let g_min = g.g.values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut t = Table::new(&["d", "quantity", "value"]);
    let rows: [(&str, Option<f64>); 9] = [
        ("omega_star", Some(g.omega_star)),
        ("h_at_zero", g.h_at_zero),
        ("h_slope", g.h_slope),
        ("log_coeff", g.log_coeff_d6),
        ("log_const", g.log_const_d6),
        ("g_l2_sq", g.g_l2_sq),
        ("decay_sigma", Some(g.decay_sigma)),
        ("plateau", Some(g.plateau)),
        ("g_min", Some(g_min)),
    ];
    for (name, v) in rows {
        t.push(vec![d.into(), name.into(), v.into()]);
    }
    Outcome::ok(t)
}

const GROUND_COLUMNS: [&str; 12] = [
    "d",
    "omega",
    "status",
    "b",
    "eps",
    "I_omega",
    "S_minus_I",
    "ratio_to_law",
    "energy_ratio_to_law",
    "remainder_norm",
    "ode_residual",
    "r_trusted",
];

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::NoSolution { .. } => "NoSolution",
        Error::NoBracket { .. } => "NoBracket",
        Error::DecayNotCertified(_) => "DecayNotCertified",
        Error::Unconverged(_) => "Unconverged",
        Error::NonStabilizing { .. } => "NonStabilizing",
        Error::StepUnderflow { .. } => "StepUnderflow",
        _ => "Error",
    }
}

fn ground_row(d: u32, omega: f64, sol: &ShotSolution, laws: Option<&TargetLaws>) -> Result<Vec<Cell>, Error> {
    let eps = extract_eps(sol)?;
    let e = energy_level(sol)?;
    let s = bubble_constants::<f64>(d)?.sobolev_s;
    let rem = remainder_norm(sol, eps)?;
    let (ratio, eratio) = match laws {
        Some(l) => (l.eps_ratio(omega, eps), (s - e.value()) / l.energy_gap(omega)),
        None => (f64::NAN, f64::NAN),
    };
    Ok(vec![
        d.into(),
        omega.into(),
        "ok".into(),
        sol.b.into(),
        eps.into(),
        e.value().into(),
        (s - e.value()).into(),
        ratio.into(),
        eratio.into(),
        rem.into(),
        sol.ode_residual.into(),
        sol.r_trusted.into(),
    ])
}

fn failed_row(d: u32, omega: f64, e: &Error) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![d.into(), omega.into(), error_name(e).into()];
    row.resize(GROUND_COLUMNS.len(), Cell::Num(f64::NAN));
    row
}

/// Ground states for each `ω`; failed points keep a row with their error.
fn ground_table(cfg: &RunConfig, omegas: &[f64]) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let opts = shooting_options(cfg);
    let laws = laws_for(d).ok();
    let mut t = Table::new(&GROUND_COLUMNS);
    let mut failure = None;
    for &w in omegas {
        let row = find_ground_state(d, w, &opts).and_then(|sol| ground_row(d, w, &sol, laws.as_ref()));
        match row {
            Ok(r) => t.push(r),
            Err(e @ (Error::InvalidArgument(_) | Error::Dimension { .. })) => return Err(e.into()),
            Err(e) => {
                t.push(failed_row(d, w, &e));
                if failure.is_none() {
                    failure = Some(Failure::Numerical(format!("ω = {w}: {e}")));
                }
            }
        }
    }
    Ok(Outcome { table: t, failure })
}

fn ground(cfg: &RunConfig) -> Result<Outcome, Failure> {
    ground_table(cfg, &[cfg.omega.expect("validated")])
}

/// Sample sets for the two laws with fixed acceptance samples.
pub fn default_omegas(d: u32) -> Option<Vec<f64>> {
    match d {
        3 => Some(vec![1.2, 1.1, 1.05, 1.025]),
        7 => Some(vec![0.4, 0.2, 0.1, 0.05]),
        _ => None,
    }
}

fn sweep_omega(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let omegas = cfg.omega_list.clone().or_else(|| default_omegas(cfg.d())).expect("validated");
    ground_table(cfg, &omegas)
}

const DEFAULT_R0: f64 = 1e-4;

fn singular(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let opts = ShootingOptions { r_min: None, ..shooting_options(cfg) };
    let r0 = cfg.r_min.unwrap_or(DEFAULT_R0);
    let s = find_singular(d, r0, &opts)?;
    let half = omega_inf_only(d, 0.5 * r0, &opts)?;
    let f: Vec<f64> = s.profile.iter().map(|(r, u)| r * u).collect();
    let f_max = f.iter().copied().fold(f64::MIN, f64::max);
    let decreasing = f.windows(2).all(|w| w[1] < w[0]);
    let mut t = Table::new(&[
        "d",
        "r0",
        "omega_inf",
        "omega_inf_half_r0",
        "inner_constant",
        "f_max",
        "f_decreasing",
        "ode_residual",
        "r_trusted",
        "decay_certified",
    ]);
    t.push(vec![
        d.into(),
        r0.into(),
        s.omega_inf.into(),
        half.into(),
        s.inner_constant.into(),
        f_max.into(),
        decreasing.into(),
        s.ode_residual.into(),
        s.r_trusted.into(),
        s.decay_certified.into(),
    ]);
    let failure = (!s.decay_certified).then(|| Failure::Numerical("singular solution not certified".into()));
    Ok(Outcome { table: t, failure })
}

/// `n` amplitudes spaced evenly in `ln b` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn sweep_b_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let opts = ShootingOptions { r_min: None, ..shooting_options(cfg) };
    let bs = match (&cfg.b_list, &cfg.b_log) {
        (Some(l), _) => l.clone(),
        (None, Some(g)) => log_grid(g[0], g[1], g[2] as usize),
        (None, None) => log_grid(10.0, 1e4, 40),
    };
    let w_inf = omega_inf_only(d, cfg.r_min.unwrap_or(DEFAULT_R0), &opts)?;
    let mut t = Table::new(&["d", "b", "status", "omega_b", "omega_inf", "delta"]);
    let mut failure = None;
    for p in sweep_b(d, &bs, &opts) {
        match p.omega_b {
            Ok(w) => t.push(vec![d.into(), p.b.into(), "ok".into(), w.into(), w_inf.into(), (w - w_inf).into()]),
            Err(e) => {
                t.push(vec![d.into(), p.b.into(), error_name(&e).into(), f64::NAN.into(), w_inf.into(), f64::NAN.into()]);
                if failure.is_none() {
                    failure = Some(Failure::Numerical(format!("b = {}: {e}", p.b)));
                }
            }
        }
    }
    Ok(Outcome { table: t, failure })
}

fn morse(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let policy_kind = cfg.policy.unwrap_or_default();
    let mut policy = match policy_kind {
        Policy::Halving => RefinementPolicy::default_for(d),
        Policy::PerOscillation => RefinementPolicy::per_oscillation(d).expect("5 ≤ d ≤ 12 validated"),
    };
    if let Some(r) = cfg.r_min {
        policy.r_min = r;
    }
    if let Some(r) = cfg.r_max {
        policy.r_max = r;
    }
    if !(policy.r_min < policy.r_max) {
        return Err(Failure::Config(format!("r_min {} must be below r_max {}", policy.r_min, policy.r_max)));
    }
    let r0 = (0.5 * policy.finest_r_min()).min(1e-5);
    if r0 < 1e-8 {
        return Err(Failure::Config(format!("finest r_min {:e} is below the reach of the singular solver", policy.finest_r_min())));
    }
    let opts = ShootingOptions { rtol: cfg.tol.unwrap_or(ShootingOptions::default().rtol), ..ShootingOptions::default() };
    let sing = find_singular(d, r0, &opts)?;
    let rep = morse_index(&sing, &policy)?;
    let index = match rep.morse_index {
        MorseIndex::Finite(k) => k.to_string(),
        MorseIndex::Unbounded => "unbounded".into(),
        MorseIndex::Undetermined => "undetermined".into(),
    };
    let (verdict, margin_err) = if d >= 13 {
        let g = nondegeneracy_gap(&rep)?;
        let v = match g.verdict {
            GapVerdict::Nondegenerate => "nondegenerate",
            GapVerdict::Outside => "outside",
            GapVerdict::Inconclusive => "inconclusive",
        };
        (v, g.error_estimate)
    } else {
        ("n/a", f64::NAN)
    };
    let mut t = Table::new(&[
        "d",
        "omega_inf",
        "policy",
        "morse_index",
        "count",
        "r_min",
        "r_max",
        "n",
        "tau1",
        "tau2",
        "tau_error",
        "verdict",
    ]);
    for e in &rep.refinement_trace {
        t.push(vec![
            d.into(),
            rep.omega_inf.into(),
            policy_kind.name().into(),
            index.clone().into(),
            e.count.into(),
            e.r_min.into(),
            e.r_max.into(),
            e.n.into(),
            rep.tau[0].into(),
            rep.tau[1].into(),
            margin_err.into(),
            verdict.into(),
        ]);
    }
    Outcome::ok(t)
}

fn kummer(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let d = cfg.d();
    let k = kummer_spec(d)?;
    if k.l_plus.is_none() {
        let mut t = Table::new(&["d", "alpha_osc", "beta_osc"]);
        t.push(vec![d.into(), k.alpha_osc.into(), k.beta_osc.into()]);
        return Outcome::ok(t);
    }
    let levels = cfg.levels.unwrap_or(4);
    let checks = kummer_fd_check(d, levels, cfg.r_min.unwrap_or(1e-6), cfg.r_max.unwrap_or(10.0), 0.01)?;
    let samples: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let mut t = Table::new(&[
        "d",
        "n",
        "sigma",
        "l_plus",
        "l_minus",
        "fd_coarse",
        "fd_fine",
        "fd_richardson",
        "relative_error",
        "eigenfunction_residual",
    ]);
    for c in checks {
        t.push(vec![
            d.into(),
            c.n.into(),
            c.exact.into(),
            k.l_plus.into(),
            k.l_minus.into(),
            c.coarse.into(),
            c.fine.into(),
            c.richardson.into(),
            c.relative_error.into(),
            eigenfunction_residual(d, c.n as u32, &samples)?.into(),
        ]);
    }
    Outcome::ok(t)
}
