//! Negative-eigenvalue counts for the linearization about the singular
//! solution, `L_∞ = -Δ + r² - ω_∞ - 3u_∞²`, and the exact spectrum of the
//! limiting operator `-Δ + r² - 3(d-3)/r²`.
//!
//! Radial operators are written in Liouville form `v = r^{(d-1)/2}u`,
//! `-v'' + [(d-1)(d-3)/(4r²) + V(r)]v`, and discretized by finite volumes
//! with Dirichlet ends, which keeps the matrix symmetric tridiagonal.

use crate::error::{Error, Result};
use crate::numkernel::{eval_polynomial, kummer_polynomial};
use crate::shooting::SingularSolution;
use crate::{RadialGrid, TridiagonalOperator};

/// Eigenvalue bisection tolerance.
pub const EIG_TOL: f64 = 1e-8;

/// Closed-form data of the limiting operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KummerSpec {
    pub d: u32,
    /// Exponents `l_± = (2 - d ± √(d²-16d+40))/2`; real for `d ≥ 13`.
    pub l_plus: Option<f64>,
    pub l_minus: Option<f64>,
    /// `σ_n = d + 4n + 2l₊`, `n = 0, 1, …`; empty unless `d ≥ 13`.
    pub sigma: Vec<f64>,
    /// `α = √(-d²+16d-40)/2` for `5 ≤ d ≤ 12`.
    pub alpha_osc: Option<f64>,
    /// `β = (d-4)/2`.
    pub beta_osc: f64,
}

/// Number of `σ_n` listed by [`kummer_spec`].
pub const KUMMER_LEVELS: usize = 8;

pub fn kummer_spec(d: u32) -> Result<KummerSpec> {
    if d < 5 {
        return Err(Error::Dimension { d, detail: "the singular solution exists for d ≥ 5".into() });
    }
    let df = f64::from(d);
    let disc = df * df - 16.0 * df + 40.0;
    let (l_plus, l_minus, sigma, alpha_osc) = if disc >= 0.0 {
        let s = disc.sqrt();
        let lp = (2.0 - df + s) / 2.0;
        let sigma = (0..KUMMER_LEVELS).map(|n| df + 4.0 * n as f64 + 2.0 * lp).collect();
        (Some(lp), Some((2.0 - df - s) / 2.0), sigma, None)
    } else {
        (None, None, Vec::new(), Some((-disc).sqrt() / 2.0))
    };
    Ok(KummerSpec { d, l_plus, l_minus, sigma, alpha_osc, beta_osc: (df - 4.0) / 2.0 })
}

/// Largest relative residual of `-ΔW + r²W - 3(d-3)W/r² - σ_n W` over
/// `r_samples` for `W = r^{l₊} e^{-r²/2} M(-n; l₊ + d/2; r²)`, with exact
/// derivatives.
pub fn eigenfunction_residual(d: u32, n: u32, r_samples: &[f64]) -> Result<f64> {
    let spec = kummer_spec(d)?;
    let l = spec.l_plus.ok_or_else(|| Error::Dimension { d, detail: "real l± need d ≥ 13".into() })?;
    let df = f64::from(d);
    let sigma = df + 4.0 * f64::from(n) + 2.0 * l;
    let p = kummer_polynomial(n, &(l + df / 2.0));
    let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let ddp: Vec<f64> = dp.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let mut worst: f64 = 0.0;
    for &r in r_samples {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("sample radius {r} must be positive")));
        }
        let s = r * r;
        // W = r^l e^{-r²/2} f(r) with f = P(r²); everything below is divided by r^l e^{-r²/2}
        let f = eval_polynomial(&p, s);
        let f1 = 2.0 * r * eval_polynomial(&dp, s);
        let f2 = 2.0 * eval_polynomial(&dp, s) + 4.0 * s * eval_polynomial(&ddp, s);
        let w1 = (l / r - r) * f + f1;
        let w2 = (l * (l - 1.0) / s + s - 1.0 - 2.0 * l) * f + f2 + 2.0 * (l / r - r) * f1;
        let terms = [-w2, -(df - 1.0) / r * w1, s * f, -3.0 * (df - 3.0) / s * f, -sigma * f];
        let sum: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        worst = worst.max(sum.abs() / scale);
    }
    Ok(worst)
}

/// `-v'' + q(r) v` on the grid, Dirichlet at both end nodes; the matrix acts
/// on the interior nodes. Symmetrized with the finite-volume mass.
fn schrodinger_operator(grid: &RadialGrid, q: impl Fn(usize, f64) -> f64) -> Result<TridiagonalOperator> {
    let r = grid.nodes();
    let n = r.len();
    if n < 5 {
        return Err(Error::InvalidArgument("operator grid needs at least 5 nodes".into()));
    }
    let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
    let mass: Vec<f64> = (1..n - 1).map(|i| 0.5 * (h[i - 1] + h[i])).collect();
    let diag: Vec<f64> =
        (1..n - 1).map(|i| (1.0 / h[i - 1] + 1.0 / h[i]) / mass[i - 1] + q(i, r[i])).collect();
    let off: Vec<f64> = (1..n - 2).map(|i| -1.0 / (h[i] * (mass[i - 1] * mass[i]).sqrt())).collect();
    Ok(TridiagonalOperator::new(diag, off)?.with_grid(grid.clone()))
}

fn centrifugal(d: u32, r: f64) -> f64 {
    let df = f64::from(d);
    (df - 1.0) * (df - 3.0) / (4.0 * r * r)
}

/// `-Δ + r² - 3(d-3)/r²` in Liouville form.
pub fn build_limiting(d: u32, grid: &RadialGrid) -> Result<TridiagonalOperator> {
    if d < 5 {
        return Err(Error::Dimension { d, detail: "limiting operator needs d ≥ 5".into() });
    }
    let c = 3.0 * (f64::from(d) - 3.0);
    schrodinger_operator(grid, |_, r| centrifugal(d, r) + r * r - c / (r * r))
}

/// `L_∞ = -Δ + r² - ω_∞ - 3u_∞²` in Liouville form.
pub fn build_linearized(sing: &SingularSolution, grid: &RadialGrid) -> Result<TridiagonalOperator> {
    if grid.r_min() < sing.r0 {
        return Err(Error::InvalidArgument(format!(
            "grid starts at {} below the singular solution's r0 = {}",
            grid.r_min(),
            sing.r0
        )));
    }
    let d = sing.d;
    schrodinger_operator(grid, |_, r| {
        let u = sing.eval(r);
        centrifugal(d, r) + r * r - sing.omega_inf - 3.0 * u * u
    })
}

/// `-Δ + r² - 3u_∞²`, the operator whose eigenvalues are the `τ_j`.
pub fn build_unshifted(sing: &SingularSolution, grid: &RadialGrid) -> Result<TridiagonalOperator> {
    Ok(build_linearized(sing, grid)?.shifted(-sing.omega_inf))
}

/// Grid for the spectral problems: uniform in `ξ = ln r + r` with spacing `dxi`.
pub fn spectral_grid(d: u32, r_min: f64, r_max: f64, dxi: f64) -> Result<RadialGrid> {
    if !(dxi > 0.0) {
        return Err(Error::InvalidArgument(format!("ξ spacing {dxi} must be positive")));
    }
    let span = (r_max / r_min).ln() + r_max - r_min;
    let n = (span / dxi).round() as usize + 1;
    RadialGrid::log_linear(r_min, r_max, n.max(64), d, 1.0)
}

/// Lowest eigenvalues of the limiting operator against the exact `σ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KummerCheck {
    pub d: u32,
    pub n: usize,
    pub exact: f64,
    pub coarse: f64,
    pub fine: f64,
    pub richardson: f64,
    pub relative_error: f64,
}

/// Computes the lowest `levels` eigenvalues of the limiting operator at
/// spacing `dxi` and `dxi/2` and extrapolates once assuming second order.
pub fn kummer_fd_check(d: u32, levels: usize, r_min: f64, r_max: f64, dxi: f64) -> Result<Vec<KummerCheck>> {
    let spec = kummer_spec(d)?;
    if spec.sigma.len() < levels {
        return Err(Error::Dimension { d, detail: "exact σ_n need d ≥ 13".into() });
    }
    let coarse = build_limiting(d, &spectral_grid(d, r_min, r_max, dxi)?)?.lowest_eigenvalues(levels, EIG_TOL)?;
    let fine = build_limiting(d, &spectral_grid(d, r_min, r_max, dxi / 2.0)?)?.lowest_eigenvalues(levels, EIG_TOL)?;
    Ok((0..levels)
        .map(|n| {
            let richardson = (4.0 * fine[n] - coarse[n]) / 3.0;
            let exact = spec.sigma[n];
            KummerCheck {
                d,
                n,
                exact,
                coarse: coarse[n],
                fine: fine[n],
                richardson,
                relative_error: (richardson - exact).abs() / exact,
            }
        })
        .collect())
}

/// How the negative-eigenvalue count is refined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementPolicy {
    pub r_min: f64,
    pub r_max: f64,
    pub dxi: f64,
    /// Factor applied to `r_min` at each step; `0.5` halves it.
    pub r_min_factor: f64,
    /// Number of `r_min` steps (the base grid not counted).
    pub r_min_steps: usize,
    /// Added to `r_max` in the single outer refinement.
    pub r_max_step: f64,
}

impl RefinementPolicy {
    /// Halvings of `r_min` (three for `d ≤ 12`, two otherwise), one larger
    /// `r_max`, one halved spacing.
    pub fn default_for(d: u32) -> Self {
        Self {
            r_min: 1e-3,
            r_max: 8.0,
            dxi: 0.01,
            r_min_factor: 0.5,
            r_min_steps: if d <= 12 { 3 } else { 2 },
            r_max_step: 2.0,
        }
    }

    /// For `5 ≤ d ≤ 12`: `r_min` steps of one oscillation period,
    /// `e^{-π/α}`, so each step adds one node to the radial solutions near 0.
    /// `None` outside that range.
    pub fn per_oscillation(d: u32) -> Option<Self> {
        let alpha = kummer_spec(d).ok()?.alpha_osc?;
        Some(Self { r_min_factor: (-std::f64::consts::PI / alpha).exp(), r_min_steps: 3, ..Self::default_for(d) })
    }

    /// Smallest `r_min` the policy reaches.
    pub fn finest_r_min(&self) -> f64 {
        self.r_min * self.r_min_factor.powi(self.r_min_steps as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorseIndex {
    Finite(usize),
    /// The count rose at every `r_min` step of the trace.
    Unbounded,
    /// Neither stable nor rising at every step.
    Undetermined,
}

impl MorseIndex {
    pub fn finite(self) -> Option<usize> {
        match self {
            Self::Finite(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub d: u32,
    pub omega_inf: f64,
    pub morse_index: MorseIndex,
    /// Lowest eigenvalues of the unshifted operator `-Δ + r² - 3u_∞²` on
    /// the finest grid of the trace.
    pub tau: Vec<f64>,
    /// Spread of each `τ_j` over the trace entries after the base grid.
    pub tau_error: Vec<f64>,
    pub refinement_trace: Vec<TraceEntry>,
}

/// Number of `τ_j` carried in the report.
const TAU_LEVELS: usize = 3;

/// Morse index of `u_∞` in the radial sector from Sturm counts of `L_∞`
/// below 0 along the refinement policy.
pub fn morse_index(sing: &SingularSolution, policy: &RefinementPolicy) -> Result<SpectralReport> {
    let d = sing.d;
    if !sing.decay_certified {
        return Err(Error::DecayNotCertified(format!("singular solution for d = {d}")));
    }
    let mut configs = Vec::new();
    let mut r_min = policy.r_min;
    configs.push((r_min, policy.r_max, policy.dxi));
    for _ in 0..policy.r_min_steps {
        r_min *= policy.r_min_factor;
        configs.push((r_min, policy.r_max, policy.dxi));
    }
    configs.push((r_min, policy.r_max + policy.r_max_step, policy.dxi));
    configs.push((r_min, policy.r_max + policy.r_max_step, policy.dxi / 2.0));

    let mut trace = Vec::with_capacity(configs.len());
    let mut taus: Vec<Vec<f64>> = Vec::with_capacity(configs.len());
    for &(lo, hi, dxi) in &configs {
        let grid = spectral_grid(d, lo, hi, dxi)?;
        let op = build_linearized(sing, &grid)?;
        trace.push(TraceEntry { r_min: lo, r_max: hi, n: grid.len(), count: op.count_eigs_below(0.0).below });
        taus.push(op.shifted(-sing.omega_inf).lowest_eigenvalues(TAU_LEVELS, EIG_TOL)?);
    }

    let steps = &trace[..=policy.r_min_steps];
    let counts: Vec<usize> = trace.iter().map(|t| t.count).collect();
    let morse = if counts.iter().all(|&c| c == counts[0]) {
        MorseIndex::Finite(counts[0])
    } else if steps.windows(2).all(|w| w[1].count > w[0].count) {
        MorseIndex::Unbounded
    } else {
        MorseIndex::Undetermined
    };
    if d >= 13 && morse.finite().is_none() {
        let trace_txt: Vec<String> =
            trace.iter().map(|t| format!("(r_min {}, r_max {}, n {}) → {}", t.r_min, t.r_max, t.n, t.count)).collect();
        return Err(Error::NonStabilizing { d, trace: trace_txt.join(", ") });
    }
    let finest = taus.last().unwrap().clone();
    let tau_error = (0..finest.len())
        .map(|j| taus[1..].iter().map(|t| (t[j] - finest[j]).abs()).fold(0.0, f64::max))
        .collect();
    Ok(SpectralReport {
        d,
        omega_inf: sing.omega_inf,
        morse_index: morse,
        tau: finest,
        tau_error,
        refinement_trace: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapVerdict {
    /// `τ₁ < ω_∞ < τ₂` with margin at least ten times the error estimate.
    Nondegenerate,
    /// `ω_∞` falls outside `(τ₁, τ₂)` by more than that margin.
    Outside,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegeneracyGap {
    pub tau1: f64,
    pub tau2: f64,
    pub omega_inf: f64,
    pub error_estimate: f64,
    pub verdict: GapVerdict,
}

/// Checks `τ₁ < ω_∞ < τ₂` against the discretization error of the `τ_j`.
pub fn nondegeneracy_gap(report: &SpectralReport) -> Result<NondegeneracyGap> {
    if report.d < 13 {
        return Err(Error::Dimension { d: report.d, detail: "the gap test needs d ≥ 13".into() });
    }
    if report.tau.len() < 2 {
        return Err(Error::InvalidArgument("report carries fewer than two τ".into()));
    }
    let (tau1, tau2, w) = (report.tau[0], report.tau[1], report.omega_inf);
    let err = report.tau_error[0].max(report.tau_error[1]).max(EIG_TOL);
    let margin = 10.0 * err;
    let verdict = if tau1 + margin < w && w < tau2 - margin {
        GapVerdict::Nondegenerate
    } else if w < tau1 - margin || w > tau2 + margin {
        GapVerdict::Outside
    } else {
        GapVerdict::Inconclusive
    };
    Ok(NondegeneracyGap { tau1, tau2, omega_inf: w, error_estimate: err, verdict })
}
