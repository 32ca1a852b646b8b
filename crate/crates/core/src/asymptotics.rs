//! Concentration rate `ε_ω` and energy level `I_ω` of critical ground states,
//! and their comparison with the leading-order laws as `ω → ω*`.

use std::f64::consts::{PI, SQRT_2};

use crate::bubble::{bubble_derivative, bubble_eval, eps_from_peak, BubbleConstants};
use crate::error::{Error, Result};
use crate::greenfn::{omega_star, projected_bubble, GreenData};
use crate::numkernel::{derivatives5, quad_radial_simpson as quad, sphere_measure, trapezoid};
use crate::shooting::ShotSolution;
use crate::RadialProfile;

/// Mismatch between the two energy routes above which a profile is rejected.
pub const ENERGY_ROUTE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// `ε ∝ ω - 1`.
    D3Linear,
    /// `ln ε ∝ -1/ω`.
    D4Log,
    /// `ε ∝ ω`.
    D5Linear,
    /// `ε² ∝ ω/|ln ω|`.
    D6SqrtLog,
    /// `ε² ∝ ω`.
    D7PlusSqrt,
}

impl LawKind {
    pub fn for_dim(d: u32) -> Result<Self> {
        Ok(match d {
            3 => Self::D3Linear,
            4 => Self::D4Log,
            5 => Self::D5Linear,
            6 => Self::D6SqrtLog,
            7.. => Self::D7PlusSqrt,
            _ => return Err(Error::Dimension { d, detail: "laws exist for d ≥ 3".into() }),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::D3Linear => "d3_linear",
            Self::D4Log => "d4_log",
            Self::D5Linear => "d5_linear",
            Self::D6SqrtLog => "d6_sqrt_log",
            Self::D7PlusSqrt => "d7plus_sqrt",
        }
    }

    /// Laws compared in logarithmic form, with the loose tolerance.
    pub fn is_log_form(self) -> bool {
        matches!(self, Self::D4Log | Self::D6SqrtLog)
    }
}

/// Leading-order predictions for `ε_ω` and `S - I_ω`.
///
/// `eps_coeff` and `gap_coeff` are the constants in front of the
/// `ω`-dependence of each law; for `d = 4` `eps_coeff` is the exponent
/// constant `A` in `ε = e^{-A/ω}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetLaws {
    pub d: u32,
    pub kind: LawKind,
    pub omega_star: f64,
    pub sobolev_s: f64,
    pub eps_coeff: f64,
    pub gap_coeff: f64,
    /// `d = 6` only: the energy constant with denominator `12·24²|S⁵|`
    /// instead of `24³|S⁵|`.
    pub gap_coeff_alt: Option<f64>,
}

impl TargetLaws {
    /// Predicted `ε_ω`.
    pub fn eps(&self, omega: f64) -> f64 {
        let w = omega - self.omega_star;
        match self.kind {
            LawKind::D3Linear | LawKind::D5Linear => self.eps_coeff * w,
            LawKind::D4Log => (-self.eps_coeff / w).exp(),
            LawKind::D6SqrtLog => (self.eps_coeff * w / w.ln().abs()).sqrt(),
            LawKind::D7PlusSqrt => (self.eps_coeff * w).sqrt(),
        }
    }

    /// Predicted `S - I_ω`.
    pub fn energy_gap(&self, omega: f64) -> f64 {
        self.gap_with(self.gap_coeff, omega)
    }

    /// `d = 6`: the gap under the alternative constant.
    pub fn energy_gap_alt(&self, omega: f64) -> Option<f64> {
        self.gap_coeff_alt.map(|c| self.gap_with(c, omega))
    }

    fn gap_with(&self, c: f64, omega: f64) -> f64 {
        let w = omega - self.omega_star;
        match self.kind {
            LawKind::D3Linear => c * w * w,
            LawKind::D4Log => c * self.eps(omega).powi(2),
            LawKind::D5Linear => c * w.powi(3),
            LawKind::D6SqrtLog => c * w * w / w.ln().abs(),
            LawKind::D7PlusSqrt => c * w * w,
        }
    }

    /// Sample quantity over law prediction; `ω ln ε / (-A)` for `d = 4`.
    pub fn eps_ratio(&self, omega: f64, eps: f64) -> f64 {
        match self.kind {
            LawKind::D4Log => (omega - self.omega_star) * eps.ln() / -self.eps_coeff,
            _ => eps / self.eps(omega),
        }
    }
}

/// Law constants from the bubble moments and, for `d ≤ 5`, the Green data.
pub fn target_constants(d: u32, green: Option<&GreenData>, bub: &BubbleConstants<f64>) -> Result<TargetLaws> {
    let kind = LawKind::for_dim(d)?;
    if bub.d != d {
        return Err(Error::InvalidArgument(format!("bubble constants for d = {}, laws for d = {d}", bub.d)));
    }
    let need_green = || -> Result<&GreenData> {
        let g = green.ok_or(Error::MissingGreen { d })?;
        if g.d != d {
            return Err(Error::InvalidArgument(format!("Green data for d = {}, laws for d = {d}", g.d)));
        }
        Ok(g)
    };
    let h0 = || -> Result<f64> {
        need_green()?
            .h_at_zero
            .ok_or_else(|| Error::InvalidArgument("Green data carries no H(0)".into()))
    };
    let s = bub.sobolev_s;
    let df = f64::from(d);
    let l2 = bub.norm_l2_sq.finite();
    let (eps_coeff, gap_coeff, gap_coeff_alt) = match kind {
        LawKind::D3Linear => {
            let g2 = need_green()?
                .g_l2_sq
                .ok_or_else(|| Error::InvalidArgument("Green data carries no ‖G‖²".into()))?;
            (
                3f64.powf(1.25) * g2 / (20.0 * PI),
                s.powf(-1.5) * 3f64.powf(0.75) * g2 * g2 / (40.0 * PI),
                None,
            )
        }
        LawKind::D4Log => {
            let h = h0()?;
            let l3 = bub.norm_l3_cubed_d4().expect("d = 4");
            let sphere = sphere_measure::<f64>(4);
            (3.0 * SQRT_2 * h * l3 / (4.0 * sphere), SQRT_2 * h * l3 / (s * s), None)
        }
        LawKind::D5Linear => {
            let h = h0()?;
            let u2 = l2.expect("finite for d = 5");
            let l73 = bub.norm_l73_d5().expect("d = 5");
            let hl = h * l73;
            (
                3.0 * u2 / (7.0 * 15f64.powf(0.75) * hl),
                s.powf(-2.5) * 54.0 * u2.powi(3) / (1715.0 * 15f64.powf(1.5) * hl * hl),
                None,
            )
        }
        LawKind::D6SqrtLog => {
            let u2 = l2.expect("finite for d = 6");
            let sphere = sphere_measure::<f64>(6);
            let s2 = s.powi(-2) * u2 * u2;
            (
                u2 / (12.0 * 24f64.powi(2) * sphere),
                s2 / (24f64.powi(3) * sphere),
                Some(s2 / (12.0 * 24f64.powi(2) * sphere)),
            )
        }
        LawKind::D7PlusSqrt => {
            let u2 = l2.expect("finite for d ≥ 5");
            let xu2 = bub.norm_xu_sq.finite().expect("finite for d ≥ 7");
            (
                u2 / (2.0 * xu2),
                s.powf(-(df - 2.0) / 2.0) * u2 * u2 / (2.0 * df * xu2),
                None,
            )
        }
    };
    Ok(TargetLaws { d, kind, omega_star: omega_star(d), sobolev_s: s, eps_coeff, gap_coeff, gap_coeff_alt })
}

fn require_critical(sol: &ShotSolution) -> Result<()> {
    if sol.params.is_critical() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p = {} is not the critical exponent", sol.params.p)))
    }
}

/// `ε_ω` by matching `u(0)` with the bubble peak.
pub fn extract_eps(sol: &ShotSolution) -> Result<f64> {
    require_critical(sol)?;
    Ok(eps_from_peak(sol.params.d, sol.b))
}

/// `ε` minimizing the `L²` distance between `u` and `U_ε` on the core
/// `r ≤ 3ε_peak`, by golden-section search in `ln ε`.
pub fn fit_eps_core(sol: &ShotSolution) -> Result<f64> {
    let eps_p = extract_eps(sol)?;
    let d = sol.params.d;
    let core: Vec<(f64, f64)> = sol.profile.iter().take_while(|&(r, _)| r <= 3.0 * eps_p).collect();
    if core.len() < 8 {
        return Err(Error::InvalidArgument("profile resolves fewer than 8 nodes in the core".into()));
    }
    let r: Vec<f64> = core.iter().map(|c| c.0).collect();
    let misfit = |ln_eps: f64| {
        let e = ln_eps.exp();
        let w: Vec<f64> = core
            .iter()
            .map(|&(r, u)| (u - bubble_eval(d, e, r)).powi(2) * r.powi(d as i32 - 1))
            .collect();
        trapezoid(&r, &w)
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (eps_p.ln() - 1.0, eps_p.ln() + 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (misfit(x1), misfit(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = misfit(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = misfit(x2);
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// `I_ω` by its two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    /// `‖u‖^{4/(d-2)}_{L^{2d/(d-2)}}`.
    pub critical_norm: f64,
    /// `(‖u‖_X² - ω‖u‖²_{L²})^{2/d}`.
    pub quadratic_form: f64,
    pub mismatch: f64,
}

impl EnergyLevel {
    pub fn value(&self) -> f64 {
        self.critical_norm
    }
}

/// `I_ω` of a certified ground state, checked between the two routes.
pub fn energy_level(sol: &ShotSolution) -> Result<EnergyLevel> {
    require_critical(sol)?;
    if !sol.decay_certified {
        return Err(Error::DecayNotCertified("energy needs a certified profile".into()));
    }
    let d = sol.params.d;
    let df = f64::from(d);
    let grid = sol.profile.grid.clone();
    let u = &sol.profile.values;
    let du = RadialProfile::new(grid.clone(), sol.derivative.clone(), "u'")?;
    let xu: Vec<f64> = grid.nodes().iter().zip(u).map(|(r, v)| r * v).collect();
    let xu = RadialProfile::new(grid, xu, "xu")?;
    let form = quad(&du, 2.0) + quad(&xu, 2.0) - sol.params.omega * quad(&sol.profile, 2.0);
    let crit = quad(&sol.profile, sol.params.p);
    let critical_norm = crit.powf(2.0 / df);
    let quadratic_form = form.powf(2.0 / df);
    let mismatch = (critical_norm - quadratic_form).abs() / critical_norm;
    if !(mismatch <= ENERGY_ROUTE_TOL) {
        return Err(Error::Unconverged(format!(
            "energy routes disagree by {mismatch:e} at d = {d}, ω = {}",
            sol.params.omega
        )));
    }
    Ok(EnergyLevel { critical_norm, quadratic_form, mismatch })
}

/// `‖û‖_X` for `û = u - PU_ε` (`d ≤ 6`) or `û = u - U_ε` (`d ≥ 7`).
pub fn remainder_norm(sol: &ShotSolution, eps: f64) -> Result<f64> {
    require_critical(sol)?;
    let d = sol.params.d;
    let grid = sol.profile.grid.clone();
    let r = grid.nodes();
    let (base, dbase): (Vec<f64>, Vec<f64>) = if d <= 6 {
        let pu = projected_bubble(d, eps, &grid)?;
        let (d1, _) = derivatives5(r, &pu.values);
        (pu.values, d1)
    } else {
        (
            r.iter().map(|&x| bubble_eval(d, eps, x)).collect(),
            r.iter().map(|&x| bubble_derivative(d, eps, x)).collect(),
        )
    };
    let rem: Vec<f64> = sol.profile.values.iter().zip(&base).map(|(u, b)| u - b).collect();
    let drem: Vec<f64> = sol.derivative.iter().zip(&dbase).map(|(u, b)| u - b).collect();
    let xrem: Vec<f64> = r.iter().zip(&rem).map(|(r, v)| r * v).collect();
    let drem = RadialProfile::new(grid.clone(), drem, "û'")?;
    let xrem = RadialProfile::new(grid, xrem, "xû")?;
    Ok((quad(&drem, 2.0) + quad(&xrem, 2.0)).sqrt())
}

/// One ground state reduced to the quantities the laws speak about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSample {
    pub omega: f64,
    pub eps: f64,
    pub energy: f64,
    pub b: f64,
    pub remainder: Option<f64>,
}

impl AsymptoticSample {
    /// Builds a sample from a ground state; the remainder is skipped when
    /// `with_remainder` is false.
    pub fn from_solution(sol: &ShotSolution, with_remainder: bool) -> Result<Self> {
        let eps = extract_eps(sol)?;
        let energy = energy_level(sol)?.value();
        let remainder = if with_remainder { Some(remainder_norm(sol, eps)?) } else { None };
        Ok(Self { omega: sol.params.omega, eps, energy, b: sol.b, remainder })
    }
}

/// Comparison of samples with a law, read off at the sample nearest `ω*`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub d: u32,
    pub law_kind: LawKind,
    /// Ordered from the farthest to the nearest `ω*`.
    pub samples: Vec<AsymptoticSample>,
    pub target_constant: f64,
    pub fitted_constant: f64,
    pub relative_error: f64,
    /// `ε` ratio to the law at every sample.
    pub eps_ratios: Vec<f64>,
    /// `(S - I_ω)` ratio to the law at every sample.
    pub energy_ratios: Vec<f64>,
    /// `d = 6`: energy ratios under the alternative constant.
    pub energy_ratios_alt: Option<Vec<f64>>,
    /// Whether the `ε` ratios approach their last value monotonically.
    pub monotone: bool,
    /// `0 < I_ω < S` everywhere and `S - I_ω` decreasing toward `ω*`.
    pub energy_ordered: bool,
    /// `ε_ω` strictly decreasing toward `ω*`.
    pub eps_ordered: bool,
}

impl AsymptoticFit {
    pub fn energy_relative_error(&self) -> f64 {
        self.energy_ratios.last().map_or(f64::NAN, |r| (r - 1.0).abs())
    }
}

/// Compares samples with `law`. A non-monotone trend is reported in the
/// fit, not treated as an error.
pub fn fit_law(samples: &[AsymptoticSample], law: &TargetLaws) -> Result<AsymptoticFit> {
    if samples.len() < 4 {
        return Err(Error::InvalidArgument(format!("{} samples; at least 4 needed", samples.len())));
    }
    let mut samples = samples.to_vec();
    let dist = |s: &AsymptoticSample| s.omega - law.omega_star;
    if samples.iter().any(|s| !(dist(s) > 0.0)) {
        return Err(Error::InvalidArgument("samples must lie above ω*".into()));
    }
    samples.sort_by(|a, b| dist(b).total_cmp(&dist(a)));
    let span = dist(&samples[0]) / dist(samples.last().unwrap());
    if span < 4.0 - 1e-12 {
        return Err(Error::InvalidArgument(format!("ω - ω* spans a factor {span}, at least 4 needed")));
    }
    let s = law.sobolev_s;
    let eps_ratios: Vec<f64> = samples.iter().map(|x| law.eps_ratio(x.omega, x.eps)).collect();
    let energy_ratios: Vec<f64> = samples.iter().map(|x| (s - x.energy) / law.energy_gap(x.omega)).collect();
    let energy_ratios_alt = law
        .gap_coeff_alt
        .map(|_| samples.iter().map(|x| (s - x.energy) / law.energy_gap_alt(x.omega).unwrap()).collect());

    let last = *eps_ratios.last().unwrap();
    let monotone = eps_ratios.windows(2).all(|w| (w[1] - last).abs() <= (w[0] - last).abs());
    let energy_ordered = samples.iter().all(|x| x.energy > 0.0 && x.energy < s)
        && samples.windows(2).all(|w| s - w[1].energy < s - w[0].energy);
    let eps_ordered = samples.windows(2).all(|w| w[1].eps < w[0].eps);
    Ok(AsymptoticFit {
        d: law.d,
        law_kind: law.kind,
        samples,
        target_constant: law.eps_coeff,
        fitted_constant: law.eps_coeff * last,
        relative_error: (last - 1.0).abs(),
        eps_ratios,
        energy_ratios,
        energy_ratios_alt,
        monotone,
        energy_ordered,
        eps_ordered,
    })
}
