//! Green function `G` of `-Δ + r² - ω*` and its regular part `H`, plus the
//! projected bubble `PU_ε`.
//!
//! `G` is the decaying radial solution normalized by `r^{d-2}G → 1`. It is
//! shot inward from `r_max`; `H` is integrated outward from the origin and
//! the two are joined near `r = 1`, which avoids forming `r^{2-d} - G` where
//! both terms are huge.

use crate::bubble::{bubble_amplitude, bubble_eval};
use crate::error::{Error, Result};
use crate::numkernel::{fit_line, radial_integral_from_origin, Dopri5};
use crate::{RadialGrid, RadialProfile};

/// Threshold frequency: 1 for `d = 3`, 0 for `d ≥ 4`.
pub fn omega_star(d: u32) -> f64 {
    if d == 3 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct GreenData {
    pub d: u32,
    pub omega_star: f64,
    pub g: RadialProfile,
    pub h: RadialProfile,
    /// `H(0)` from a `c₀ + c₁r` fit on the five smallest nodes; `None` for
    /// `d = 6`, where `H` is logarithmically unbounded.
    pub h_at_zero: Option<f64>,
    /// Slope `c₁` of the same fit.
    pub h_slope: Option<f64>,
    /// `‖G‖²_{L²(ℝ³)}`, only for `d = 3`.
    pub g_l2_sq: Option<f64>,
    /// `c` in `H ≈ c·ln r + c₀`, only for `d = 6`.
    pub log_coeff_d6: Option<f64>,
    pub log_const_d6: Option<f64>,
    /// `σ` in `ln G ≈ -σr² + C`, fitted on the outer half of the grid.
    pub decay_sigma: f64,
    /// `r_min^{d-2} G(r_min)`.
    pub plateau: f64,
}

const MAX_R: f64 = 35.0;

fn check_d(d: u32) -> Result<()> {
    if !(3..=6).contains(&d) {
        return Err(Error::Dimension { d, detail: "Green functions are built for 3 ≤ d ≤ 6".into() });
    }
    Ok(())
}

/// `(φ, rφ')` of the decaying solution `r^m e^{-r²/2} Σ a_k r^{-2k}`,
/// `m = (level - d)/2`, of `-Δφ + r²φ = level·φ`.
pub fn decaying_asymptote(d: u32, level: f64, r: f64) -> (f64, f64) {
    let df = f64::from(d);
    let m = (level - df) / 2.0;
    let mut a = 1.0;
    let (mut val, mut der) = (0.0_f64, 0.0_f64);
    let mut prev = f64::INFINITY;
    for k in 0..40 {
        let mu = m - 2.0 * k as f64;
        let term = a * r.powf(mu);
        if term.abs() > prev || term.abs() < 1e-18 * val.abs() {
            break;
        }
        prev = term.abs();
        val += term;
        der += a * (mu * r.powf(mu) - r.powf(mu + 2.0));
        a *= -mu * (mu + df - 2.0) / (4.0 * (k as f64 + 1.0));
    }
    let g = (-r * r / 2.0).exp();
    (g * val, g * der)
}

/// Leading particular solution `P` of `-ΔP = (r² - ω*) r^{2-d}` near 0, as `(P, rP')`.
fn particular(d: u32, r: f64) -> (f64, f64) {
    let df = f64::from(d);
    let ws = omega_star(d);
    let mut p = 0.0;
    let mut rp = 0.0;
    // -Δ(r^q) = -q(q+d-2) r^{q-2}
    let mut add = |coef: f64, k: f64| {
        let q = k + 2.0;
        let c = coef / (-q * (q + df - 2.0));
        p += c * r.powf(q);
        rp += c * q * r.powf(q);
    };
    if ws != 0.0 {
        add(-ws, 2.0 - df);
    }
    if d == 6 {
        p += -0.25 * r.ln();
        rp += -0.25;
    } else {
        add(1.0, 4.0 - df);
    }
    (p, rp)
}

pub fn solve_green(d: u32, grid: &RadialGrid) -> Result<GreenData> {
    check_d(d)?;
    let grid = grid.with_dim(d);
    let r = grid.nodes();
    let n = r.len();
    if n < 16 {
        return Err(Error::InvalidArgument("Green grid needs at least 16 nodes".into()));
    }
    if grid.r_max() < 4.0 || grid.r_max() > MAX_R {
        return Err(Error::InvalidArgument(format!(
            "r_max = {} must lie in [4, {MAX_R}]",
            grid.r_max()
        )));
    }
    if grid.r_min() >= 0.1 {
        return Err(Error::Normalization(format!("r_min = {} too large to resolve r^(2-d)", grid.r_min())));
    }
    let ws = omega_star(d);
    let df = f64::from(d);
    let ts: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let jm = r
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.ln().abs().total_cmp(&b.1.ln().abs()))
        .map(|(i, _)| i)
        .unwrap()
        .clamp(2, n - 3);

    // In t = ln r: y_tt + (d-2) y_t = e^{2t}[(e^{2t} - ω*) y - s(t)].
    let homog = |t: f64, y: &[f64; 2]| {
        let r2 = (2.0 * t).exp();
        [y[1], -(df - 2.0) * y[1] + r2 * (r2 - ws) * y[0]]
    };
    let forced = |t: f64, y: &[f64; 2]| {
        let r2 = (2.0 * t).exp();
        let s = (r2 - ws) * (t * (2.0 - df)).exp();
        [y[1], -(df - 2.0) * y[1] + r2 * ((r2 - ws) * y[0] - s)]
    };
    let ode = Dopri5::with_rtol(1e-13);

    let inner_ts = &ts[..=jm];
    let reg = ode.sample(&homog, inner_ts, [1.0 - ws * r[0] * r[0] / (2.0 * df), -ws * r[0] * r[0] / df])?;
    let (p0, rp0) = particular(d, r[0]);
    let part = ode.sample(&forced, inner_ts, [p0, rp0])?;

    let outer_ts: Vec<f64> = ts[jm..].iter().rev().copied().collect();
    let (v, dv) = decaying_asymptote(d, ws, r[n - 1]);
    let mut dec = ode.sample(&homog, &outer_ts, [v, dv])?;
    dec.reverse();

    // Match G = r^{2-d} - part - c·reg = λ·dec in value and t-derivative at r[jm].
    let rm = r[jm];
    let f = [rm.powf(2.0 - df) - part[jm][0], (2.0 - df) * rm.powf(2.0 - df) - part[jm][1]];
    let wr = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    let (phr, phd) = (reg[jm], dec[0]);
    let c = wr(f, phd) / wr(phr, phd);
    let lambda = wr(f, phr) / wr(phd, phr);

    let mut g = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        let sing = r[i].powf(2.0 - df);
        if i <= jm {
            let hv = part[i][0] + c * reg[i][0];
            h.push(hv);
            g.push(sing - hv);
        } else {
            let gv = lambda * dec[i - jm][0];
            g.push(gv);
            h.push(sing - gv);
        }
    }
    let plateau = r[0].powf(df - 2.0) * g[0];
    if (plateau - 1.0).abs() > 1e-4 || g.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Normalization(format!(
            "r^(d-2) G reaches {plateau} at r_min; refine the grid"
        )));
    }

    let (mut h_at_zero, mut h_slope, mut log_coeff, mut log_const) = (None, None, None, None);
    if d == 6 {
        let x: Vec<f64> = r[..5].iter().map(|v| v.ln()).collect();
        let (s, c0) = fit_line(&x, &h[..5]);
        log_coeff = Some(s);
        log_const = Some(c0);
    } else {
        let (s, c0) = fit_line(&r[..5], &h[..5]);
        h_at_zero = Some(c0);
        h_slope = Some(s);
    }

    let outer: Vec<usize> = (0..n).filter(|&i| r[i] >= r[n - 1] / 2.0).collect();
    let x: Vec<f64> = outer.iter().map(|&i| r[i] * r[i]).collect();
    let y: Vec<f64> = outer.iter().map(|&i| g[i].ln()).collect();
    let decay_sigma = -fit_line(&x, &y).0;

    let g = RadialProfile::new(grid.clone(), g, "G")?;
    let h = RadialProfile::new(grid.clone(), h, "H")?;
    let g_l2_sq = if d == 3 {
        let sq: Vec<f64> = g.values.iter().map(|v| v * v).collect();
        Some(radial_integral_from_origin(&grid, &sq)?)
    } else {
        None
    };
    Ok(GreenData {
        d,
        omega_star: ws,
        g,
        h,
        h_at_zero,
        h_slope,
        g_l2_sq,
        log_coeff_d6: log_coeff,
        log_const_d6: log_const,
        decay_sigma,
        plateau,
    })
}

/// `‖G‖²_{L²(ℝ³)} = 4π ∫ G² r² dr`.
pub fn green_l2_norm_sq(data: &GreenData) -> Result<f64> {
    data.g_l2_sq.ok_or(Error::Dimension { d: data.d, detail: "‖G‖² is only used for d = 3".into() })
}

/// Default grid for [`solve_green`].
pub fn default_green_grid(d: u32) -> Result<RadialGrid> {
    RadialGrid::log_uniform(1e-5, 12.0, 4001, d)
}

/// `PU_ε` together with the defect `φ = U_ε - PU_ε`.
#[derive(Debug, Clone)]
pub struct ProjectedBubble {
    pub eps: f64,
    pub pu: RadialProfile,
    pub defect: RadialProfile,
    /// Largest row-relative residual of the two discrete solves.
    pub residual: f64,
}

/// Solves `-Δu + (r² - ω*)u = U_ε^{(d+2)/(d-2)}` for `PU_ε`, and separately
/// `-Δφ + (r² - ω*)φ = (r² - ω*)U_ε` for the defect, which would otherwise be
/// a difference of nearly equal numbers far out.
///
/// Finite volumes on the grid, Neumann at `r_min`, `PU_ε(r_max) = 0`.
pub fn projected_bubble_full(d: u32, eps: f64, grid: &RadialGrid) -> Result<ProjectedBubble> {
    check_d(d)?;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("ε = {eps} outside (0, 0.5]")));
    }
    let grid = grid.with_dim(d);
    let r = grid.nodes();
    let n = r.len();
    if n < 8 {
        return Err(Error::InvalidArgument("projected bubble grid needs at least 8 nodes".into()));
    }
    let ws = omega_star(d);
    let df = f64::from(d);
    let u: Vec<f64> = r.iter().map(|&x| bubble_eval(d, eps, x)).collect();

    // unknowns 0..m; the last node carries the Dirichlet value
    let m = n - 1;
    let flux: Vec<f64> = (0..n - 1)
        .map(|i| {
            let mid = 0.5 * (r[i] + r[i + 1]);
            mid.powf(df - 1.0) / (r[i + 1] - r[i])
        })
        .collect();
    let mut lower = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m - 1];
    let mut closing = 0.0;
    for i in 0..m {
        let width = if i == 0 { 0.5 * (r[1] - r[0]) } else { 0.5 * (r[i + 1] - r[i - 1]) };
        let vol = r[i].powf(df - 1.0) * width;
        let left = if i > 0 { flux[i - 1] } else { 0.0 };
        let right = flux[i];
        // rows divided by the cell volume to keep them O(1/h²)
        diag[i] = (left + right) / vol + r[i] * r[i] - ws;
        if i > 0 {
            lower[i - 1] = -left / vol;
        }
        if i + 1 < m {
            upper[i] = -right / vol;
        } else {
            closing = right / vol;
        }
    }
    let solve = |mut rhs: Vec<f64>, boundary: f64| -> Result<(Vec<f64>, f64)> {
        rhs[m - 1] += closing * boundary;
        let x = crate::numkernel::solve_general_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let mut res: f64 = 0.0;
        for i in 0..m {
            let mut a = diag[i] * x[i] - rhs[i];
            let mut row = (diag[i] * x[i]).abs() + rhs[i].abs();
            if i > 0 {
                a += lower[i - 1] * x[i - 1];
                row += (lower[i - 1] * x[i - 1]).abs();
            }
            if i + 1 < m {
                a += upper[i] * x[i + 1];
                row += (upper[i] * x[i + 1]).abs();
            }
            res = res.max(a.abs() / row.max(f64::MIN_POSITIVE));
        }
        Ok((x, res))
    };
    let p = (df + 2.0) / (df - 2.0);
    let (mut pu, res_pu) = solve(u[..m].iter().map(|v| v.powf(p)).collect(), 0.0)?;
    let (mut defect, res_def) =
        solve((0..m).map(|i| (r[i] * r[i] - ws) * u[i]).collect(), u[n - 1])?;
    pu.push(0.0);
    defect.push(u[n - 1]);
    if pu[..m].iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Normalization(format!(
            "PU_ε lost positivity for ε = {eps}; refine the grid"
        )));
    }
    Ok(ProjectedBubble {
        eps,
        pu: RadialProfile::new(grid.clone(), pu, "PU_eps")?,
        defect: RadialProfile::new(grid, defect, "U_eps - PU_eps")?,
        residual: res_pu.max(res_def),
    })
}

/// `PU_ε` on `grid`.
pub fn projected_bubble(d: u32, eps: f64, grid: &RadialGrid) -> Result<RadialProfile> {
    projected_bubble_full(d, eps, grid).map(|p| p.pu)
}

/// Coefficient `ε^{(d-2)/2}[d(d-2)]^{(d-2)/4}` multiplying `H` in `U_ε - PU_ε`.
pub fn defect_prefactor(d: u32, eps: f64) -> f64 {
    eps.powf((f64::from(d) - 2.0) / 2.0) * bubble_amplitude::<f64>(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::derivatives5;

    #[test]
    fn asymptote_solves_equation() {
        for d in 3..=6 {
            let rs: Vec<f64> = (0..41).map(|i| 8.0 + i as f64 * 0.002).collect();
            let v: Vec<f64> = rs.iter().map(|&r| decaying_asymptote(d, omega_star(d), r).0).collect();
            let (d1, d2) = derivatives5(&rs, &v);
            for i in 2..rs.len() - 2 {
                let res = d2[i] + (d as f64 - 1.0) / rs[i] * d1[i] - (rs[i] * rs[i] - omega_star(d)) * v[i];
                assert!(res.abs() < 1e-6 * rs[i] * rs[i] * v[i], "d={d}");
            }
        }
    }

    #[test]
    fn particular_matches_leading_order() {
        assert!((particular(3, 1e-3).0 - (0.5e-3 - 1e-9 / 12.0)).abs() < 1e-18);
        assert!((particular(4, 0.1).0 + 0.01 / 8.0).abs() < 1e-15);
        assert!((particular(5, 0.1).0 + 0.1 / 4.0).abs() < 1e-15);
        assert!((particular(6, 0.1).0 + 0.25 * 0.1_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_dimension_and_range() {
        let g = default_green_grid(7).unwrap();
        assert!(matches!(solve_green(7, &g), Err(Error::Dimension { .. })));
        let g = RadialGrid::log_uniform(1e-5, 50.0, 200, 3).unwrap();
        assert!(solve_green(3, &g).is_err());
    }

    #[test]
    fn coarse_origin_fails_normalization() {
        let g = RadialGrid::log_uniform(0.2, 10.0, 400, 5).unwrap();
        assert!(matches!(solve_green(5, &g), Err(Error::Normalization(_))));
    }
}
