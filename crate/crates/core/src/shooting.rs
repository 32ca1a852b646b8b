//! Shooting for the radial equation
//! `u'' + (d-1)/r u' + (ω - r²)u + |u|^{p-2}u = 0`.
//!
//! Every shot runs in `t = ln r` with state `(u, r u')`. A shot ends at the
//! first of: a zero of `u`, a positive local minimum (`u' > 0`), growth past
//! ten times the starting amplitude, or the end radius. Ground states, the
//! family `u_b` and the singular solution `u_∞` all sit on the boundary
//! between the first class and the other two, and are located by bisection.

use rayon::prelude::*;

use crate::bubble::eps_from_peak;
use crate::error::{Error, Result};
use crate::greenfn::{decaying_asymptote, omega_star};
use crate::numkernel::{derivatives5, Dopri5};
use crate::{RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub d: u32,
    pub p: f64,
    pub omega: f64,
    /// Multiplies the nonlinearity; 0 gives the linear harmonic oscillator.
    pub coupling: f64,
}

impl ProblemParams {
    /// Energy-critical exponent `p = 2d/(d-2)`.
    pub fn critical(d: u32, omega: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::Dimension { d, detail: "critical mode needs d ≥ 3".into() });
        }
        let df = f64::from(d);
        Ok(Self { d, p: 2.0 * df / (df - 2.0), omega, coupling: 1.0 })
    }

    /// Cubic nonlinearity `p = 4`, supercritical for `d ≥ 5`.
    pub fn supercritical(d: u32, omega: f64) -> Result<Self> {
        if d < 5 {
            return Err(Error::Dimension { d, detail: "p = 4 is supercritical only for d ≥ 5".into() });
        }
        Ok(Self { d, p: 4.0, omega, coupling: 1.0 })
    }

    pub fn linear(d: u32, omega: f64) -> Self {
        Self { d, p: 4.0, omega, coupling: 0.0 }
    }

    pub fn is_critical(&self) -> bool {
        let df = f64::from(self.d);
        (self.p - 2.0 * df / (df - 2.0)).abs() < 1e-12
    }

    fn source(&self, u: f64) -> f64 {
        self.coupling * u.abs().powf(self.p - 2.0) * u
    }

    /// Radius where the core of a solution with `u(0) = b` lives.
    fn core_scale(&self, b: f64) -> f64 {
        if self.coupling == 0.0 {
            1.0
        } else if self.is_critical() {
            eps_from_peak(self.d, b).min(1.0)
        } else {
            (1.0 / b.powf((self.p - 2.0) / 2.0)).min(1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotEvent {
    SignChange,
    /// `u' > 0` while `u > 0`: a positive local minimum.
    Upturn,
    /// `u` exceeded ten times its starting amplitude.
    Blowup,
    ReachedEnd,
}

impl ShotEvent {
    /// `Some(true)` for the crossing class, `Some(false)` for the
    /// overshooting class, `None` if undecided.
    pub fn crosses(self) -> Option<bool> {
        match self {
            ShotEvent::SignChange => Some(true),
            ShotEvent::Upturn | ShotEvent::Blowup => Some(false),
            ShotEvent::ReachedEnd => None,
        }
    }
}

/// Tolerances and grid policy for the nonlinear solvers.
#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions {
    pub rtol: f64,
    /// Output grid size; `None` picks a node spacing of about 0.003 in `ln r + r`.
    pub grid_n: Option<usize>,
    /// Output radius; `None` gives `√ω + 10`.
    pub r_max: Option<f64>,
    /// Smallest output radius; `None` follows the core scale.
    pub r_min: Option<f64>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { rtol: 1e-13, grid_n: None, r_max: None, r_min: None }
    }
}

impl ShootingOptions {
    fn r_max_for(&self, omega: f64) -> f64 {
        self.r_max.unwrap_or(omega.max(0.0).sqrt() + 10.0)
    }

    /// Output grid: logarithmic below `r = 1`, spacing `≈ 0.003` beyond.
    fn grid(&self, r_lo: f64, r_hi: f64, d: u32) -> Result<RadialGrid> {
        let lo = self.r_min.unwrap_or(r_lo);
        let span = (r_hi / lo).ln() + r_hi - lo;
        let n = self.grid_n.unwrap_or((span / 0.003).ceil() as usize + 1);
        RadialGrid::log_linear(lo, r_hi, n.max(64), d, 1.0)
    }
}

/// A sampled shot: nodes reached before the event, with `u` and `u'`.
#[derive(Debug, Clone)]
pub struct IvpResult {
    pub profile: RadialProfile,
    pub derivative: Vec<f64>,
    pub event: ShotEvent,
    pub r_event: f64,
}

#[derive(Debug, Clone)]
pub struct ShotSolution {
    pub params: ProblemParams,
    pub b: f64,
    pub profile: RadialProfile,
    /// `u'` at the profile nodes.
    pub derivative: Vec<f64>,
    /// Largest relative ODE residual on the trusted part of the profile.
    pub ode_residual: f64,
    pub decay_certified: bool,
    /// Beyond this radius the profile is the fitted decaying asymptote.
    pub r_trusted: f64,
    pub tail_constant: f64,
}

#[derive(Debug, Clone)]
pub struct SingularSolution {
    pub d: u32,
    pub omega_inf: f64,
    pub r0: f64,
    pub profile: RadialProfile,
    pub derivative: Vec<f64>,
    /// `√(d-3)`, the coefficient of `1/r` at the origin.
    pub inner_constant: f64,
    pub ode_residual: f64,
    pub decay_certified: bool,
    pub r_trusted: f64,
}

impl SingularSolution {
    /// `u_∞(r)`: cubic Hermite between nodes, the two-term inner expansion
    /// below `r0`, the decaying asymptote beyond the last node.
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.profile.grid.nodes();
        if r <= nodes[0] {
            return singular_start(self.d, self.omega_inf, r).0;
        }
        let last = nodes.len() - 1;
        if r >= nodes[last] {
            let (a, _) = decaying_asymptote(self.d, self.omega_inf, nodes[last]);
            let (b, _) = decaying_asymptote(self.d, self.omega_inf, r);
            return self.profile.values[last] * b / a;
        }
        hermite(nodes, &self.profile.values, &self.derivative, r)
    }
}

fn hermite(x: &[f64], y: &[f64], dy: &[f64], r: f64) -> f64 {
    let i = x.partition_point(|&v| v <= r).clamp(1, x.len() - 1) - 1;
    let h = x[i + 1] - x[i];
    let s = (r - x[i]) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1]
}

/// `(u, u')` of `u = √(d-3)/r - ω√(d-3) r/(4d-10)` at `r`.
pub fn singular_start(d: u32, omega: f64, r: f64) -> (f64, f64) {
    let a = (f64::from(d) - 3.0).sqrt();
    let c = omega * a / (4.0 * f64::from(d) - 10.0);
    (a / r - c * r, -a / (r * r) - c)
}

/// Default radius for the regular series start.
fn regular_start_radius(params: &ProblemParams, b: f64) -> f64 {
    (1e-3 * params.core_scale(b)).min(1e-6)
}

/// `(u, r u')` of the series `u = b - (ωb + b^{p-1}) r²/(2d)` at `r`.
fn regular_start(params: &ProblemParams, b: f64, r: f64) -> [f64; 2] {
    let c = (params.omega * b + params.source(b)) / (2.0 * f64::from(params.d));
    [b - c * r * r, -2.0 * c * r * r]
}

struct Shooter {
    params: ProblemParams,
    ode: Dopri5<f64>,
}

struct Shot {
    event: ShotEvent,
    r_event: f64,
    /// `(u, r u')` at the requested nodes reached before the event.
    states: Vec<[f64; 2]>,
}

impl Shooter {
    fn new(params: ProblemParams, rtol: f64) -> Self {
        Self { params, ode: Dopri5::with_rtol(rtol) }
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let dm2 = f64::from(self.params.d) - 2.0;
        let omega = self.params.omega;
        move |t: f64, y: &[f64; 2]| {
            let r2 = (2.0 * t).exp();
            [y[1], -dm2 * y[1] - r2 * ((omega - r2) * y[0] + self.params.source(y[0]))]
        }
    }

    /// Shoots from `(r0, u0, r u'(r0))` to `r_end`, sampling at `nodes`
    /// (all ≥ `r0`).
    fn shoot(&self, r0: f64, y0: [f64; 2], r_end: f64, amp: f64, nodes: &[f64]) -> Result<Shot> {
        let f = self.rhs();
        let limit = 10.0 * amp;
        let mut event = ShotEvent::ReachedEnd;
        let classify = |y: &[f64; 2]| -> Option<ShotEvent> {
            if y[0] < 0.0 {
                Some(ShotEvent::SignChange)
            } else if y[0] > limit {
                Some(ShotEvent::Blowup)
            } else if y[1] > 0.0 {
                Some(ShotEvent::Upturn)
            } else {
                None
            }
        };
        if let Some(e) = classify(&y0) {
            return Ok(Shot { event: e, r_event: r0, states: Vec::new() });
        }
        let mut t = r0.ln();
        let mut y = y0;
        let mut h = None;
        let mut states = Vec::with_capacity(nodes.len());
        let targets = nodes.iter().copied().chain(std::iter::once(r_end));
        let mut r_event = r_end;
        for target in targets {
            let tt = target.ln();
            if tt < t {
                continue;
            }
            let leg = self.ode.integrate(&f, t, y, tt, h, |_, y| {
                if let Some(e) = classify(y) {
                    event = e;
                    true
                } else {
                    false
                }
            })?;
            t = leg.t;
            y = leg.y;
            h = Some(leg.h);
            if leg.stopped {
                r_event = t.exp();
                break;
            }
            if states.len() < nodes.len() {
                states.push(y);
            }
        }
        Ok(Shot { event, r_event, states })
    }

    fn shoot_regular(&self, b: f64, r_end: f64, nodes: &[f64]) -> Result<Shot> {
        let rs = regular_start_radius(&self.params, b);
        let rs = nodes.first().map_or(rs, |&n| rs.min(n));
        self.shoot(rs, regular_start(&self.params, b, rs), r_end, b, nodes)
    }

    fn shoot_singular(&self, r0: f64, r_end: f64, nodes: &[f64]) -> Result<Shot> {
        let (u, du) = singular_start(self.params.d, self.params.omega, r0);
        self.shoot(r0, [u, r0 * du], r_end, u, nodes)
    }
}

/// Integrates the regular solution with `u(0) = b` on `grid` up to the first event.
pub fn integrate_ivp(params: ProblemParams, b: f64, grid: &RadialGrid, rtol: f64) -> Result<IvpResult> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("b = {b} must be positive")));
    }
    let shooter = Shooter::new(params, rtol);
    let nodes = grid.nodes();
    let shot = shooter.shoot_regular(b, grid.r_max(), nodes)?;
    let k = shot.states.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "shot ended ({:?}) before the second grid node",
            shot.event
        )));
    }
    let sub = RadialGrid::from_nodes(nodes[..k].to_vec(), grid.dim())?;
    let values: Vec<f64> = shot.states.iter().map(|s| s[0]).collect();
    let derivative: Vec<f64> = shot.states.iter().zip(&nodes[..k]).map(|(s, r)| s[1] / r).collect();
    Ok(IvpResult {
        profile: RadialProfile::new(sub, values, "u")?,
        derivative,
        event: if k == nodes.len() && shot.event == ShotEvent::ReachedEnd { ShotEvent::ReachedEnd } else { shot.event },
        r_event: shot.r_event,
    })
}

/// Bisection between `lo` and `hi` whose shots fall in different classes.
/// Works in `ln x` when `geometric`.
fn bisect<F>(mut lo: f64, mut hi: f64, lo_cross: bool, geometric: bool, mut class: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<Option<bool>>,
{
    for _ in 0..200 {
        let mid = if geometric { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        match class(mid)? {
            Some(c) if c == lo_cross => lo = mid,
            Some(_) => hi = mid,
            // an undecided shot has followed the separatrix to the end
            None => return Ok((mid, mid)),
        }
    }
    Ok((lo, hi))
}

/// Outcome of stitching two bracketing shots into a profile.
struct Stitched {
    values: Vec<f64>,
    derivative: Vec<f64>,
    r_trusted: f64,
    tail_constant: f64,
    certified: bool,
    residual: f64,
}

/// Relative gaps at which a stage may restart, tried in order. Smaller gaps
/// keep more accurate values but must stay well above integration noise.
const RESTART_GAPS: [f64; 3] = [1e-9, 1e-8, 1e-7];
/// Relative gap at which the shots count as separated.
const SPLIT_GAP: f64 = 1e-6;
/// Largest node-to-node change of the ratio to the decaying asymptote kept
/// at the end of a stitched profile.
const TRIM_DRIFT: f64 = 1e-4;

/// Builds a profile from two bracketing shots sampled on `nodes`.
///
/// Where the shots separate, a new bracket is formed by bisecting on the
/// segment between their states at a node where they still nearly agree,
/// and the procedure repeats. Whatever remains past the last stage is filled
/// with the decaying asymptote.
fn stitch(shooter: &Shooter, nodes: &[f64], a: Shot, b: Shot, r_end: f64, amp: f64) -> Result<Stitched> {
    let params = &shooter.params;
    let d = params.d;
    let mean = |x: [f64; 2], y: [f64; 2]| [0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])];
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(nodes.len());
    let (mut sa, mut sb) = (a.states, b.states);
    let mut base = 0;
    let mut joins = Vec::new();
    for stage in 0..256 {
        let k = sa.len().min(sb.len());
        let mut cut = None;
        let mut last_below = [0usize; 3];
        for i in 0..k {
            let (x, y) = (sa[i], sb[i]);
            let mid = 0.5 * (x[0] + y[0]);
            let gap = (x[0] - y[0]).abs() / mid;
            if !(mid > 0.0) || gap > SPLIT_GAP || x[1] > 0.0 || y[1] > 0.0 {
                break;
            }
            for (slot, &g) in last_below.iter_mut().zip(&RESTART_GAPS) {
                if gap <= g {
                    *slot = i;
                }
            }
            cut = Some(i);
        }
        let Some(cut) = cut else { break };
        if stage == 0 && cut < 8 {
            return Err(Error::DecayNotCertified(format!(
                "bracketing shots separate at r = {}",
                nodes[cut]
            )));
        }
        if base + cut + 1 == nodes.len() {
            merged.extend((0..=cut).map(|i| mean(sa[i], sb[i])));
            break;
        }
        let mut next = None;
        for &j in last_below.iter().filter(|&&j| j > 0) {
            let ym = mean(sa[j], sb[j]);
            let rj = nodes[base + j];
            // move u alone; any such move has a component along the growing mode
            let step = 1e-9 * ym[0];
            let at = move |th: f64| [ym[0] + th * step, ym[1]];
            let class = |th: f64| -> Result<Option<bool>> {
                Ok(shooter.shoot(rj, at(th), r_end, amp, &[])?.event.crosses())
            };
            let Some(c0) = class(0.0)? else { continue };
            let mut other = None;
            for k in 0..=10 {
                let w = 2f64.powi(k);
                for th in [w, -w] {
                    if class(th)? == Some(!c0) {
                        other = Some(th);
                        break;
                    }
                }
                if other.is_some() {
                    break;
                }
            }
            if let Some(th) = other {
                let (lo, hi) = bisect(0.0, th, c0, false, class)?;
                next = Some((j, rj, at(lo), at(hi)));
                break;
            }
        }
        let Some((j, rj, ylo, yhi)) = next else {
            // keep only the part where the shots agree closely
            let end = last_below.iter().copied().find(|&j| j > 0).unwrap_or(cut);
            merged.extend((0..=end).map(|i| mean(sa[i], sb[i])));
            break;
        };
        merged.extend((0..j).map(|i| mean(sa[i], sb[i])));
        let rest = &nodes[base + j..];
        sa = shooter.shoot(rj, ylo, r_end, amp, rest)?.states;
        sb = shooter.shoot(rj, yhi, r_end, amp, rest)?.states;
        base += j;
        joins.push(base);
    }
    // the growing mode can still bend the final stage away from the decaying
    // branch; drop trailing nodes where the ratio to the asymptote drifts
    let q = |i: usize| merged[i][0] / decaying_asymptote(d, params.omega, nodes[i]).0;
    let far = params.omega.max(0.0).sqrt() + 2.0;
    let mut last = merged.len() - 1;
    while last > 8 && nodes[last - 1] > far && !((q(last) / q(last - 1) - 1.0).abs() <= TRIM_DRIFT) {
        last -= 1;
    }
    merged.truncate(last + 1);
    let mut values: Vec<f64> = merged.iter().map(|s| s[0]).collect();
    let mut derivative: Vec<f64> = merged.iter().zip(nodes).map(|(s, r)| s[1] / r).collect();
    let rc = nodes[last];
    let (phi_c, _) = decaying_asymptote(d, params.omega, rc);
    let tail_constant = values[last] / phi_c;
    for &r in &nodes[last + 1..] {
        let (phi, rphi) = decaying_asymptote(d, params.omega, r);
        values.push(tail_constant * phi);
        derivative.push(tail_constant * rphi / r);
    }

    // ratio to the envelope r^{(ω-d)/2} e^{-r²/2} past the turning point,
    // within the last decade of the grid
    let r_max = *nodes.last().unwrap();
    let turning = params.omega.max(0.0).sqrt();
    let lo_r = (r_max / 10.0).max(turning + 1.0);
    let env = |r: f64| r.powf((params.omega - f64::from(d)) / 2.0) * (-r * r / 2.0).exp();
    let ratios: Vec<f64> =
        (0..=last).filter(|&i| nodes[i] >= lo_r).map(|i| values[i] / env(nodes[i])).collect();
    let certified = rc >= turning + 2.0 && ratios.len() >= 4 && {
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        lo > 0.0 && hi / lo <= 4.0
    };

    // stage joins carry small jumps, so each stage is checked on its own
    let mut residual: f64 = 0.0;
    let mut starts = vec![0];
    starts.extend(joins.iter().copied().filter(|&j| j <= last));
    starts.push(last + 1);
    for w in starts.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if s1 - s0 >= 5 {
            residual = residual.max(ode_residual(params, &nodes[s0..s1], &values[s0..s1], &derivative[s0..s1]));
        }
    }
    Ok(Stitched { values, derivative, r_trusted: rc, tail_constant, certified, residual })
}

/// Largest relative residual of the radial ODE with `u''` from differentiating `u'`.
pub fn ode_residual(params: &ProblemParams, r: &[f64], u: &[f64], du: &[f64]) -> f64 {
    if r.len() < 5 {
        return f64::NAN;
    }
    let (d2, _) = derivatives5(r, du);
    let dm1 = f64::from(params.d) - 1.0;
    let mut worst: f64 = 0.0;
    for i in 2..r.len() - 2 {
        let terms = [d2[i], dm1 / r[i] * du[i], (params.omega - r[i] * r[i]) * u[i], params.source(u[i])];
        let sum: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum();
        worst = worst.max(sum.abs() / scale);
    }
    worst
}

fn no_solution_reason(d: u32, omega: f64) -> String {
    let df = f64::from(d);
    if omega >= df {
        format!("ω ≥ {d}: {d} is the first eigenvalue of -Δ+|x|², no positive solution")
    } else if omega <= 0.0 {
        "ω ≤ 0: excluded by the Pohozaev identity".to_string()
    } else if d == 3 && omega <= 1.0 {
        "d = 3 and ω ≤ 1: no positive solution".to_string()
    } else {
        format!(
            "no class switch of the shots over b ∈ [1e-6, {:.3e}] (ω* = {})",
            critical_b_cap(d),
            omega_star(d)
        )
    }
}

fn assemble_solution(
    params: ProblemParams,
    b: f64,
    grid: &RadialGrid,
    a: Shot,
    c: Shot,
    opts: &ShootingOptions,
    r_end: f64,
) -> Result<ShotSolution> {
    let shooter = Shooter::new(params, opts.rtol);
    let st = stitch(&shooter, grid.nodes(), a, c, r_end, b)?;
    Ok(ShotSolution {
        params,
        b,
        profile: RadialProfile::new(grid.clone(), st.values, "u")?,
        derivative: st.derivative,
        ode_residual: st.residual,
        decay_certified: st.certified,
        r_trusted: st.r_trusted,
        tail_constant: st.tail_constant,
    })
}

/// Largest `u(0)` scanned in critical mode: the bubble scale `ε` with
/// `ε^{d-2} = 1e-10`. Beyond it round-off in the core outweighs the
/// `O(ε^{d-2})` deviation from the bubble that decides the shot class.
pub fn critical_b_cap(d: u32) -> f64 {
    let eps = 1e-10_f64.powf(1.0 / (f64::from(d) - 2.0));
    crate::bubble::bubble_eval(d, eps, 0.0)
}

/// Ground state of the critical problem at frequency `ω`.
pub fn find_ground_state(d: u32, omega: f64, opts: &ShootingOptions) -> Result<ShotSolution> {
    let params = ProblemParams::critical(d, omega)?;
    let shooter = Shooter::new(params, opts.rtol);
    let r_end = opts.r_max_for(omega) + 2.0;
    let class = |b: f64| -> Result<Option<bool>> {
        Ok(shooter.shoot_regular(b, r_end, &[])?.event.crosses())
    };

    // geometric scan for the first change of class
    let mut prev: Option<(f64, bool)> = None;
    let mut bracket = None;
    let mut b = 1e-6;
    let b_cap = critical_b_cap(d);
    while b <= b_cap {
        if let Some(c) = class(b)? {
            if let Some((pb, pc)) = prev {
                if pc != c {
                    bracket = Some((pb, pc, b));
                    break;
                }
            }
            prev = Some((b, c));
        }
        b *= 2.0;
    }
    let Some((lo, lo_cross, hi)) = bracket else {
        return Err(Error::NoSolution { d, omega, reason: no_solution_reason(d, omega) });
    };
    // the bracket is refined on the output grid so that the final shots are
    // the very ones that were classified
    let r_lo = (1e-3 * params.core_scale(hi)).min(1e-4);
    let grid = opts.grid(r_lo, opts.r_max_for(omega), d)?;
    let nodes = grid.nodes();
    let class_on_grid = |b: f64| -> Result<Option<bool>> {
        Ok(shooter.shoot_regular(b, r_end, nodes)?.event.crosses())
    };
    let (lo, hi) = bisect(lo, hi, lo_cross, true, class_on_grid)?;
    let b_star = (lo * hi).sqrt();
    let a = shooter.shoot_regular(lo, r_end, nodes)?;
    let c = shooter.shoot_regular(hi, r_end, nodes)?;
    let sol = assemble_solution(params, b_star, &grid, a, c, opts, r_end)?;
    if !sol.decay_certified {
        return Err(Error::DecayNotCertified(format!(
            "d = {d}, ω = {omega}: profile ratio to the Gaussian envelope left its band"
        )));
    }
    Ok(sol)
}

/// Frequency `ω_b` of the positive decaying solution of the `p = 4` problem with `u(0) = b`.
pub fn find_omega_b(d: u32, b: f64, opts: &ShootingOptions) -> Result<ShotSolution> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("b = {b} must be positive")));
    }
    let df = f64::from(d);
    ProblemParams::supercritical(d, df - 2.0)?;
    let r_end = opts.r_max_for(df) + 2.0;
    let class = |w: f64| -> Result<Option<bool>> {
        let s = Shooter::new(ProblemParams::supercritical(d, w)?, opts.rtol);
        Ok(s.shoot_regular(b, r_end, &[])?.event.crosses())
    };
    let (lo, lo_cross, hi) = omega_bracket(d, &class)?;
    let (lo, hi) = bisect(lo, hi, lo_cross, false, class)?;
    let w = 0.5 * (lo + hi);

    let params = ProblemParams::supercritical(d, w)?;
    let r_lo = (1e-3 * params.core_scale(b)).min(1e-4);
    let grid = opts.grid(r_lo, opts.r_max_for(w), d)?;
    let nodes = grid.nodes();
    let a = Shooter::new(ProblemParams::supercritical(d, lo)?, opts.rtol).shoot_regular(b, r_end, nodes)?;
    let c = Shooter::new(ProblemParams::supercritical(d, hi)?, opts.rtol).shoot_regular(b, r_end, nodes)?;
    assemble_solution(params, b, &grid, a, c, opts, r_end)
}

/// Scans `(d-4, d)` for a change of shot class; reports it unwidened.
fn omega_bracket<F>(d: u32, class: &F) -> Result<(f64, bool, f64)>
where
    F: Fn(f64) -> Result<Option<bool>>,
{
    let df = f64::from(d);
    let n = 64;
    let mut prev: Option<(f64, bool)> = None;
    let mut seen = Vec::new();
    for i in 0..=n {
        let w = df - 4.0 + 4.0 * (i as f64 + 1e-6) / (n as f64 + 2e-6);
        let c = class(w)?;
        seen.push((w, c));
        if let Some(c) = c {
            if let Some((pw, pc)) = prev {
                if pc != c {
                    return Ok((pw, pc, w));
                }
            }
            prev = Some((w, c));
        }
    }
    Err(Error::NoBracket {
        d,
        detail: format!(
            "shot classes do not separate on (d-4, d): first {:?}, last {:?}",
            seen.first(),
            seen.last()
        ),
    })
}

/// Singular solution `u_∞ ~ √(d-3)/r` and its frequency `ω_∞`, started at `r0`.
pub fn find_singular(d: u32, r0: f64, opts: &ShootingOptions) -> Result<SingularSolution> {
    if !(1e-8..=1e-2).contains(&r0) {
        return Err(Error::InvalidArgument(format!("r0 = {r0} outside [1e-8, 1e-2]")));
    }
    let df = f64::from(d);
    ProblemParams::supercritical(d, df - 2.0)?;
    let a_in = (df - 3.0).sqrt();
    let r_end = opts.r_max_for(df) + 2.0;
    let class = |w: f64| -> Result<Option<bool>> {
        let s = Shooter::new(ProblemParams::supercritical(d, w)?, opts.rtol);
        Ok(s.shoot_singular(r0, r_end, &[])?.event.crosses())
    };
    let (lo, lo_cross, hi) = omega_bracket(d, &class)?;
    let (lo, hi) = bisect(lo, hi, lo_cross, false, class)?;
    let w = 0.5 * (lo + hi);
    if r0 * singular_start(d, w, r0).0 > a_in {
        return Err(Error::ExpansionInvalid(format!("r·u(r0) exceeds √(d-3) at r0 = {r0}")));
    }
    let params = ProblemParams::supercritical(d, w)?;
    let r_hi = opts.r_max_for(w);
    let grid = ShootingOptions { r_min: Some(r0), ..*opts }.grid(r0, r_hi, d)?;
    let nodes = grid.nodes();
    let a = Shooter::new(ProblemParams::supercritical(d, lo)?, opts.rtol).shoot_singular(r0, r_end, nodes)?;
    let c = Shooter::new(ProblemParams::supercritical(d, hi)?, opts.rtol).shoot_singular(r0, r_end, nodes)?;
    let amp = singular_start(d, w, r0).0;
    let st = stitch(&Shooter::new(params, opts.rtol), nodes, a, c, r_end, amp)?;
    Ok(SingularSolution {
        d,
        omega_inf: w,
        r0,
        profile: RadialProfile::new(grid, st.values, "u_inf")?,
        derivative: st.derivative,
        inner_constant: a_in,
        ode_residual: st.residual,
        decay_certified: st.certified,
        r_trusted: st.r_trusted,
    })
}

/// One entry of a `b` sweep.
#[derive(Debug)]
pub struct SweepPoint {
    pub b: f64,
    pub omega_b: Result<f64>,
}

/// `ω_b` for each `b`, computed in parallel and returned in input order.
pub fn sweep_b(d: u32, b_values: &[f64], opts: &ShootingOptions) -> Vec<SweepPoint> {
    // only ω is needed here, so skip building profiles
    b_values
        .par_iter()
        .map(|&b| SweepPoint { b, omega_b: omega_b_only(d, b, opts) })
        .collect()
}

/// `ω_b` without assembling the profile.
pub fn omega_b_only(d: u32, b: f64, opts: &ShootingOptions) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("b = {b} must be positive")));
    }
    let df = f64::from(d);
    ProblemParams::supercritical(d, df - 2.0)?;
    let r_end = opts.r_max_for(df) + 2.0;
    let class = |w: f64| -> Result<Option<bool>> {
        let s = Shooter::new(ProblemParams::supercritical(d, w)?, opts.rtol);
        Ok(s.shoot_regular(b, r_end, &[])?.event.crosses())
    };
    let (lo, lo_cross, hi) = omega_bracket(d, &class)?;
    let (lo, hi) = bisect(lo, hi, lo_cross, false, class)?;
    Ok(0.5 * (lo + hi))
}

/// `ω_∞` without assembling the profile.
pub fn omega_inf_only(d: u32, r0: f64, opts: &ShootingOptions) -> Result<f64> {
    let df = f64::from(d);
    ProblemParams::supercritical(d, df - 2.0)?;
    let r_end = opts.r_max_for(df) + 2.0;
    let class = |w: f64| -> Result<Option<bool>> {
        let s = Shooter::new(ProblemParams::supercritical(d, w)?, opts.rtol);
        Ok(s.shoot_singular(r0, r_end, &[])?.event.crosses())
    };
    let (lo, lo_cross, hi) = omega_bracket(d, &class)?;
    let (lo, hi) = bisect(lo, hi, lo_cross, false, class)?;
    Ok(0.5 * (lo + hi))
}
