//! Aubin–Talenti bubbles `U_ε(r) = ε^{(d-2)/2} [d(d-2)]^{(d-2)/4} (ε² + r²)^{-(d-2)/2}`
//! and their norms.

use crate::error::{Error, Result};
use crate::numkernel::{power_integral, sphere_measure};
use crate::scalar::Real;

/// A weighted norm that is either finite or divergent in the given dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment<T> {
    Finite(T),
    Infinite,
}

impl<T: Copy> Moment<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

fn from_power_integral<T: Real>(v: Result<T>) -> Result<Moment<T>> {
    match v {
        Ok(v) => Ok(Moment::Finite(v)),
        Err(Error::Divergent(_)) => Ok(Moment::Infinite),
        Err(e) => Err(e),
    }
}

/// Closed-form norms of the unit bubble `U = U_1` in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleConstants<T> {
    pub d: u32,
    /// `‖U‖²_{L²}`, finite iff `d ≥ 5`.
    pub norm_l2_sq: Moment<T>,
    /// `‖xU‖²_{L²}`, finite iff `d ≥ 7`.
    pub norm_xu_sq: Moment<T>,
    /// `‖U‖^{s}_{L^{s}}` with `s = (d+2)/(d-2)`; this is `‖U‖³_{L³}` for
    /// `d = 4` and `‖U‖^{7/3}_{L^{7/3}}` for `d = 5`.
    pub norm_source: T,
    /// `‖∇U‖²_{L²}`.
    pub grad_sq: T,
    /// Sobolev constant `S`, with `S^{d/2} = ‖U‖^{2d/(d-2)}_{L^{2d/(d-2)}}`.
    pub sobolev_s: T,
}

impl<T: Real> BubbleConstants<T> {
    /// `‖U‖³_{L³(ℝ⁴)}`; only meaningful for `d = 4`.
    pub fn norm_l3_cubed_d4(&self) -> Option<T> {
        (self.d == 4).then_some(self.norm_source)
    }

    /// `‖U‖^{7/3}_{L^{7/3}(ℝ⁵)}`; only meaningful for `d = 5`.
    pub fn norm_l73_d5(&self) -> Option<T> {
        (self.d == 5).then_some(self.norm_source)
    }

    /// `‖U‖^{2d/(d-2)}_{L^{2d/(d-2)}} = S^{d/2}`.
    pub fn critical_norm_pow(&self) -> T {
        self.sobolev_s.powf(T::lit(f64::from(self.d) / 2.0))
    }
}

/// `[d(d-2)]^{(d-2)/4}`, the bubble amplitude at `ε = 1, r = 0`.
pub fn bubble_amplitude<T: Real>(d: u32) -> T {
    let df = T::lit(f64::from(d));
    (df * (df - T::lit(2.0))).powf((df - T::lit(2.0)) / T::lit(4.0))
}

/// `U_ε(r)`.
pub fn bubble_eval<T: Real>(d: u32, eps: T, r: T) -> T {
    let k = T::lit((f64::from(d) - 2.0) / 2.0);
    bubble_amplitude::<T>(d) * eps.powf(k) * (eps * eps + r * r).powf(-k)
}

/// `∂_r U_ε(r)`.
pub fn bubble_derivative<T: Real>(d: u32, eps: T, r: T) -> T {
    let k = T::lit((f64::from(d) - 2.0) / 2.0);
    let s = eps * eps + r * r;
    -T::lit(2.0) * k * r * bubble_amplitude::<T>(d) * eps.powf(k) * s.powf(-k - T::one())
}

/// Scale whose bubble peak equals `peak`: inverse of `U_ε(0) = ε^{-(d-2)/2} U_1(0)`.
pub fn eps_from_peak<T: Real>(d: u32, peak: T) -> T {
    (bubble_amplitude::<T>(d) / peak).powf(T::lit(2.0 / (f64::from(d) - 2.0)))
}

fn check_dim(d: u32) -> Result<()> {
    if d < 3 {
        return Err(Error::Dimension { d, detail: "bubbles need d ≥ 3".into() });
    }
    Ok(())
}

pub fn bubble_constants<T: Real>(d: u32) -> Result<BubbleConstants<T>> {
    check_dim(d)?;
    let df = T::lit(f64::from(d));
    let two = T::lit(2.0);
    let c = bubble_amplitude::<T>(d);
    let area = sphere_measure::<T>(d);
    let c2 = c * c;
    let scale = |m: Moment<T>, k: T| match m {
        Moment::Finite(v) => Moment::Finite(k * v),
        Moment::Infinite => Moment::Infinite,
    };
    let norm_l2_sq = scale(from_power_integral(power_integral(df - T::one(), df - two))?, c2 * area);
    let norm_xu_sq = scale(from_power_integral(power_integral(df + T::one(), df - two))?, c2 * area);
    let s = (df + two) / (df - two);
    let norm_source =
        c.powf(s) * area * power_integral(df - T::one(), (df + two) / two)?;
    let grad_sq = c2 * (df - two) * (df - two) * area * power_integral(df + T::one(), df)?;
    Ok(BubbleConstants {
        d,
        norm_l2_sq,
        norm_xu_sq,
        norm_source,
        grad_sq,
        sobolev_s: sobolev_constant(d)?,
    })
}

/// Best Sobolev constant from `S^{d/2} = |S^{d-1}| ∫ U^{2d/(d-2)} r^{d-1} dr`.
pub fn sobolev_constant<T: Real>(d: u32) -> Result<T> {
    check_dim(d)?;
    let df = T::lit(f64::from(d));
    let half_d = df / T::lit(2.0);
    let critical = (df * (df - T::lit(2.0))).powf(half_d)
        * sphere_measure::<T>(d)
        * power_integral(df - T::one(), df)?;
    Ok(critical.powf(T::one() / half_d))
}

/// `∫₀^∞ r^a (1+r²)^{-b} dr` by double-exponential quadrature on
/// `r = t/(1-t)`; `Infinite` when the tail does not decay.
fn power_integral_quad(a: f64, b: f64) -> Moment<f64> {
    if a - 2.0 * b >= -1.0 {
        return Moment::Infinite;
    }
    let f = |t: f64| {
        let s = 1.0 - t;
        if s <= 0.0 || t <= 0.0 {
            return 0.0;
        }
        let r = t / s;
        r.powf(a) * (1.0 + r * r).powf(-b) / (s * s)
    };
    let rough = quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-10).integral;
    Moment::Finite(quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-16 * rough.abs()).integral)
}

/// The norms of [`bubble_constants`] from the radial integrals by adaptive
/// quadrature instead of Beta functions.
pub fn bubble_constants_by_quadrature(d: u32) -> Result<BubbleConstants<f64>> {
    check_dim(d)?;
    let df = f64::from(d);
    let c = bubble_amplitude::<f64>(d);
    let area = sphere_measure::<f64>(d);
    let k = (df - 2.0) / 2.0;
    let finite = |m: Moment<f64>| m.finite().expect("decaying integrand");
    let scale = |m: Moment<f64>, s: f64| match m {
        Moment::Finite(v) => Moment::Finite(s * v),
        Moment::Infinite => Moment::Infinite,
    };
    let s = (df + 2.0) / (df - 2.0);
    let critical = c.powf(2.0 * df / (df - 2.0)) * area * finite(power_integral_quad(df - 1.0, df));
    Ok(BubbleConstants {
        d,
        norm_l2_sq: scale(power_integral_quad(df - 1.0, 2.0 * k), c * c * area),
        norm_xu_sq: scale(power_integral_quad(df + 1.0, 2.0 * k), c * c * area),
        norm_source: c.powf(s) * area * finite(power_integral_quad(df - 1.0, (df + 2.0) / 2.0)),
        grad_sq: c * c * 4.0 * k * k * area * finite(power_integral_quad(df + 1.0, 2.0 * k + 2.0)),
        sobolev_s: critical.powf(2.0 / df),
    })
}
