//! Gamma-family special functions and the Beta-integral closed forms.

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, with reflection below 1/2).
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Γ(x)Γ(1-x) = π / sin(πx), sin(πx) > 0 on (0, 1/2)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - log_gamma_unchecked(T::one() - x);
    }
    // Exact small factorials keep ln Γ(1) = ln Γ(2) = 0 exactly.
    if x == T::one() || x == T::lit(2.0) {
        return T::zero();
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_usize_lossy(i));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    half * (T::TAU()).ln() + (z + half) * t.ln() - t + acc.ln()
}

/// Euler Beta function `B(a, b)` for positive arguments.
pub fn beta<T: Real>(a: T, b: T) -> Result<T> {
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// Surface measure of the unit sphere `S^{d-1}`, i.e. `2 π^{d/2} / Γ(d/2)`.
pub fn sphere_measure<T: Real>(d: u32) -> T {
    assert!(d >= 1, "sphere_measure needs d >= 1");
    let half_d = T::lit(f64::from(d) * 0.5);
    T::lit(2.0) * T::PI().powf(half_d) / log_gamma_unchecked(half_d).exp()
}

/// `∫_0^∞ r^a (1 + r^2)^{-b} dr = B((a+1)/2, b - (a+1)/2) / 2`.
///
/// Returns [`Error::Divergent`] outside `b > (a+1)/2 > 0`, which is how the
/// bubble module learns that a weighted norm is infinite in low dimension.
pub fn power_integral<T: Real>(a: T, b: T) -> Result<T> {
    let half = T::lit(0.5);
    let p = (a + T::one()) * half;
    if !(p > T::zero()) {
        return Err(Error::Divergent(format!(
            "r^{a} is not integrable at the origin"
        )));
    }
    if !(b > p) {
        return Err(Error::Divergent(format!(
            "r^{a}(1+r^2)^-{b} is not integrable at infinity"
        )));
    }
    Ok(half * beta(p, b - p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0_f64).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(5.0_f64).unwrap(), 24.0_f64.ln(), max_relative = 1e-13);
        assert_relative_eq!(log_gamma(0.5_f64).unwrap(), PI.sqrt().ln(), max_relative = 1e-13);
        // Γ(n) = (n-1)! up to 20
        let mut fact = 1.0_f64;
        for n in 2..=20u32 {
            fact *= f64::from(n - 1);
            assert_relative_eq!(log_gamma(f64::from(n)).unwrap(), fact.ln(), max_relative = 1e-13);
        }
        // half-integers: Γ(n + 1/2) = (2n)! √π / (4^n n!)
        assert_relative_eq!(
            log_gamma(3.5_f64).unwrap(),
            (15.0 / 8.0 * PI.sqrt()).ln(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            log_gamma(0.1_f64).unwrap(),
            2.252_712_651_734_206,
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0_f64), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_single_precision() {
        assert!((log_gamma(5.0_f32).unwrap() - 24.0_f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure::<f64>(3), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_measure::<f64>(4), 2.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_measure::<f64>(6), PI.powi(3), max_relative = 1e-14);
        assert_relative_eq!(sphere_measure::<f64>(2), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn power_integral_closed_forms() {
        assert_relative_eq!(power_integral(1.0_f64, 2.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(power_integral(0.0_f64, 1.0).unwrap(), PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            power_integral(6.0_f64, 5.0).unwrap(),
            0.061_359_231_515_425_65,
            max_relative = 1e-12
        );
    }

    #[test]
    fn power_integral_divergence() {
        // ‖xU‖² in d = 6: a = 7, b = 4 -> (a+1)/2 = 4 = b
        assert!(matches!(power_integral(7.0_f64, 4.0), Err(Error::Divergent(_))));
        assert!(matches!(power_integral(-1.0_f64, 4.0), Err(Error::Divergent(_))));
    }
}
