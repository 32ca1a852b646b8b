//! Confluent hypergeometric (Kummer) function `M(a; b; x)`.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Consecutive negligible terms required before a non-terminating series is cut.
const QUIET_TERMS: usize = 5;
const MAX_TERMS: usize = 100_000;

/// Value of a Kummer series together with the size of the last retained term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerValue<T> {
    pub value: T,
    /// Zero for terminating (polynomial) evaluations.
    pub tail_bound: T,
    pub terms: usize,
}

/// If `a` is a non-positive integer `-n`, returns `n`.
fn terminating_degree<T: Real>(a: T) -> Option<usize> {
    if a <= T::zero() && a == a.round() {
        (-a).to_usize()
    } else {
        None
    }
}

fn check_b<T: Real>(b: T) -> Result<()> {
    if b <= T::zero() && b == b.round() {
        return Err(Error::Domain(format!(
            "Kummer M undefined for b = {b} (zero or negative integer)"
        )));
    }
    Ok(())
}

/// `M(a; b; x) = Σ (a)_n / (b)_n x^n / n!`.
///
/// Terminates exactly when `-a ∈ ℕ`; otherwise summation stops once five
/// consecutive terms fall below `1e-16 · |partial sum|`.
pub fn kummer_m<T: Real>(a: T, b: T, x: T) -> Result<KummerValue<T>> {
    check_b(b)?;
    let tiny = T::lit(1e-16);
    let limit = terminating_degree(a);
    let mut sum = T::one();
    let mut term = T::one();
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        if let Some(n) = limit {
            if k == n {
                return Ok(KummerValue { value: sum, tail_bound: T::zero(), terms: k + 1 });
            }
        }
        let kk = T::from_usize_lossy(k);
        term = term * (a + kk) / ((b + kk) * (kk + T::one())) * x;
        sum = sum + term;
        if term.abs() < tiny * sum.abs() {
            quiet += 1;
            if quiet >= QUIET_TERMS && limit.is_none() {
                return Ok(KummerValue { value: sum, tail_bound: term.abs(), terms: k + 2 });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

/// Coefficients `c_k` of `M(-n; b; x) = Σ_{k=0}^{n} c_k x^k`.
///
/// Generic over any numeric field so the same recurrence can be run in exact
/// rational arithmetic.
pub fn kummer_polynomial<T>(n: u32, b: &T) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut c = T::one();
    coeffs.push(c.clone());
    for k in 0..n {
        let kk = T::from_u32(k).expect("small integer");
        let a_k = kk.clone() - T::from_u32(n).expect("small integer");
        let denom = (b.clone() + kk.clone()) * (kk + T::one());
        c = c * a_k / denom;
        coeffs.push(c.clone());
    }
    coeffs
}

/// Horner evaluation of polynomial coefficients in ascending order.
pub fn eval_polynomial<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_rational::Ratio;

    #[test]
    fn trivial_values() {
        assert_eq!(kummer_m(0.7_f64, 2.5, 0.0).unwrap().value, 1.0);
        for &(b, x) in &[(2.0_f64, 0.3_f64), (1.5, 4.0), (7.5, -2.0)] {
            let v = kummer_m(-1.0, b, x).unwrap();
            assert_relative_eq!(v.value, 1.0 - x / b, max_relative = 1e-15);
            assert_eq!(v.tail_bound, 0.0);
        }
        let v = kummer_m(-2.0_f64, 3.0, 1.0).unwrap();
        assert_relative_eq!(v.value, 1.0 - 2.0 / 3.0 + 1.0 / 12.0, max_relative = 1e-15);
    }

    #[test]
    fn exponential_special_case() {
        // M(a; a; x) = e^x
        for &x in &[-3.0_f64, 0.5, 5.0, 12.0] {
            let v = kummer_m(1.3, 1.3, x).unwrap();
            assert_relative_eq!(v.value, x.exp(), max_relative = 1e-13);
            assert!(v.tail_bound > 0.0);
        }
    }

    #[test]
    fn rejects_bad_b() {
        assert!(kummer_m(0.5_f64, -2.0, 1.0).is_err());
        assert!(kummer_m(0.5_f64, 0.0, 1.0).is_err());
    }

    #[test]
    fn polynomial_matches_exact_rationals() {
        // M(-3; 3/2; x) = 1 - 2x + 4/5 x^2 - 8/105 x^3
        let b = Ratio::new(3_i64, 2);
        let c = kummer_polynomial(3, &b);
        assert_eq!(
            c,
            vec![
                Ratio::from_integer(1),
                Ratio::from_integer(-2),
                Ratio::new(4, 5),
                Ratio::new(-8, 105)
            ]
        );
        let cf: Vec<f64> = kummer_polynomial(3, &1.5_f64);
        for (x, y) in cf.iter().zip(&c) {
            assert_relative_eq!(*x, *y.numer() as f64 / *y.denom() as f64, max_relative = 1e-15);
        }
    }
}
