//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Tolerances and limits for [`Dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Dopri5<T> {
    fn default() -> Self {
        Self { rtol: T::lit(1e-12), atol: T::lit(1e-300), max_steps: 2_000_000 }
    }
}

/// State reached at the end of an integration leg.
#[derive(Debug, Clone, Copy)]
pub struct Leg<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    /// Step size to try next.
    pub h: T,
    /// `true` if the observer asked to stop before reaching the target.
    pub stopped: bool,
    pub steps: usize,
}

impl<T: Real> Dopri5<T> {
    pub fn with_rtol(rtol: T) -> Self {
        Self { rtol, ..Self::default() }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
    ///
    /// `observe` sees every accepted step and returns `true` to stop there.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: &F,
        t0: T,
        y0: [T; N],
        t1: T,
        h0: Option<T>,
        mut observe: O,
    ) -> Result<Leg<T, N>>
    where
        F: Fn(T, &[T; N]) -> [T; N],
        O: FnMut(T, &[T; N]) -> bool,
    {
        let span = t1 - t0;
        if span == T::zero() {
            return Ok(Leg { t: t0, y: y0, h: h0.unwrap_or(T::zero()), stopped: false, steps: 0 });
        }
        let dir = span.signum();
        let mut h = h0
            .map(|h| h.abs())
            .filter(|h| *h > T::zero())
            .unwrap_or_else(|| span.abs() * T::lit(1e-3))
            .min(span.abs());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut steps = 0;
        let safety = T::lit(0.9);
        let fifth = T::lit(0.2);
        loop {
            if steps >= self.max_steps {
                return Err(Error::StepUnderflow {
                    r: t.to_f64().unwrap_or(f64::NAN),
                    h: h.to_f64().unwrap_or(f64::NAN),
                });
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            let (y_new, k7, err) = self.step(f, t, &y, &k1, hs);
            if err <= T::one() && err.is_finite() {
                t = if last { t1 } else { t + hs };
                y = y_new;
                k1 = k7;
                steps += 1;
                let grow = if err == T::zero() {
                    T::lit(5.0)
                } else {
                    (safety * err.powf(-fifth)).min(T::lit(5.0)).max(T::lit(0.2))
                };
                if !last {
                    h = hs.abs() * grow;
                }
                if observe(t, &y) {
                    return Ok(Leg { t, y, h, stopped: true, steps });
                }
                if last {
                    return Ok(Leg { t, y, h: h.max(hs.abs() * grow), stopped: false, steps });
                }
            } else {
                let shrink = if err.is_finite() {
                    (safety * err.powf(-fifth)).max(T::lit(0.1))
                } else {
                    T::lit(0.1)
                };
                h = hs.abs() * shrink;
                let floor = T::epsilon() * T::lit(16.0) * (t.abs() + T::one());
                if h < floor {
                    return Err(Error::StepUnderflow {
                        r: t.to_f64().unwrap_or(f64::NAN),
                        h: h.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
    }

    /// States at every abscissa of the monotone sequence `ts`, starting from
    /// `y0` at `ts[0]`.
    pub fn sample<const N: usize, F>(&self, f: &F, ts: &[T], y0: [T; N]) -> Result<Vec<[T; N]>>
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let mut out = Vec::with_capacity(ts.len());
        if ts.is_empty() {
            return Ok(out);
        }
        out.push(y0);
        let mut y = y0;
        let mut h = None;
        for w in ts.windows(2) {
            let leg = self.integrate(f, w[0], y, w[1], h, |_, _| false)?;
            y = leg.y;
            h = Some(leg.h);
            out.push(y);
        }
        Ok(out)
    }

    fn step<const N: usize, F>(&self, f: &F, t: T, y: &[T; N], k1: &[T; N], h: T) -> ([T; N], [T; N], T)
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let mut k = [[T::zero(); N]; 7];
        k[0] = *k1;
        let mut y_stage = *y;
        for s in 1..7 {
            for i in 0..N {
                let mut acc = T::zero();
                for j in 0..s {
                    acc = acc + T::lit(A[s][j]) * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            k[s] = f(t + T::lit(C[s]) * h, &y_stage);
        }
        // stage 7 sits at the 5th-order solution (FSAL)
        let y_new = y_stage;
        let mut err = T::zero();
        for i in 0..N {
            let mut e = T::zero();
            for (s, ks) in k.iter().enumerate() {
                e = e + T::lit(E[s]) * ks[i];
            }
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            let q = h * e / sc;
            err = err + q * q;
        }
        let err = (err / T::from_usize_lossy(N)).sqrt();
        (y_new, k[6], err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let leg = Dopri5::with_rtol(1e-12)
            .integrate(&f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, None, |_, _| false)
            .unwrap();
        assert!((leg.y[0] - 1.0).abs() < 1e-10);
        assert!(leg.y[1].abs() < 1e-10);
    }

    #[test]
    fn sample_hits_every_node() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let ts: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let ys = Dopri5::default().sample(&f, &ts, [1.0]).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert_relative_eq!(y[0], (-t).exp(), max_relative = 1e-11);
        }
    }

    #[test]
    fn backward_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [2.0 * y[0]];
        let leg = Dopri5::with_rtol(1e-12)
            .integrate(&f, 3.0, [1.0], 0.0, None, |_, _| false)
            .unwrap();
        assert_relative_eq!(leg.y[0], (-6.0_f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn observer_stops_at_sign_change() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let leg = Dopri5::default()
            .integrate(&f, 0.0, [1.0, 0.0], 10.0, Some(0.01), |_, y| y[0] < 0.0)
            .unwrap();
        assert!(leg.stopped);
        assert!(leg.t > std::f64::consts::FRAC_PI_2 && leg.t < 2.0);
    }

    #[test]
    fn single_precision_runs() {
        let f = |_t: f32, y: &[f32; 1]| [-y[0]];
        let leg = Dopri5::<f32>::with_rtol(1e-5)
            .integrate(&f, 0.0, [1.0], 1.0, None, |_, _| false)
            .unwrap();
        assert!((leg.y[0] - (-1.0_f32).exp()).abs() < 1e-5);
    }
}
