//! Radial quadrature and finite-difference weights on nonuniform grids.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::{RadialGrid, RadialProfile};
use super::special::sphere_measure;

/// Composite trapezoid rule over arbitrary nodes.
pub fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    let half = T::lit(0.5);
    x.windows(2)
        .zip(y.windows(2))
        .fold(T::zero(), |acc, (xw, yw)| acc + half * (xw[1] - xw[0]) * (yw[0] + yw[1]))
}

/// Composite Simpson rule over arbitrary nodes: each pair of intervals is
/// integrated under the interpolating parabola; an odd interval left at the
/// end is closed with the parabola through the last three nodes.
pub fn simpson<T: Real>(x: &[T], y: &[T]) -> T {
    let n = x.len();
    if n < 3 {
        return trapezoid(x, y);
    }
    let six = T::lit(6.0);
    let mut acc = T::zero();
    let mut i = 0;
    while i + 2 < n {
        let (h0, h1) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
        let h = h0 + h1;
        acc = acc
            + h / six
                * (y[i] * (T::lit(2.0) - h1 / h0)
                    + y[i + 1] * h * h / (h0 * h1)
                    + y[i + 2] * (T::lit(2.0) - h0 / h1));
        i += 2;
    }
    if i + 1 < n {
        // last interval [x_{n-2}, x_{n-1}] from the parabola through n-3..n-1
        let (h0, h1) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        let w0 = -h1 * h1 * h1 / (six * h0 * (h0 + h1));
        let w1 = h1 * (h1 + T::lit(3.0) * h0) / (six * h0);
        let w2 = h1 * (T::lit(2.0) * h1 + T::lit(3.0) * h0) / (six * (h0 + h1));
        acc = acc + w0 * y[n - 3] + w1 * y[n - 2] + w2 * y[n - 1];
    }
    acc
}

/// `|S^{d-1}| ∫ |f|^q r^{d-1} dr` by [`simpson`].
pub fn quad_radial_simpson<T: Real>(f: &RadialProfile<T>, q: T) -> T {
    let d = f.dim();
    let integrand: Vec<T> = f
        .iter()
        .map(|(r, v)| v.abs().powf(q) * r.powi(d as i32 - 1))
        .collect();
    sphere_measure::<T>(d) * simpson(f.grid.nodes(), &integrand)
}

/// `|S^{d-1}| ∫ |f|^q r^{d-1} dr` over the profile's grid (trapezoid).
pub fn quad_radial<T: Real>(f: &RadialProfile<T>, q: T) -> T {
    let d = f.dim();
    let integrand: Vec<T> = f
        .iter()
        .map(|(r, v)| v.abs().powf(q) * r.powi(d as i32 - 1))
        .collect();
    sphere_measure::<T>(d) * trapezoid(f.grid.nodes(), &integrand)
}

/// `|S^{d-1}| ∫_0^{r_max} g(r) r^{d-1} dr` for sampled `g`, adding the
/// `[0, r_min]` piece under the power law fitted to the first two nodes.
///
/// Fails if the local exponent says the integral diverges at the origin.
pub fn radial_integral_from_origin<T: Real>(grid: &RadialGrid<T>, g: &[T]) -> Result<T> {
    let d = grid.dim();
    let r = grid.nodes();
    let w: Vec<T> = r.iter().zip(g).map(|(&r, &g)| g * r.powi(d as i32 - 1)).collect();
    let body = trapezoid(r, &w);
    let cap = origin_cap(r[0], r[1], w[0], w[1])?;
    Ok(sphere_measure::<T>(d) * (body + cap))
}

/// `∫_0^{r0} w` assuming `w ∝ r^k` with `k` from `(r0, w0), (r1, w1)`.
fn origin_cap<T: Real>(r0: T, r1: T, w0: T, w1: T) -> Result<T> {
    if w0 == T::zero() {
        return Ok(T::zero());
    }
    if w1 == T::zero() || (w0 < T::zero()) != (w1 < T::zero()) {
        // no power law to fit; linear cap
        return Ok(T::lit(0.5) * w0 * r0);
    }
    let k = (w1 / w0).ln() / (r1 / r0).ln();
    if !(k > -T::one()) {
        return Err(Error::Divergent(format!(
            "integrand behaves like r^{k} at the origin"
        )));
    }
    Ok(w0 * r0 / (k + T::one()))
}

/// Fornberg weights for derivatives `0..=m` at `x0` from `nodes`.
/// `weights[k][j]` multiplies `f(nodes[j])` in the `k`-th derivative.
pub fn fornberg_weights<T: Real>(x0: T, nodes: &[T], m: usize) -> Vec<Vec<T>> {
    let n = nodes.len();
    let mut c = vec![vec![T::zero(); n]; m + 1];
    c[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kk = T::from_usize_lossy(k);
                    c[k][i] = c1 * (kk * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                let kk = T::from_usize_lossy(k);
                c[k][j] = (c4 * c[k][j] - kk * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First and second derivatives at every node from a sliding 5-point stencil.
pub fn derivatives5<T: Real>(x: &[T], y: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    assert!(n >= 5, "five-point stencil needs at least five nodes");
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        let s = i.saturating_sub(2).min(n - 5);
        let w = fornberg_weights(x[i], &x[s..s + 5], 2);
        let (a, b) = (0..5).fold((T::zero(), T::zero()), |(a, b), j| {
            (a + w[1][j] * y[s + j], b + w[2][j] * y[s + j])
        });
        d1.push(a);
        d2.push(b);
    }
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_moment_d3() {
        let g = RadialGrid::log_uniform(1e-6_f64, 12.0, 40_001, 3).unwrap();
        let f = RadialProfile::from_fn(g, "gauss", |r| (-r * r / 2.0).exp()).unwrap();
        assert_relative_eq!(quad_radial(&f, 2.0), PI.powf(1.5), max_relative = 1e-7);
    }

    #[test]
    fn constant_on_shell() {
        let g = RadialGrid::graded(1.0_f64, 2.0, 20_001, 3, Some(1.0)).unwrap();
        let f = RadialProfile::from_fn(g, "one", |_| 1.0).unwrap();
        assert_relative_eq!(quad_radial(&f, 1.0), 4.0 * PI * 7.0 / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn halving_gains_second_order() {
        let errs: Vec<f64> = [201usize, 401, 801, 1601]
            .iter()
            .map(|&n| {
                let g = RadialGrid::log_uniform(1e-3_f64, 10.0, n, 3).unwrap();
                let f = RadialProfile::from_fn(g, "g", |r| (-r * r / 2.0).exp()).unwrap();
                quad_radial(&f, 2.0)
            })
            .collect();
        let diffs: Vec<f64> = errs.windows(2).map(|w| (w[1] - w[0]).abs() / w[1]).collect();
        for w in diffs.windows(2) {
            assert!(w[0] / w[1] >= 3.0, "ratios {diffs:?}");
        }
    }

    #[test]
    fn simpson_is_exact_for_quadratics_on_uneven_nodes() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x;
        let exact = |x: f64| x - x * x + x * x * x / 6.0;
        for n in [3usize, 5, 6, 9, 10] {
            let x: Vec<f64> = (0..n).map(|i| (i as f64 / (n - 1) as f64).powf(1.7) * 2.0).collect();
            let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
            assert!((simpson(&x, &y) - exact(2.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn simpson_gains_fourth_order() {
        let errs: Vec<f64> = [201usize, 401, 801]
            .iter()
            .map(|&n| {
                let g = RadialGrid::log_uniform(1e-4_f64, 10.0, n, 3).unwrap();
                let f = RadialProfile::from_fn(g, "g", |r| (-r * r / 2.0).exp()).unwrap();
                (quad_radial_simpson(&f, 2.0) - PI.powf(1.5)).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 12.0 && errs[1] / errs[2] > 12.0, "{errs:?}");
    }

    #[test]
    fn origin_cap_for_singular_square() {
        // G = 1/r in d = 3: ∫_0^1 4π r^2 / r^2 dr = 4π
        let g = RadialGrid::log_uniform(1e-3_f64, 1.0, 20_001, 3).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|r| 1.0 / (r * r)).collect();
        let v = radial_integral_from_origin(&g, &vals).unwrap();
        assert_relative_eq!(v, 4.0 * PI, max_relative = 1e-7);
        let bad: Vec<f64> = g.nodes().iter().map(|r| r.powi(-4)).collect();
        assert!(radial_integral_from_origin(&g, &bad).is_err());
    }

    #[test]
    fn fornberg_matches_polynomial_derivatives() {
        let nodes = [0.1_f64, 0.25, 0.3, 0.55, 0.9];
        let w = fornberg_weights(0.3, &nodes, 2);
        let f = |x: f64| 2.0 + x - 3.0 * x * x + 0.5 * x.powi(4);
        let d1: f64 = (0..5).map(|j| w[1][j] * f(nodes[j])).sum();
        let d2: f64 = (0..5).map(|j| w[2][j] * f(nodes[j])).sum();
        assert_relative_eq!(d1, 1.0 - 6.0 * 0.3 + 2.0 * 0.3_f64.powi(3), max_relative = 1e-12);
        assert_relative_eq!(d2, -6.0 + 6.0 * 0.09, max_relative = 1e-12);
    }
}
