//! Symmetric tridiagonal operators: linear solves and Sturm eigenvalue counts.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::RadialGrid;

/// Symmetric tridiagonal matrix, optionally tied to the radial grid it
/// discretizes (interior nodes, Dirichlet ends).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    pub diag: Vec<T>,
    pub offdiag: Vec<T>,
    pub grid: Option<RadialGrid<T>>,
}

/// Result of a Sturm count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigCount {
    /// Number of eigenvalues strictly below the shift.
    pub below: usize,
    /// Pivots that vanished and were nudged by the relative guard.
    pub perturbed_pivots: usize,
}

impl<T: Real> TridiagonalOperator<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag, grid: None })
    }

    pub fn with_grid(mut self, grid: RadialGrid<T>) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y = y + self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y = y + self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Copy with `shift` subtracted from the diagonal.
    pub fn shifted(&self, shift: T) -> Self {
        Self {
            diag: self.diag.iter().map(|&d| d - shift).collect(),
            offdiag: self.offdiag.clone(),
            grid: self.grid.clone(),
        }
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut rad = T::zero();
            if i > 0 {
                rad = rad + self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                rad = rad + self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - rad);
            hi = hi.max(self.diag[i] + rad);
        }
        (lo, hi)
    }

    /// Sturm count of eigenvalues strictly below `lambda` via the `LDLᵀ`
    /// pivots of `T - λI`.
    pub fn count_eigs_below(&self, lambda: T) -> EigCount {
        let guard = T::lit(1e-14);
        let n = self.len();
        let mut below = 0;
        let mut perturbed = 0;
        let mut q = T::zero();
        for i in 0..n {
            let a = self.diag[i] - lambda;
            let mut scale = a.abs();
            q = if i == 0 {
                a
            } else {
                let e = self.offdiag[i - 1];
                scale = scale + e.abs();
                a - e * e / q
            };
            let pivmin = guard * scale.max(T::min_positive_value());
            if q.abs() <= pivmin {
                q = pivmin;
                perturbed += 1;
            }
            if q < T::zero() {
                below += 1;
            }
        }
        EigCount { below, perturbed_pivots: perturbed }
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize, abs_tol: T) -> Result<T> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue index {k} out of range for order {}",
                self.len()
            )));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = T::lit(1e-12) * (lo.abs() + hi.abs() + T::one());
        lo = lo - pad;
        hi = hi + pad;
        let half = T::lit(0.5);
        for _ in 0..400 {
            if hi - lo <= abs_tol {
                break;
            }
            let mid = half * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.count_eigs_below(mid).below > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(half * (lo + hi))
    }

    /// The `m` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, m: usize, abs_tol: T) -> Result<Vec<T>> {
        (0..m.min(self.len())).map(|k| self.eigenvalue(k, abs_tol)).collect()
    }
}

/// Solves `T x = rhs` for a symmetric tridiagonal `T`.
pub fn solve_tridiagonal<T: Real>(op: &TridiagonalOperator<T>, rhs: &[T]) -> Result<Vec<T>> {
    solve_general_tridiagonal(&op.offdiag, &op.diag, &op.offdiag, rhs)
}

/// Gaussian elimination with partial pivoting for a general tridiagonal
/// system with sub-diagonal `lower`, diagonal `diag` and super-diagonal `upper`.
pub fn solve_general_tridiagonal<T: Real>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &[T],
) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n || rhs.len() != n {
        return Err(Error::InvalidArgument("tridiagonal system shape mismatch".into()));
    }
    let mut dl = lower.to_vec();
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut du2 = vec![T::zero(); n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    // singularity is judged row by row so that strongly graded systems pass
    let row_scale: Vec<T> = (0..n)
        .map(|i| {
            let mut m = diag[i].abs();
            if i > 0 {
                m = m.max(lower[i - 1].abs());
            }
            if i + 1 < n {
                m = m.max(upper[i].abs());
            }
            m
        })
        .collect();
    let eps_n = T::epsilon() * T::from_usize_lossy(n);

    for i in 0..n - 1 {
        let tiny = eps_n * row_scale[i].max(row_scale[i + 1]);
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() <= tiny {
                return Err(Error::SingularMatrix { row: i });
            }
            let f = dl[i] / d[i];
            d[i + 1] = d[i + 1] - f * du[i];
            b[i + 1] = b[i + 1] - f * b[i];
            dl[i] = T::zero();
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            b.swap(i, i + 1);
            b[i + 1] = b[i + 1] - f * b[i];
        }
    }
    if d[n - 1].abs() <= eps_n * row_scale[n - 1] {
        return Err(Error::SingularMatrix { row: n - 1 });
    }
    let mut x = vec![T::zero(); n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn op(diag: &[f64], off: &[f64]) -> TridiagonalOperator<f64> {
        TridiagonalOperator::new(diag.to_vec(), off.to_vec()).unwrap()
    }

    #[test]
    fn identity_and_two_by_two() {
        let x = solve_tridiagonal(&op(&[1.0, 1.0, 1.0], &[0.0, 0.0]), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let x = solve_tridiagonal(&op(&[2.0, 2.0], &[-1.0]), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(x[0], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(x[1], 1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0,1],[1,0]] x = (2,3) -> x = (3,2)
        let x = solve_tridiagonal(&op(&[0.0, 0.0], &[1.0]), &[2.0, 3.0]).unwrap();
        assert_relative_eq!(x[0], 3.0);
        assert_relative_eq!(x[1], 2.0);
    }

    #[test]
    fn singular_detected() {
        let r = solve_tridiagonal(&op(&[1.0, 1.0], &[1.0]), &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn sturm_counts_hand_examples() {
        let t = op(&[1.0, 2.0, 3.0], &[0.0, 0.0]);
        assert_eq!(t.count_eigs_below(2.5).below, 2);
        assert_eq!(t.count_eigs_below(0.0).below, 0);
        let lap = op(&[2.0, 2.0, 2.0], &[-1.0, -1.0]);
        let c = lap.count_eigs_below(2.0);
        assert_eq!(c.below, 1);
        assert!(c.perturbed_pivots > 0);
    }

    #[test]
    fn bisection_reproduces_discrete_laplacian() {
        let n = 40;
        let lap = op(&vec![2.0; n], &vec![-1.0; n - 1]);
        for k in 0..n {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((lap.eigenvalue(k, 1e-13).unwrap() - exact).abs() < 1e-12);
        }
    }

    fn residual_inf(t: &TridiagonalOperator<f64>, x: &[f64], b: &[f64]) -> f64 {
        t.matvec(x).iter().zip(b).map(|(y, b)| (y - b).abs()).fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn random_dominant_systems_solve(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 2..60)
        ) {
            let n = seed.len();
            let off: Vec<f64> = seed[..n - 1].iter().map(|s| s.0).collect();
            let diag: Vec<f64> = seed.iter().map(|s| 2.5 + s.1.abs()).collect();
            let b: Vec<f64> = seed.iter().map(|s| s.2).collect();
            let t = op(&diag, &off);
            let x = solve_tridiagonal(&t, &b).unwrap();
            let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(residual_inf(&t, &x, &b) <= 1e-10 * bmax.max(1e-300));
        }

        #[test]
        fn sturm_count_is_monotone(
            diag in proptest::collection::vec(-5.0f64..5.0, 1..40),
            l1 in -8.0f64..8.0,
            l2 in -8.0f64..8.0,
        ) {
            let off = vec![0.7; diag.len() - 1];
            let t = op(&diag, &off);
            let (a, b) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            prop_assert!(t.count_eigs_below(a).below <= t.count_eigs_below(b).below);
        }
    }
}
