use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strictly increasing radial nodes on `[r_min, r_max]` for dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    dim: u32,
}

impl<T: Real> RadialGrid<T> {
    /// Log-uniform nodes `r_i = r_min (r_max/r_min)^{i/(n-1)}`.
    pub fn log_uniform(r_min: T, r_max: T, n: usize, dim: u32) -> Result<Self> {
        Self::graded(r_min, r_max, n, dim, None)
    }

    /// Graded nodes. `grading = None` is the log-uniform default; `Some(g)`
    /// places `r_i = r_min + (r_max - r_min) (i/(n-1))^g`.
    pub fn graded(r_min: T, r_max: T, n: usize, dim: u32, grading: Option<T>) -> Result<Self> {
        if !(r_min > T::zero()) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("grid needs at least two nodes".into()));
        }
        let last = T::from_usize_lossy(n - 1);
        let mut nodes: Vec<T> = (0..n)
            .map(|i| {
                let s = T::from_usize_lossy(i) / last;
                match grading {
                    None => r_min * (s * (r_max / r_min).ln()).exp(),
                    Some(g) => r_min + (r_max - r_min) * s.powf(g),
                }
            })
            .collect();
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        Self::from_nodes(nodes, dim)
    }

    /// Nodes uniform in `ξ = ln r + r/knee`: logarithmic well inside `knee`,
    /// evenly spaced well outside it.
    pub fn log_linear(r_min: T, r_max: T, n: usize, dim: u32, knee: T) -> Result<Self> {
        if !(r_min > T::zero()) || !(r_max > r_min) || !r_max.is_finite() || !(knee > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "grid needs 0 < r_min < r_max and knee > 0, got [{r_min}, {r_max}], knee {knee}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("grid needs at least two nodes".into()));
        }
        let xi = |r: T| r.ln() + r / knee;
        let (a, b) = (xi(r_min), xi(r_max));
        let last = T::from_usize_lossy(n - 1);
        let mut r = r_min;
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let target = a + (b - a) * T::from_usize_lossy(i) / last;
            // Newton in ln r; ξ is convex there, so this converges from below
            for _ in 0..60 {
                let f = xi(r) - target;
                let step = f / (T::one() + r / knee);
                r = r * (-step).exp();
                if step.abs() < T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            nodes.push(r);
        }
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        Self::from_nodes(nodes, dim)
    }

    pub fn from_nodes(nodes: Vec<T>, dim: u32) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least two nodes".into()));
        }
        if !(nodes[0] > T::zero()) {
            return Err(Error::InvalidArgument("grid nodes must be positive".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("grid nodes must increase strictly".into()));
        }
        Ok(Self { nodes, dim })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> T {
        self.nodes[0]
    }

    pub fn r_max(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Same nodes viewed in another dimension.
    pub fn with_dim(&self, dim: u32) -> Self {
        Self { nodes: self.nodes.clone(), dim }
    }

    /// Inserts a midpoint in every interval (`2n - 1` nodes).
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            // geometric midpoint keeps log-uniform grids log-uniform
            nodes.push((w[0] * w[1]).sqrt());
        }
        nodes.push(self.r_max());
        Self { nodes, dim: self.dim }
    }
}

/// Radial function sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile<T> {
    pub grid: RadialGrid<T>,
    pub values: Vec<T>,
    pub label: String,
}

impl<T: Real> RadialProfile<T> {
    pub fn new(grid: RadialGrid<T>, values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values, label: label.into() })
    }

    pub fn from_fn(grid: RadialGrid<T>, label: impl Into<String>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, label)
    }

    pub fn dim(&self) -> u32 {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.grid.nodes().iter().copied().zip(self.values.iter().copied())
    }

    /// Linear interpolation in `ln r`; `None` outside the grid.
    pub fn interpolate(&self, r: T) -> Option<T> {
        let nodes = self.grid.nodes();
        if r < nodes[0] || r > nodes[nodes.len() - 1] {
            return None;
        }
        let i = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
        let (r0, r1) = (nodes[i - 1], nodes[i]);
        let s = (r / r0).ln() / (r1 / r0).ln();
        Some(self.values[i - 1] + s * (self.values[i] - self.values[i - 1]))
    }
}

#[cfg(test)]
mod log_linear_tests {
    use super::*;

    #[test]
    fn spacing_regimes() {
        let g = RadialGrid::log_linear(1e-6_f64, 12.0, 4001, 3, 1.0).unwrap();
        let r = g.nodes();
        let h_small = (r[1] / r[0]).ln();
        let h_big = r[r.len() - 1] - r[r.len() - 2];
        let dxi = ((12.0_f64).ln() + 12.0 - (1e-6_f64).ln() - 1e-6) / 4000.0;
        assert!((h_small / dxi - 1.0).abs() < 1e-3);
        assert!((h_big / dxi - 1.0).abs() < 0.1);
        assert_eq!(r.len(), 4001);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_uniform_endpoints_and_ratio() {
        let g = RadialGrid::log_uniform(1e-4_f64, 10.0, 51, 3).unwrap();
        assert_eq!(g.r_min(), 1e-4);
        assert_eq!(g.r_max(), 10.0);
        let q = g.nodes()[1] / g.nodes()[0];
        for w in g.nodes().windows(2) {
            assert!((w[1] / w[0] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_construction() {
        let a = RadialGrid::graded(0.01_f64, 5.0, 200, 4, Some(2.0)).unwrap();
        let b = RadialGrid::graded(0.01_f64, 5.0, 200, 4, Some(2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::log_uniform(0.0_f64, 1.0, 10, 3).is_err());
        assert!(RadialGrid::log_uniform(2.0_f64, 1.0, 10, 3).is_err());
        assert!(RadialGrid::from_nodes(vec![1.0_f64, 1.0, 2.0], 3).is_err());
    }

    #[test]
    fn refined_grid_keeps_nodes() {
        let g = RadialGrid::log_uniform(0.1_f64, 10.0, 5, 3).unwrap();
        let f = g.refined();
        assert_eq!(f.len(), 9);
        for (i, &r) in g.nodes().iter().enumerate() {
            assert_eq!(f.nodes()[2 * i], r);
        }
    }

    #[test]
    fn profile_rejects_nan() {
        let g = RadialGrid::log_uniform(0.1_f64, 1.0, 3, 3).unwrap();
        assert!(RadialProfile::new(g, vec![1.0, f64::NAN, 0.0], "u").is_err());
    }
}
