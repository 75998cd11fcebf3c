//! Uniformly sampled real functions on `[0, T]`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Result};

/// A real function sampled on the uniform grid `x_i = i * T / (N - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    t_end: f64,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, t_end: f64) -> Result<Self> {
        if values.len() < 2 {
            return domain(format!("grid needs at least 2 samples, got {}", values.len()));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return domain(format!("domain length must be positive and finite, got {t_end}"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("sample {i} is not finite ({})", values[i]));
        }
        Ok(Self { values, t_end })
    }

    /// Samples `f` at the `n` grid nodes. Panics when `n < 2` or `t_end <= 0`.
    pub fn from_fn(n: usize, t_end: f64, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 2 && t_end > 0.0, "invalid grid ({n} nodes on [0, {t_end}])");
        let h = t_end / (n - 1) as f64;
        let values = (0..n).map(|i| f(node(i, n, h, t_end))).collect();
        Self { values, t_end }
    }

    pub fn zeros(n: usize, t_end: f64) -> Self {
        Self::from_fn(n, t_end, |_| 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step(&self) -> f64 {
        self.t_end / (self.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        node(i, self.len(), self.step(), self.t_end)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let (n, h, t) = (self.len(), self.step(), self.t_end);
        (0..n).map(move |i| node(i, n, h, t))
    }

    /// Same grid, new values. Panics on length mismatch.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.len(), "sample count mismatch");
        Self { values, t_end: self.t_end }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Maps `(x_i, v_i) -> f(x_i, v_i)`.
    pub fn map_nodes(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.nodes().zip(&self.values).map(|(x, &v)| f(x, v)).collect();
        self.with_values(values)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && self.t_end == other.t_end
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_i |self_i - other_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_grid(other), "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Composite trapezoidal rule.
    pub fn integrate(&self) -> f64 {
        trapezoid(&self.values, self.step())
    }

    /// Trapezoid-weighted inner product `∫ u v`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert!(self.same_grid(other), "grid mismatch");
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        trapezoid(&prod, self.step())
    }

    /// Every other sample; the grid must have an odd number of nodes.
    pub fn coarsen(&self) -> Option<Self> {
        if self.len() < 3 || self.len() % 2 == 0 {
            return None;
        }
        let values = self.values.iter().step_by(2).copied().collect();
        Some(Self { values, t_end: self.t_end })
    }
}

#[inline]
fn node(i: usize, n: usize, h: f64, t_end: f64) -> f64 {
    // Pin the last node so that x_{N-1} == T exactly.
    if i + 1 == n {
        t_end
    } else {
        i as f64 * h
    }
}

/// Trapezoid weights `h/2, h, ..., h, h/2`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        assert!(self.same_grid(rhs), "grid mismatch");
        self.with_values(self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        assert!(self.same_grid(rhs), "grid mismatch");
        self.with_values(self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: f64) -> GridFunction {
        self.scale(c)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.scale(-1.0)
    }
}
