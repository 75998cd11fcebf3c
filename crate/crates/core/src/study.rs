//! Grid-refinement studies against closed-form oracles.

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::frac::{compose_discrepancy, frac_integral_left, FracParams, PsiWeight};
use crate::grid::GridFunction;

/// Errors below this are treated as exact and excluded from order fits.
pub const ORDER_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub error: f64,
    /// `log2(previous error / error)`; NaN for the first row or when either
    /// error is below [`ORDER_FLOOR`].
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub label: String,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `-log error` against `log2 N` over the rows
    /// above [`ORDER_FLOOR`]; `None` when fewer than two qualify.
    pub fitted_order: Option<f64>,
}

impl ConvergenceStudy {
    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    pub fn error_at(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.error)
    }
}

/// `N = 2^k + 1` for `n_min <= N <= n_max`, doubling the interval count.
pub fn doubling_sizes(n_min: usize, n_max: usize) -> Result<Vec<usize>> {
    if n_min < 3 || n_max < n_min {
        return domain(format!("invalid refinement range {n_min}..={n_max}"));
    }
    let mut sizes = Vec::new();
    let mut n = n_min;
    while n <= n_max {
        sizes.push(n);
        n = 2 * (n - 1) + 1;
    }
    Ok(sizes)
}

fn study(label: String, sizes: &[usize], mut error: impl FnMut(usize) -> Result<f64>) -> Result<ConvergenceStudy> {
    let mut rows: Vec<StudyRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let e = error(n)?;
        let order = match rows.last() {
            Some(prev) if prev.error > ORDER_FLOOR && e > ORDER_FLOOR => {
                (prev.error / e).log2() / ((n - 1) as f64 / (prev.n - 1) as f64).log2()
            }
            _ => f64::NAN,
        };
        rows.push(StudyRow { n, error: e, order });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > ORDER_FLOOR)
        .map(|r| (((r.n - 1) as f64).log2(), -r.error.log2()))
        .collect();
    let fitted_order = (pts.len() >= 2).then(|| {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        num / den
    });
    Ok(ConvergenceStudy { label, rows, fitted_order })
}

/// Power rule `I^{α;ψ} (ψ - ψ(0))^k = Γ(k+1)/Γ(k+1+α) (ψ - ψ(0))^{k+α}`:
/// max nodal error of the left integral for each `N` in `sizes`.
/// `k = None` studies `v ≡ 0`, whose image is exactly zero.
pub fn power_rule_study(
    psi: &PsiWeight,
    alpha: f64,
    k: Option<u32>,
    t_end: f64,
    sizes: &[usize],
) -> Result<ConvergenceStudy> {
    let p0 = psi.psi(0.0);
    let label = match k {
        Some(k) => format!("power_rule alpha={alpha} k={k}"),
        None => format!("power_rule alpha={alpha} zero"),
    };
    study(label, sizes, |n| {
        let Some(k) = k else {
            let v = GridFunction::zeros(n, t_end);
            return Ok(frac_integral_left(psi, alpha, &v)?.max_abs());
        };
        let kf = f64::from(k);
        let v = GridFunction::from_fn(n, t_end, |t| (psi.psi(t) - p0).powi(k as i32));
        let c = gamma(kf + 1.0) / gamma(kf + 1.0 + alpha);
        let exact = GridFunction::from_fn(n, t_end, |t| c * (psi.psi(t) - p0).powf(kf + alpha));
        Ok(frac_integral_left(psi, alpha, &v)?.max_abs_diff(&exact))
    })
}

/// Composition discrepancy `max |I^α(ᴴD v) - v|` for a function `f` with
/// `f(0) = 0`, sampled at each `N` in `sizes`.
pub fn ftc_study(
    psi: &PsiWeight,
    params: FracParams,
    f: impl Fn(f64) -> f64,
    label: impl Into<String>,
    t_end: f64,
    sizes: &[usize],
) -> Result<ConvergenceStudy> {
    study(label.into(), sizes, |n| {
        let mut v = GridFunction::from_fn(n, t_end, &f).into_values();
        v[0] = 0.0;
        compose_discrepancy(psi, params, &GridFunction::new(v, t_end)?)
    })
}
