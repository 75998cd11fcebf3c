//! Musielak functions `Φ_x(t) = ∫_0^t φ_x(s) ds` with `φ_x(t) = a(x, |t|) t`,
//! their modulars, Luxemburg norms and conjugates.
//!
//! Two families have closed forms (constant power `|t|^p / p` and the affine
//! variable exponent `p(x) = p0 + p1 x / T`); everything else goes through a
//! user supplied coefficient `a(x, t)` and adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use crate::anchors;
use crate::error::{domain, Error, Result};
use crate::grid::{trapezoid_weights, GridFunction};
use crate::quad;
use crate::report::{rel, CheckReport};

/// Coefficient `a(x, t)` for `t >= 0`.
pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MusielakFamily {
    /// `a(x, t) = t^(p-2)`.
    ConstantPower { p: f64 },
    /// `a(x, t) = t^(p(x)-2)` with `p(x) = p0 + p1 x / T`.
    AffinePower { p0: f64, p1: f64 },
    Custom,
}

#[derive(Clone)]
pub struct MusielakFunction {
    family: MusielakFamily,
    kernel: KernelFn,
    phi_lower: f64,
    phi_upper: f64,
    t_end: f64,
}

impl fmt::Debug for MusielakFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MusielakFunction")
            .field("family", &self.family)
            .field("phi_lower", &self.phi_lower)
            .field("phi_upper", &self.phi_upper)
            .field("t_end", &self.t_end)
            .finish()
    }
}

const QUAD_REL: f64 = 1e-13;

fn check_exponents(lower: f64, upper: f64) -> Result<()> {
    if !(lower > 1.0 && upper >= lower && upper.is_finite()) {
        return Err(Error::InvariantViolation(format!(
            "growth exponents must satisfy 1 < lower <= upper < inf, got ({lower}, {upper})"
        )));
    }
    Ok(())
}

fn check_t_end(t_end: f64) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return domain(format!("domain length must be positive, got {t_end}"));
    }
    Ok(())
}

impl MusielakFunction {
    pub fn constant_power(p: f64, t_end: f64) -> Result<Self> {
        check_t_end(t_end)?;
        check_exponents(p, p)?;
        Ok(Self {
            family: MusielakFamily::ConstantPower { p },
            kernel: Arc::new(move |_, t: f64| t.powf(p - 2.0)),
            phi_lower: p,
            phi_upper: p,
            t_end,
        })
    }

    pub fn affine_power(p0: f64, p1: f64, t_end: f64) -> Result<Self> {
        check_t_end(t_end)?;
        let (lo, hi) = if p1 >= 0.0 { (p0, p0 + p1) } else { (p0 + p1, p0) };
        check_exponents(lo, hi)?;
        Ok(Self {
            family: MusielakFamily::AffinePower { p0, p1 },
            kernel: Arc::new(move |x, t: f64| t.powf(p0 + p1 * x / t_end - 2.0)),
            phi_lower: lo,
            phi_upper: hi,
            t_end,
        })
    }

    /// A general coefficient `a(x, t)`; `phi_lower`/`phi_upper` are the
    /// declared growth exponents and can be checked with [`exponents`].
    pub fn custom(
        kernel: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        phi_lower: f64,
        phi_upper: f64,
        t_end: f64,
    ) -> Result<Self> {
        check_t_end(t_end)?;
        check_exponents(phi_lower, phi_upper)?;
        Ok(Self {
            family: MusielakFamily::Custom,
            kernel: Arc::new(kernel),
            phi_lower,
            phi_upper,
            t_end,
        })
    }

    /// Replaces the declared growth exponents.
    pub fn with_declared_exponents(mut self, lower: f64, upper: f64) -> Result<Self> {
        check_exponents(lower, upper)?;
        self.phi_lower = lower;
        self.phi_upper = upper;
        Ok(self)
    }

    pub fn family(&self) -> MusielakFamily {
        self.family
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn phi_lower(&self) -> f64 {
        self.phi_lower
    }

    pub fn phi_upper(&self) -> f64 {
        self.phi_upper
    }

    /// Pointwise exponent `p(x)` for the power families.
    pub fn exponent_at(&self, x: f64) -> Option<f64> {
        match self.family {
            MusielakFamily::ConstantPower { p } => Some(p),
            MusielakFamily::AffinePower { p0, p1 } => Some(p0 + p1 * x / self.t_end),
            MusielakFamily::Custom => None,
        }
    }

    pub fn kernel_a(&self, x: f64, t: f64) -> f64 {
        (self.kernel)(x, t.abs())
    }

    /// `φ_x(t) = a(x, |t|) t`, with `φ_x(0) = 0`.
    pub fn phi(&self, x: f64, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match self.exponent_at(x) {
            Some(p) => t.signum() * t.abs().powf(p - 1.0),
            None => self.kernel_a(x, t) * t,
        }
    }

    /// `dφ_x/dt`.
    pub fn dphi(&self, x: f64, t: f64) -> f64 {
        match self.exponent_at(x) {
            Some(p) => (p - 1.0) * t.abs().powf(p - 2.0),
            None => {
                let d = 1e-6 * t.abs().max(1e-6);
                (self.phi(x, t + d) - self.phi(x, t - d)) / (2.0 * d)
            }
        }
    }

    /// `Φ_x(|t|)` without argument validation; quadrature failures give NaN.
    pub(crate) fn big_phi(&self, x: f64, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        match self.exponent_at(x) {
            Some(p) => t.powf(p) / p,
            None => quad::integrate(|s| self.phi(x, s), 0.0, t, 0.0, QUAD_REL).unwrap_or(f64::NAN),
        }
    }

    /// `Φ_x(|t|)`.
    pub fn phi_value(&self, x: f64, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return domain(format!("Φ evaluated at non-finite t = {t}"));
        }
        self.check_position(x)?;
        let v = self.big_phi(x, t);
        if v.is_nan() {
            return Err(Error::Numerical(format!("quadrature of φ failed at x={x}, t={t}")));
        }
        Ok(v)
    }

    /// `φ_x^{-1}(y)` for `y >= 0`.
    pub fn phi_inverse(&self, x: f64, y: f64) -> Result<f64> {
        if !(y.is_finite() && y >= 0.0) {
            return domain(format!("φ^-1 evaluated at {y}"));
        }
        match self.exponent_at(x) {
            Some(p) => Ok(y.powf(1.0 / (p - 1.0))),
            None => quad::invert_increasing(|s| self.phi(x, s), y),
        }
    }

    /// Conjugate `Φ̄_x(t) = ∫_0^t φ_x^{-1}(s) ds` for `t >= 0`.
    ///
    /// Closed form `t^q / q` with `q = p / (p - 1)` for the power families.
    /// Otherwise `φ_x^{-1}(t)` is bracketed and bisected, and the integral is
    /// taken through the Young equality `Φ̄(t) = t φ^{-1}(t) - Φ(φ^{-1}(t))`
    /// with `Φ` by quadrature.
    pub fn conjugate_value(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return domain(format!("conjugate evaluated at {t}"));
        }
        self.check_position(x)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.exponent_at(x) {
            Some(p) => {
                let q = p / (p - 1.0);
                Ok(t.powf(q) / q)
            }
            None => {
                let s = self.phi_inverse(x, t)?;
                Ok((t * s - self.big_phi(x, s)).max(0.0))
            }
        }
    }

    /// `t φ_x(t) / Φ_x(t)` for `t > 0`.
    pub fn growth_ratio(&self, x: f64, t: f64) -> Result<f64> {
        if let Some(p) = self.exponent_at(x) {
            return Ok(p);
        }
        let big = self.big_phi(x, t);
        if !(big > 0.0) {
            return Err(Error::InvariantViolation(format!("Φ_x(t) = {big} at x={x}, t={t} > 0")));
        }
        Ok(t * self.phi(x, t) / big)
    }

    fn check_position(&self, x: f64) -> Result<()> {
        let slack = 1e-12 * self.t_end;
        if !(x >= -slack && x <= self.t_end + slack) {
            return domain(format!("position {x} outside [0, {}]", self.t_end));
        }
        Ok(())
    }

    /// Samples condition (φ) and (Φ₁): `φ_x` odd and strictly increasing,
    /// `Φ_x` positive and nondecreasing for `t > 0`.
    pub fn validate(&self, lattice: &SampleLattice) -> Result<()> {
        for &x in &lattice.xs {
            let mut prev_phi = 0.0;
            let mut prev_big = 0.0;
            for &t in &lattice.ts {
                let f = self.phi(x, t);
                let big = self.big_phi(x, t);
                if !(f > prev_phi) || self.phi(x, -t) != -f {
                    return Err(Error::InvariantViolation(format!(
                        "φ_x not odd/strictly increasing at x={x}, t={t}"
                    )));
                }
                if !(big > 0.0 && big >= prev_big) {
                    return Err(Error::InvariantViolation(format!(
                        "Φ_x not positive/nondecreasing at x={x}, t={t}"
                    )));
                }
                prev_phi = f;
                prev_big = big;
            }
        }
        Ok(())
    }
}

/// Sample points `(x, t)` used by the pointwise checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLattice {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl SampleLattice {
    pub fn new(xs: Vec<f64>, ts: Vec<f64>) -> Self {
        Self { xs, ts }
    }

    /// 64 uniform positions on `[0, T]` times 97 log-spaced `t` in `[1e-6, 1e6]`.
    pub fn standard(t_end: f64) -> Self {
        Self { xs: linspace(0.0, t_end, 64), ts: logspace(-6.0, 6.0, 97) }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// `n` points `10^e` with `e` uniform in `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo, hi, n).into_iter().map(|e| 10f64.powf(e)).collect()
}

/// Free-function form of [`MusielakFunction::phi_value`].
pub fn phi_value(mf: &MusielakFunction, x: f64, t: f64) -> Result<f64> {
    mf.phi_value(x, t)
}

pub fn conjugate_value(mf: &MusielakFunction, x: f64, t: f64) -> Result<f64> {
    mf.conjugate_value(x, t)
}

/// Estimates `(φ⁻, φ⁺)` as the infimum and supremum of `t φ_x(t) / Φ_x(t)`
/// over the lattice (`t > 0` only) and checks them against the declared
/// exponents.
pub fn exponents(mf: &MusielakFunction, lattice: &SampleLattice) -> Result<(f64, f64)> {
    if lattice.xs.is_empty() || lattice.ts.is_empty() {
        return domain("empty sample lattice");
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in &lattice.xs {
        for &t in &lattice.ts {
            if !(t > 0.0) {
                return domain(format!("growth ratio needs t > 0, got {t}"));
            }
            let r = mf.growth_ratio(x, t)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let tol = 1e-9;
    if mf.phi_lower > lo + rel(tol, lo) || mf.phi_upper < hi - rel(tol, hi) {
        return Err(Error::InvariantViolation(format!(
            "declared exponents ({}, {}) do not bracket the sampled range ({lo}, {hi})",
            mf.phi_lower, mf.phi_upper
        )));
    }
    if lo <= 1.0 {
        return Err(Error::InvariantViolation(format!("sampled lower exponent {lo} <= 1")));
    }
    Ok((lo, hi))
}

/// `Σ_i w_i F(x_i, |u_i|)` with trapezoid weights.
fn weighted_sum(u: &GridFunction, f: impl Fn(f64, f64) -> f64) -> f64 {
    let w = trapezoid_weights(u.len(), u.step());
    u.nodes()
        .zip(u.values())
        .zip(&w)
        .map(|((x, &v), &wi)| if v == 0.0 { 0.0 } else { wi * f(x, v.abs()) })
        .sum()
}

/// `ρ(u) = ∫ Φ_x(|u(x)|) dx`, composite trapezoid.
pub fn modular(mf: &MusielakFunction, u: &GridFunction) -> f64 {
    weighted_sum(u, |x, t| mf.big_phi(x, t))
}

/// Modular of the conjugate function.
pub fn conjugate_modular(mf: &MusielakFunction, u: &GridFunction) -> Result<f64> {
    let w = trapezoid_weights(u.len(), u.step());
    let mut acc = 0.0;
    for ((x, &v), &wi) in u.nodes().zip(u.values()).zip(&w) {
        acc += wi * mf.conjugate_value(x, v.abs())?;
    }
    Ok(acc)
}

/// `inf { λ > 0 : ρ(u / λ) <= 1 }` by bisection on the strictly decreasing
/// map `λ -> ρ(u / λ)`. The bracket starts at `λ = 1` and is doubled or
/// halved until it straddles the level set; iteration stops once
/// `|ρ(u/λ) - 1| <= 1e-10` or the bracket is narrower than `1e-12 λ`.
pub fn luxemburg_by(u: &GridFunction, scaled_modular: impl Fn(f64) -> f64) -> Result<f64> {
    if let Some(v) = u.values().iter().find(|v| !v.is_finite()) {
        return domain(format!("non-finite sample {v}"));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let eval = |lam: f64| -> Result<f64> {
        let r = scaled_modular(lam);
        if r.is_nan() {
            return Err(Error::Numerical(format!("modular is NaN at λ = {lam}")));
        }
        Ok(r)
    };
    let (mut lo, mut hi);
    let r1 = eval(1.0)?;
    if (r1 - 1.0).abs() <= 1e-10 {
        return Ok(1.0);
    }
    if r1 > 1.0 {
        lo = 1.0;
        hi = 2.0;
        while eval(hi)? > 1.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Numerical("Luxemburg bracket overflow".into()));
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while eval(lo)? <= 1.0 {
            hi = lo;
            lo *= 0.5;
            if lo == 0.0 {
                return Err(Error::Numerical("Luxemburg bracket underflow".into()));
            }
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let r = eval(mid)?;
        if (r - 1.0).abs() <= 1e-10 || hi - lo <= 1e-12 * mid {
            return Ok(mid);
        }
        if r > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Luxemburg norm `‖u‖_Φ`.
pub fn luxemburg_norm(mf: &MusielakFunction, u: &GridFunction) -> Result<f64> {
    luxemburg_by(u, |lam| weighted_sum(u, |x, t| mf.big_phi(x, t / lam)))
}

/// Luxemburg norm with respect to the conjugate `Φ̄_x`.
pub fn conjugate_norm(mf: &MusielakFunction, u: &GridFunction) -> Result<f64> {
    // Conjugate values are finite for finite arguments, so the only error
    // path is a failed inversion, surfaced as NaN.
    luxemburg_by(u, |lam| {
        weighted_sum(u, |x, t| mf.conjugate_value(x, t / lam).unwrap_or(f64::NAN))
    })
}

/// Least `K` with `Φ_x(2t) <= K Φ_x(t)` over the lattice (`2^p(x)` in closed
/// form for the power families).
pub fn delta2_constant(mf: &MusielakFunction, lattice: &SampleLattice) -> f64 {
    let mut k = 0.0_f64;
    for &x in &lattice.xs {
        if let Some(p) = mf.exponent_at(x) {
            k = k.max(2f64.powf(p));
            continue;
        }
        for &t in &lattice.ts {
            if t > 0.0 {
                k = k.max(mf.big_phi(x, 2.0 * t) / mf.big_phi(x, t));
            }
        }
    }
    k
}

/// `|∫ u v| <= 2 ‖u‖_Φ ‖v‖_Φ̄`.
pub fn holder_check(mf: &MusielakFunction, u: &GridFunction, v: &GridFunction) -> Result<CheckReport> {
    if !u.same_grid(v) {
        return domain("Hölder check needs u and v on the same grid");
    }
    let lhs = u.with_values(u.values().iter().zip(v.values()).map(|(a, b)| a * b).collect());
    let lhs = lhs.integrate().abs();
    let rhs = 2.0 * luxemburg_norm(mf, u)? * conjugate_norm(mf, v)?;
    Ok(CheckReport::new("holder", anchors::HOLDER).compare(lhs, rhs, 1e-8 * (1.0 + rhs)))
}

/// `Φ̄_x(φ_x(t)) <= φ⁺ Φ_x(t)` at every lattice point; reports the worst sample.
pub fn young_type_check(mf: &MusielakFunction, lattice: &SampleLattice) -> Result<CheckReport> {
    let mut links = Vec::with_capacity(lattice.xs.len() * lattice.ts.len());
    for &x in &lattice.xs {
        for &t in &lattice.ts {
            if t < 0.0 {
                return domain(format!("young-type check needs t >= 0, got {t}"));
            }
            let lhs = mf.conjugate_value(x, mf.phi(x, t))?;
            let rhs = mf.phi_upper * mf.big_phi(x, t);
            links.push((lhs, rhs, rel(1e-8, rhs)));
        }
    }
    Ok(CheckReport::new("young_type", anchors::YOUNG_TYPE)
        .chain(&links)
        .with_note(format!("{} samples", links.len())))
}

/// `Φ_x(s) <= s φ_x(s) <= Φ_x(2s)` at every lattice point, absolute slack 1e-10.
pub fn sandwich_check(mf: &MusielakFunction, lattice: &SampleLattice) -> Result<CheckReport> {
    let mut links = Vec::with_capacity(2 * lattice.xs.len() * lattice.ts.len());
    for &x in &lattice.xs {
        for &s in &lattice.ts {
            if s < 0.0 {
                return domain(format!("sandwich check needs s >= 0, got {s}"));
            }
            let mid = s * mf.phi(x, s);
            links.push((mf.big_phi(x, s), mid, 1e-10));
            links.push((mid, mf.big_phi(x, 2.0 * s), 1e-10));
        }
    }
    Ok(CheckReport::new("sandwich", anchors::SANDWICH)
        .chain(&links)
        .with_note(format!("{} samples", links.len() / 2)))
}

/// Relations between `ρ(u)` and powers of `‖u‖`: for `‖u‖ > 1`,
/// `‖u‖^φ⁻ <= ρ(u) <= ‖u‖^φ⁺`; for `‖u‖ < 1` the exponents swap. Skipped at
/// `‖u‖ = 1` (within 1e-9) and for the zero function.
pub fn modular_norm_relations_check(mf: &MusielakFunction, u: &GridFunction) -> Result<CheckReport> {
    let report = CheckReport::new("modular_norm_relations", anchors::MODULAR_NORM);
    if u.is_zero() {
        return Ok(report.skip("zero function"));
    }
    let norm = luxemburg_norm(mf, u)?;
    let rho = modular(mf, u);
    Ok(power_sandwich(report, norm, rho, mf.phi_lower, mf.phi_upper, 1e-8))
}

/// Shared logic of the norm/modular power sandwiches.
pub(crate) fn power_sandwich(
    report: CheckReport,
    norm: f64,
    rho: f64,
    lower: f64,
    upper: f64,
    tol: f64,
) -> CheckReport {
    if (norm - 1.0).abs() <= 1e-9 {
        return report
            .compare(norm, rho, 0.0)
            .skip("norm equals 1; no inequality applies");
    }
    let (a, b) = if norm > 1.0 {
        (norm.powf(lower), norm.powf(upper))
    } else {
        (norm.powf(upper), norm.powf(lower))
    };
    report
        .chain(&[(a, rho, rel(tol, rho)), (rho, b, rel(tol, b))])
        .with_note(format!("norm={norm:.12e} modular={rho:.12e}"))
}

/// Midpoint convexity of `t -> Φ_x(√t)` on consecutive lattice pairs.
pub fn sqrt_convexity_check(mf: &MusielakFunction, lattice: &SampleLattice) -> CheckReport {
    let mut links = Vec::new();
    for &x in &lattice.xs {
        for pair in lattice.ts.windows(2) {
            let (a, b) = (pair[0] * pair[0], pair[1] * pair[1]);
            let mid = mf.big_phi(x, (0.5 * (a + b)).sqrt());
            let avg = 0.5 * (mf.big_phi(x, a.sqrt()) + mf.big_phi(x, b.sqrt()));
            links.push((mid, avg, rel(1e-12, avg)));
        }
    }
    CheckReport::new("sqrt_convexity", anchors::SQRT_CONVEXITY).chain(&links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn p(p: f64) -> MusielakFunction {
        MusielakFunction::constant_power(p, 1.0).unwrap()
    }

    fn affine() -> MusielakFunction {
        MusielakFunction::affine_power(2.0, 1.0, 1.0).unwrap()
    }

    /// `a(x, t) = t^(p-2)` fed through the quadrature path.
    fn custom_power(q: f64) -> MusielakFunction {
        MusielakFunction::custom(move |_, t| t.powf(q - 2.0), q, q, 1.0).unwrap()
    }

    #[test]
    fn phi_value_examples() {
        assert_eq!(p(2.0).phi_value(0.3, 1.0).unwrap(), 0.5);
        assert_eq!(affine().phi_value(0.7, 0.0).unwrap(), 0.0);
        assert_relative_eq!(p(3.0).phi_value(0.0, 2.0).unwrap(), 8.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(p(3.0).phi_value(0.0, -2.0).unwrap(), 8.0 / 3.0, max_relative = 1e-15);
        assert!(matches!(p(2.0).phi_value(0.0, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(p(2.0).phi_value(0.0, f64::INFINITY), Err(Error::Domain(_))));
        assert!(p(2.0).phi_value(1.5, 1.0).is_err());
    }

    #[test]
    fn quadrature_path_matches_closed_form() {
        let c = custom_power(3.0);
        for &t in &[1e-3, 0.5, 2.0, 40.0] {
            assert_relative_eq!(c.phi_value(0.2, t).unwrap(), t.powi(3) / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn conjugate_examples() {
        assert_relative_eq!(p(2.0).conjugate_value(0.0, 1.0).unwrap(), 0.5);
        assert_relative_eq!(p(3.0).conjugate_value(0.0, 1.0).unwrap(), 2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(affine().conjugate_value(0.5, 0.0).unwrap(), 0.0);
        assert!(p(2.0).conjugate_value(0.0, -1.0).is_err());
        // Numeric route (bracketing inversion + quadrature) agrees with the closed form.
        let c = custom_power(3.0);
        for &t in &[0.0f64, 1e-2, 1.0, 4.0, 30.0] {
            let exact = t.powf(1.5) / 1.5;
            assert_relative_eq!(c.conjugate_value(0.0, t).unwrap(), exact, max_relative = 1e-10, epsilon = 1e-300);
        }
    }

    #[test]
    fn exponent_examples() {
        let lat = SampleLattice::standard(1.0);
        assert_eq!(exponents(&p(2.0), &lat).unwrap(), (2.0, 2.0));
        let (lo, hi) = exponents(&affine(), &lat).unwrap();
        assert_abs_diff_eq!(lo, 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(hi, 3.0, epsilon = 1e-3);
        let bad = p(1.5).with_declared_exponents(1.7, 2.0).unwrap();
        assert!(matches!(exponents(&bad, &lat), Err(Error::InvariantViolation(_))));
        // Quadrature route for a mixed-power kernel: ratio stays within [2, 4].
        let mixed = MusielakFunction::custom(|_, t| 1.0 + t * t, 2.0, 4.0, 1.0).unwrap();
        let (lo, hi) = exponents(&mixed, &SampleLattice::new(vec![0.0], logspace(-3.0, 3.0, 25))).unwrap();
        assert!(lo >= 2.0 - 1e-9 && hi <= 4.0 + 1e-9 && lo < hi);
        let zero = MusielakFunction::custom(|_, _| 0.0, 2.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            exponents(&zero, &SampleLattice::new(vec![0.0], vec![1.0])),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn modular_examples() {
        let u = GridFunction::from_fn(1001, 1.0, |x| x);
        assert_abs_diff_eq!(modular(&p(2.0), &u), 1.0 / 6.0, epsilon = 1e-6);
        assert_eq!(modular(&affine(), &GridFunction::zeros(11, 1.0)), 0.0);
        let one = GridFunction::from_fn(101, 1.0, |_| 1.0);
        assert_abs_diff_eq!(modular(&p(3.0), &one), 1.0 / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn luxemburg_examples() {
        let one = GridFunction::from_fn(101, 1.0, |_| 1.0);
        assert_abs_diff_eq!(luxemburg_norm(&p(2.0), &one).unwrap(), 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(luxemburg_norm(&p(2.0), &one.scale(2.0)).unwrap(), 2f64.sqrt(), epsilon = 1e-8);
        assert_eq!(luxemburg_norm(&affine(), &GridFunction::zeros(9, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn luxemburg_matches_constant_power_closed_form() {
        for &q in &[1.5, 2.0, 3.0, 4.5] {
            let u = GridFunction::from_fn(401, 2.0, |x| (3.0 * x).sin() + 0.3 * x);
            let int_pow = u.map(|v| v.abs().powf(q)).integrate();
            let closed = (int_pow / q).powf(1.0 / q);
            assert_relative_eq!(luxemburg_norm(&p(q), &u).unwrap(), closed, max_relative = 1e-9);
        }
    }

    #[test]
    fn delta2_examples() {
        let lat = SampleLattice::standard(1.0);
        assert_eq!(delta2_constant(&p(2.0), &lat), 4.0);
        assert_eq!(delta2_constant(&p(3.0), &lat), 8.0);
        assert_abs_diff_eq!(delta2_constant(&affine(), &lat), 8.0, epsilon = 1e-3);
        let c = custom_power(2.5);
        let lat = SampleLattice::new(vec![0.0, 1.0], logspace(-2.0, 2.0, 9));
        assert_relative_eq!(delta2_constant(&c, &lat), 2f64.powf(2.5), max_relative = 1e-10);
    }

    #[test]
    fn holder_examples() {
        let one = GridFunction::from_fn(101, 1.0, |_| 1.0);
        let r = holder_check(&p(2.0), &one, &one).unwrap();
        assert!(r.passed(), "{r}");
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-8);
        let r = holder_check(&p(2.0), &GridFunction::zeros(101, 1.0), &one).unwrap();
        assert!(r.passed() && r.lhs == 0.0);
        let u = GridFunction::from_fn(1001, 1.0, |x| x);
        let v = GridFunction::from_fn(1001, 1.0, |x| 1.0 - x);
        let r = holder_check(&p(3.0), &u, &v).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.lhs, 1.0 / 6.0, epsilon = 1e-6);
        assert!(holder_check(&p(2.0), &u, &one).is_err());
    }

    #[test]
    fn young_and_sandwich_examples() {
        let single = |t: f64| SampleLattice::new(vec![0.0], vec![t]);
        let r = young_type_check(&p(2.0), &single(1.0)).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.lhs, 0.5);
        assert_relative_eq!(r.rhs, 1.0);
        let r = young_type_check(&p(2.0), &single(0.0)).unwrap();
        assert!(r.passed() && r.lhs == 0.0 && r.rhs == 0.0);
        let r = young_type_check(&p(3.0), &single(2.0)).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.lhs, 16.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 8.0, max_relative = 1e-14);

        let r = sandwich_check(&p(2.0), &single(1.0)).unwrap();
        assert!(r.passed());
        let r = sandwich_check(&p(2.0), &single(0.0)).unwrap();
        assert!(r.passed() && r.margin == 0.0);
        let r = sandwich_check(&p(3.0), &single(2.0)).unwrap();
        assert!(r.passed());
        // Links for p = 3, s = 2: 8/3 <= 8 <= 64/3; the first is tighter.
        assert_relative_eq!(r.lhs, 8.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 8.0, max_relative = 1e-14);

        let lat = SampleLattice::standard(1.0);
        for mf in [p(2.0), p(3.0), affine()] {
            assert!(young_type_check(&mf, &lat).unwrap().passed());
            assert!(sandwich_check(&mf, &lat).unwrap().passed());
        }
    }

    #[test]
    fn modular_norm_examples() {
        let one = GridFunction::from_fn(101, 1.0, |_| 1.0);
        let r = modular_norm_relations_check(&p(2.0), &one.scale(2.0)).unwrap();
        assert!(r.passed(), "{r}");
        assert_relative_eq!(r.rhs, 2.0, max_relative = 1e-8);
        let r = modular_norm_relations_check(&p(2.0), &one).unwrap();
        assert!(r.passed(), "{r}");
        let r = modular_norm_relations_check(&p(2.0), &GridFunction::zeros(11, 1.0)).unwrap();
        assert!(r.skipped());
        let r = modular_norm_relations_check(&p(2.0), &one.scale(2f64.sqrt())).unwrap();
        assert!(r.skipped());
    }

    #[test]
    fn sqrt_convexity_detects_subquadratic_growth() {
        let lat = SampleLattice::new(vec![0.0], logspace(-3.0, 3.0, 31));
        assert!(sqrt_convexity_check(&p(2.0), &lat).passed());
        assert!(sqrt_convexity_check(&p(3.0), &lat).passed());
        assert!(sqrt_convexity_check(&p(1.5), &lat).failed());
    }

    #[test]
    fn validate_flags_decreasing_kernel() {
        let lat = SampleLattice::new(vec![0.0, 0.5], logspace(-2.0, 2.0, 9));
        assert!(affine().validate(&lat).is_ok());
        let bad = MusielakFunction::custom(|_, t| (-t).exp() / t.max(1e-300), 2.0, 2.0, 1.0).unwrap();
        assert!(bad.validate(&lat).is_err());
    }
}
