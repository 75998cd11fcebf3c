//! The fractional Musielak space: seminorm `[u] = ‖ᴴD u‖_Φ`, the combined
//! norm `‖u‖ + [u]`, the associated modulars and numerical checks of the
//! embedding inequalities with their explicit constants.

use statrs::function::gamma::gamma;

use crate::anchors;
use crate::error::{domain, Error, Result};
use crate::frac::{frac_integral_left, FracParams, HilferOperator, PsiWeight};
use crate::grid::GridFunction;
use crate::musielak::{linspace, luxemburg_norm, modular, power_sandwich, MusielakFunction};
use crate::report::CheckReport;

/// Everything needed to evaluate the space norms on one grid.
#[derive(Debug, Clone)]
pub struct KSpaceContext {
    mf: MusielakFunction,
    psi: PsiWeight,
    params: FracParams,
    op: HilferOperator,
    holder_factor: f64,
}

impl KSpaceContext {
    pub fn new(mf: MusielakFunction, psi: PsiWeight, params: FracParams, n: usize, t_end: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return domain(format!("domain length must be positive, got {t_end}"));
        }
        if (mf.t_end() - t_end).abs() > 1e-12 * t_end {
            return domain(format!(
                "Musielak function lives on [0, {}] but the grid spans [0, {t_end}]",
                mf.t_end()
            ));
        }
        let op = HilferOperator::new(&psi, params, n, t_end)?;
        Ok(Self { mf, psi, params, op, holder_factor: 2.0 })
    }

    /// Replaces the pairing constant in the Hölder-type inequality used by
    /// the sup-norm bound (default 2).
    pub fn with_holder_factor(mut self, m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return domain(format!("Hölder factor must be positive, got {m}"));
        }
        self.holder_factor = m;
        Ok(self)
    }

    pub fn mf(&self) -> &MusielakFunction {
        &self.mf
    }

    pub fn psi(&self) -> &PsiWeight {
        &self.psi
    }

    pub fn params(&self) -> FracParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.op.len()
    }

    pub fn t_end(&self) -> f64 {
        self.op.t_end()
    }

    pub fn holder_factor(&self) -> f64 {
        self.holder_factor
    }

    pub fn operator(&self) -> &HilferOperator {
        &self.op
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction::zeros(self.n(), self.t_end())
    }

    pub fn grid_fn(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(self.n(), self.t_end(), f)
    }

    pub(crate) fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if u.len() != self.n() || u.t_end() != self.t_end() {
            return domain(format!(
                "grid mismatch: expected N={} on [0, {}], got N={} on [0, {}]",
                self.n(),
                self.t_end(),
                u.len(),
                u.t_end()
            ));
        }
        Ok(())
    }

    /// Left ψ-Hilfer derivative of `u`.
    pub fn derivative(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        Ok(u.with_values(self.op.apply(u.values())))
    }

    pub fn embedding_constants(&self) -> EmbeddingConstants {
        EmbeddingConstants::new(self)
    }
}

/// Explicit constants of the integral, Poincaré and sup-norm bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConstants {
    /// `(ψ(T) - ψ(0))^α / Γ(α+1)`.
    pub c_t: f64,
    /// `c_t^(1/φ⁻)`.
    pub c_minus: f64,
    /// `c_t^(1/φ⁺)`.
    pub c_plus: f64,
    /// `M sup_x Φ̄_x(1)^(1/φ⁺) (ψ(T) - ψ(0))^(α/φ⁺) / Γ(α+1)`.
    pub r_sup: f64,
}

impl EmbeddingConstants {
    fn new(ctx: &KSpaceContext) -> Self {
        let alpha = ctx.params.alpha();
        let span = ctx.psi.span(ctx.t_end());
        let (lo, hi) = (ctx.mf.phi_lower(), ctx.mf.phi_upper());
        let c_t = span.powf(alpha) / gamma(alpha + 1.0);
        let conj_one = linspace(0.0, ctx.t_end(), 64)
            .into_iter()
            .map(|x| ctx.mf.conjugate_value(x, 1.0).unwrap_or(f64::NAN))
            .fold(0.0_f64, f64::max);
        let r_sup = ctx.holder_factor * conj_one.powf(1.0 / hi) * span.powf(alpha / hi) / gamma(alpha + 1.0);
        Self { c_t, c_minus: c_t.powf(1.0 / lo), c_plus: c_t.powf(1.0 / hi), r_sup }
    }
}

/// `[u] = ‖ᴴD u‖_Φ`.
pub fn seminorm(ctx: &KSpaceContext, u: &GridFunction) -> Result<f64> {
    luxemburg_norm(&ctx.mf, &ctx.derivative(u)?)
}

/// `‖u‖_Φ + [u]`.
pub fn k_norm(ctx: &KSpaceContext, u: &GridFunction) -> Result<f64> {
    ctx.check_grid(u)?;
    Ok(luxemburg_norm(&ctx.mf, u)? + seminorm(ctx, u)?)
}

/// `(∫ Φ(|u|) + Φ(|ᴴD u|), ∫ Φ(|ᴴD u|))`: the full modular and its
/// zero-trace part.
pub fn k_modular(ctx: &KSpaceContext, u: &GridFunction) -> Result<(f64, f64)> {
    let d = ctx.derivative(u)?;
    let zero_trace = modular(&ctx.mf, &d);
    Ok((modular(&ctx.mf, u) + zero_trace, zero_trace))
}

/// `[u]^φ⁻ <= ⁰ρ(u) <= [u]^φ⁺` when `[u] > 1` and the reverse when
/// `[u] < 1`, at 1e-6 relative tolerance.
pub fn seminorm_modular_sandwich_check(ctx: &KSpaceContext, u: &GridFunction) -> Result<CheckReport> {
    let report = CheckReport::new("seminorm_modular", anchors::SEMINORM_MODULAR);
    let d = ctx.derivative(u)?;
    if d.is_zero() {
        return Ok(report.skip("zero derivative"));
    }
    let semi = luxemburg_norm(&ctx.mf, &d)?;
    let rho = modular(&ctx.mf, &d);
    Ok(power_sandwich(report, semi, rho, ctx.mf.phi_lower(), ctx.mf.phi_upper(), 1e-6))
}

/// Which side of 1 a norm value lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    Below,
}

fn side(norm: f64) -> Option<Side> {
    if norm > 1.0 {
        Some(Side::Above)
    } else if norm < 1.0 {
        Some(Side::Below)
    } else {
        None
    }
}

/// Power bound `c_∓ a^(φ±/φ∓)` used by the integral and Poincaré checks.
fn power_bound(c: &EmbeddingConstants, mf: &MusielakFunction, a: f64, s: Side) -> f64 {
    let (lo, hi) = (mf.phi_lower(), mf.phi_upper());
    match s {
        Side::Above => c.c_minus * a.powf(hi / lo),
        Side::Below => c.c_plus * a.powf(lo / hi),
    }
}

/// Bounded image of the fractional integral: `‖I^α v‖` against
/// `c_- ‖v‖^(φ⁺/φ⁻)` when both norms exceed 1 and `c_+ ‖v‖^(φ⁻/φ⁺)` when
/// both are below 1. Mixed cases are skipped.
pub fn integral_bound_check(ctx: &KSpaceContext, v: &GridFunction) -> Result<CheckReport> {
    ctx.check_grid(v)?;
    let report = CheckReport::new("integral_bound", anchors::INTEGRAL_BOUND);
    let image = frac_integral_left(&ctx.psi, ctx.params.alpha(), v)?;
    let a = luxemburg_norm(&ctx.mf, v)?;
    let b = luxemburg_norm(&ctx.mf, &image)?;
    let c = ctx.embedding_constants();
    bounded_by_power(report, &ctx.mf, &c, b, a)
}

fn bounded_by_power(
    report: CheckReport,
    mf: &MusielakFunction,
    c: &EmbeddingConstants,
    lhs: f64,
    arg: f64,
) -> Result<CheckReport> {
    if arg == 0.0 {
        return Ok(report.compare(lhs, 0.0, 1e-6));
    }
    match (side(arg), side(lhs)) {
        (Some(s), Some(t)) if s == t => {
            let rhs = power_bound(c, mf, arg, s);
            Ok(report
                .compare(lhs, rhs, 1e-6 * rhs.max(1.0))
                .with_note(format!("argument norm {arg:.6e}")))
        }
        _ => Ok(report
            .compare(lhs, f64::NAN, 0.0)
            .skip(format!("mixed case: norms {lhs:.6e} and {arg:.6e} on different sides of 1"))),
    }
}

fn check_zero_trace(u: &GridFunction) -> Result<()> {
    let v = u.values();
    let tol = 1e-12 * u.max_abs().max(1.0);
    if v[0].abs() > tol || v[v.len() - 1].abs() > tol {
        return Err(Error::Precondition(format!(
            "zero boundary values required, got u(0) = {}, u(T) = {}",
            v[0],
            v[v.len() - 1]
        )));
    }
    Ok(())
}

/// Poincaré-type bound of `‖u‖` by powers of `[u]` for zero-trace `u`.
/// Mixed cases (`‖u‖` and `[u]` on different sides of 1) are skipped.
pub fn poincare_check(ctx: &KSpaceContext, u: &GridFunction) -> Result<CheckReport> {
    ctx.check_grid(u)?;
    check_zero_trace(u)?;
    let report = CheckReport::new("poincare", anchors::POINCARE);
    let norm = luxemburg_norm(&ctx.mf, u)?;
    let semi = seminorm(ctx, u)?;
    bounded_by_power(report, &ctx.mf, &ctx.embedding_constants(), norm, semi)
}

/// `max |u| <= r_sup [u] + 1e-6` for zero-trace `u`.
pub fn sup_bound_check(ctx: &KSpaceContext, u: &GridFunction) -> Result<CheckReport> {
    ctx.check_grid(u)?;
    check_zero_trace(u)?;
    let semi = seminorm(ctx, u)?;
    let r = ctx.embedding_constants().r_sup;
    Ok(CheckReport::new("sup_bound", anchors::SUP_BOUND)
        .compare(u.max_abs(), r * semi, 1e-6)
        .with_note(format!("R={r:.6e} seminorm={semi:.6e}")))
}

/// Violations of `(ψ(s) - ψ(t))^(α-1) < 1/ψ'(t)` at one `t` node.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiConditionRow {
    pub t: f64,
    pub violations: usize,
    /// Largest `s - t` among violating pairs (0 when there are none).
    pub max_separation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiConditionReport {
    pub report: CheckReport,
    pub pairs: usize,
    pub violations: usize,
    pub max_separation: f64,
    pub rows: Vec<PsiConditionRow>,
}

/// Evaluates `ψ'(t) (ψ(s) - ψ(t))^(α-1) < 1` on all pairs of interior grid
/// nodes `t < s`. The result is informational: the kernel is unbounded near
/// the diagonal, so violations are expected there.
pub fn psi_condition_check(psi: &PsiWeight, alpha: f64, n: usize, t_end: f64) -> Result<PsiConditionReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("order α must lie in (0, 1), got {alpha}"));
    }
    let grid = GridFunction::zeros(n.max(2), t_end);
    let xs: Vec<f64> = grid.nodes().collect();
    let interior = if xs.len() > 2 { &xs[1..xs.len() - 1] } else { &xs[..0] };
    let mut rows = Vec::with_capacity(interior.len());
    let (mut pairs, mut violations, mut worst, mut max_sep) = (0, 0, 0.0_f64, 0.0_f64);
    for (i, &t) in interior.iter().enumerate() {
        let (dp, pt) = (psi.dpsi(t), psi.psi(t));
        let mut row = PsiConditionRow { t, violations: 0, max_separation: 0.0 };
        for &s in &interior[i + 1..] {
            pairs += 1;
            let value = dp * (psi.psi(s) - pt).powf(alpha - 1.0);
            worst = worst.max(value);
            if value >= 1.0 {
                row.violations += 1;
                row.max_separation = row.max_separation.max(s - t);
            }
        }
        violations += row.violations;
        max_sep = max_sep.max(row.max_separation);
        rows.push(row);
    }
    let report = CheckReport::new("psi_condition", anchors::PSI_CONDITION)
        .compare(worst, 1.0, 0.0)
        .info(format!("{violations} of {pairs} pairs violate; largest violating separation {max_sep:.6e}"));
    Ok(PsiConditionReport { report, pairs, violations, max_separation: max_sep, rows })
}

/// Ratio `‖u‖_K / [u]` over zero-trace samples, which must lie in
/// `[1, 1 + max(c_-, c_+) max(1, max_i [u_i]^(e_i - 1))]` where `e_i` is the
/// Poincaré exponent matching the side of 1 on which `[u_i]` lies.
pub fn norm_equivalence_probe(ctx: &KSpaceContext, samples: &[GridFunction]) -> Result<CheckReport> {
    let report = CheckReport::new("norm_equivalence", anchors::NORM_EQUIVALENCE);
    let (lo, hi) = (ctx.mf.phi_lower(), ctx.mf.phi_upper());
    let (mut min_ratio, mut max_ratio, mut factor) = (f64::INFINITY, 0.0_f64, 1.0_f64);
    let mut used = 0;
    for u in samples {
        ctx.check_grid(u)?;
        check_zero_trace(u)?;
        let semi = seminorm(ctx, u)?;
        if semi == 0.0 {
            continue;
        }
        let ratio = (luxemburg_norm(&ctx.mf, u)? + semi) / semi;
        let e = if semi >= 1.0 { hi / lo } else { lo / hi };
        factor = factor.max(semi.powf(e - 1.0));
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        used += 1;
    }
    if used == 0 {
        return Ok(report.skip("no nonzero samples"));
    }
    let c = ctx.embedding_constants();
    let bound = 1.0 + c.c_minus.max(c.c_plus) * factor;
    Ok(report
        .chain(&[(1.0, min_ratio, 1e-12), (max_ratio, bound, 1e-6 * bound)])
        .with_note(format!("{used} samples, ratio in [{min_ratio:.6e}, {max_ratio:.6e}]")))
}
