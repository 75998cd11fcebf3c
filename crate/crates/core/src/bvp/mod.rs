//! The boundary value problem `ᴴD_{T-}(a_x(|ᴴD u|) ᴴD u) = h(t, u)`,
//! `u(0) = u(T) = 0`, in variational form: energy
//! `J(u) = ∫ Φ_x(|ᴴD u|) - ∫ H(t, u)`, its weak-form residual, the
//! Ambrosetti–Rabinowitz checks and a numerical mountain-pass solver.
//!
//! All operators act on the full grid vector; the boundary samples are
//! pinned to zero and the unknowns are the interior samples.

mod mountain;

pub use mountain::{
    geometry_check, mountain_pass_solve, ps_diagnostic, Geometry, IterationRecord, MountainPassResult,
    PsDiagnostic, PsRow, SolverParams, StepKind,
};

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;

use crate::anchors;
use crate::error::{Error, Result};
use crate::grid::{trapezoid_weights, GridFunction};
use crate::musielak::{delta2_constant, linspace, logspace, SampleLattice};
use crate::quad;
use crate::report::CheckReport;
use crate::sampling::{random_sine_combo, seeded};
use crate::space::KSpaceContext;

pub type NonlinearityFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The right-hand side `h(t, u)`.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `h = |u|^(q-2) u`, `H = |u|^q / q`.
    Power { q: f64 },
    /// `h = u`.
    Linear,
    /// `h = 0`.
    Zero,
    /// Arbitrary continuous `h(t, u)`; `H` by adaptive quadrature in `u`.
    Custom(NonlinearityFn),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Power { q } => write!(f, "Power {{ q: {q} }}"),
            Nonlinearity::Linear => write!(f, "Linear"),
            Nonlinearity::Zero => write!(f, "Zero"),
            Nonlinearity::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Nonlinearity {
    pub fn power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::Domain(format!("power nonlinearity needs q > 1, got {q}")));
        }
        Ok(Nonlinearity::Power { q })
    }

    pub fn custom(h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Nonlinearity::Custom(Arc::new(h))
    }

    pub fn h(&self, t: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Power { q } => u.abs().powf(q - 2.0) * u,
            Nonlinearity::Linear => u,
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Custom(h) => h(t, u),
        }
    }

    /// `∂h/∂u`.
    pub fn dh(&self, t: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Power { q } => (q - 1.0) * u.abs().powf(q - 2.0),
            Nonlinearity::Linear => 1.0,
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Custom(h) => {
                let e = 1e-6 * u.abs().max(1.0);
                (h(t, u + e) - h(t, u - e)) / (2.0 * e)
            }
        }
    }

    /// `H(t, u) = ∫_0^u h(t, s) ds`.
    pub fn big_h(&self, t: f64, u: f64) -> Result<f64> {
        match self {
            Nonlinearity::Power { q } => Ok(u.abs().powf(*q) / q),
            Nonlinearity::Linear => Ok(0.5 * u * u),
            Nonlinearity::Zero => Ok(0.0),
            Nonlinearity::Custom(h) => {
                if u == 0.0 {
                    return Ok(0.0);
                }
                let (a, b, sign) = if u > 0.0 { (0.0, u, 1.0) } else { (u, 0.0, -1.0) };
                Ok(sign * quad::integrate(|s| h(t, s), a, b, 1e-12, 1e-10)?)
            }
        }
    }
}

/// Dense operators shared by every energy and residual evaluation.
#[derive(Debug)]
pub(crate) struct Assembled {
    /// Hilfer derivative matrix on the full grid.
    pub d: DMatrix<f64>,
    /// Cholesky factor of `A = D_intᵀ W D_int`, the Gram matrix of the
    /// seminorm for `p = 2` restricted to interior unknowns.
    pub gram: Cholesky<f64, Dyn>,
}

/// Assembled problem: space, nonlinearity and Ambrosetti–Rabinowitz exponent.
#[derive(Clone)]
pub struct BVProblem {
    ctx: KSpaceContext,
    nonlinearity: Nonlinearity,
    mu: f64,
    k_delta2: f64,
    ell: f64,
    c_tilde: f64,
    weights: Vec<f64>,
    assembled: Arc<OnceLock<std::result::Result<Arc<Assembled>, Error>>>,
}

impl fmt::Debug for BVProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BVProblem")
            .field("nonlinearity", &self.nonlinearity)
            .field("mu", &self.mu)
            .field("k_delta2", &self.k_delta2)
            .field("ell", &self.ell)
            .field("c_tilde", &self.c_tilde)
            .finish()
    }
}

impl BVProblem {
    /// Requires `μ > k` with `k` the Δ₂ constant of the Musielak function.
    pub fn new(ctx: KSpaceContext, nonlinearity: Nonlinearity, mu: f64) -> Result<Self> {
        let k = delta2_constant(ctx.mf(), &SampleLattice::standard(ctx.t_end()));
        if !(mu.is_finite() && mu > k) {
            return Err(Error::Precondition(format!(
                "Ambrosetti–Rabinowitz exponent μ = {mu} must exceed the Δ₂ constant k = {k}"
            )));
        }
        let (mut ell, mut c_tilde) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in ctx.zeros().nodes() {
            for u in [-1.0, 1.0] {
                let h = nonlinearity.big_h(t, u)?;
                ell = ell.min(h);
                c_tilde = c_tilde.max(h);
            }
        }
        let weights = trapezoid_weights(ctx.n(), ctx.zeros().step());
        Ok(Self { ctx, nonlinearity, mu, k_delta2: k, ell, c_tilde, weights, assembled: Arc::default() })
    }

    pub fn ctx(&self) -> &KSpaceContext {
        &self.ctx
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k_delta2(&self) -> f64 {
        self.k_delta2
    }

    /// `ℓ = inf { H(t, u) : |u| = 1 }` over the grid nodes.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// `sup { H(t, u) : |u| = 1 }` over the grid nodes.
    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn assembled(&self) -> Result<Arc<Assembled>> {
        self.assembled
            .get_or_init(|| {
                let d = self.ctx.operator().matrix();
                let n = d.nrows();
                let m = d.columns(1, n - 2).into_owned();
                let mut wm = m.clone();
                for (i, mut row) in wm.row_iter_mut().enumerate() {
                    row *= self.weights[i];
                }
                let a = m.transpose() * wm;
                let gram = Cholesky::new(a).ok_or_else(|| {
                    Error::Numerical("discrete seminorm Gram matrix is not positive definite".into())
                })?;
                Ok(Arc::new(Assembled { d, gram }))
            })
            .clone()
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        self.ctx.check_grid(u)?;
        let v = u.values();
        let n = v.len();
        if v[0] != 0.0 || v[n - 1] != 0.0 {
            return Err(Error::Precondition(format!(
                "zero boundary values required, got u(0) = {}, u(T) = {}",
                v[0],
                v[n - 1]
            )));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!("non-finite sample {x}")));
        }
        Ok(())
    }

    fn derivative(&self, u: &GridFunction) -> Result<DVector<f64>> {
        let a = self.assembled()?;
        Ok(&a.d * DVector::from_column_slice(u.values()))
    }

    /// Full-grid gradient `Dᵀ W φ(D u) - W h(u)` with boundary entries zeroed.
    fn gradient(&self, u: &GridFunction) -> Result<DVector<f64>> {
        let a = self.assembled()?;
        let du = &a.d * DVector::from_column_slice(u.values());
        let mf = self.ctx.mf();
        let y = DVector::from_iterator(
            du.len(),
            u.nodes().zip(du.iter()).zip(&self.weights).map(|((x, &d), w)| w * mf.phi(x, d)),
        );
        let mut g = a.d.tr_mul(&y);
        for ((gi, (t, &ui)), w) in g.iter_mut().zip(u.nodes().zip(u.values())).zip(&self.weights) {
            *gi -= w * self.nonlinearity.h(t, ui);
        }
        let n = g.len();
        g[0] = 0.0;
        g[n - 1] = 0.0;
        Ok(g)
    }

    /// `sqrt(gᵀ A⁻¹ g)` for an interior gradient vector.
    fn dual_norm(&self, g: &DVector<f64>) -> Result<f64> {
        let a = self.assembled()?;
        let n = g.len();
        let gi = g.rows(1, n - 2).into_owned();
        let x = a.gram.solve(&gi);
        Ok(gi.dot(&x).max(0.0).sqrt())
    }

    /// Preconditioned descent direction `-A⁻¹ g` on the full grid.
    fn preconditioned(&self, g: &DVector<f64>) -> Result<Vec<f64>> {
        let a = self.assembled()?;
        let n = g.len();
        let x = a.gram.solve(&g.rows(1, n - 2).into_owned());
        let mut out = vec![0.0; n];
        for i in 0..n - 2 {
            out[i + 1] = -x[i];
        }
        Ok(out)
    }

    /// Interior Hessian `D_intᵀ W diag(φ'(Du)) D_int - diag(W h_u(u))`.
    fn hessian(&self, u: &GridFunction) -> Result<DMatrix<f64>> {
        let a = self.assembled()?;
        let du = &a.d * DVector::from_column_slice(u.values());
        let n = du.len();
        let mf = self.ctx.mf();
        let m = a.d.columns(1, n - 2);
        let mut wm = m.clone_owned();
        for ((i, mut row), x) in wm.row_iter_mut().enumerate().zip(u.nodes()) {
            row *= self.weights[i] * mf.dphi(x, du[i]);
        }
        let mut hess = m.transpose() * wm;
        for (i, (t, &ui)) in u.nodes().zip(u.values()).enumerate().skip(1).take(n - 2) {
            hess[(i - 1, i - 1)] -= self.weights[i] * self.nonlinearity.dh(t, ui);
        }
        Ok(hess)
    }

    fn potential(&self, u: &GridFunction) -> Result<f64> {
        let mut acc = 0.0;
        for ((t, &ui), w) in u.nodes().zip(u.values()).zip(&self.weights) {
            acc += w * self.nonlinearity.big_h(t, ui)?;
        }
        Ok(acc)
    }
}

/// `J(u) = ∫ Φ_x(|ᴴD u|) dt - ∫ H(t, u) dt`, composite trapezoid.
pub fn energy(prob: &BVProblem, u: &GridFunction) -> Result<f64> {
    prob.check(u)?;
    let du = prob.derivative(u)?;
    let mf = prob.ctx.mf();
    let kinetic: f64 = u
        .nodes()
        .zip(du.iter())
        .zip(&prob.weights)
        .map(|((x, &d), w)| w * mf.big_phi(x, d.abs()))
        .sum();
    Ok(kinetic - prob.potential(u)?)
}

/// Riesz representative of `J'(u)` in the trapezoid-weighted inner product
/// on interior nodes: `⟨J'(u), φ⟩ = Σ_j w_j r_j φ_j` for zero-trace `φ`.
/// Boundary entries are zero.
pub fn residual(prob: &BVProblem, u: &GridFunction) -> Result<GridFunction> {
    prob.check(u)?;
    let g = prob.gradient(u)?;
    let r = g.iter().zip(&prob.weights).map(|(gi, w)| gi / w).collect();
    Ok(u.with_values(r))
}

/// `⟨J'(u), φ⟩` for zero-trace `φ`.
pub fn directional_derivative(prob: &BVProblem, u: &GridFunction, phi: &GridFunction) -> Result<f64> {
    prob.check(u)?;
    prob.check(phi)?;
    let g = prob.gradient(u)?;
    Ok(g.iter().zip(phi.values()).map(|(a, b)| a * b).sum())
}

/// Dual norm of the residual with respect to the discrete seminorm inner
/// product `A = D_intᵀ W D_int`: `sqrt(gᵀ A⁻¹ g)`.
pub fn residual_norm(prob: &BVProblem, u: &GridFunction) -> Result<f64> {
    prob.check(u)?;
    prob.dual_norm(&prob.gradient(u)?)
}

/// Sample set for the Ambrosetti–Rabinowitz check: `(t, u)` pairs with `u ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArLattice {
    pub ts: Vec<f64>,
    pub us: Vec<f64>,
}

impl ArLattice {
    /// 17 points in `[0, T]` times `±10^k`, `k ∈ [-3, 3]` (25 magnitudes),
    /// negative values first.
    pub fn standard(t_end: f64) -> Self {
        let mags = logspace(-3.0, 3.0, 25);
        let mut us: Vec<f64> = mags.iter().rev().map(|m| -m).collect();
        us.extend(mags);
        Self { ts: linspace(0.0, t_end, 17), us }
    }
}

/// Outcome of [`ar_condition_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArReport {
    pub report: CheckReport,
    /// Sample with the smallest margin `min(μH, hu - μH)`, first in lattice order.
    pub worst: (f64, f64),
    pub violations: usize,
}

/// `0 < μ H(t, u) <= h(t, u) u` on every lattice sample, the second
/// inequality with slack `1e-10 max(1, |h u|)`.
pub fn ar_condition_check(prob: &BVProblem, lattice: &ArLattice) -> Result<ArReport> {
    let mu = prob.mu;
    let mut worst = (f64::INFINITY, (f64::NAN, f64::NAN), (0.0, 0.0));
    let mut violations = 0;
    for &t in &lattice.ts {
        for &u in &lattice.us {
            if u == 0.0 {
                return Err(Error::Domain("Ambrosetti–Rabinowitz lattice must exclude u = 0".into()));
            }
            let muh = mu * prob.nonlinearity.big_h(t, u)?;
            let hu = prob.nonlinearity.h(t, u) * u;
            let slack = 1e-10 * hu.abs().max(1.0);
            if !(muh > 0.0) || muh > hu + slack {
                violations += 1;
            }
            let (score, link) = if muh <= hu - muh { (muh, (0.0, muh)) } else { (hu - muh, (muh, hu)) };
            if score < worst.0 {
                worst = (score, (t, u), link);
            }
        }
    }
    let (_, at, (lhs, rhs)) = worst;
    let mut report = CheckReport::new("ambrosetti_rabinowitz", anchors::AMBROSETTI_RABINOWITZ).compare(lhs, rhs, 0.0);
    report.outcome = if violations == 0 { crate::report::Outcome::Pass } else { crate::report::Outcome::Fail };
    let report = report.with_note(format!("worst at t={:.6e} u={:.6e}; {violations} violations", at.0, at.1));
    Ok(ArReport { report, worst: at, violations })
}

/// Pointwise growth bounds `H(t,u) <= H(t,u/|u|)|u|^μ` for `0 < |u| <= 1`
/// and `>=` for `|u| >= 1` on the lattice, plus the integral lower bound
/// `∫ H(t, s u) >= ℓ |s|^μ ∫ |u|^μ - T ℓ` on 20 seeded random `(s, u)`.
/// Tolerance `1e-8 (1 + |rhs|)`.
pub fn lemma_growth_checks(prob: &BVProblem, lattice: &ArLattice, seed: u64) -> Result<CheckReport> {
    let mu = prob.mu;
    let nl = &prob.nonlinearity;
    let tol = |r: f64| 1e-8 * (1.0 + r.abs());
    let mut links = Vec::new();
    for &t in &lattice.ts {
        for &u in &lattice.us {
            if u == 0.0 {
                continue;
            }
            let a = u.abs();
            let h = nl.big_h(t, u)?;
            let scaled = nl.big_h(t, u.signum())? * a.powf(mu);
            if a <= 1.0 {
                links.push((h, scaled, tol(scaled)));
            }
            if a >= 1.0 {
                links.push((scaled, h, tol(h)));
            }
        }
    }
    let pointwise = links.len();
    let ctx = prob.ctx();
    let mut rng = seeded(seed);
    for _ in 0..20 {
        let u = random_sine_combo(&mut rng, ctx.n(), ctx.t_end(), 4);
        let s: f64 = rng.random_range(0.1..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lhs = prob.potential(&u.scale(s))?;
        let pow_mu = u.map(|v| v.abs().powf(mu)).integrate();
        let rhs = prob.ell * s.abs().powf(mu) * pow_mu - ctx.t_end() * prob.ell;
        links.push((rhs, lhs, tol(lhs)));
    }
    Ok(CheckReport::new("growth_lemma", anchors::GROWTH_LEMMA)
        .chain(&links)
        .with_note(format!("{pointwise} pointwise samples, 20 integral samples")))
}

#[cfg(test)]
mod tests;
