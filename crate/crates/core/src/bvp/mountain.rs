//! Mountain-pass geometry, a path-deformation solver and Palais–Smale
//! diagnostics along its iterates.

use nalgebra::DVector;

use super::{energy, BVProblem};
use crate::anchors;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::report::CheckReport;
use crate::sampling::{random_sine_combo, seeded};
use crate::space::{k_norm, seminorm};

/// Rim radius `L`, rim level `θ` and endpoint `e` of the mountain-pass geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub l: f64,
    pub theta: f64,
    pub e: GridFunction,
    /// Growth exponent used on the rim (`φ⁺` when `L < 1`, else `φ⁻`).
    pub exponent: f64,
    /// Sup-norm embedding constant.
    pub r: f64,
    /// `1 / R`.
    pub c1: f64,
    /// Smallest energy observed on the sampled rim directions.
    pub min_rim_energy: f64,
}

/// Number of random directions probed on the rim `[u] = L`.
pub const RIM_SAMPLES: usize = 50;

/// Builds the geometry: `R` from the embedding constants, `C₁ = 1/R`,
/// `L = min(L*, 0.9 C₁)` where `L*` maximizes `L^φ - c L^μ`,
/// `c = T C̃ R^μ`, and `θ = L^φ - c L^μ`. The bound `J >= θ` is then checked
/// on [`RIM_SAMPLES`] seeded random zero-trace directions scaled to `[u] = L`.
/// The endpoint is `e = s sin(πt/T)` with `s` doubled until `J(e) < 0` and
/// `[e] > L`.
///
/// Callers are expected to have run [`super::ar_condition_check`] first.
/// Fails with a geometry error when no admissible `L` or `e` exists.
pub fn geometry_check(prob: &BVProblem, seed: u64) -> Result<Geometry> {
    let ctx = prob.ctx();
    let r = ctx.embedding_constants().r_sup;
    let c1 = 1.0 / r;
    let mu = prob.mu();
    let c = ctx.t_end() * prob.c_tilde() * r.powf(mu);
    let pick = |phi: f64| {
        let l_star = if c > 0.0 { (phi / (mu * c)).powf(1.0 / (mu - phi)) } else { f64::INFINITY };
        l_star.min(0.9 * c1)
    };
    let mut exponent = ctx.mf().phi_upper();
    let mut l = pick(exponent);
    if l >= 1.0 {
        exponent = ctx.mf().phi_lower();
        l = pick(exponent);
    }
    let theta = l.powf(exponent) - c * l.powf(mu);
    if !(l > 0.0 && theta > 0.0) {
        return Err(Error::Geometry(format!("no admissible rim: L = {l:.6e}, θ = {theta:.6e}")));
    }

    let mut rng = seeded(seed);
    let mut min_rim_energy = f64::INFINITY;
    for _ in 0..RIM_SAMPLES {
        let v = random_sine_combo(&mut rng, ctx.n(), ctx.t_end(), 6);
        let s = seminorm(ctx, &v)?;
        if s == 0.0 {
            continue;
        }
        let j = energy(prob, &v.scale(l / s))?;
        min_rim_energy = min_rim_energy.min(j);
        if j < theta - 1e-10 * (1.0 + theta) {
            return Err(Error::Geometry(format!("energy {j:.6e} below rim level θ = {theta:.6e} at [u] = L")));
        }
    }

    let t_end = ctx.t_end();
    let bump = ctx.grid_fn(|t| (std::f64::consts::PI * t / t_end).sin());
    let mut vals = bump.into_values();
    let n = vals.len();
    vals[0] = 0.0;
    vals[n - 1] = 0.0;
    let bump = ctx.zeros().with_values(vals);
    let mut s = 1.0;
    for _ in 0..60 {
        let e = bump.scale(s);
        if energy(prob, &e)? < 0.0 && seminorm(ctx, &e)? > l {
            return Ok(Geometry { l, theta, e, exponent, r, c1, min_rim_energy });
        }
        s *= 2.0;
    }
    Err(Error::Geometry("no endpoint with negative energy found along s sin(πt/T)".into()))
}

/// Tuning of [`mountain_pass_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Number of vertices of the initial path from `0` to `e`, endpoints included.
    pub path_points: usize,
    /// Maximum number of deformation steps.
    pub budget: usize,
    /// Convergence threshold on the residual dual norm.
    pub tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking factor.
    pub backtrack: f64,
    /// Residual norm below which the path maximizer is polished by Newton steps.
    pub newton_switch: f64,
    /// Stride of the iterate snapshots kept for [`ps_diagnostic`].
    pub snapshot_every: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            path_points: 21,
            budget: 10_000,
            tol: 1e-6,
            armijo: 1e-4,
            backtrack: 0.5,
            newton_switch: 1e-3,
            snapshot_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Preconditioned steepest descent with Armijo backtracking.
    Descent,
    /// Newton step on the path maximizer.
    Newton,
    /// No step (final evaluation).
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub path_max_energy: f64,
    pub residual_norm: f64,
    /// Energy of the maximizer after the step (equal to `path_max_energy` for `StepKind::None`).
    pub energy_after: f64,
    pub step: StepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MountainPassResult {
    pub u_star: GridFunction,
    pub energy: f64,
    pub residual_norm: f64,
    pub path_max_energy: f64,
    pub theta: f64,
    pub l: f64,
    pub e: GridFunction,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
    /// Path maximizers every `snapshot_every` iterations, plus the final one.
    pub snapshots: Vec<GridFunction>,
    pub note: String,
}

/// `sqrt(Σ w (D v)²)`, the norm induced by the preconditioner.
fn a_norm(prob: &BVProblem, v: &GridFunction) -> Result<f64> {
    let a = prob.assembled()?;
    let dv = &a.d * DVector::from_column_slice(v.values());
    Ok(dv.iter().zip(prob.weights()).map(|(d, w)| w * d * d).sum::<f64>().sqrt())
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("{what} is not finite")))
    }
}

fn add_scaled(u: &GridFunction, d: &[f64], tau: f64) -> GridFunction {
    u.with_values(u.values().iter().zip(d).map(|(a, b)| a + tau * b).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RayPeak {
    At(f64),
    /// `s ↦ J(s v)` is still increasing at `s = 2^60`.
    Unbounded,
    /// `s ↦ J(s v)` is nonincreasing down to `s = 2^-60`.
    AtZero,
}

/// Maximizer of `s ↦ J(s v)` over `s > 0`, located as the sign change of
/// `⟨J'(s v), v⟩` by safeguarded regula falsi.
fn ray_peak(prob: &BVProblem, v: &GridFunction) -> Result<RayPeak> {
    let slope = |s: f64| -> Result<f64> {
        let g = prob.gradient(&v.scale(s))?;
        finite(g.iter().zip(v.values()).map(|(a, b)| a * b).sum(), "radial slope")
    };
    let (mut lo, mut hi);
    let (mut f_lo, mut f_hi);
    let f1 = slope(1.0)?;
    if f1 > 0.0 {
        (lo, f_lo) = (1.0, f1);
        hi = 2.0;
        loop {
            f_hi = slope(hi)?;
            if f_hi <= 0.0 {
                break;
            }
            if hi > 1e18 {
                return Ok(RayPeak::Unbounded);
            }
            (lo, f_lo) = (hi, f_hi);
            hi *= 2.0;
        }
    } else {
        (hi, f_hi) = (1.0, f1);
        lo = 0.5;
        loop {
            f_lo = slope(lo)?;
            if f_lo > 0.0 {
                break;
            }
            if lo < 1e-18 {
                return Ok(RayPeak::AtZero);
            }
            (hi, f_hi) = (lo, f_lo);
            lo *= 0.5;
        }
    }
    for _ in 0..200 {
        let w = hi - lo;
        if w <= 4.0 * f64::EPSILON * hi || f_hi == 0.0 {
            break;
        }
        let mut s = lo + w * f_lo / (f_lo - f_hi);
        if !(s > lo + 0.05 * w && s < hi - 0.05 * w) {
            s = lo + 0.5 * w;
        }
        let f = slope(s)?;
        if f > 0.0 {
            (lo, f_lo) = (s, f);
        } else {
            (hi, f_hi) = (s, f);
        }
    }
    Ok(RayPeak::At(if f_lo.abs() < f_hi.abs() { lo } else { hi }))
}

/// Armijo backtracking along `-A⁻¹ g`, each trial point moved to the peak of
/// its ray; the first trial step has preconditioner length at most half of
/// `‖u‖_A`. `None` when no step is accepted.
fn descent_step(
    prob: &BVProblem,
    u: &GridFunction,
    ju: f64,
    g: &DVector<f64>,
    rn: f64,
    p: &SolverParams,
) -> Result<Option<(GridFunction, f64)>> {
    let d = prob.preconditioned(g)?;
    // ‖A⁻¹ g‖_A = rn.
    let slope = -rn * rn;
    let mut tau = (0.5 * a_norm(prob, u)? / rn).min(1.0);
    for _ in 0..60 {
        let w = add_scaled(u, &d, tau);
        if let RayPeak::At(s) = ray_peak(prob, &w)? {
            let cand = w.scale(s);
            let jc = finite(energy(prob, &cand)?, "energy in line search")?;
            if jc <= ju + p.armijo * tau * slope && jc < ju {
                return Ok(Some((cand, jc)));
            }
        }
        tau *= p.backtrack;
    }
    Ok(None)
}

/// Newton step on the interior unknowns, backtracked on the residual norm.
fn newton_step(prob: &BVProblem, u: &GridFunction, g: &DVector<f64>, rn: f64, p: &SolverParams) -> Result<Option<GridFunction>> {
    let n = g.len();
    let hess = prob.hessian(u)?;
    let rhs = -g.rows(1, n - 2).into_owned();
    let Some(delta) = hess.lu().solve(&rhs) else {
        return Ok(None);
    };
    let mut d = vec![0.0; n];
    d[1..n - 1].copy_from_slice(delta.as_slice());
    let mut tau = 1.0;
    for _ in 0..30 {
        let cand = add_scaled(u, &d, tau);
        let rc = prob.dual_norm(&prob.gradient(&cand)?)?;
        if rc.is_finite() && rc < (1.0 - p.armijo * tau) * rn {
            return Ok(Some(cand));
        }
        tau *= p.backtrack;
    }
    Ok(None)
}

/// Path deformation from `0` to `e`.
///
/// The initial path has `path_points` equally spaced vertices on the segment
/// `[0, e]`. Its maximizer is taken to the peak of `J` along its ray, and the
/// path is kept as the ray segment through the current maximizer: each
/// iteration moves the maximizer along `-A⁻¹ J'(u)` with Armijo backtracking
/// and returns every trial point to the peak of its own ray, so the maximizer
/// stays on the ridge and the path maximum is the maximizer's energy. Once
/// the residual norm drops below `newton_switch` the maximizer is polished
/// by Newton steps. Converged means residual norm `<= tol`, energy at least
/// `θ - 1e-6` and `‖u*‖_K >= L/2`; otherwise the result carries a note.
pub fn mountain_pass_solve(prob: &BVProblem, geom: &Geometry, p: &SolverParams) -> Result<MountainPassResult> {
    let m = p.path_points.max(3);
    let mut best = (1, f64::NEG_INFINITY);
    for k in 1..m - 1 {
        let j = finite(energy(prob, &geom.e.scale(k as f64 / (m - 1) as f64))?, "energy")?;
        if j > best.1 {
            best = (k, j);
        }
    }
    let start = geom.e.scale(best.0 as f64 / (m - 1) as f64);
    let mut u = match ray_peak(prob, &start)? {
        RayPeak::At(s) => start.scale(s),
        RayPeak::AtZero => prob.ctx().zeros(),
        RayPeak::Unbounded => {
            let rn = prob.dual_norm(&prob.gradient(&geom.e)?)?;
            let je = energy(prob, &geom.e)?;
            return Ok(MountainPassResult {
                u_star: geom.e.clone(),
                energy: je,
                residual_norm: rn,
                path_max_energy: je,
                theta: geom.theta,
                l: geom.l,
                e: geom.e.clone(),
                iterations: 0,
                converged: false,
                history: vec![IterationRecord { iteration: 0, path_max_energy: je, residual_norm: rn, energy_after: je, step: StepKind::None }],
                snapshots: vec![geom.e.clone()],
                note: "energy increases along the whole ray through the path maximizer: no mountain pass, only the trivial critical point".into(),
            });
        }
    };
    let mut ju = finite(energy(prob, &u)?, "energy")?;
    let mut history = Vec::new();
    let mut snapshots = Vec::new();
    let mut polish = false;
    let mut note = String::new();
    let mut steps = 0;
    let mut rn;
    loop {
        let g = prob.gradient(&u)?;
        rn = finite(prob.dual_norm(&g)?, "residual norm")?;
        if steps % p.snapshot_every.max(1) == 0 {
            snapshots.push(u.clone());
        }
        let mut rec = IterationRecord { iteration: steps, path_max_energy: ju, residual_norm: rn, energy_after: ju, step: StepKind::None };
        if rn <= p.tol || steps >= p.budget {
            history.push(rec);
            if rn > p.tol {
                note = format!("iteration budget {} exhausted", p.budget);
            }
            break;
        }
        if u.is_zero() {
            history.push(rec);
            break;
        }
        polish = polish || rn <= p.newton_switch;
        let mut next = None;
        if polish {
            match newton_step(prob, &u, &g, rn, p)? {
                Some(v) => {
                    let jv = finite(energy(prob, &v)?, "energy")?;
                    next = Some((v, jv, StepKind::Newton));
                }
                None => polish = false,
            }
        }
        if next.is_none() {
            match descent_step(prob, &u, ju, &g, rn, p)? {
                Some((v, jv)) => next = Some((v, jv, StepKind::Descent)),
                None => {
                    history.push(rec);
                    note = format!("line search stalled at residual norm {rn:.3e}");
                    break;
                }
            }
        }
        let (v, jv, kind) = next.expect("step chosen above");
        rec.energy_after = jv;
        rec.step = kind;
        history.push(rec);
        u = v;
        ju = jv;
        steps += 1;
    }

    if snapshots.last() != Some(&u) {
        snapshots.push(u.clone());
    }
    let mut converged = rn <= p.tol;
    if converged {
        let size = k_norm(prob.ctx(), &u)?;
        if size < 0.5 * geom.l {
            converged = false;
            note = format!("converged to a trivial critical point: ‖u‖_K = {size:.3e} < L/2 = {:.3e}", 0.5 * geom.l);
        } else if ju < geom.theta - 1e-6 {
            converged = false;
            note = format!("critical level {ju:.6e} below rim level θ = {:.6e}", geom.theta);
        }
    }
    Ok(MountainPassResult {
        u_star: u,
        energy: ju,
        residual_norm: rn,
        path_max_energy: ju,
        theta: geom.theta,
        l: geom.l,
        e: geom.e.clone(),
        iterations: steps,
        converged,
        history,
        snapshots,
        note,
    })
}

/// Monitored quantities at one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsRow {
    pub energy: f64,
    pub residual_norm: f64,
    pub seminorm: f64,
    /// `(1 - k/μ) [u]^φ±`.
    pub lower: f64,
    /// `J(u) - ⟨J'(u), u⟩ / μ`.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsDiagnostic {
    pub report: CheckReport,
    pub rows: Vec<PsRow>,
}

/// Checks `(1 - k/μ)[u]^φ± <= J(u) - ⟨J'(u), u⟩/μ` at every iterate within
/// `1e-6 (1 + |rhs|)`, with `φ⁻` when `[u] >= 1` and `φ⁺` otherwise, and
/// reports `|J|` and the residual norm along the way.
pub fn ps_diagnostic(prob: &BVProblem, iterates: &[GridFunction]) -> Result<PsDiagnostic> {
    if iterates.is_empty() {
        return Err(Error::Precondition("Palais–Smale diagnostic needs a nonempty history".into()));
    }
    let mf = prob.ctx().mf();
    let factor = 1.0 - prob.k_delta2() / prob.mu();
    let mut rows = Vec::with_capacity(iterates.len());
    let mut links = Vec::with_capacity(iterates.len());
    for u in iterates {
        let j = energy(prob, u)?;
        let g = prob.gradient(u)?;
        let pairing: f64 = g.iter().zip(u.values()).map(|(a, b)| a * b).sum();
        let semi = seminorm(prob.ctx(), u)?;
        let exponent = if semi >= 1.0 { mf.phi_lower() } else { mf.phi_upper() };
        let row = PsRow {
            energy: j,
            residual_norm: prob.dual_norm(&g)?,
            seminorm: semi,
            lower: factor * semi.powf(exponent),
            upper: j - pairing / prob.mu(),
        };
        links.push((row.lower, row.upper, 1e-6 * (1.0 + row.upper.abs())));
        rows.push(row);
    }
    let max_energy = rows.iter().map(|r| r.energy.abs()).fold(0.0, f64::max);
    let last = rows.last().expect("nonempty").residual_norm;
    let report = CheckReport::new("palais_smale", anchors::PALAIS_SMALE)
        .chain(&links)
        .with_note(format!("{} iterates, max |J| = {max_energy:.6e}, final residual norm {last:.3e}", rows.len()));
    Ok(PsDiagnostic { report, rows })
}
