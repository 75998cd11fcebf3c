use super::*;
use crate::frac::{FracParams, PsiWeight};
use crate::musielak::{modular, MusielakFunction};
use crate::sampling::random_bump;
use approx::assert_relative_eq;
use std::f64::consts::PI;

fn ctx(p: f64, alpha: f64, beta: f64, n: usize) -> KSpaceContext {
    KSpaceContext::new(
        MusielakFunction::constant_power(p, 1.0).unwrap(),
        PsiWeight::linear(),
        FracParams::new(alpha, beta).unwrap(),
        n,
        1.0,
    )
    .unwrap()
}

fn model(n: usize) -> BVProblem {
    BVProblem::new(ctx(2.0, 0.9, 1.0, n), Nonlinearity::power(6.0).unwrap(), 6.0).unwrap()
}

fn bump(c: &KSpaceContext) -> GridFunction {
    let mut v = c.grid_fn(|t| t * (1.0 - t)).into_values();
    let n = v.len();
    v[n - 1] = 0.0;
    c.zeros().with_values(v)
}

#[test]
fn problem_gate_and_derived_constants() {
    let p = model(33);
    assert_eq!(p.k_delta2(), 4.0);
    assert_relative_eq!(p.ell(), 1.0 / 6.0);
    assert_relative_eq!(p.c_tilde(), 1.0 / 6.0);
    let gate = BVProblem::new(ctx(2.0, 0.9, 1.0, 33), Nonlinearity::power(4.0).unwrap(), 4.0);
    assert!(matches!(gate, Err(Error::Precondition(_))));
    assert!(Nonlinearity::power(1.0).is_err());
}

#[test]
fn custom_primitive_matches_closed_form() {
    let nl = Nonlinearity::custom(|_, u: f64| u.abs().powi(4) * u);
    for u in [-2.0, -0.3, 0.0, 0.7, 3.0] {
        let exact = Nonlinearity::Power { q: 6.0 }.big_h(0.0, u).unwrap();
        assert_relative_eq!(nl.big_h(0.5, u).unwrap(), exact, max_relative = 1e-10, epsilon = 1e-300);
        assert_relative_eq!(nl.dh(0.5, u), 5.0 * u.powi(4), max_relative = 1e-6, epsilon = 1e-9);
    }
}

#[test]
fn ar_examples() {
    let lat = ArLattice::standard(1.0);
    let ok = ar_condition_check(&model(17), &lat).unwrap();
    assert!(ok.report.passed(), "{}", ok.report);
    assert_eq!(ok.violations, 0);

    let lin = BVProblem::new(ctx(2.0, 0.9, 1.0, 17), Nonlinearity::Linear, 6.0).unwrap();
    let bad = ar_condition_check(&lin, &lat).unwrap();
    assert!(bad.report.failed());
    assert_eq!(bad.violations, lat.ts.len() * lat.us.len());
    // Margin u² - 3u² = -2u² is most negative at the largest |u|.
    assert_eq!(bad.worst, (0.0, -1e3));
    assert_relative_eq!(bad.report.lhs, 3e6, max_relative = 1e-12);
    assert_relative_eq!(bad.report.rhs, 1e6, max_relative = 1e-12);

    let with_zero = ArLattice { ts: vec![0.0], us: vec![0.0] };
    assert!(ar_condition_check(&lin, &with_zero).is_err());
}

#[test]
fn energy_examples() {
    let p = model(257);
    assert_eq!(energy(&p, &p.ctx().zeros()).unwrap(), 0.0);
    let u = bump(p.ctx());
    let zero = BVProblem::new(p.ctx().clone(), Nonlinearity::Zero, 6.0).unwrap();
    let d = p.ctx().derivative(&u).unwrap();
    let e = energy(&zero, &u).unwrap();
    assert!(e > 0.0);
    assert_relative_eq!(e, modular(p.ctx().mf(), &d), max_relative = 1e-12);
    assert!(energy(&p, &u.scale(10.0)).unwrap() < 0.0);
    let bad = p.ctx().grid_fn(|t| t);
    assert!(matches!(energy(&p, &bad), Err(Error::Precondition(_))));
}

#[test]
fn residual_matches_finite_differences() {
    for (p, q) in [(2.0, 6.0), (3.0, 9.0)] {
        let prob = BVProblem::new(ctx(p, 0.7, 0.4, 129), Nonlinearity::power(q).unwrap(), q).unwrap();
        let mut rng = seeded(11);
        for _ in 0..5 {
            let u = random_sine_combo(&mut rng, 129, 1.0, 5);
            let phi = random_bump(&mut rng, 129, 1.0);
            let eps = 1e-4;
            let fd = (energy(&prob, &(&u + &phi.scale(eps))).unwrap() - energy(&prob, &(&u - &phi.scale(eps))).unwrap())
                / (2.0 * eps);
            let r = residual(&prob, &u).unwrap();
            let pairing = r.inner(&phi);
            assert_relative_eq!(pairing, fd, max_relative = 1e-5);
            assert_relative_eq!(directional_derivative(&prob, &u, &phi).unwrap(), pairing, max_relative = 1e-10);
        }
    }
}

#[test]
fn residual_of_zero_vanishes() {
    let p = model(65);
    let r = residual(&p, &p.ctx().zeros()).unwrap();
    assert!(r.is_zero());
    assert_eq!(residual_norm(&p, &p.ctx().zeros()).unwrap(), 0.0);
}

#[test]
fn residual_approaches_classical_weak_form() {
    // For p = 2, β = 1 and α near 1 the residual tends to -u'' - h(u).
    let n = 513;
    let prob = BVProblem::new(ctx(2.0, 0.999, 1.0, n), Nonlinearity::power(6.0).unwrap(), 6.0).unwrap();
    let mut v = prob.ctx().grid_fn(|t| (PI * t).sin()).into_values();
    v[n - 1] = 0.0;
    let u = prob.ctx().zeros().with_values(v);
    let r = residual(&prob, &u).unwrap();
    let classical = u.map_nodes(|_, s| PI * PI * s - s.powi(5));
    let mut worst: f64 = 0.0;
    for i in n / 8..7 * n / 8 {
        worst = worst.max((r.values()[i] - classical.values()[i]).abs());
    }
    assert!(worst < 0.05 * PI * PI, "{worst}");
}

#[test]
fn growth_lemma_examples() {
    let p = model(129);
    let r = lemma_growth_checks(&p, &ArLattice::standard(1.0), 5).unwrap();
    assert!(r.passed(), "{r}");
    let unit = ArLattice { ts: vec![0.5], us: vec![-1.0, 1.0, 2.0] };
    let r = lemma_growth_checks(&p, &unit, 5).unwrap();
    assert!(r.passed(), "{r}");
    assert_relative_eq!(p.nonlinearity().big_h(0.0, 2.0).unwrap(), 64.0 / 6.0);
}

#[test]
fn geometry_fails_without_nonlinearity() {
    let p = BVProblem::new(ctx(2.0, 0.9, 1.0, 65), Nonlinearity::Zero, 6.0).unwrap();
    assert!(matches!(geometry_check(&p, 1), Err(Error::Geometry(_))));
}

#[test]
fn model_geometry_and_small_solve() {
    let p = model(129);
    let g = geometry_check(&p, 3).unwrap();
    assert!(g.theta > 0.0 && g.l < g.c1);
    assert!(g.min_rim_energy >= g.theta);
    assert!(energy(&p, &g.e).unwrap() < 0.0);
    let res = mountain_pass_solve(&p, &g, &SolverParams::default()).unwrap();
    assert!(res.converged, "{}", res.note);
    assert!(res.residual_norm <= 1e-6);
    assert!(res.theta - 1e-6 <= res.energy && res.energy <= res.path_max_energy + 1e-12);
    for rec in res.history.iter().filter(|r| r.step == StepKind::Descent) {
        assert!(rec.energy_after < rec.path_max_energy);
    }
    let ps = ps_diagnostic(&p, &res.snapshots).unwrap();
    assert!(ps.report.passed(), "{}", ps.report);
}

#[test]
fn forced_trivial_problem_is_not_converged() {
    let p = BVProblem::new(ctx(2.0, 0.9, 1.0, 65), Nonlinearity::Zero, 6.0).unwrap();
    let model = model(65);
    let g = geometry_check(&model, 1).unwrap();
    let res = mountain_pass_solve(&p, &g, &SolverParams::default()).unwrap();
    assert!(!res.converged);
    assert!(res.note.contains("trivial"), "{}", res.note);
}

#[test]
fn tiny_budget_is_not_converged() {
    let p = model(65);
    let g = geometry_check(&p, 1).unwrap();
    let res = mountain_pass_solve(&p, &g, &SolverParams { budget: 1, ..SolverParams::default() }).unwrap();
    assert!(!res.converged);
    assert_eq!(res.iterations, 1);
    assert!(res.note.contains("budget"));
}

#[test]
fn ps_diagnostic_trivial_iterate() {
    let p = model(33);
    let d = ps_diagnostic(&p, &[p.ctx().zeros()]).unwrap();
    assert!(d.report.passed());
    assert_eq!((d.report.lhs, d.report.rhs), (0.0, 0.0));
    assert!(ps_diagnostic(&p, &[]).is_err());
}
