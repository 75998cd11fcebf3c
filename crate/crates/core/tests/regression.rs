//! Values produced by this implementation and frozen to detect drift.
//! Closed-form cross-checks sit next to each anchor where one exists.

use approx::assert_relative_eq;
use fracmusielak::bvp::{energy, geometry_check, mountain_pass_solve, BVProblem, Nonlinearity, SolverParams};
use fracmusielak::frac::{FracParams, PsiWeight};
use fracmusielak::musielak::MusielakFunction;
use fracmusielak::space::{seminorm, sup_bound_check, KSpaceContext};
use fracmusielak::GridFunction;
use statrs::function::gamma::gamma;

fn ctx(alpha: f64, n: usize) -> KSpaceContext {
    let mf = MusielakFunction::constant_power(2.0, 1.0).unwrap();
    KSpaceContext::new(mf, PsiWeight::linear(), FracParams::new(alpha, 1.0).unwrap(), n, 1.0).unwrap()
}

fn bump(c: &KSpaceContext) -> GridFunction {
    let mut v = c.grid_fn(|t| t * (1.0 - t)).into_values();
    let n = v.len();
    v[n - 1] = 0.0;
    c.zeros().with_values(v)
}

const BUMP_SEMINORM_4097: f64 = 3.43419881275622174e-1;
const BUMP_ENERGY_4097: f64 = 1.17937214853768887e-1;
const BUMP_SUP_MARGIN_4097: f64 = 2.54976406497366304e-1;

#[test]
fn bump_seminorm_anchor() {
    let c = ctx(0.9, 4097);
    let u = bump(&c);
    let s = seminorm(&c, &u).unwrap();
    assert_relative_eq!(s, BUMP_SEMINORM_4097, max_relative = 1e-9);
    // ᴴD u = I^{0.1}(1 - 2t) in closed form.
    let g = 0.1f64;
    let (a, b) = (1.0 / gamma(1.0 + g), 2.0 / gamma(2.0 + g));
    let l2 = a * a / (2.0 * g + 1.0) - a * b / (g + 1.0) + b * b / (2.0 * g + 3.0);
    assert_relative_eq!(s, (l2 / 2.0).sqrt(), max_relative = 1e-4);

    let zero = BVProblem::new(c.clone(), Nonlinearity::Zero, 6.0).unwrap();
    let e = energy(&zero, &u).unwrap();
    assert_relative_eq!(e, BUMP_ENERGY_4097, max_relative = 1e-9);
    assert_relative_eq!(e, s * s, max_relative = 1e-9);
    let sup = sup_bound_check(&c, &u).unwrap();
    assert!(sup.passed());
    assert_relative_eq!(sup.margin, BUMP_SUP_MARGIN_4097, max_relative = 1e-9);
}

const MODEL_L: f64 = 6.12064027489711893e-1;
const MODEL_THETA: f64 = 2.86048873746926779e-1;
const MODEL_ENERGY_513: f64 = 3.78122187846841618;
const MODEL_PEAK_513: f64 = 1.89294113297199651;

#[test]
fn model_solution_anchor() {
    let prob = BVProblem::new(ctx(0.9, 513), Nonlinearity::power(6.0).unwrap(), 6.0).unwrap();
    let geom = geometry_check(&prob, 1).unwrap();
    assert_relative_eq!(geom.l, MODEL_L, max_relative = 1e-12);
    assert_relative_eq!(geom.theta, MODEL_THETA, max_relative = 1e-12);
    let res = mountain_pass_solve(&prob, &geom, &SolverParams::default()).unwrap();
    assert!(res.converged);
    assert_relative_eq!(res.energy, MODEL_ENERGY_513, max_relative = 1e-6);
    assert_relative_eq!(res.u_star.max_abs(), MODEL_PEAK_513, max_relative = 1e-6);
}
