use std::f64::consts::PI;
use std::path::Path;

use fracmusielak::bvp::{
    ar_condition_check, geometry_check, lemma_growth_checks, mountain_pass_solve, ps_diagnostic, ArLattice, StepKind,
};
use fracmusielak::frac::{
    frac_integral_left, frac_integral_right, ftc_compose_check, hilfer_left, hilfer_right, rl_derivative_left,
    rl_derivative_right,
};
use fracmusielak::musielak::{luxemburg_norm, modular, sqrt_convexity_check, SampleLattice};
use fracmusielak::report::{CheckReport, Outcome};
use fracmusielak::space::{k_norm, psi_condition_check, seminorm};
use fracmusielak::study::{doubling_sizes, ftc_study, power_rule_study, ConvergenceStudy};
use fracmusielak::suite::verify_context;
use fracmusielak::GridFunction;

use crate::config::{CheckGroup, RunConfig};
use crate::error::CliError;
use crate::output::{num, read_samples, write_csv};
use crate::{Operator, StrictConvexity};

fn report_row(r: &CheckReport) -> Vec<String> {
    let note = match &r.outcome {
        Outcome::Skip(why) | Outcome::Info(why) if r.note.is_empty() => why.clone(),
        Outcome::Skip(why) | Outcome::Info(why) => format!("{why}; {}", r.note),
        _ => r.note.clone(),
    };
    vec![
        r.name.clone(),
        r.anchor.to_string(),
        num(r.lhs),
        num(r.rhs),
        num(r.margin),
        r.outcome.label().to_string(),
        note,
    ]
}

/// Checks midpoint convexity of `t ↦ Φ_x(√t)`. A violation aborts the run
/// in `fail` mode and is downgraded to an informational row in `warn` mode.
fn convexity_gate(cfg: &RunConfig, strict: StrictConvexity) -> Result<CheckReport, CliError> {
    let mf = cfg.musielak()?;
    let report = sqrt_convexity_check(&mf, &SampleLattice::standard(cfg.t_end));
    if !report.failed() {
        return Ok(report);
    }
    match strict {
        StrictConvexity::Fail => Err(CliError::Config(format!("Φ_x(√t) is not convex: {report}"))),
        StrictConvexity::Warn => {
            eprintln!("warning: Φ_x(√t) is not convex on the sample lattice ({report})");
            Ok(report.info("convexity violated (warning only)"))
        }
    }
}

pub fn verify(cfg: &RunConfig, out: &Path, strict: StrictConvexity) -> Result<(), CliError> {
    let mut reports = vec![convexity_gate(cfg, strict)?];
    let ctx = cfg.context()?;
    if cfg.verify.runs(CheckGroup::Inequalities) {
        reports.extend(verify_context(&ctx, cfg.verify.trials, cfg.seed)?);
    }
    if cfg.verify.runs(CheckGroup::Ftc) {
        let t_end = cfg.t_end;
        let mut v = ctx.grid_fn(|t| (PI * t / t_end).sin()).into_values();
        v[0] = 0.0;
        let v = ctx.zeros().with_values(v);
        let r = match ftc_compose_check(ctx.psi(), ctx.params(), &v) {
            Ok(f) => f.report,
            Err(fracmusielak::Error::Precondition(m)) => {
                CheckReport::new("ftc_composition", fracmusielak::anchors::FTC_COMPOSITION).skip(m)
            }
            Err(e) => return Err(e.into()),
        };
        reports.push(r);
    }
    if cfg.verify.runs(CheckGroup::PsiCondition) {
        let pc = psi_condition_check(ctx.psi(), cfg.alpha, cfg.n, cfg.t_end)?;
        let rows: Vec<Vec<String>> = pc
            .rows
            .iter()
            .map(|r| vec![num(r.t), r.violations.to_string(), num(r.max_separation)])
            .collect();
        write_csv(out, "psi_condition.csv", &["t", "violations", "max_separation"], &rows)?;
        reports.push(pc.report);
    }
    let rows: Vec<Vec<String>> = reports.iter().map(report_row).collect();
    let path = write_csv(out, "verify.csv", &["name", "anchor", "lhs", "rhs", "margin", "outcome", "note"], &rows)?;
    let count = |f: fn(&CheckReport) -> bool| reports.iter().filter(|r| f(r)).count();
    let (passed, failed) = (count(CheckReport::passed), count(CheckReport::failed));
    println!("checks={} passed={passed} failed={failed} other={}", reports.len(), reports.len() - passed - failed);
    println!("report={}", path.display());
    if failed > 0 {
        return Err(CliError::ChecksFailed(format!("{failed} of {} checks failed", reports.len())));
    }
    Ok(())
}

pub fn solve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let prob = cfg.problem()?;
    let lattice = ArLattice::standard(cfg.t_end);
    let ar = ar_condition_check(&prob, &lattice)?;
    println!("ar_condition={} worst_t={} worst_u={}", ar.report.outcome.label(), num(ar.worst.0), num(ar.worst.1));
    if ar.report.failed() {
        return Err(CliError::Geometry(format!(
            "Ambrosetti–Rabinowitz condition fails at {} samples, worst (t, u) = ({}, {})",
            ar.violations, ar.worst.0, ar.worst.1
        )));
    }
    let growth = lemma_growth_checks(&prob, &lattice, cfg.seed)?;
    println!("growth_lemma={}", growth.outcome.label());
    let geom = geometry_check(&prob, cfg.seed)?;
    println!("L={} theta={} R={}", num(geom.l), num(geom.theta), num(geom.r));
    let res = mountain_pass_solve(&prob, &geom, &cfg.solver_params())?;
    let ps = ps_diagnostic(&prob, &res.snapshots)?;

    let solution: Vec<Vec<String>> = res.u_star.nodes().zip(res.u_star.values()).map(|(t, u)| vec![num(t), num(*u)]).collect();
    write_csv(out, "solution.csv", &["t", "u"], &solution)?;
    let diag: Vec<Vec<String>> = res
        .history
        .iter()
        .map(|r| {
            let step = match r.step {
                StepKind::Descent => "descent",
                StepKind::Newton => "newton",
                StepKind::None => "none",
            };
            vec![r.iteration.to_string(), num(r.path_max_energy), num(r.residual_norm), num(r.energy_after), step.into()]
        })
        .collect();
    write_csv(
        out,
        "diagnostics.csv",
        &["iteration", "path_max_energy", "residual_norm", "energy_after", "step"],
        &diag,
    )?;
    let ps_rows: Vec<Vec<String>> = ps
        .rows
        .iter()
        .map(|r| vec![num(r.energy), num(r.residual_norm), num(r.seminorm), num(r.lower), num(r.upper)])
        .collect();
    write_csv(out, "palais_smale.csv", &["energy", "residual_norm", "seminorm", "lower", "upper"], &ps_rows)?;

    println!(
        "converged={} iterations={} energy={} residual_norm={} path_max_energy={}",
        res.converged,
        res.iterations,
        num(res.energy),
        num(res.residual_norm),
        num(res.path_max_energy)
    );
    println!("palais_smale={}", ps.report.outcome.label());
    if !res.converged {
        return Err(CliError::NotConverged(res.note));
    }
    Ok(())
}

pub fn study(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let sizes = doubling_sizes(cfg.study.n_min, cfg.study.n_max)?;
    let psi = cfg.psi()?;
    let mut studies: Vec<ConvergenceStudy> = Vec::new();
    for k in [None, Some(0), Some(1), Some(2)] {
        studies.push(power_rule_study(&psi, cfg.alpha, k, cfg.t_end, &sizes)?);
    }
    let t_end = cfg.t_end;
    studies.push(ftc_study(&psi, cfg.params()?, |t| (PI * t / t_end).sin(), "ftc sin", t_end, &sizes)?);
    let mut rows = Vec::new();
    for s in &studies {
        for r in &s.rows {
            rows.push(vec![s.label.clone(), r.n.to_string(), num(r.error), num(r.order)]);
        }
        match s.fitted_order {
            Some(o) => println!("{}: fitted_order={o:.4} max_error={}", s.label, num(s.max_error())),
            None => println!("{}: exact to round-off, max_error={}", s.label, num(s.max_error())),
        }
    }
    write_csv(out, "study.csv", &["case", "N", "error", "order"], &rows)?;
    Ok(())
}

/// Reads a `t,u` CSV on a uniform grid starting at 0.
fn load_grid_function(input: &Path) -> Result<GridFunction, CliError> {
    let (ts, us) = read_samples(input)?;
    let n = ts.len();
    if n < 3 {
        return Err(CliError::Config(format!("{}: need at least 3 samples, got {n}", input.display())));
    }
    let t_end = ts[n - 1];
    let h = t_end / (n - 1) as f64;
    let uniform = ts[0] == 0.0 && ts.iter().enumerate().all(|(i, t)| (t - i as f64 * h).abs() <= 1e-9 * t_end);
    if !(t_end > 0.0 && uniform) {
        return Err(CliError::Config(format!("{}: t must be a uniform grid starting at 0", input.display())));
    }
    Ok(GridFunction::new(us, t_end)?)
}

pub fn norm(cfg: &RunConfig, input: &Path) -> Result<(), CliError> {
    let u = load_grid_function(input)?;
    let ctx = cfg.context_with(u.len(), u.t_end())?;
    println!("N={} T={}", u.len(), num(u.t_end()));
    println!("modular={}", num(modular(ctx.mf(), &u)));
    println!("luxemburg_norm={}", num(luxemburg_norm(ctx.mf(), &u)?));
    println!("seminorm={}", num(seminorm(&ctx, &u)?));
    println!("k_norm={}", num(k_norm(&ctx, &u)?));
    Ok(())
}

pub fn fracop(cfg: &RunConfig, input: &Path, op: Operator, out: &Path) -> Result<(), CliError> {
    let u = load_grid_function(input)?;
    let (psi, params, alpha) = (cfg.psi()?, cfg.params()?, cfg.alpha);
    let image = match op {
        Operator::IntegralLeft => frac_integral_left(&psi, alpha, &u)?,
        Operator::IntegralRight => frac_integral_right(&psi, alpha, &u)?,
        Operator::RlLeft => rl_derivative_left(&psi, alpha, &u)?,
        Operator::RlRight => rl_derivative_right(&psi, alpha, &u)?,
        Operator::HilferLeft => hilfer_left(&psi, params, &u)?,
        Operator::HilferRight => hilfer_right(&psi, params, &u)?,
    };
    let rows: Vec<Vec<String>> = image.nodes().zip(image.values()).map(|(t, v)| vec![num(t), num(*v)]).collect();
    let path = write_csv(out, "fracop.csv", &["t", "value"], &rows)?;
    println!("output={}", path.display());
    Ok(())
}
