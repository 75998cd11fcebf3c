//! Run configuration: a JSON document with a `schema_version` field.

use std::path::{Path, PathBuf};

use fracmusielak::bvp::{BVProblem, Nonlinearity, SolverParams};
use fracmusielak::frac::{FracParams, PsiWeight};
use fracmusielak::musielak::MusielakFunction;
use fracmusielak::space::KSpaceContext;
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub phi: PhiConfig,
    #[serde(default)]
    pub psi: PsiConfig,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T", default = "one")]
    pub t_end: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub h: Option<HConfig>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Pairing constant of the sup-norm bound.
    #[serde(default)]
    pub holder_factor: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub study: StudyConfig,
}

fn one() -> f64 {
    1.0
}

/// `a(x, t) = Σ c_k t^(p_k - 2)` for `custom`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTerm {
    pub coef: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiConfig {
    Power { p: f64 },
    Affine { p0: f64, p1: f64 },
    Custom { terms: Vec<PowerTerm> },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiConfig {
    #[default]
    Linear,
    Exponential {
        c: f64,
    },
    Power {
        gamma: f64,
    },
}

/// `h(t, u) = Σ c_k |u|^(q_k - 2) u` for `custom`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HTerm {
    pub coef: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum HConfig {
    /// `|u|^(μ-2) u`.
    Power,
    Linear,
    Zero,
    Custom { terms: Vec<HTerm> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub path_points: usize,
    pub budget: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = SolverParams::default();
        Self { path_points: p.path_points, budget: p.budget, tol: p.tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    All,
    Inequalities,
    PsiCondition,
    Ftc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub trials: usize,
    pub checks: Vec<CheckGroup>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { trials: 100, checks: vec![CheckGroup::All] }
    }
}

impl VerifyConfig {
    pub fn runs(&self, group: CheckGroup) -> bool {
        self.checks.iter().any(|&g| g == group || g == CheckGroup::All)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { n_min: 129, n_max: 4097 }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks done before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return invalid(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        positive("T", self.t_end)?;
        if self.n < 3 {
            return invalid(format!("N must be at least 3, got {}", self.n));
        }
        match &self.phi {
            PhiConfig::Power { p } if !(*p > 1.0 && p.is_finite()) => return invalid(format!("phi.p must exceed 1, got {p}")),
            PhiConfig::Affine { p0, p1 } if !(p0.min(p0 + p1) > 1.0 && (p0 + p1).is_finite()) => {
                return invalid(format!("affine exponent p0 + p1 x/T must exceed 1 on [0, T], got p0={p0}, p1={p1}"))
            }
            PhiConfig::Custom { terms } => {
                if terms.is_empty() {
                    return invalid("phi.terms must be nonempty");
                }
                for t in terms {
                    positive("phi.terms[].coef", t.coef)?;
                    if !(t.p > 1.0 && t.p.is_finite()) {
                        return invalid(format!("phi.terms[].p must exceed 1, got {}", t.p));
                    }
                }
            }
            _ => {}
        }
        match self.psi {
            PsiConfig::Exponential { c } => positive("psi.c", c)?,
            PsiConfig::Power { gamma } if !(gamma >= 1.0 && gamma.is_finite()) => {
                return invalid(format!("psi.gamma must be at least 1, got {gamma}"))
            }
            _ => {}
        }
        if let Some(mu) = self.mu {
            positive("mu", mu)?;
        }
        if let Some(HConfig::Custom { terms }) = &self.h {
            if terms.is_empty() {
                return invalid("h.terms must be nonempty");
            }
            for t in terms {
                if !(t.q > 1.0 && t.q.is_finite() && t.coef.is_finite()) {
                    return invalid(format!("h.terms[] needs q > 1 and a finite coef, got q={}, coef={}", t.q, t.coef));
                }
            }
        }
        if let Some(m) = self.holder_factor {
            positive("holder_factor", m)?;
        }
        if self.solver.path_points < 3 || self.solver.budget == 0 {
            return invalid("solver.path_points must be >= 3 and solver.budget >= 1");
        }
        positive("solver.tol", self.solver.tol)?;
        if self.verify.checks.is_empty() {
            return invalid("verify.checks must be nonempty");
        }
        if self.study.n_min < 5 || self.study.n_max < self.study.n_min {
            return invalid(format!("study range {}..={} is invalid", self.study.n_min, self.study.n_max));
        }
        Ok(())
    }

    pub fn musielak(&self) -> Result<MusielakFunction, CliError> {
        let mf = match &self.phi {
            PhiConfig::Power { p } => MusielakFunction::constant_power(*p, self.t_end)?,
            PhiConfig::Affine { p0, p1 } => MusielakFunction::affine_power(*p0, *p1, self.t_end)?,
            PhiConfig::Custom { terms } => {
                let terms = terms.clone();
                let lo = terms.iter().map(|t| t.p).fold(f64::INFINITY, f64::min);
                let hi = terms.iter().map(|t| t.p).fold(0.0, f64::max);
                MusielakFunction::custom(
                    move |_, t| terms.iter().map(|k| k.coef * t.powf(k.p - 2.0)).sum(),
                    lo,
                    hi,
                    self.t_end,
                )?
            }
        };
        Ok(mf)
    }

    pub fn psi(&self) -> Result<PsiWeight, CliError> {
        Ok(match self.psi {
            PsiConfig::Linear => PsiWeight::linear(),
            PsiConfig::Exponential { c } => PsiWeight::exponential(c)?,
            PsiConfig::Power { gamma } => PsiWeight::power(gamma)?,
        })
    }

    pub fn params(&self) -> Result<FracParams, CliError> {
        Ok(FracParams::new(self.alpha, self.beta)?)
    }

    pub fn context(&self) -> Result<KSpaceContext, CliError> {
        self.context_with(self.n, self.t_end)
    }

    /// Context on a grid other than the configured one (for CSV inputs).
    pub fn context_with(&self, n: usize, t_end: f64) -> Result<KSpaceContext, CliError> {
        let mf = if (t_end - self.t_end).abs() <= 1e-12 * self.t_end {
            self.musielak()?
        } else {
            RunConfig { t_end, ..self.clone() }.musielak()?
        };
        let ctx = KSpaceContext::new(mf, self.psi()?, self.params()?, n, t_end)?;
        Ok(match self.holder_factor {
            Some(m) => ctx.with_holder_factor(m)?,
            None => ctx,
        })
    }

    pub fn problem(&self) -> Result<BVProblem, CliError> {
        let (Some(h), Some(mu)) = (&self.h, self.mu) else {
            return invalid("solve needs both `h` and `mu`");
        };
        let nl = match h {
            HConfig::Power => Nonlinearity::power(mu)?,
            HConfig::Linear => Nonlinearity::Linear,
            HConfig::Zero => Nonlinearity::Zero,
            HConfig::Custom { terms } => {
                let terms = terms.clone();
                Nonlinearity::custom(move |_, u: f64| terms.iter().map(|k| k.coef * u.abs().powf(k.q - 2.0) * u).sum())
            }
        };
        Ok(BVProblem::new(self.context()?, nl, mu)?)
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            path_points: self.solver.path_points,
            budget: self.solver.budget,
            tol: self.solver.tol,
            ..SolverParams::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = r#"{
        "schema_version": 1,
        "phi": {"family": "power", "p": 2.0},
        "alpha": 0.9, "beta": 1.0, "N": 129,
        "h": {"family": "power"}, "mu": 6.0
    }"#;

    #[test]
    fn parses_model_config_with_defaults() {
        let cfg = RunConfig::parse(MODEL).unwrap();
        assert_eq!(cfg.t_end, 1.0);
        assert!(matches!(cfg.psi, PsiConfig::Linear));
        assert_eq!(cfg.verify.trials, 100);
        assert!(cfg.verify.runs(CheckGroup::Ftc));
        assert_eq!(cfg.solver_params(), SolverParams::default());
        assert_eq!(cfg.problem().unwrap().k_delta2(), 4.0);
    }

    #[test]
    fn rejects_out_of_range_values() {
        for (from, to) in [
            ("\"alpha\": 0.9", "\"alpha\": 1.5"),
            ("\"beta\": 1.0", "\"beta\": -0.1"),
            ("\"N\": 129", "\"N\": 2"),
            ("\"schema_version\": 1", "\"schema_version\": 7"),
            ("\"p\": 2.0", "\"p\": 1.0"),
            ("\"mu\": 6.0", "\"mu\": 6.0, \"extra\": 1"),
        ] {
            let text = MODEL.replace(from, to);
            assert!(matches!(RunConfig::parse(&text), Err(CliError::Config(_))), "{to}");
        }
    }

    #[test]
    fn custom_families_are_power_sums() {
        let text = MODEL
            .replace(r#"{"family": "power", "p": 2.0}"#, r#"{"family": "custom", "terms": [{"coef": 1.0, "p": 2.0}, {"coef": 0.5, "p": 3.0}]}"#);
        let mf = RunConfig::parse(&text).unwrap().musielak().unwrap();
        assert_eq!((mf.phi_lower(), mf.phi_upper()), (2.0, 3.0));
        assert!((mf.kernel_a(0.3, 4.0) - 3.0).abs() < 1e-12);
    }
}
