//! Check reports shared by every verification routine.

use std::fmt;

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Hypotheses of the inequality do not apply to this sample.
    Skip(String),
    /// Informational; never counts as a failure.
    Info(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Skip(_) => "skip",
            Outcome::Info(_) => "info",
        }
    }
}

/// One inequality evaluation `lhs <= rhs` (or the tightest link of a chain).
///
/// `margin` is `rhs - lhs`; negative margins beyond the check's tolerance fail.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub anchor: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub outcome: Outcome,
    pub note: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, anchor: &'static str) -> Self {
        Self {
            name: name.into(),
            anchor,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            outcome: Outcome::Pass,
            note: String::new(),
        }
    }

    /// Records `lhs <= rhs + slack`.
    pub fn compare(mut self, lhs: f64, rhs: f64, slack: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.margin = rhs - lhs;
        self.outcome = if lhs <= rhs + slack { Outcome::Pass } else { Outcome::Fail };
        self
    }

    /// Records the worst of several links `l_k <= r_k + slack_k`, judged by
    /// the margin scaled by its slack.
    pub fn chain(mut self, links: &[(f64, f64, f64)]) -> Self {
        let worst = links
            .iter()
            .min_by(|a, b| score(a).total_cmp(&score(b)))
            .copied()
            .unwrap_or((0.0, 0.0, 0.0));
        let ok = links.iter().all(|&(l, r, s)| l <= r + s);
        self = self.compare(worst.0, worst.1, worst.2);
        self.outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self
    }

    pub fn skip(mut self, why: impl Into<String>) -> Self {
        self.outcome = Outcome::Skip(why.into());
        self
    }

    pub fn info(mut self, what: impl Into<String>) -> Self {
        self.outcome = Outcome::Info(what.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    pub fn skipped(&self) -> bool {
        matches!(self.outcome, Outcome::Skip(_))
    }
}

fn score(&(l, r, s): &(f64, f64, f64)) -> f64 {
    (r - l + s) / s.max(f64::MIN_POSITIVE)
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} ({}): lhs={:.6e} rhs={:.6e} margin={:.3e}",
            self.outcome.label(),
            self.name,
            self.anchor,
            self.lhs,
            self.rhs,
            self.margin
        )?;
        match &self.outcome {
            Outcome::Skip(w) | Outcome::Info(w) => write!(f, " ({w})"),
            _ => Ok(()),
        }
    }
}

/// Relative slack `tol * max(|x|, floor)`.
pub(crate) fn rel(tol: f64, x: f64) -> f64 {
    tol * x.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_reports_tightest_link() {
        let r = CheckReport::new("c", "x").chain(&[(1.0, 5.0, 1e-9), (2.0, 2.0, 1e-9)]);
        assert!(r.passed());
        assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
        let r = CheckReport::new("c", "x").chain(&[(1.0, 5.0, 1e-9), (3.0, 2.0, 1e-9)]);
        assert!(r.failed());
        assert_eq!(r.margin, -1.0);
    }
}
