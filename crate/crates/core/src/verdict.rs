//! Tri-state verdicts and the report types built on them.
//!
//! Every criterion is expressed as a signed margin that is nonnegative when
//! the criterion holds exactly. Floating point cannot certify the equalities
//! being decided, so a margin within `threshold` below zero still counts as
//! holding, margins within `MARGINAL_FACTOR·threshold` are `marginal`, and
//! anything further below zero fails.

use serde::Serialize;

use crate::operator::{Unimodular, UnitVector};

/// Width of the marginal band, in multiples of the holding threshold.
pub const MARGINAL_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Marginal,
}

impl Verdict {
    pub fn classify(margin: f64, threshold: f64) -> Self {
        let threshold = threshold.abs();
        if margin.is_nan() {
            Verdict::Fails
        } else if margin >= -threshold {
            Verdict::Holds
        } else if margin >= -MARGINAL_FACTOR * threshold {
            Verdict::Marginal
        } else {
            Verdict::Fails
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Marginal => "marginal",
        }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Decision for an orthogonality or parallelism predicate.
#[derive(Clone, Debug, Serialize)]
pub struct DecisionCertificate {
    pub verdict: Verdict,
    pub margin: f64,
    pub witness: Option<UnitVector>,
    pub unimodular: Option<Unimodular>,
    pub notes: String,
}

/// Where an inner infimum search over complex γ ended up.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerTrace {
    pub grid_points: usize,
    pub radius: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub value: f64,
    pub touched_boundary: bool,
    pub evaluations: usize,
}

/// The comparison `lhs ≤ rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub optimizer_trace: Option<OptimizerTrace>,
}

impl InequalityReport {
    /// `lhs ≤ rhs`, judged relative to the magnitude of both sides.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, decision_margin: f64) -> Self {
        let slack = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            verdict: Verdict::classify(slack, decision_margin * scale),
            optimizer_trace: None,
        }
    }

    /// `lhs = rhs` as a two-sided check; the slack is `−|lhs − rhs|`.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, decision_margin: f64) -> Self {
        let mut r = Self::new(name, lhs, rhs, decision_margin);
        r.slack = -(lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        r.verdict = Verdict::classify(r.slack, decision_margin * scale);
        r
    }

    pub fn with_trace(mut self, trace: OptimizerTrace) -> Self {
        self.optimizer_trace = Some(trace);
        self
    }
}

/// One condition of an equivalence: `lhs` compared to `rhs`, with the
/// resulting signed margin and verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl Condition {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64, margin: f64, threshold: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            margin,
            verdict: Verdict::classify(margin, threshold),
        }
    }

    pub fn from_certificate(label: impl Into<String>, lhs: f64, rhs: f64, cert: &DecisionCertificate) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            margin: cert.margin,
            verdict: cert.verdict,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    AllAgree,
    Disagree,
    Marginal,
}

impl Consistency {
    /// Agreement among non-marginal verdicts.
    pub fn of(verdicts: impl IntoIterator<Item = Verdict>) -> Self {
        let (mut holds, mut fails, mut marginal) = (false, false, false);
        for v in verdicts {
            match v {
                Verdict::Holds => holds = true,
                Verdict::Fails => fails = true,
                Verdict::Marginal => marginal = true,
            }
        }
        if holds && fails {
            Consistency::Disagree
        } else if marginal {
            Consistency::Marginal
        } else {
            Consistency::AllAgree
        }
    }

    pub fn as_verdict(&self) -> Verdict {
        match self {
            Consistency::AllAgree => Verdict::Holds,
            Consistency::Disagree => Verdict::Fails,
            Consistency::Marginal => Verdict::Marginal,
        }
    }
}

/// A list of conditions that theory says are equivalent, with their
/// agreement status.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceBattery {
    pub name: String,
    pub conditions: Vec<Condition>,
    pub consistent: Consistency,
    pub details: String,
    /// Auxiliary inequalities or identities checked alongside the equivalence.
    pub side_checks: Vec<InequalityReport>,
    pub witness: Option<UnitVector>,
}

impl EquivalenceBattery {
    pub fn new(name: impl Into<String>, conditions: Vec<Condition>) -> Self {
        let consistent = Consistency::of(conditions.iter().map(|c| c.verdict));
        Self {
            name: name.into(),
            conditions,
            consistent,
            details: String::new(),
            side_checks: Vec::new(),
            witness: None,
        }
    }

    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }

    /// True when every condition holds.
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Holds)
    }

    pub fn all_fail(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Fails)
    }

    pub fn with_details(mut self, details: impl Into<String>) -> Self {
        self.details = details.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_bands() {
        assert_eq!(Verdict::classify(0.5, 1e-9), Verdict::Holds);
        assert_eq!(Verdict::classify(-1e-10, 1e-9), Verdict::Holds);
        assert_eq!(Verdict::classify(-1e-8, 1e-9), Verdict::Marginal);
        assert_eq!(Verdict::classify(-1e-3, 1e-9), Verdict::Fails);
        assert_eq!(Verdict::classify(0.0, 0.0), Verdict::Holds);
        assert_eq!(Verdict::classify(f64::NAN, 1.0), Verdict::Fails);
    }

    #[test]
    fn consistency_ignores_marginal() {
        use Verdict::*;
        assert_eq!(Consistency::of([Holds, Holds]), Consistency::AllAgree);
        assert_eq!(Consistency::of([Fails, Fails, Fails]), Consistency::AllAgree);
        assert_eq!(Consistency::of([Holds, Fails]), Consistency::Disagree);
        assert_eq!(Consistency::of([Holds, Marginal]), Consistency::Marginal);
        assert_eq!(Consistency::of([Holds, Marginal, Fails]), Consistency::Disagree);
    }

    #[test]
    fn inequality_report_slack() {
        let r = InequalityReport::new("x", 1.0, 2.0, 1e-9);
        assert_eq!(r.slack, 1.0);
        assert_eq!(r.verdict, Verdict::Holds);
        let r = InequalityReport::new("x", 2.0, 1.0, 1e-9);
        assert_eq!(r.verdict, Verdict::Fails);
        let r = InequalityReport::equality("x", 1.0, 1.0 + 1e-12, 1e-9);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.slack <= 0.0);
    }
}
