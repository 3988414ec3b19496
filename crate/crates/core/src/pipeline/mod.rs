//! Verification suites shared by the command line and the acceptance tests.
//! Each suite returns named check outcomes and the text artifacts it
//! produced.

mod exact;
mod suites;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sequence::SequenceRule;

pub use exact::{exact_check_suite, ExactCheckConfig};
pub use suites::{
    commutativity_restoration, covariance_suite, sample_suite, wigner_suite, CommutatorRow, CovarianceConfig,
    MemberSpec, SampleSuiteConfig, WignerSuiteConfig,
};
pub use verify::{verify_suite, CovarianceComparison, VerifyLevel, VerifyReport, VerifyScenario, WickComparison};

/// Outcome of one named check: `value` against `target` with `tolerance`.
/// Counting checks use `target` = cases, `value` = cases that passed,
/// `tolerance` = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub target: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn within(name: impl Into<String>, target: f64, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            target,
            value,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        }
    }

    pub fn count(name: impl Into<String>, cases: usize, passed: usize) -> Self {
        Self {
            name: name.into(),
            target: cases as f64,
            value: passed as f64,
            tolerance: 0.0,
            pass: cases == passed,
        }
    }

    /// `value ≥ target − tolerance`.
    pub fn at_least(name: impl Into<String>, target: f64, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            target,
            value,
            tolerance,
            pass: value >= target - tolerance,
        }
    }

    /// `value ≤ target + tolerance`.
    pub fn at_most(name: impl Into<String>, target: f64, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            target,
            value,
            tolerance,
            pass: value <= target + tolerance,
        }
    }
}

/// A text file produced by a suite, named relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SuiteOutput {
    pub checks: Vec<CheckOutcome>,
    pub artifacts: Vec<Artifact>,
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A sequence given by name (`"evens"`) or as a full rule table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceSpec {
    Name(String),
    Rule(SequenceRule),
}

impl SequenceSpec {
    pub fn resolve(&self) -> Result<SequenceRule> {
        let rule = match self {
            Self::Name(n) => SequenceRule::by_name(n)?,
            Self::Rule(r) => r.clone(),
        };
        rule.validate()?;
        Ok(rule)
    }
}

pub fn resolve_all(specs: &[SequenceSpec]) -> Result<Vec<SequenceRule>> {
    specs.iter().map(SequenceSpec::resolve).collect()
}
