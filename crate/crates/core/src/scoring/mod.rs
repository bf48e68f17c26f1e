//! Runs the check suite and combines results into a risk-weighted aggregate.

pub mod registry;
mod ssdf;

use std::fmt::{self, Write as _};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::check::{CheckName, CheckResult};
use crate::deps::{
    check_binary_artifacts, check_dependency_update_tool, check_pinned_dependencies,
};
use crate::hygiene;
use crate::intel::{
    check_cii_best_practices, check_fuzzing, check_vulnerabilities, IntelSource, RepoId,
};
use crate::repo::RepoSnapshot;
use crate::workflow::{check_dangerous_workflow, check_token_permissions, detect_publish_signals};

pub use registry::{entry, RegistryEntry, REGISTRY};
pub use ssdf::{ssdf_coverage, PracticeStatus, SsdfReport, SsdfStatus};

/// Risk-weighted mean of conclusive scores, or inconclusive when there are none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Aggregate {
    /// Score in tenths (0..=100).
    Score(i64),
    Inconclusive,
}

impl Aggregate {
    pub fn tenths(self) -> Option<i64> {
        match self {
            Aggregate::Score(t) => Some(t),
            Aggregate::Inconclusive => None,
        }
    }

    pub fn as_f64(self) -> Option<f64> {
        self.tenths().map(|t| t as f64 / 10.0)
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregate::Score(t) => write!(f, "{}.{}", t / 10, t % 10),
            Aggregate::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

impl Serialize for Aggregate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Aggregate::Score(t) => s.serialize_f64(*t as f64 / 10.0),
            Aggregate::Inconclusive => s.serialize_str("inconclusive"),
        }
    }
}

impl<'de> Deserialize<'de> for Aggregate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if (0.0..=10.0).contains(&v) => {
                Ok(Aggregate::Score((v * 10.0).round() as i64))
            }
            Raw::Num(v) => Err(serde::de::Error::custom(format!(
                "aggregate {v} out of range"
            ))),
            Raw::Text(t) if t == "inconclusive" => Ok(Aggregate::Inconclusive),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown aggregate {t:?}"))),
        }
    }
}

/// Weighted mean over results with score >= 0, rounded half away from zero
/// to one decimal. Integer arithmetic on quarter weights keeps it exact.
pub fn aggregate_score(results: &[CheckResult]) -> Aggregate {
    let (mut num, mut den) = (0i64, 0i64);
    for r in results.iter().filter(|r| !r.score.is_inconclusive()) {
        let w = i64::from(r.risk.quarter_weight());
        num += i64::from(r.score.value()) * w;
        den += w;
    }
    if den == 0 {
        return Aggregate::Inconclusive;
    }
    Aggregate::Score((20 * num + den) / (2 * den))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub repo: RepoId,
    pub date: String,
    pub score: Aggregate,
    pub checks: Vec<CheckResult>,
}

impl ScoreReport {
    pub fn check(&self, name: CheckName) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Scorecard for {}\n", self.repo);
        let _ = writeln!(out, "Date: {}  ", self.date);
        let _ = writeln!(out, "Aggregate score: **{}**\n", self.score);
        out.push_str("| Check | Risk | Score | Reason |\n|---|---|---|---|\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                c.name,
                c.risk,
                c.score.value(),
                c.reason.replace('|', "\\|")
            );
        }
        let with_details: Vec<&CheckResult> = self
            .checks
            .iter()
            .filter(|c| !c.details.is_empty())
            .collect();
        if !with_details.is_empty() {
            out.push_str("\n## Details\n");
            for c in with_details {
                let _ = writeln!(out, "\n### {}\n", c.name);
                for d in &c.details {
                    let _ = writeln!(out, "- {d}");
                }
            }
        }
        out
    }
}

pub fn format_date(now: i64) -> String {
    chrono::DateTime::from_timestamp(now, 0)
        .unwrap_or_default()
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

type CheckFn<'a> = Box<dyn Fn(&RepoSnapshot) -> CheckResult + 'a>;

/// Runs every implemented check in registry order.
pub fn run_all_checks(snapshot: &RepoSnapshot, intel: &impl IntelSource, now: i64) -> ScoreReport {
    let checks: Vec<(CheckName, CheckFn<'_>)> = vec![
        (
            CheckName::DangerousWorkflow,
            Box::new(check_dangerous_workflow),
        ),
        (
            CheckName::Vulnerabilities,
            Box::new(|s| check_vulnerabilities(s, intel)),
        ),
        (CheckName::BinaryArtifacts, Box::new(check_binary_artifacts)),
        (
            CheckName::TokenPermissions,
            Box::new(check_token_permissions),
        ),
        (CheckName::CodeReview, Box::new(hygiene::check_code_review)),
        (
            CheckName::Maintained,
            Box::new(move |s| hygiene::check_maintained(s, now)),
        ),
        (
            CheckName::BranchProtection,
            Box::new(hygiene::check_branch_protection),
        ),
        (
            CheckName::DependencyUpdateTool,
            Box::new(check_dependency_update_tool),
        ),
        (
            CheckName::SignedReleases,
            Box::new(hygiene::check_signed_releases),
        ),
        (
            CheckName::PinnedDependencies,
            Box::new(check_pinned_dependencies),
        ),
        (
            CheckName::SecurityPolicy,
            Box::new(hygiene::check_security_policy),
        ),
        (
            CheckName::Packaging,
            Box::new(|s| hygiene::check_packaging(s, &detect_publish_signals(s))),
        ),
        (CheckName::Fuzzing, Box::new(|s| check_fuzzing(s, intel))),
        (CheckName::License, Box::new(hygiene::check_license)),
        (
            CheckName::CiiBestPractices,
            Box::new(|s| check_cii_best_practices(s, intel)),
        ),
    ];
    run_checks_with(snapshot, now, checks)
}

fn run_checks_with(
    snapshot: &RepoSnapshot,
    now: i64,
    checks: Vec<(CheckName, CheckFn<'_>)>,
) -> ScoreReport {
    let empty = snapshot.is_empty();
    let results: Vec<CheckResult> = checks
        .into_iter()
        .map(|(name, run)| {
            if empty {
                return CheckResult::inconclusive(name, "empty repository");
            }
            match catch_unwind(AssertUnwindSafe(|| run(snapshot))) {
                Ok(r) => r,
                Err(_) => CheckResult::inconclusive(name, "internal error"),
            }
        })
        .collect();
    ScoreReport {
        repo: snapshot.repo.clone(),
        date: format_date(now),
        score: aggregate_score(&results),
        checks: results,
    }
}
