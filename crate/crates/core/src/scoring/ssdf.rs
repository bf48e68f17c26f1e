use std::fmt::Write as _;

use serde::Serialize;

use super::registry::{entry, REGISTRY};
use super::ScoreReport;
use crate::check::CheckName;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SsdfStatus {
    Covered,
    Gap,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PracticeStatus {
    pub practice: String,
    pub status: SsdfStatus,
    /// Mapped checks present in the report, with their scores.
    pub checks: Vec<(CheckName, i32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SsdfReport {
    pub repo: String,
    pub threshold: i32,
    pub practices: Vec<PracticeStatus>,
    pub unmapped: Vec<CheckName>,
}

/// Maps report scores onto SSDF practices. Only checks present in the
/// report contribute; a practice with no evidence at all is unknown.
pub fn ssdf_coverage(report: &ScoreReport, threshold: i32) -> Result<SsdfReport> {
    if !(0..=10).contains(&threshold) {
        return Err(Error::Input(format!(
            "threshold {threshold} outside 0..=10"
        )));
    }
    let mut ids: Vec<&str> = REGISTRY
        .iter()
        .flat_map(|e| e.ssdf.iter().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let practices = ids
        .into_iter()
        .map(|id| {
            let checks: Vec<(CheckName, i32)> = report
                .checks
                .iter()
                .filter(|c| entry(c.name).ssdf.contains(&id))
                .map(|c| (c.name, c.score.value()))
                .collect();
            let status = if checks.iter().any(|(_, s)| *s >= threshold && *s >= 0) {
                SsdfStatus::Covered
            } else if checks.iter().any(|(_, s)| *s >= 0) {
                SsdfStatus::Gap
            } else {
                SsdfStatus::Unknown
            };
            PracticeStatus {
                practice: id.to_string(),
                status,
                checks,
            }
        })
        .collect();
    let unmapped = report
        .checks
        .iter()
        .map(|c| c.name)
        .filter(|n| entry(*n).ssdf.is_empty())
        .collect();
    Ok(SsdfReport {
        repo: report.repo.to_string(),
        threshold,
        practices,
        unmapped,
    })
}

impl SsdfReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ssdf report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# SSDF coverage for {} (threshold {})\n",
            self.repo, self.threshold
        );
        out.push_str("| Practice | Status | Evidence |\n|---|---|---|\n");
        for p in &self.practices {
            let evidence: Vec<String> = p.checks.iter().map(|(n, s)| format!("{n}={s}")).collect();
            let status = match p.status {
                SsdfStatus::Covered => "covered",
                SsdfStatus::Gap => "gap",
                SsdfStatus::Unknown => "unknown",
            };
            let _ = writeln!(
                out,
                "| {} | {} | {} |",
                p.practice,
                status,
                evidence.join(", ")
            );
        }
        if !self.unmapped.is_empty() {
            let names: Vec<&str> = self.unmapped.iter().map(|n| n.as_str()).collect();
            let _ = writeln!(
                out,
                "\nChecks without an SSDF mapping: {}",
                names.join(", ")
            );
        }
        out
    }
}
