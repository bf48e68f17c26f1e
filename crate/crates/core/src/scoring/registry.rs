//! Static table of every known check: risk, SSDF mapping and documentation.

use crate::check::{CheckName, RiskLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistryEntry {
    pub name: CheckName,
    pub risk: RiskLevel,
    /// SSDF practice IDs this check provides evidence for.
    pub ssdf: &'static [&'static str],
    pub implemented: bool,
    pub description: &'static str,
    pub scoring_rule: &'static str,
}

use CheckName as C;
use RiskLevel::{Critical, High, Low, Medium};

pub static REGISTRY: [RegistryEntry; 18] = [
    RegistryEntry {
        name: C::DangerousWorkflow,
        risk: Critical,
        ssdf: &[],
        implemented: true,
        description: "Looks for dangerous patterns in CI workflows: checkout of untrusted pull request code in privileged triggers, and attacker-controlled event text interpolated into run scripts.",
        scoring_rule: "-1 without workflow files; 0 if any dangerous pattern is found; otherwise 10.",
    },
    RegistryEntry {
        name: C::Vulnerabilities,
        risk: High,
        ssdf: &["PW.4", "RV.1"],
        implemented: true,
        description: "Counts open vulnerabilities recorded for the repository in the OSV database.",
        scoring_rule: "max(0, 10 - open vulnerabilities); -1 when OSV data is unavailable.",
    },
    RegistryEntry {
        name: C::BinaryArtifacts,
        risk: High,
        ssdf: &[],
        implemented: true,
        description: "Looks for executable or compiled artifacts checked into the repository, which cannot be reviewed.",
        scoring_rule: "max(0, 10 - binary files).",
    },
    RegistryEntry {
        name: C::TokenPermissions,
        risk: High,
        ssdf: &["PO.5", "PS.1"],
        implemented: true,
        description: "Checks that workflow tokens default to read-only at the top level of every workflow.",
        scoring_rule: "10 x (workflows with read-only top-level permissions / workflows), rounded; -1 without workflow files.",
    },
    RegistryEntry {
        name: C::CodeReview,
        risk: High,
        ssdf: &["PW.7", "RV.1"],
        implemented: true,
        description: "Checks whether changes are reviewed before merging, via required reviewers or review evidence on recent commits.",
        scoring_rule: "10 if the default branch requires a reviewer; otherwise floor(10 x reviewed / considered) over the last 30 commits.",
    },
    RegistryEntry {
        name: C::Maintained,
        risk: High,
        ssdf: &["PW.4"],
        implemented: true,
        description: "Measures recent activity from commits and maintainer issue events.",
        scoring_rule: "0 if archived; otherwise min(10, floor(10 x events in the last 90 days / 13)).",
    },
    RegistryEntry {
        name: C::BranchProtection,
        risk: High,
        ssdf: &["PS.1"],
        implemented: true,
        description: "Evaluates branch protection rules on the default branch in five cumulative tiers.",
        scoring_rule: "2 x highest fully satisfied tier; -1 when protection settings are unavailable.",
    },
    RegistryEntry {
        name: C::DependencyUpdateTool,
        risk: High,
        ssdf: &["PO.3", "PW.4"],
        implemented: true,
        description: "Checks for a Dependabot or Renovate configuration.",
        scoring_rule: "10 if a configuration file is present; otherwise 0.",
    },
    RegistryEntry {
        name: C::SignedReleases,
        risk: High,
        ssdf: &["PS.1", "PS.2", "PS.3"],
        implemented: true,
        description: "Looks for signature files (.minisig, .asc, .sig, .sign) among the assets of the five newest releases, falling back to verified tags.",
        scoring_rule: "10 x (signed / considered), rounded; -1 without releases or tags.",
    },
    RegistryEntry {
        name: C::PinnedDependencies,
        risk: Medium,
        ssdf: &[],
        implemented: true,
        description: "Checks that dependencies in Dockerfiles, shell scripts, workflows and manifests are pinned to immutable versions.",
        scoring_rule: "10 x (pinned / total), rounded; -1 without dependency references.",
    },
    RegistryEntry {
        name: C::SecurityPolicy,
        risk: Medium,
        ssdf: &["RV.1"],
        implemented: true,
        description: "Looks for a SECURITY.md or SECURITY.rst file at the top level or in .github.",
        scoring_rule: "10 if found; otherwise 0.",
    },
    RegistryEntry {
        name: C::Packaging,
        risk: Medium,
        ssdf: &[],
        implemented: true,
        description: "Looks for workflow steps that publish the package to a registry.",
        scoring_rule: "10 if a publishing step is found; otherwise -1.",
    },
    RegistryEntry {
        name: C::Fuzzing,
        risk: Medium,
        ssdf: &["PW.8"],
        implemented: true,
        description: "Checks whether the repository is listed in the OSS-Fuzz project list.",
        scoring_rule: "10 if listed; otherwise 0; -1 when the list is unavailable.",
    },
    RegistryEntry {
        name: C::Sast,
        risk: Medium,
        ssdf: &["PW.7", "PW.8"],
        implemented: false,
        description: "Checks for static application security testing tools in CI.",
        scoring_rule: "Not implemented.",
    },
    RegistryEntry {
        name: C::License,
        risk: Low,
        ssdf: &[],
        implemented: true,
        description: "Looks for a published license file at the top level or in LICENSES/.",
        scoring_rule: "10 for a license file; 9 when declared only in README or package metadata; otherwise 0.",
    },
    RegistryEntry {
        name: C::CiiBestPractices,
        risk: Low,
        ssdf: &["PS.1", "PS.2", "RV.1", "PW.5", "PW.8"],
        implemented: true,
        description: "Checks for an OpenSSF (CII) Best Practices badge.",
        scoring_rule: "in-progress 2, passing 5, silver 7, gold 10, no badge 0; -1 when badge data is unavailable.",
    },
    RegistryEntry {
        name: C::CiTests,
        risk: Low,
        ssdf: &["RV.1"],
        implemented: false,
        description: "Checks that CI tests run on recent pull requests.",
        scoring_rule: "Not implemented.",
    },
    RegistryEntry {
        name: C::Contributors,
        risk: Low,
        ssdf: &[],
        implemented: false,
        description: "Checks for contributors from several organizations.",
        scoring_rule: "Not implemented.",
    },
];

pub fn entry(name: CheckName) -> &'static RegistryEntry {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .expect("every check name has a registry entry")
}

pub fn implemented() -> impl Iterator<Item = &'static RegistryEntry> {
    REGISTRY.iter().filter(|e| e.implemented)
}
