//! Shared vocabulary for check outcomes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A check score: `-1` (inconclusive) or an integer in `0..=10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(i8);

impl Score {
    pub const INCONCLUSIVE: Score = Score(-1);
    pub const MIN: Score = Score(0);
    pub const MAX: Score = Score(10);

    pub fn new(value: i32) -> Result<Score> {
        if value == -1 || (0..=10).contains(&value) {
            Ok(Score(value as i8))
        } else {
            Err(Error::Input(format!(
                "score {value} is outside {{-1}} and 0..=10"
            )))
        }
    }

    /// Clamps into `0..=10`.
    pub fn saturating(value: i64) -> Score {
        Score(value.clamp(0, 10) as i8)
    }

    pub fn value(self) -> i32 {
        i32::from(self.0)
    }

    pub fn is_inconclusive(self) -> bool {
        self.0 < 0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.0)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i32::deserialize(d)?;
        Score::new(v).map_err(serde::de::Error::custom)
    }
}

/// `round(10 * num / den)`, rounding halves away from zero. `den` must be > 0.
pub fn ratio_score(num: usize, den: usize) -> Score {
    assert!(den > 0, "ratio_score with zero denominator");
    let num = num.min(den) as u64;
    let den = den as u64;
    Score(((20 * num + den) / (2 * den)) as i8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskLevel {
    Critical,
    High,
    Medium,
    Low,
}

impl RiskLevel {
    /// Published weight of the risk level.
    pub fn weight(self) -> f64 {
        f64::from(self.quarter_weight()) * 2.5
    }

    /// Weight in units of 2.5, which keeps aggregate arithmetic in integers.
    pub fn quarter_weight(self) -> u32 {
        match self {
            RiskLevel::Critical => 4,
            RiskLevel::High => 3,
            RiskLevel::Medium => 2,
            RiskLevel::Low => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RiskLevel::Critical => "critical",
            RiskLevel::High => "high",
            RiskLevel::Medium => "medium",
            RiskLevel::Low => "low",
        }
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Every check name known to the registry, in registry order
/// (critical risk first, low risk last).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckName {
    DangerousWorkflow,
    Vulnerabilities,
    BinaryArtifacts,
    TokenPermissions,
    CodeReview,
    Maintained,
    BranchProtection,
    DependencyUpdateTool,
    SignedReleases,
    PinnedDependencies,
    SecurityPolicy,
    Packaging,
    Fuzzing,
    Sast,
    License,
    CiiBestPractices,
    CiTests,
    Contributors,
}

impl CheckName {
    pub const ALL: [CheckName; 18] = [
        CheckName::DangerousWorkflow,
        CheckName::Vulnerabilities,
        CheckName::BinaryArtifacts,
        CheckName::TokenPermissions,
        CheckName::CodeReview,
        CheckName::Maintained,
        CheckName::BranchProtection,
        CheckName::DependencyUpdateTool,
        CheckName::SignedReleases,
        CheckName::PinnedDependencies,
        CheckName::SecurityPolicy,
        CheckName::Packaging,
        CheckName::Fuzzing,
        CheckName::Sast,
        CheckName::License,
        CheckName::CiiBestPractices,
        CheckName::CiTests,
        CheckName::Contributors,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::DangerousWorkflow => "Dangerous-Workflow",
            CheckName::Vulnerabilities => "Vulnerabilities",
            CheckName::BinaryArtifacts => "Binary-Artifacts",
            CheckName::TokenPermissions => "Token-Permissions",
            CheckName::CodeReview => "Code-Review",
            CheckName::Maintained => "Maintained",
            CheckName::BranchProtection => "Branch-Protection",
            CheckName::DependencyUpdateTool => "Dependency-Update-Tool",
            CheckName::SignedReleases => "Signed-Releases",
            CheckName::PinnedDependencies => "Pinned-Dependencies",
            CheckName::SecurityPolicy => "Security-Policy",
            CheckName::Packaging => "Packaging",
            CheckName::Fuzzing => "Fuzzing",
            CheckName::Sast => "SAST",
            CheckName::License => "License",
            CheckName::CiiBestPractices => "CII-Best-Practices",
            CheckName::CiTests => "CI-Tests",
            CheckName::Contributors => "Contributors",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    /// Case-insensitive; `_` and `-` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().replace('_', "-").to_ascii_lowercase();
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str().to_ascii_lowercase() == wanted)
            .ok_or_else(|| Error::Input(format!("unknown check name {s:?}")))
    }
}

impl Serialize for CheckName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CheckName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One line of supporting evidence attached to a check result.
///
/// Serialized as a single string: `path:line: text`, `path: text` or `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detail {
    pub path: Option<String>,
    pub line: Option<usize>,
    pub text: String,
}

impl Detail {
    pub fn note(text: impl Into<String>) -> Self {
        Detail {
            path: None,
            line: None,
            text: text.into(),
        }
    }

    pub fn at(path: impl Into<String>, line: usize, text: impl Into<String>) -> Self {
        Detail {
            path: Some(path.into()),
            line: Some(line),
            text: text.into(),
        }
    }

    pub fn in_file(path: impl Into<String>, text: impl Into<String>) -> Self {
        Detail {
            path: Some(path.into()),
            line: None,
            text: text.into(),
        }
    }

    fn sort_key(&self) -> (Option<&str>, Option<usize>) {
        (self.path.as_deref(), self.line)
    }
}

impl PartialOrd for Detail {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Detail {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.text.cmp(&other.text))
    }
}

impl fmt::Display for Detail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.path, self.line) {
            (Some(p), Some(l)) => write!(f, "{p}:{l}: {}", self.text),
            (Some(p), None) => write!(f, "{p}: {}", self.text),
            _ => f.write_str(&self.text),
        }
    }
}

impl Serialize for Detail {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Detail {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // Already rendered; keep the text verbatim so re-serialization is lossless.
        Ok(Detail::note(String::deserialize(d)?))
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub risk: RiskLevel,
    pub score: Score,
    pub reason: String,
    pub details: Vec<Detail>,
}

impl CheckResult {
    pub fn new(name: CheckName, score: Score, reason: impl Into<String>) -> Self {
        CheckResult {
            name,
            risk: crate::scoring::registry::entry(name).risk,
            score,
            reason: reason.into(),
            details: Vec::new(),
        }
    }

    pub fn inconclusive(name: CheckName, reason: impl Into<String>) -> Self {
        CheckResult::new(name, Score::INCONCLUSIVE, reason)
    }

    /// Attaches details, sorted by path then line.
    pub fn with_details(mut self, mut details: Vec<Detail>) -> Self {
        details.sort();
        details.dedup();
        self.details = details;
        self
    }
}
