//! Forge metadata fixture (`metadata.json`) schema.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewPlatform {
    Github,
    Prow,
    Gerrit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub id: String,
    pub author: String,
    pub committer: String,
    #[serde(default)]
    pub merger: Option<String>,
    pub timestamp: i64,
    #[serde(default)]
    pub approved_review_platforms: BTreeSet<ReviewPlatform>,
    #[serde(default)]
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseRecord {
    pub tag: String,
    pub created_at: i64,
    #[serde(default, rename = "assets")]
    pub asset_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRecord {
    pub name: String,
    pub timestamp: i64,
    #[serde(default)]
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueEvent {
    pub created_at: i64,
    #[serde(default)]
    pub author_association: String,
}

impl IssueEvent {
    /// Collaborators, members and owners count towards maintenance activity.
    pub fn by_maintainer(&self) -> bool {
        matches!(
            self.author_association.to_ascii_uppercase().as_str(),
            "COLLABORATOR" | "MEMBER" | "OWNER"
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contributor {
    pub login: String,
    #[serde(default)]
    pub company: Option<String>,
}

/// Branch protection rules for one branch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectionSettings {
    pub enabled: bool,
    pub block_force_push: bool,
    pub block_deletion: bool,
    pub required_reviewers: u32,
    pub status_checks_required: bool,
    pub dismiss_stale_reviews: bool,
    /// Settings the fixture did not report (typically admin-only); treated as unmet.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub unreported: BTreeSet<String>,
}

#[derive(Deserialize)]
struct RawProtection {
    enabled: Option<bool>,
    block_force_push: Option<bool>,
    block_deletion: Option<bool>,
    required_reviewers: Option<u32>,
    status_checks_required: Option<bool>,
    dismiss_stale_reviews: Option<bool>,
}

impl From<RawProtection> for ProtectionSettings {
    fn from(raw: RawProtection) -> Self {
        let mut unreported = BTreeSet::new();
        let mut flag = |name: &str, v: Option<bool>| {
            v.unwrap_or_else(|| {
                unreported.insert(name.to_string());
                false
            })
        };
        let enabled = flag("enabled", raw.enabled);
        let block_force_push = flag("block_force_push", raw.block_force_push);
        let block_deletion = flag("block_deletion", raw.block_deletion);
        let status_checks_required = flag("status_checks_required", raw.status_checks_required);
        let dismiss_stale_reviews = flag("dismiss_stale_reviews", raw.dismiss_stale_reviews);
        let required_reviewers = raw.required_reviewers.unwrap_or_else(|| {
            unreported.insert("required_reviewers".to_string());
            0
        });
        if !enabled {
            // Disabled protection carries no rules.
            return ProtectionSettings {
                unreported,
                ..ProtectionSettings::default()
            };
        }
        ProtectionSettings {
            enabled,
            block_force_push,
            block_deletion,
            required_reviewers,
            status_checks_required,
            dismiss_stale_reviews,
            unreported,
        }
    }
}

#[derive(Deserialize)]
struct RawMetadata {
    default_branch: String,
    #[serde(default)]
    repo: Option<String>,
    #[serde(default)]
    archived: bool,
    branches: Option<BTreeMap<String, RawProtection>>,
    commits: Option<Vec<CommitRecord>>,
    releases: Option<Vec<ReleaseRecord>>,
    tags: Option<Vec<TagRecord>>,
    issues: Option<Vec<IssueEvent>>,
    contributors: Option<Vec<Contributor>>,
}

/// Which optional arrays the fixture actually supplied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownSections {
    pub branches: bool,
    pub commits: bool,
    pub releases: bool,
    pub tags: bool,
    pub issues: bool,
    pub contributors: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForgeMetadata {
    pub default_branch: String,
    pub repo: Option<String>,
    pub archived: bool,
    pub branches: BTreeMap<String, ProtectionSettings>,
    pub commits: Vec<CommitRecord>,
    pub releases: Vec<ReleaseRecord>,
    pub tags: Vec<TagRecord>,
    pub issues: Vec<IssueEvent>,
    pub contributors: Vec<Contributor>,
    pub known: KnownSections,
}

impl ForgeMetadata {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|message| Error::parse(path, message))
    }

    /// Parses and validates a fixture; the error names the offending field.
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let raw: RawMetadata = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if raw.default_branch.trim().is_empty() {
            return Err("default_branch must not be empty".into());
        }
        let known = KnownSections {
            branches: raw.branches.is_some(),
            commits: raw.commits.is_some(),
            releases: raw.releases.is_some(),
            tags: raw.tags.is_some(),
            issues: raw.issues.is_some(),
            contributors: raw.contributors.is_some(),
        };

        let mut commits = raw.commits.unwrap_or_default();
        for (i, c) in commits.iter().enumerate() {
            if c.timestamp <= 0 {
                return Err(format!("commits[{i}].timestamp must be positive"));
            }
        }
        commits.sort_by(|a, b| b.timestamp.cmp(&a.timestamp).then_with(|| a.id.cmp(&b.id)));

        let mut releases = raw.releases.unwrap_or_default();
        for (i, r) in releases.iter().enumerate() {
            if r.tag.is_empty() {
                return Err(format!("releases[{i}].tag must not be empty"));
            }
        }
        releases.sort_by(|a, b| {
            b.created_at
                .cmp(&a.created_at)
                .then_with(|| a.tag.cmp(&b.tag))
        });

        let mut tags = raw.tags.unwrap_or_default();
        tags.sort_by(|a, b| {
            b.timestamp
                .cmp(&a.timestamp)
                .then_with(|| a.name.cmp(&b.name))
        });

        Ok(ForgeMetadata {
            default_branch: raw.default_branch,
            repo: raw.repo,
            archived: raw.archived,
            branches: raw
                .branches
                .unwrap_or_default()
                .into_iter()
                .map(|(k, v)| (k, v.into()))
                .collect(),
            commits,
            releases,
            tags,
            issues: raw.issues.unwrap_or_default(),
            contributors: raw.contributors.unwrap_or_default(),
            known,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_default_branch_names_field() {
        let err = ForgeMetadata::from_json(r#"{"archived": false}"#).unwrap_err();
        assert!(err.contains("default_branch"), "{err}");
    }

    #[test]
    fn sorts_newest_first() {
        let m = ForgeMetadata::from_json(
            r#"{"default_branch":"main",
                "commits":[
                  {"id":"a","author":"x","committer":"x","timestamp":100},
                  {"id":"b","author":"x","committer":"x","timestamp":300},
                  {"id":"c","author":"x","committer":"x","timestamp":200}],
                "releases":[{"tag":"v1","created_at":5},{"tag":"v2","created_at":9}]}"#,
        )
        .unwrap();
        let ids: Vec<_> = m.commits.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["b", "c", "a"]);
        let tags: Vec<_> = m.releases.iter().map(|r| r.tag.as_str()).collect();
        assert_eq!(tags, ["v2", "v1"]);
        assert!(m.known.commits && m.known.releases && !m.known.tags);
    }

    #[test]
    fn non_positive_timestamp_rejected() {
        let err = ForgeMetadata::from_json(
            r#"{"default_branch":"main","commits":[{"id":"a","author":"x","committer":"x","timestamp":0}]}"#,
        )
        .unwrap_err();
        assert!(err.contains("commits[0].timestamp"), "{err}");
    }

    #[test]
    fn disabled_protection_clears_flags() {
        let m = ForgeMetadata::from_json(
            r#"{"default_branch":"main","branches":{"main":{"enabled":false,"block_force_push":true,"required_reviewers":3}}}"#,
        )
        .unwrap();
        let p = &m.branches["main"];
        assert!(!p.block_force_push);
        assert_eq!(p.required_reviewers, 0);
    }

    #[test]
    fn unreported_protection_fields_recorded() {
        let m = ForgeMetadata::from_json(
            r#"{"default_branch":"main","branches":{"main":{"enabled":true,"block_force_push":true,"block_deletion":true}}}"#,
        )
        .unwrap();
        let p = &m.branches["main"];
        assert!(p.unreported.contains("dismiss_stale_reviews"));
        assert!(p.unreported.contains("required_reviewers"));
        assert!(!p.unreported.contains("enabled"));
    }

    #[test]
    fn bad_platform_rejected() {
        let err = ForgeMetadata::from_json(
            r#"{"default_branch":"main","commits":[{"id":"a","author":"x","committer":"x","timestamp":1,"approved_review_platforms":["gitlab"]}]}"#,
        )
        .unwrap_err();
        assert!(err.contains("gitlab"), "{err}");
    }
}
