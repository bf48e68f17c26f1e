//! Checks backed by external intelligence: open vulnerabilities, OSS-Fuzz
//! enrolment and best-practices badges.
//!
//! Intelligence is read from a directory of local files:
//!
//! * `osv.json`: `{ "repos": { "github.com/owner/name": ["OSV-ID", ...] } }`
//! * `ossfuzz.txt`: one repository URL per line, `#` starts a comment
//! * `cii.json`: `{ "github.com/owner/name": "passing" }`
//!
//! A missing file marks that source *absent*, which is different from an
//! empty one: absent sources make the dependent check inconclusive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::check::{CheckName, CheckResult, Detail, Score};
use crate::error::{Error, Result};
use crate::repo::RepoSnapshot;

/// Normalized `host/owner/name`, lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepoId(String);

impl RepoId {
    /// Accepts `host/owner/name`, `https://host/owner/name(.git)`,
    /// `git@host:owner/name.git` and `ssh://git@host/owner/name`.
    pub fn parse(raw: &str) -> Result<RepoId> {
        let mut s = raw.trim().to_ascii_lowercase();
        for scheme in ["https://", "http://", "ssh://", "git://", "git+https://"] {
            if let Some(rest) = s.strip_prefix(scheme) {
                s = rest.to_string();
                break;
            }
        }
        if let Some((user, rest)) = s.split_once('@') {
            if !user.contains('/') {
                s = rest.replacen(':', "/", 1);
            }
        }
        let s = s.trim_end_matches('/');
        let s = s.strip_suffix(".git").unwrap_or(s);
        let parts: Vec<&str> = s.split('/').filter(|p| !p.is_empty()).collect();
        if parts.len() != 3 || parts.iter().any(|p| p.chars().any(char::is_whitespace)) {
            return Err(Error::Input(format!(
                "{raw:?} is not a host/owner/name repository identity"
            )));
        }
        Ok(RepoId(parts.join("/")))
    }

    /// Identity for a checkout with no known forge location.
    pub fn local(dir_name: &str) -> RepoId {
        let name: String = dir_name
            .to_ascii_lowercase()
            .chars()
            .map(|c| {
                if c == '/' || c.is_whitespace() {
                    '-'
                } else {
                    c
                }
            })
            .collect();
        RepoId(format!("localhost/local/{name}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RepoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for RepoId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RepoId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RepoId::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadgeLevel {
    InProgress,
    Passing,
    Silver,
    Gold,
}

impl BadgeLevel {
    pub fn score(self) -> Score {
        let v = match self {
            BadgeLevel::InProgress => 2,
            BadgeLevel::Passing => 5,
            BadgeLevel::Silver => 7,
            BadgeLevel::Gold => 10,
        };
        Score::saturating(v)
    }
}

/// Lookup seam shared by the file-backed store and any live client.
///
/// `None` at the outer level means the source is unavailable.
pub trait IntelSource {
    fn open_vulnerabilities(&self, repo: &RepoId) -> Option<Vec<String>>;
    fn in_oss_fuzz(&self, repo: &RepoId) -> Option<bool>;
    fn cii_badge(&self, repo: &RepoId) -> Option<Option<BadgeLevel>>;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntelStore {
    pub osv: Option<BTreeMap<RepoId, Vec<String>>>,
    pub ossfuzz: Option<BTreeSet<RepoId>>,
    pub cii: Option<BTreeMap<RepoId, BadgeLevel>>,
}

impl IntelStore {
    /// A store with every source absent.
    pub fn absent() -> IntelStore {
        IntelStore::default()
    }
}

impl IntelSource for IntelStore {
    fn open_vulnerabilities(&self, repo: &RepoId) -> Option<Vec<String>> {
        self.osv
            .as_ref()
            .map(|m| m.get(repo).cloned().unwrap_or_default())
    }

    fn in_oss_fuzz(&self, repo: &RepoId) -> Option<bool> {
        self.ossfuzz.as_ref().map(|s| s.contains(repo))
    }

    fn cii_badge(&self, repo: &RepoId) -> Option<Option<BadgeLevel>> {
        self.cii.as_ref().map(|m| m.get(repo).copied())
    }
}

#[derive(Deserialize)]
struct OsvFile {
    repos: BTreeMap<String, Vec<String>>,
}

/// Reads whichever of `osv.json`, `ossfuzz.txt` and `cii.json` exist in `dir`.
pub fn load_intel(dir: &Path) -> Result<IntelStore> {
    if !dir.is_dir() {
        return Err(Error::Input(format!(
            "intel directory {} does not exist",
            dir.display()
        )));
    }
    let mut store = IntelStore::absent();

    if let Some((path, text)) = read_optional(&dir.join("osv.json"))? {
        let raw: OsvFile =
            serde_json::from_str(&text).map_err(|e| Error::parse(&path, e.to_string()))?;
        let mut map: BTreeMap<RepoId, Vec<String>> = BTreeMap::new();
        for (repo, ids) in raw.repos {
            let id = RepoId::parse(&repo)
                .map_err(|e| Error::parse(&path, format!("line {}: {e}", line_of(&text, &repo))))?;
            let entry = map.entry(id).or_default();
            entry.extend(ids);
            let unique: BTreeSet<String> = entry.drain(..).collect();
            entry.extend(unique);
        }
        store.osv = Some(map);
    }

    if let Some((path, text)) = read_optional(&dir.join("ossfuzz.txt"))? {
        let mut set = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let id = RepoId::parse(line)
                .map_err(|e| Error::parse(&path, format!("line {}: {e}", i + 1)))?;
            set.insert(id);
        }
        store.ossfuzz = Some(set);
    }

    if let Some((path, text)) = read_optional(&dir.join("cii.json"))? {
        let raw: BTreeMap<String, BadgeLevel> =
            serde_json::from_str(&text).map_err(|e| Error::parse(&path, e.to_string()))?;
        let mut map = BTreeMap::new();
        for (repo, level) in raw {
            let id = RepoId::parse(&repo)
                .map_err(|e| Error::parse(&path, format!("line {}: {e}", line_of(&text, &repo))))?;
            map.insert(id, level);
        }
        store.cii = Some(map);
    }
    Ok(store)
}

fn read_optional(path: &Path) -> Result<Option<(std::path::PathBuf, String)>> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(Some((path.to_path_buf(), text))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines()
        .position(|l| l.contains(needle))
        .map_or(1, |i| i + 1)
}

pub fn check_vulnerabilities(snapshot: &RepoSnapshot, intel: &impl IntelSource) -> CheckResult {
    let name = CheckName::Vulnerabilities;
    if snapshot.is_empty() {
        return CheckResult::inconclusive(name, "empty repository");
    }
    let Some(ids) = intel.open_vulnerabilities(&snapshot.repo) else {
        return CheckResult::inconclusive(name, "no vulnerability data available");
    };
    let n = ids.len();
    let score = Score::saturating(10 - n as i64);
    let details = ids
        .iter()
        .map(|id| Detail::note(format!("open vulnerability {id}")))
        .collect();
    CheckResult::new(
        name,
        score,
        format!("{n} existing vulnerabilities detected"),
    )
    .with_details(details)
}

pub fn check_fuzzing(snapshot: &RepoSnapshot, intel: &impl IntelSource) -> CheckResult {
    let name = CheckName::Fuzzing;
    match intel.in_oss_fuzz(&snapshot.repo) {
        None => CheckResult::inconclusive(name, "no fuzzing project list available"),
        Some(true) => CheckResult::new(name, Score::MAX, "project is fuzzed in OSS-Fuzz"),
        Some(false) => CheckResult::new(name, Score::MIN, "project is not fuzzed in OSS-Fuzz"),
    }
}

pub fn check_cii_best_practices(snapshot: &RepoSnapshot, intel: &impl IntelSource) -> CheckResult {
    let name = CheckName::CiiBestPractices;
    match intel.cii_badge(&snapshot.repo) {
        None => CheckResult::inconclusive(name, "no badge registry available"),
        Some(None) => CheckResult::new(name, Score::MIN, "no best-practices badge detected"),
        Some(Some(level)) => {
            let label = serde_json::to_value(level)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            CheckResult::new(name, level.score(), format!("badge detected: {label}"))
        }
    }
}
