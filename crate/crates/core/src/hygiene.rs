//! Project hygiene checks: license, security policy, maintenance activity,
//! code review, branch protection, signed releases and packaging.
//!
//! Checks that need forge metadata return `-1` when the snapshot was loaded
//! without a metadata fixture.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::check::{ratio_score, CheckName, CheckResult, Detail, Score};
use crate::repo::{ProtectionSettings, RepoSnapshot};
use crate::workflow::PublishSignal;

const DAY: i64 = 86_400;
const MAINTAINED_WINDOW: i64 = 90 * DAY;
/// Roughly the number of weeks in the maintenance window.
const MAINTAINED_DIVISOR: i64 = 13;
const CODE_REVIEW_WINDOW: usize = 30;
const SIGNED_RELEASE_WINDOW: usize = 5;

const LICENSE_STEMS: &[&str] = &["license", "licence", "copying", "copyright"];
const LICENSE_EXTENSIONS: &[&str] = &["txt", "md", "html"];
const SIGNATURE_SUFFIXES: &[&str] = &[".minisig", ".asc", ".sig", ".sign"];

static README_LICENSE_HEADING: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?im)^(?:#{1,6}\s*licen[cs](?:e|ing)\b|licen[cs](?:e|ing)\s*\n[=\-~^]{3,}\s*$|\.\.\s*_licen[cs]e|spdx-license-identifier:)")
        .expect("readme regex")
});

static SETUP_LICENSE_FIELD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"\blicense\s*=\s*['"(]"#).expect("setup regex"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LicenseSource {
    DedicatedFile,
    LicensesDir,
    ReadmeSection,
    SetupField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LicenseEvidence {
    pub source: LicenseSource,
    pub path: String,
    pub detail: String,
}

pub fn find_license_evidence(snapshot: &RepoSnapshot) -> Vec<LicenseEvidence> {
    let mut evidence = Vec::new();
    for f in &snapshot.files {
        let lower = f.path.to_ascii_lowercase();
        if f.is_top_level() {
            let (stem, ext) = match lower.rsplit_once('.') {
                Some((s, e)) if !s.is_empty() => (s, Some(e)),
                _ => (lower.as_str(), None),
            };
            if LICENSE_STEMS.contains(&stem) && ext.is_none_or(|e| LICENSE_EXTENSIONS.contains(&e))
            {
                evidence.push(LicenseEvidence {
                    source: LicenseSource::DedicatedFile,
                    path: f.path.clone(),
                    detail: "license file".into(),
                });
                continue;
            }
        }
        if lower.starts_with("licenses/") {
            evidence.push(LicenseEvidence {
                source: LicenseSource::LicensesDir,
                path: f.path.clone(),
                detail: "file in LICENSES directory".into(),
            });
            continue;
        }
        if !f.is_top_level() {
            continue;
        }
        let Some(text) = f.text() else { continue };
        if lower.starts_with("readme") && README_LICENSE_HEADING.is_match(text) {
            evidence.push(LicenseEvidence {
                source: LicenseSource::ReadmeSection,
                path: f.path.clone(),
                detail: "license section in README".into(),
            });
        } else if lower == "setup.py" && SETUP_LICENSE_FIELD.is_match(text) {
            evidence.push(LicenseEvidence {
                source: LicenseSource::SetupField,
                path: f.path.clone(),
                detail: "license argument in setup.py".into(),
            });
        } else if lower == "pyproject.toml" && pyproject_declares_license(text) {
            evidence.push(LicenseEvidence {
                source: LicenseSource::SetupField,
                path: f.path.clone(),
                detail: "license field in pyproject.toml".into(),
            });
        }
    }
    evidence
}

fn pyproject_declares_license(text: &str) -> bool {
    let Ok(doc) = text.parse::<toml::Table>() else {
        return false;
    };
    let project = doc.get("project").and_then(|p| p.get("license"));
    let poetry = doc
        .get("tool")
        .and_then(|t| t.get("poetry"))
        .and_then(|p| p.get("license"));
    project.is_some() || poetry.is_some()
}

pub fn check_license(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::License;
    let evidence = find_license_evidence(snapshot);
    let details = evidence
        .iter()
        .map(|e| Detail::in_file(&e.path, &e.detail))
        .collect();
    let strong = evidence.iter().any(|e| {
        matches!(
            e.source,
            LicenseSource::DedicatedFile | LicenseSource::LicensesDir
        )
    });
    if strong {
        CheckResult::new(name, Score::MAX, "license file detected").with_details(details)
    } else if !evidence.is_empty() {
        CheckResult::new(
            name,
            Score::saturating(9),
            "license declared without a dedicated license file",
        )
        .with_details(details)
    } else {
        CheckResult::new(name, Score::MIN, "license file not detected")
    }
}

pub fn check_security_policy(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::SecurityPolicy;
    let found = snapshot.files.iter().find(|f| {
        let lower = f.path.to_ascii_lowercase();
        let file = lower.strip_prefix(".github/").unwrap_or(&lower);
        !file.contains('/') && (file == "security.md" || file == "security.rst")
    });
    match found {
        Some(f) => CheckResult::new(name, Score::MAX, "security policy file detected")
            .with_details(vec![Detail::in_file(&f.path, "security policy")]),
        None => CheckResult::new(name, Score::MIN, "security policy file not detected"),
    }
}

pub fn check_maintained(snapshot: &RepoSnapshot, now: i64) -> CheckResult {
    let name = CheckName::Maintained;
    if !snapshot.metadata_present {
        return CheckResult::inconclusive(name, "no repository metadata");
    }
    if snapshot.archived {
        return CheckResult::new(name, Score::MIN, "repository is archived");
    }
    if !snapshot.known.commits && !snapshot.known.issues {
        return CheckResult::inconclusive(name, "commit and issue activity unknown");
    }
    let window = (now - MAINTAINED_WINDOW)..=now;
    let commits = snapshot
        .commits
        .iter()
        .filter(|c| window.contains(&c.timestamp))
        .count() as i64;
    let issues = snapshot
        .issues
        .iter()
        .filter(|i| i.by_maintainer() && window.contains(&i.created_at))
        .count() as i64;
    let activity = commits + issues;
    let score = Score::saturating((10 * activity) / MAINTAINED_DIVISOR);
    CheckResult::new(
        name,
        score,
        format!("{commits} commits and {issues} maintainer issue events in the last 90 days"),
    )
}

pub fn check_code_review(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::CodeReview;
    if !snapshot.metadata_present {
        return CheckResult::inconclusive(name, "no repository metadata");
    }
    if snapshot.commits.is_empty() {
        return CheckResult::inconclusive(name, "no commits found");
    }
    if let Some(p) = snapshot.branch_protection.get(&snapshot.default_branch) {
        if p.enabled && p.required_reviewers >= 1 {
            return CheckResult::new(
                name,
                Score::MAX,
                format!(
                    "branch protection on {} requires {} reviewer(s)",
                    snapshot.default_branch, p.required_reviewers
                ),
            );
        }
    }
    let considered = &snapshot.commits[..snapshot.commits.len().min(CODE_REVIEW_WINDOW)];
    let reviewed = considered
        .iter()
        .filter(|c| {
            !c.approved_review_platforms.is_empty()
                || c.merger.as_ref().is_some_and(|m| *m != c.committer)
        })
        .count();
    let mut details = Vec::new();
    let authors: BTreeSet<&str> = considered.iter().map(|c| c.author.as_str()).collect();
    if authors.len() == 1 {
        details.push(Detail::note(format!(
            "single maintainer ({}); code review may not be applicable",
            considered[0].author
        )));
    }
    let score = Score::saturating((10 * reviewed / considered.len()) as i64);
    CheckResult::new(
        name,
        score,
        format!("{reviewed} of {} recent commits reviewed", considered.len()),
    )
    .with_details(details)
}

/// Highest fully satisfied protection tier (0..=5). Each tier requires all
/// lower tiers.
pub fn protection_tier(p: &ProtectionSettings) -> u8 {
    let tiers = [
        p.enabled && p.block_force_push && p.block_deletion,
        p.required_reviewers >= 1,
        p.status_checks_required,
        p.required_reviewers >= 2,
        p.dismiss_stale_reviews,
    ];
    tiers.iter().take_while(|t| **t).count() as u8
}

pub fn check_branch_protection(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::BranchProtection;
    if !snapshot.metadata_present {
        return CheckResult::inconclusive(name, "no repository metadata");
    }
    let release_tags: BTreeSet<&str> = snapshot.releases.iter().map(|r| r.tag.as_str()).collect();
    let release_branches: Vec<(&String, &ProtectionSettings)> = snapshot
        .branch_protection
        .iter()
        .filter(|(b, _)| **b != snapshot.default_branch)
        .filter(|(b, _)| b.starts_with("release") || release_tags.iter().any(|t| b.ends_with(*t)))
        .collect();
    let Some(default) = snapshot.branch_protection.get(&snapshot.default_branch) else {
        return CheckResult::inconclusive(
            name,
            format!("could not locate branch {:?}", snapshot.default_branch),
        );
    };
    let tier = protection_tier(default);
    let mut details: Vec<Detail> = release_branches
        .iter()
        .map(|(b, p)| {
            Detail::note(format!(
                "release branch {b}: tier {} of 5",
                protection_tier(p)
            ))
        })
        .collect();
    if !default.unreported.is_empty() {
        details.push(Detail::note(format!(
            "settings not reported (admin-only?) treated as unmet: {}",
            default
                .unreported
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let reason = if !default.enabled {
        format!(
            "branch protection not enabled on {}",
            snapshot.default_branch
        )
    } else {
        format!(
            "branch {} satisfies tier {tier} of 5",
            snapshot.default_branch
        )
    };
    CheckResult::new(name, Score::saturating(2 * i64::from(tier)), reason).with_details(details)
}

fn is_signature(asset: &str) -> bool {
    let lower = asset.to_ascii_lowercase();
    SIGNATURE_SUFFIXES.iter().any(|s| lower.ends_with(s))
}

pub fn check_signed_releases(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::SignedReleases;
    if !snapshot.metadata_present {
        return CheckResult::inconclusive(name, "no repository metadata");
    }
    if snapshot.releases.is_empty() && snapshot.tags.is_empty() {
        return CheckResult::inconclusive(name, "no releases found");
    }
    let mut details = Vec::new();
    let (signed, considered, what) = if !snapshot.releases.is_empty() {
        let recent = &snapshot.releases[..snapshot.releases.len().min(SIGNED_RELEASE_WINDOW)];
        let mut signed = 0;
        for r in recent {
            if r.asset_names.iter().any(|a| is_signature(a)) {
                signed += 1;
            } else {
                details.push(Detail::note(format!(
                    "release {} has no signature asset",
                    r.tag
                )));
            }
        }
        (signed, recent.len(), "releases")
    } else {
        let recent = &snapshot.tags[..snapshot.tags.len().min(SIGNED_RELEASE_WINDOW)];
        let mut signed = 0;
        for t in recent {
            if t.verified {
                signed += 1;
            } else {
                details.push(Detail::note(format!("tag {} is not verified", t.name)));
            }
        }
        (signed, recent.len(), "tagged releases")
    };
    CheckResult::new(
        name,
        ratio_score(signed, considered),
        format!("{signed} of {considered} recent {what} are signed"),
    )
    .with_details(details)
}

pub fn check_packaging(_snapshot: &RepoSnapshot, publish_signals: &[PublishSignal]) -> CheckResult {
    let name = CheckName::Packaging;
    if publish_signals.is_empty() {
        return CheckResult::inconclusive(name, "no publishing workflow detected");
    }
    let details = publish_signals
        .iter()
        .map(|s| {
            Detail::at(
                &s.path,
                s.line,
                format!("package published via {}", s.mechanism.as_str()),
            )
        })
        .collect();
    CheckResult::new(name, Score::MAX, "publishing workflow detected").with_details(details)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intel::RepoId;
    use crate::repo::ForgeMetadata;
    use crate::workflow::detect_publish_signals;
    use proptest::prelude::*;

    fn files_snap(files: &[(&str, &str)]) -> RepoSnapshot {
        RepoSnapshot::from_memory(
            RepoId::local("t"),
            files
                .iter()
                .map(|(p, c)| (p.to_string(), c.as_bytes().to_vec())),
            None,
        )
    }

    fn meta_snap(json: &str) -> RepoSnapshot {
        RepoSnapshot::from_memory(
            RepoId::local("t"),
            [("README.md", "x")],
            Some(ForgeMetadata::from_json(json).unwrap()),
        )
    }

    #[test]
    fn license_files() {
        assert_eq!(
            check_license(&files_snap(&[("LICENSE.md", "MIT")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_license(&files_snap(&[("COPYING", "GPL")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_license(&files_snap(&[("licence.html", "x")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_license(&files_snap(&[("LICENSES/MIT.txt", "MIT")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_license(&files_snap(&[("LICENSE.rtf", "x")]))
                .score
                .value(),
            0
        );
        assert_eq!(
            check_license(&files_snap(&[("docs/LICENSE", "x")]))
                .score
                .value(),
            0
        );
    }

    #[test]
    fn license_weaker_evidence() {
        let readme = files_snap(&[("README.md", "# proj\n\n## License\nMIT\n")]);
        assert_eq!(check_license(&readme).score.value(), 9);
        let rst = files_snap(&[("README.rst", "Proj\n====\n\nLicense\n-------\nBSD\n")]);
        assert_eq!(check_license(&rst).score.value(), 9);
        let setup = files_snap(&[("setup.py", "setup(name='x', license='MIT')\n")]);
        assert_eq!(check_license(&setup).score.value(), 9);
        let pyproject = files_snap(&[(
            "pyproject.toml",
            "[project]\nname='x'\nlicense = {text = \"MIT\"}\n",
        )]);
        assert_eq!(check_license(&pyproject).score.value(), 9);
        let nothing = files_snap(&[("README.md", "# proj\nno legal text here\n")]);
        assert_eq!(check_license(&nothing).score.value(), 0);
    }

    #[test]
    fn security_policy_locations() {
        assert_eq!(
            check_security_policy(&files_snap(&[("SECURITY.md", "x")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_security_policy(&files_snap(&[(".github/security.md", "x")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_security_policy(&files_snap(&[("Security.rst", "x")]))
                .score
                .value(),
            10
        );
        assert_eq!(
            check_security_policy(&files_snap(&[("docs/security.md", "x")]))
                .score
                .value(),
            0
        );
    }

    fn commits_json(times: &[i64]) -> String {
        let items: Vec<String> = times
            .iter()
            .enumerate()
            .map(|(i, t)| {
                format!(r#"{{"id":"c{i}","author":"a","committer":"a","timestamp":{t}}}"#)
            })
            .collect();
        format!(
            r#"{{"default_branch":"main","commits":[{}]}}"#,
            items.join(",")
        )
    }

    const NOW: i64 = 1_700_000_000;

    #[test]
    fn maintained_scores() {
        let weekly: Vec<i64> = (0..13).map(|w| NOW - w * 7 * DAY).collect();
        assert_eq!(
            check_maintained(&meta_snap(&commits_json(&weekly)), NOW)
                .score
                .value(),
            10
        );
        let six: Vec<i64> = (0..6).map(|w| NOW - w * DAY).collect();
        assert_eq!(
            check_maintained(&meta_snap(&commits_json(&six)), NOW)
                .score
                .value(),
            4
        );
        let old = [NOW - 200 * DAY];
        assert_eq!(
            check_maintained(&meta_snap(&commits_json(&old)), NOW)
                .score
                .value(),
            0
        );
        assert_eq!(
            check_maintained(&files_snap(&[("a", "b")]), NOW)
                .score
                .value(),
            -1
        );
        let archived = r#"{"default_branch":"main","archived":true,"commits":[]}"#;
        assert_eq!(check_maintained(&meta_snap(archived), NOW).score.value(), 0);
    }

    #[test]
    fn maintained_counts_only_maintainer_issues() {
        let json = format!(
            r#"{{"default_branch":"main","commits":[],"issues":[
                {{"created_at":{n},"author_association":"MEMBER"}},
                {{"created_at":{n},"author_association":"OWNER"}},
                {{"created_at":{n},"author_association":"NONE"}},
                {{"created_at":{n},"author_association":"CONTRIBUTOR"}}]}}"#,
            n = NOW - DAY
        );
        // 2 qualifying events: floor(20 / 13) = 1.
        assert_eq!(check_maintained(&meta_snap(&json), NOW).score.value(), 1);
    }

    fn review_json(reviewed: usize, total: usize, protection: &str) -> String {
        let items: Vec<String> = (0..total)
            .map(|i| {
                let merger = if i < reviewed { "\"maintainer\"" } else { "\"dev\"" };
                format!(
                    r#"{{"id":"c{i}","author":"dev{}","committer":"dev","merger":{merger},"timestamp":{}}}"#,
                    i % 3,
                    1000 + i
                )
            })
            .collect();
        format!(
            r#"{{"default_branch":"main","branches":{{"main":{protection}}},"commits":[{}]}}"#,
            items.join(",")
        )
    }

    const UNPROTECTED: &str = r#"{"enabled":false}"#;

    #[test]
    fn code_review_scan() {
        assert_eq!(
            check_code_review(&meta_snap(&review_json(0, 30, UNPROTECTED)))
                .score
                .value(),
            0
        );
        // Newest 15 of 30 reviewed.
        let mut json = review_json(0, 30, UNPROTECTED);
        for i in 15..30 {
            json = json.replace(
                &format!(
                    r#""id":"c{i}","author":"dev{}","committer":"dev","merger":"dev""#,
                    i % 3
                ),
                &format!(
                    r#""id":"c{i}","author":"dev{}","committer":"dev","merger":"lead""#,
                    i % 3
                ),
            );
        }
        assert_eq!(check_code_review(&meta_snap(&json)).score.value(), 5);
    }

    #[test]
    fn code_review_platform_approvals() {
        let json = r#"{"default_branch":"main","commits":[
            {"id":"a","author":"x","committer":"x","timestamp":2,"approved_review_platforms":["gerrit"]},
            {"id":"b","author":"x","committer":"x","timestamp":1}]}"#;
        let r = check_code_review(&meta_snap(json));
        assert_eq!(r.score.value(), 5);
        assert!(r.details[0].text.contains("single maintainer"));
    }

    #[test]
    fn code_review_protection_short_circuits() {
        let prot = r#"{"enabled":true,"block_force_push":true,"block_deletion":true,"required_reviewers":1,"status_checks_required":false,"dismiss_stale_reviews":false}"#;
        assert_eq!(
            check_code_review(&meta_snap(&review_json(0, 30, prot)))
                .score
                .value(),
            10
        );
    }

    #[test]
    fn code_review_inconclusive_cases() {
        assert_eq!(
            check_code_review(&files_snap(&[("a", "b")])).score.value(),
            -1
        );
        assert_eq!(
            check_code_review(&meta_snap(r#"{"default_branch":"main"}"#))
                .score
                .value(),
            -1
        );
    }

    fn protection(flags: [bool; 4], reviewers: u32) -> ProtectionSettings {
        ProtectionSettings {
            enabled: flags[0],
            block_force_push: flags[1],
            block_deletion: flags[2],
            required_reviewers: reviewers,
            status_checks_required: flags[3],
            dismiss_stale_reviews: false,
            unreported: BTreeSet::new(),
        }
    }

    fn bp_snap(p: &ProtectionSettings) -> RepoSnapshot {
        let mut s = meta_snap(r#"{"default_branch":"main"}"#);
        s.branch_protection.insert("main".into(), p.clone());
        s
    }

    #[test]
    fn branch_protection_tiers() {
        let mut p = protection([false; 4], 0);
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 0);
        p = protection([true, true, true, false], 0);
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 2);
        p = protection([true, true, true, false], 1);
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 4);
        p = protection([true, true, true, true], 1);
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 6);
        p = protection([true, true, true, true], 2);
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 8);
        p.dismiss_stale_reviews = true;
        assert_eq!(check_branch_protection(&bp_snap(&p)).score.value(), 10);
        // Higher-tier settings without the lower tier earn nothing.
        let mut skip = protection([true, false, true, true], 3);
        skip.dismiss_stale_reviews = true;
        assert_eq!(check_branch_protection(&bp_snap(&skip)).score.value(), 0);
    }

    #[test]
    fn branch_protection_inconclusive() {
        assert_eq!(
            check_branch_protection(&files_snap(&[("a", "b")]))
                .score
                .value(),
            -1
        );
        assert_eq!(
            check_branch_protection(&meta_snap(r#"{"default_branch":"main"}"#))
                .score
                .value(),
            -1
        );
    }

    #[test]
    fn branch_protection_notes_unreported() {
        let s = meta_snap(
            r#"{"default_branch":"main","branches":{"main":{"enabled":true,"block_force_push":true,"block_deletion":true}}}"#,
        );
        let r = check_branch_protection(&s);
        assert_eq!(r.score.value(), 2);
        assert!(r
            .details
            .iter()
            .any(|d| d.text.contains("dismiss_stale_reviews")));
    }

    proptest! {
        #[test]
        fn branch_protection_monotone(bits in any::<[bool; 5]>(), reviewers in 0u32..4, which in 0usize..6) {
            let mut p = protection([bits[0], bits[1], bits[2], bits[3]], reviewers);
            p.dismiss_stale_reviews = bits[4] && p.enabled;
            if !p.enabled {
                p = protection([false; 4], 0);
            }
            let before = check_branch_protection(&bp_snap(&p)).score.value();
            let mut q = p.clone();
            match which {
                0 => q.enabled = true,
                1 => q.block_force_push = true,
                2 => q.block_deletion = true,
                3 => q.status_checks_required = true,
                4 => q.dismiss_stale_reviews = true,
                _ => q.required_reviewers += 1,
            }
            let after = check_branch_protection(&bp_snap(&q)).score.value();
            prop_assert!(after >= before);
        }
    }

    fn releases_json(signed: &[bool]) -> String {
        let items: Vec<String> = signed
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let assets = if *s {
                    r#"["pkg.tar.gz","pkg.tar.gz.asc"]"#
                } else {
                    r#"["pkg.tar.gz"]"#
                };
                format!(
                    r#"{{"tag":"v{i}","created_at":{},"assets":{assets}}}"#,
                    100 + i
                )
            })
            .collect();
        format!(
            r#"{{"default_branch":"main","releases":[{}]}}"#,
            items.join(",")
        )
    }

    #[test]
    fn signed_release_scores() {
        // Newest five: created_at 105..=101 -> indices 5,4,3,2,1.
        let r = check_signed_releases(&meta_snap(&releases_json(&[
            true, true, true, true, true, false,
        ])));
        assert_eq!(r.score.value(), 8);
        let r = check_signed_releases(&meta_snap(&releases_json(&[true; 5])));
        assert_eq!(r.score.value(), 10);
        // Old signed releases outside the window do not count.
        let r = check_signed_releases(&meta_snap(&releases_json(&[
            true, true, false, false, false, false, false,
        ])));
        assert_eq!(r.score.value(), 0);
    }

    #[test]
    fn signed_release_tag_fallback() {
        let json = r#"{"default_branch":"main","releases":[],"tags":[
            {"name":"v1","timestamp":1},{"name":"v2","timestamp":2},{"name":"v3","timestamp":3}]}"#;
        assert_eq!(check_signed_releases(&meta_snap(json)).score.value(), 0);
        let verified = json.replace(r#""timestamp":3}"#, r#""timestamp":3,"verified":true}"#);
        assert_eq!(
            check_signed_releases(&meta_snap(&verified)).score.value(),
            3
        );
        assert_eq!(
            check_signed_releases(&meta_snap(r#"{"default_branch":"main"}"#))
                .score
                .value(),
            -1
        );
        assert_eq!(
            check_signed_releases(&files_snap(&[("a", "b")]))
                .score
                .value(),
            -1
        );
    }

    proptest! {
        #[test]
        fn signed_releases_order_invariant(signed in proptest::collection::vec(any::<bool>(), 1..10), rot in 0usize..10) {
            let json = releases_json(&signed);
            let m = ForgeMetadata::from_json(&json).unwrap();
            let mut shuffled = m.releases.clone();
            let n = shuffled.len();
            shuffled.rotate_left(rot % n);
            let raw: Vec<String> = shuffled.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
            let json2 = format!(r#"{{"default_branch":"main","releases":[{}]}}"#, raw.join(","));
            let a = check_signed_releases(&meta_snap(&json)).score;
            let b = check_signed_releases(&meta_snap(&json2)).score;
            prop_assert_eq!(a, b);
            // Oracle: newest five by created_at are the highest indices.
            let recent: Vec<bool> = signed.iter().rev().take(5).copied().collect();
            let expected = (10.0 * recent.iter().filter(|s| **s).count() as f64 / recent.len() as f64).round() as i32;
            prop_assert_eq!(a.value(), expected);
        }
    }

    #[test]
    fn packaging() {
        let ci =
            "on: push\njobs:\n  p:\n    steps:\n      - uses: pypa/gh-action-pypi-publish@v1\n";
        let s = files_snap(&[(".github/workflows/ci.yml", ci)]);
        assert_eq!(
            check_packaging(&s, &detect_publish_signals(&s))
                .score
                .value(),
            10
        );
        let none = files_snap(&[("README.md", "x")]);
        assert_eq!(
            check_packaging(&none, &detect_publish_signals(&none))
                .score
                .value(),
            -1
        );
    }
}
