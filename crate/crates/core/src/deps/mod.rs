//! Dependency pinning, dependency-update tooling and binary artifacts.

mod manifest;
mod shell;

use serde::Serialize;

use crate::check::{ratio_score, CheckName, CheckResult, Detail, Score};
use crate::repo::{FileKind, RepoSnapshot};
use crate::workflow::parse_workflows;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependencyKind {
    ContainerImage,
    ShellDownload,
    ActionRef,
    ManifestEntry,
}

impl DependencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DependencyKind::ContainerImage => "container-image",
            DependencyKind::ShellDownload => "shell-download",
            DependencyKind::ActionRef => "action-ref",
            DependencyKind::ManifestEntry => "manifest-entry",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DependencyRef {
    pub source_path: String,
    pub line: usize,
    pub kind: DependencyKind,
    pub name: String,
    pub spec: String,
    pub pinned: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub refs: Vec<DependencyRef>,
    /// Files that could not be read or parsed.
    pub warnings: Vec<Detail>,
}

fn is_commit_sha(s: &str) -> bool {
    s.len() == 40 && s.chars().all(|c| c.is_ascii_hexdigit())
}

/// Gathers dependency references from Dockerfiles, shell scripts, workflow
/// `uses:` references and package manifests.
pub fn extract_dependency_refs(snapshot: &RepoSnapshot) -> Extraction {
    let mut ex = Extraction::default();
    for w in &snapshot.warnings {
        ex.warnings.push(Detail::note(w.clone()));
    }

    for file in &snapshot.files {
        let needs_text = matches!(
            file.kind,
            FileKind::Dockerfile | FileKind::ShellScript | FileKind::Manifest
        );
        if !needs_text {
            continue;
        }
        let Some(text) = file.text() else {
            ex.warnings.push(Detail::in_file(
                &file.path,
                "unreadable, skipped for dependency analysis",
            ));
            continue;
        };
        match file.kind {
            FileKind::Dockerfile => dockerfile(&file.path, text, &mut ex.refs),
            FileKind::ShellScript => ex.refs.extend(shell::refs_in_script(&file.path, text)),
            FileKind::Manifest => {
                let result = match file.file_name() {
                    "package.json" => {
                        manifest::package_json(snapshot, &file.path, text, &mut ex.refs)
                    }
                    "setup.py" => {
                        manifest::setup_py(&file.path, text, &mut ex.refs);
                        Ok(())
                    }
                    "pyproject.toml" => manifest::pyproject_toml(&file.path, text, &mut ex.refs),
                    name if name.starts_with("requirements") => {
                        manifest::requirements_txt(&file.path, text, &mut ex.refs);
                        Ok(())
                    }
                    // Lockfiles carry no direct references of their own.
                    _ => Ok(()),
                };
                if let Err(e) = result {
                    ex.warnings.push(Detail::in_file(
                        &file.path,
                        format!("unparseable manifest skipped: {e}"),
                    ));
                }
            }
            _ => {}
        }
    }

    let parsed = parse_workflows(snapshot);
    for wf in &parsed.workflows {
        for job in &wf.jobs {
            if let Some(uses) = &job.uses {
                if let Some(r) = action_ref(&wf.path, job.line, uses) {
                    ex.refs.push(r);
                }
            }
            for step in &job.steps {
                if let Some(r) = step
                    .uses
                    .as_deref()
                    .and_then(|u| action_ref(&wf.path, step.line, u))
                {
                    ex.refs.push(r);
                }
            }
        }
    }
    ex.refs.sort();
    ex
}

fn action_ref(path: &str, line: usize, uses: &str) -> Option<DependencyRef> {
    let uses = uses.trim();
    if uses.starts_with("./") || uses.is_empty() {
        return None;
    }
    if let Some(image) = uses.strip_prefix("docker://") {
        return Some(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ContainerImage,
            name: image.split('@').next().unwrap_or(image).to_string(),
            spec: image.to_string(),
            pinned: image.contains("@sha256:"),
        });
    }
    let (name, reference) = uses.rsplit_once('@').unwrap_or((uses, ""));
    Some(DependencyRef {
        source_path: path.into(),
        line,
        kind: DependencyKind::ActionRef,
        name: name.to_string(),
        spec: reference.to_string(),
        pinned: is_commit_sha(reference),
    })
}

fn dockerfile(path: &str, text: &str, out: &mut Vec<DependencyRef>) {
    let verified = shell::has_checksum_verification(text);
    let mut stages: Vec<String> = Vec::new();
    for (line, logical) in shell::logical_lines(text) {
        let trimmed = logical.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (instr, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        match instr.to_ascii_uppercase().as_str() {
            "FROM" => {
                let args: Vec<&str> = rest
                    .split_whitespace()
                    .filter(|a| !a.starts_with("--"))
                    .collect();
                let Some(image) = args.first() else { continue };
                let lower = image.to_ascii_lowercase();
                let earlier_stage = stages.contains(&lower);
                if let (Some(kw), Some(alias)) = (args.get(1), args.get(2)) {
                    if kw.eq_ignore_ascii_case("as") {
                        stages.push(alias.to_ascii_lowercase());
                    }
                }
                if lower == "scratch" || earlier_stage {
                    continue;
                }
                out.push(DependencyRef {
                    source_path: path.into(),
                    line,
                    kind: DependencyKind::ContainerImage,
                    name: image.split('@').next().unwrap_or(image).to_string(),
                    spec: image.to_string(),
                    pinned: image.contains("@sha256:"),
                });
            }
            "RUN" => {
                let body = exec_form_to_shell(rest);
                shell::refs_in_command(path, line, &body, verified, out);
            }
            _ => {}
        }
    }
}

/// `RUN ["a", "b"]` -> `a b`.
fn exec_form_to_shell(rest: &str) -> String {
    let r = rest.trim();
    if r.starts_with('[') {
        if let Ok(parts) = serde_json::from_str::<Vec<String>>(r) {
            return parts.join(" ");
        }
    }
    r.to_string()
}

pub fn check_pinned_dependencies(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::PinnedDependencies;
    let ex = extract_dependency_refs(snapshot);
    if ex.refs.is_empty() {
        return CheckResult::inconclusive(name, "no dependencies found").with_details(ex.warnings);
    }
    let pinned = ex.refs.iter().filter(|r| r.pinned).count();
    let total = ex.refs.len();
    let mut details = ex.warnings;
    details.extend(ex.refs.iter().filter(|r| !r.pinned).map(|r| {
        let spec = if r.spec.is_empty() {
            "unversioned"
        } else {
            r.spec.as_str()
        };
        Detail::at(
            &r.source_path,
            r.line,
            format!("unpinned {} {} ({spec})", r.kind.as_str(), r.name),
        )
    }));
    CheckResult::new(
        name,
        ratio_score(pinned, total),
        format!("{pinned} of {total} dependencies pinned"),
    )
    .with_details(details)
}

const UPDATE_TOOL_CONFIGS: &[&str] = &[
    ".github/dependabot.yml",
    ".github/dependabot.yaml",
    "renovate.json",
    "renovate.json5",
    ".github/renovate.json",
    ".github/renovate.json5",
];

pub fn check_dependency_update_tool(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::DependencyUpdateTool;
    let found = snapshot.files.iter().find(|f| {
        UPDATE_TOOL_CONFIGS.contains(&f.path.as_str())
            || (f.is_top_level() && f.path.starts_with(".renovaterc"))
    });
    match found {
        Some(f) => CheckResult::new(name, Score::MAX, "update tool detected").with_details(vec![
            Detail::in_file(&f.path, "dependency update tool configuration"),
        ]),
        None => CheckResult::new(name, Score::MIN, "no update tool detected"),
    }
}

pub fn check_binary_artifacts(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::BinaryArtifacts;
    let binaries: Vec<Detail> = snapshot
        .files_of_kind(FileKind::Binary)
        .map(|f| Detail::in_file(&f.path, "binary artifact"))
        .collect();
    let n = binaries.len();
    let reason = if n == 0 {
        "no binaries found in the repo".to_string()
    } else {
        format!("{n} binaries found in the repo")
    };
    CheckResult::new(name, Score::saturating(10 - n as i64), reason).with_details(binaries)
}
