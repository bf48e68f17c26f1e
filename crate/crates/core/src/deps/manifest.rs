//! Ecosystem manifest parsing: npm `package.json`, pip requirements,
//! `setup.py` and `pyproject.toml`.

use std::sync::LazyLock;

use regex::Regex;

use super::shell::is_exact_semver;
use super::{DependencyKind, DependencyRef};
use crate::repo::RepoSnapshot;

/// Files whose presence next to `package.json` locks its dependency tree.
pub(crate) const NPM_LOCKFILES: &[&str] = &[
    "package-lock.json",
    "npm-shrinkwrap.json",
    "yarn.lock",
    "pnpm-lock.yaml",
];

const NPM_SECTIONS: &[&str] = &["dependencies", "devDependencies", "optionalDependencies"];

static GIT_COMMIT_SUFFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"#[0-9a-fA-F]{40}$").expect("commit regex"));

static STRING_LITERAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#""([^"\\]*)"|'([^'\\]*)'"#).expect("literal regex"));

static PEP508_NAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*([A-Za-z0-9][A-Za-z0-9._-]*)(\[[^\]]*\])?").expect("name regex")
});

/// True iff a PEP 508 version specifier pins one exact version.
pub(crate) fn is_exact_pep508(spec: &str) -> bool {
    let spec = spec.split(';').next().unwrap_or("").trim();
    let Some(rest) = spec.strip_prefix("===").or_else(|| spec.strip_prefix("==")) else {
        return false;
    };
    let version = rest.trim();
    !version.is_empty() && !version.contains('*') && !version.contains(',')
}

fn split_pep508(req: &str) -> (String, String) {
    match PEP508_NAME.captures(req) {
        Some(c) => {
            let whole = c.get(0).map_or(0, |m| m.end());
            (c[1].to_string(), req[whole..].trim().to_string())
        }
        None => (req.trim().to_string(), String::new()),
    }
}

fn line_containing(text: &str, needle: &str, default: usize) -> usize {
    super::super::workflow::locate_line(text, 1, needle).unwrap_or(default)
}

pub(crate) fn package_json(
    snapshot: &RepoSnapshot,
    path: &str,
    text: &str,
    out: &mut Vec<DependencyRef>,
) -> Result<(), String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let dir = path.rsplit_once('/').map_or("", |(d, _)| d);
    let locked = NPM_LOCKFILES.iter().any(|lock| {
        let candidate = if dir.is_empty() {
            (*lock).to_string()
        } else {
            format!("{dir}/{lock}")
        };
        snapshot.file(&candidate).is_some()
    });
    for section in NPM_SECTIONS {
        let Some(deps) = value.get(section).and_then(|v| v.as_object()) else {
            continue;
        };
        let section_line = line_containing(text, &format!("\"{section}\""), 1);
        for (name, spec) in deps {
            let spec = spec.as_str().unwrap_or_default();
            if ["file:", "link:", "workspace:", "portal:"]
                .iter()
                .any(|p| spec.starts_with(p))
            {
                continue;
            }
            let exact = match spec.strip_prefix("npm:") {
                Some(alias) => alias
                    .rsplit_once('@')
                    .is_some_and(|(_, v)| is_exact_semver(v)),
                None => is_exact_semver(spec) || GIT_COMMIT_SUFFIX.is_match(spec),
            };
            out.push(DependencyRef {
                source_path: path.into(),
                line: super::super::workflow::locate_line(
                    text,
                    section_line,
                    &format!("\"{name}\""),
                )
                .unwrap_or(section_line),
                kind: DependencyKind::ManifestEntry,
                name: name.clone(),
                spec: spec.to_string(),
                pinned: locked || exact,
            });
        }
    }
    Ok(())
}

pub(crate) fn requirements_txt(path: &str, text: &str, out: &mut Vec<DependencyRef>) {
    for (line, raw) in super::shell::logical_lines(text) {
        let content = match raw.find(" #") {
            Some(i) => &raw[..i],
            None => raw.as_str(),
        };
        let content = content.trim();
        if content.is_empty() || content.starts_with('#') || content.starts_with('-') {
            continue;
        }
        // Drop per-requirement options such as --hash.
        let req = content.split(" --").next().unwrap_or(content).trim();
        let (name, spec) = split_pep508(req);
        out.push(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ManifestEntry,
            pinned: is_exact_pep508(&spec),
            name,
            spec,
        });
    }
}

/// Lexical scan of the `install_requires` list; the file is never executed.
pub(crate) fn setup_py(path: &str, text: &str, out: &mut Vec<DependencyRef>) {
    let Some(key) = text.find("install_requires") else {
        return;
    };
    let after = &text[key..];
    let Some(open) = after.find('[') else {
        return;
    };
    // Only accept `install_requires = [` / `install_requires=[`.
    if !after[..open]["install_requires".len()..].trim().eq("=") {
        return;
    }
    let body_start = key + open + 1;
    let Some(close) = text[body_start..].find(']') else {
        return;
    };
    let body = &text[body_start..body_start + close];
    let base_line = text[..body_start].matches('\n').count() + 1;
    for m in STRING_LITERAL.captures_iter(body) {
        let lit = m.get(1).or_else(|| m.get(2)).map_or("", |g| g.as_str());
        let offset = m.get(0).map_or(0, |g| g.start());
        let line = base_line + body[..offset].matches('\n').count();
        let (name, spec) = split_pep508(lit);
        out.push(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ManifestEntry,
            pinned: is_exact_pep508(&spec),
            name,
            spec,
        });
    }
}

pub(crate) fn pyproject_toml(
    path: &str,
    text: &str,
    out: &mut Vec<DependencyRef>,
) -> Result<(), String> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;

    let mut pep508 = Vec::new();
    if let Some(project) = doc.get("project").and_then(|v| v.as_table()) {
        if let Some(deps) = project.get("dependencies").and_then(|v| v.as_array()) {
            pep508.extend(deps.iter().filter_map(|d| d.as_str()));
        }
        if let Some(groups) = project
            .get("optional-dependencies")
            .and_then(|v| v.as_table())
        {
            for deps in groups.values().filter_map(|v| v.as_array()) {
                pep508.extend(deps.iter().filter_map(|d| d.as_str()));
            }
        }
    }
    for req in pep508 {
        let (name, spec) = split_pep508(req);
        out.push(DependencyRef {
            source_path: path.into(),
            line: line_containing(text, req, 1),
            kind: DependencyKind::ManifestEntry,
            pinned: is_exact_pep508(&spec),
            name,
            spec,
        });
    }

    let poetry = doc
        .get("tool")
        .and_then(|t| t.get("poetry"))
        .and_then(|p| p.as_table());
    if let Some(poetry) = poetry {
        let mut tables = Vec::new();
        for key in ["dependencies", "dev-dependencies"] {
            if let Some(t) = poetry.get(key).and_then(|v| v.as_table()) {
                tables.push(t);
            }
        }
        if let Some(groups) = poetry.get("group").and_then(|v| v.as_table()) {
            for g in groups.values() {
                if let Some(t) = g.get("dependencies").and_then(|v| v.as_table()) {
                    tables.push(t);
                }
            }
        }
        for table in tables {
            for (name, value) in table {
                if name == "python" {
                    continue;
                }
                let (spec, pinned) = match value {
                    toml::Value::String(s) => (s.clone(), is_exact_poetry(s)),
                    toml::Value::Table(t) => {
                        if t.contains_key("path") {
                            continue;
                        }
                        if let Some(rev) = t.get("rev").and_then(|v| v.as_str()) {
                            (
                                format!("rev {rev}"),
                                rev.len() == 40 && rev.chars().all(|c| c.is_ascii_hexdigit()),
                            )
                        } else {
                            let v = t.get("version").and_then(|v| v.as_str()).unwrap_or("*");
                            (v.to_string(), is_exact_poetry(v))
                        }
                    }
                    _ => (String::new(), false),
                };
                out.push(DependencyRef {
                    source_path: path.into(),
                    line: line_containing(text, &format!("{name} ="), 1),
                    kind: DependencyKind::ManifestEntry,
                    name: name.clone(),
                    spec,
                    pinned,
                });
            }
        }
    }
    Ok(())
}

/// Poetry treats a bare version as exact; operators and wildcards are ranges.
fn is_exact_poetry(spec: &str) -> bool {
    let s = spec.trim();
    let s = s.strip_prefix("==").unwrap_or(s);
    !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_ascii_digit())
        && !s.contains(['*', '^', '~', '<', '>', ',', '|', ' '])
}
