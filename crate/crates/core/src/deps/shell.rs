//! Dependency references in shell command text (scripts and Dockerfile `RUN`).

use std::sync::LazyLock;

use regex::Regex;

use super::{DependencyKind, DependencyRef};

static PIPE_TO_INTERPRETER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\|\s*(?:sudo\s+(?:-\S+\s+)*)?(?:/usr/bin/env\s+)?(?:/(?:usr/)?(?:local/)?bin/)?(?:sh|bash|zsh|dash|ksh|python[0-9.]*|perl|ruby|node)\b")
        .expect("pipe regex")
});

static FETCH: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:curl|wget)\b").expect("fetch regex"));

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?:https?|ftp)://[^\s'"|;&)]+"#).expect("url regex"));

static CHECKSUM_VERIFY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:sha(?:1|224|256|384|512)sum\s+(?:-\S+\s+)*(?:-c|--check)\b|shasum\s+(?:-\S+\s+)*(?:-c|--check)\b|shasum\s+-a\s+\d+\s+(?:-\S+\s+)*(?:-c|--check)\b|gpg\s+(?:--\S+\s+)*--verify\b)")
        .expect("checksum regex")
});

static SEMVER_EXACT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^=?v?\d+\.\d+\.\d+(?:-[0-9A-Za-z.-]+)?(?:\+[0-9A-Za-z.-]+)?$")
        .expect("semver regex")
});

pub(crate) fn is_exact_semver(spec: &str) -> bool {
    SEMVER_EXACT.is_match(spec.trim())
}

/// Joins backslash-continued lines, keeping the first physical line number.
pub(crate) fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let (line, mut buf) = current.take().unwrap_or((i + 1, String::new()));
        let trimmed = raw.trim_end();
        if let Some(body) = trimmed.strip_suffix('\\') {
            buf.push_str(body);
            buf.push(' ');
            current = Some((line, buf));
        } else {
            buf.push_str(trimmed);
            out.push((line, buf));
        }
    }
    if let Some(rest) = current {
        out.push(rest);
    }
    out
}

/// Whole-text check: does the script verify something it downloaded?
pub(crate) fn has_checksum_verification(text: &str) -> bool {
    CHECKSUM_VERIFY.is_match(text)
}

/// Analyses one logical command line. `verified` says whether the enclosing
/// script verifies checksums of what it fetches.
pub(crate) fn refs_in_command(
    path: &str,
    line: usize,
    command: &str,
    verified: bool,
    out: &mut Vec<DependencyRef>,
) {
    let command = command.split(" #").next().unwrap_or(command);
    if command.trim_start().starts_with('#') {
        return;
    }
    if FETCH.is_match(command) {
        let url = URL
            .find(command)
            .map_or_else(|| "remote script".to_string(), |m| m.as_str().to_string());
        if PIPE_TO_INTERPRETER.is_match(command) {
            out.push(DependencyRef {
                source_path: path.into(),
                line,
                kind: DependencyKind::ShellDownload,
                name: url,
                spec: "piped to interpreter".into(),
                pinned: false,
            });
        } else if verified && URL.is_match(command) {
            out.push(DependencyRef {
                source_path: path.into(),
                line,
                kind: DependencyKind::ShellDownload,
                name: url,
                spec: "checksum verified".into(),
                pinned: true,
            });
        }
    }
    for segment in command.split(['&', ';', '|']) {
        let tokens: Vec<&str> = segment.split_whitespace().collect();
        pip_install(path, line, &tokens, out);
        npm_install(path, line, &tokens, out);
    }
}

fn pip_install(path: &str, line: usize, tokens: &[&str], out: &mut Vec<DependencyRef>) {
    let Some(pos) = tokens.iter().position(|t| {
        let t = t.rsplit('/').next().unwrap_or(t);
        t == "pip" || t == "pip3" || t.starts_with("pip3.")
    }) else {
        return;
    };
    if tokens.get(pos + 1) != Some(&"install") {
        return;
    }
    let args = &tokens[pos + 2..];
    let require_hashes = args.contains(&"--require-hashes");
    let mut skip_next = false;
    for arg in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if matches!(
            *arg,
            "-r" | "--requirement"
                | "-c"
                | "--constraint"
                | "-e"
                | "--editable"
                | "-i"
                | "--index-url"
                | "--extra-index-url"
                | "-f"
                | "--find-links"
                | "-t"
                | "--target"
        ) {
            skip_next = true;
            continue;
        }
        if arg.starts_with('-')
            || arg.starts_with('.')
            || arg.starts_with('/')
            || arg.starts_with('$')
        {
            continue;
        }
        let spec = arg.trim_matches(|c| c == '"' || c == '\'');
        let name_end = spec
            .find(|c: char| "=<>!~;[ @".contains(c))
            .unwrap_or(spec.len());
        out.push(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ManifestEntry,
            name: spec[..name_end].to_string(),
            spec: spec[name_end..].to_string(),
            pinned: require_hashes || super::manifest::is_exact_pep508(&spec[name_end..]),
        });
    }
}

fn npm_install(path: &str, line: usize, tokens: &[&str], out: &mut Vec<DependencyRef>) {
    let Some(pos) = tokens.iter().position(|t| *t == "npm") else {
        return;
    };
    if !matches!(tokens.get(pos + 1), Some(&("install" | "i" | "add"))) {
        return;
    }
    let pkgs: Vec<&str> = tokens[pos + 2..]
        .iter()
        .copied()
        .filter(|a| !a.starts_with('-'))
        .collect();
    if pkgs.is_empty() {
        out.push(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ManifestEntry,
            name: "npm install".into(),
            spec: "resolves outside the lockfile; use npm ci".into(),
            pinned: false,
        });
        return;
    }
    for pkg in pkgs {
        let pkg = pkg.trim_matches(|c| c == '"' || c == '\'');
        // Scoped packages start with '@'; the version separator is the last '@'.
        let (name, version) = match pkg.rfind('@') {
            Some(i) if i > 0 => (&pkg[..i], &pkg[i + 1..]),
            _ => (pkg, ""),
        };
        out.push(DependencyRef {
            source_path: path.into(),
            line,
            kind: DependencyKind::ManifestEntry,
            name: name.to_string(),
            spec: version.to_string(),
            pinned: is_exact_semver(version),
        });
    }
}

/// Shell script analysis.
pub(crate) fn refs_in_script(path: &str, text: &str) -> Vec<DependencyRef> {
    let verified = has_checksum_verification(text);
    let mut out = Vec::new();
    for (line, command) in logical_lines(text) {
        refs_in_command(path, line, &command, verified, &mut out);
    }
    out
}
