use serde::{Deserialize, Serialize};

/// Maximum number of leading bytes consulted by [`classify_file`].
pub const PREFIX_LEN: usize = 8192;

const BINARY_EXTENSIONS: &[&str] = &[
    "exe", "dll", "so", "dylib", "jar", "class", "pyc", "pyo", "wasm", "o", "a", "obj", "lib",
    "bin", "com", "war", "ear", "elf",
];

const MANIFEST_NAMES: &[&str] = &[
    "package.json",
    "package-lock.json",
    "setup.py",
    "pyproject.toml",
];

const LICENSE_STEMS: &[&str] = &["license", "licence", "copying", "copyright"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Workflow,
    Dockerfile,
    ShellScript,
    Manifest,
    LicenseCandidate,
    SecurityPolicyCandidate,
    Binary,
    Text,
    Other,
}

/// Classifies a repository-relative path (forward slashes) from its name
/// and the first [`PREFIX_LEN`] bytes of content.
pub fn classify_file(path: &str, content_prefix: &[u8]) -> FileKind {
    let prefix = &content_prefix[..content_prefix.len().min(PREFIX_LEN)];
    let lower = path.to_ascii_lowercase();
    let file_name = lower.rsplit('/').next().unwrap_or(&lower);
    let (stem, ext) = split_ext(file_name);

    if is_workflow_path(&lower) {
        return FileKind::Workflow;
    }
    if file_name.starts_with("dockerfile") || ext == Some("dockerfile") {
        return FileKind::Dockerfile;
    }
    if MANIFEST_NAMES.contains(&file_name)
        || (file_name.starts_with("requirements") && ext == Some("txt"))
    {
        return FileKind::Manifest;
    }
    if LICENSE_STEMS.contains(&stem) || lower.starts_with("licenses/") {
        return FileKind::LicenseCandidate;
    }
    if stem == "security" && matches!(ext, Some("md" | "rst" | "markdown" | "txt") | None) {
        return FileKind::SecurityPolicyCandidate;
    }
    if matches!(ext, Some("sh" | "bash")) || has_shell_shebang(prefix) {
        return FileKind::ShellScript;
    }
    // Text-ish extensions are never binary regardless of content.
    if matches!(ext, Some("txt" | "md")) {
        return FileKind::Text;
    }
    let text = is_text(prefix);
    if let Some(ext) = ext {
        if BINARY_EXTENSIONS.contains(&ext) && !text {
            return FileKind::Binary;
        }
    }
    if text {
        FileKind::Text
    } else {
        FileKind::Other
    }
}

pub(crate) fn is_workflow_path(lower_path: &str) -> bool {
    lower_path.starts_with(".github/workflows/")
        && (lower_path.ends_with(".yml") || lower_path.ends_with(".yaml"))
}

fn split_ext(file_name: &str) -> (&str, Option<&str>) {
    match file_name.rfind('.') {
        Some(0) | None => (file_name, None),
        Some(i) => (&file_name[..i], Some(&file_name[i + 1..])),
    }
}

fn has_shell_shebang(prefix: &[u8]) -> bool {
    let Some(first) = prefix.split(|b| *b == b'\n').next() else {
        return false;
    };
    let Ok(first) = std::str::from_utf8(first) else {
        return false;
    };
    let first = first.trim_end();
    let Some(rest) = first.strip_prefix("#!") else {
        return false;
    };
    let mut parts = rest.split_whitespace();
    let interp = match parts.next() {
        Some(p) if p.ends_with("/env") => parts.find(|p| !p.starts_with('-')),
        other => other,
    };
    matches!(
        interp.map(|p| p.rsplit('/').next().unwrap_or(p)),
        Some("sh" | "bash" | "dash" | "zsh" | "ksh")
    )
}

/// Valid UTF-8, tolerating a multi-byte sequence cut off by the prefix limit.
fn is_text(prefix: &[u8]) -> bool {
    match std::str::from_utf8(prefix) {
        Ok(_) => true,
        Err(e) => e.error_len().is_none(),
    }
}
