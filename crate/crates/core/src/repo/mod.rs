//! Immutable repository snapshots.

mod classify;
pub mod metadata;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use walkdir::WalkDir;

pub use classify::{classify_file, FileKind, PREFIX_LEN};
pub use metadata::{
    CommitRecord, Contributor, ForgeMetadata, IssueEvent, KnownSections, ProtectionSettings,
    ReleaseRecord, ReviewPlatform, TagRecord,
};

use crate::error::{Error, Result};
use crate::intel::RepoId;

/// Files larger than this are listed but their text is not retained.
const MAX_TEXT_BYTES: u64 = 2 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    /// Relative to the snapshot root, `/`-separated.
    pub path: String,
    pub size_bytes: u64,
    pub kind: FileKind,
    /// Zero for binary files.
    pub line_count: usize,
    pub symlink: bool,
    #[serde(skip)]
    text: Option<String>,
}

impl FileEntry {
    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn file_name(&self) -> &str {
        self.path.rsplit('/').next().unwrap_or(&self.path)
    }

    /// Parent directory, `""` for top-level files.
    pub fn dir(&self) -> &str {
        self.path.rsplit_once('/').map_or("", |(d, _)| d)
    }

    pub fn is_top_level(&self) -> bool {
        !self.path.contains('/')
    }

    fn from_bytes(path: String, bytes: &[u8], size_bytes: u64) -> FileEntry {
        let kind = classify_file(&path, &bytes[..bytes.len().min(PREFIX_LEN)]);
        let text = if kind == FileKind::Binary || size_bytes > MAX_TEXT_BYTES {
            None
        } else {
            std::str::from_utf8(bytes).ok().map(str::to_owned)
        };
        let line_count = match kind {
            FileKind::Binary => 0,
            _ => count_lines(bytes),
        };
        FileEntry {
            path,
            size_bytes,
            kind,
            line_count,
            symlink: false,
            text,
        }
    }
}

fn count_lines(bytes: &[u8]) -> usize {
    let newlines = bytes.iter().filter(|b| **b == b'\n').count();
    match bytes.last() {
        Some(b'\n') | None => newlines,
        Some(_) => newlines + 1,
    }
}

/// Everything the checks need to know about one repository.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepoSnapshot {
    pub root: PathBuf,
    pub repo: RepoId,
    pub files: Vec<FileEntry>,
    pub default_branch: String,
    pub commits: Vec<CommitRecord>,
    pub releases: Vec<ReleaseRecord>,
    pub tags: Vec<TagRecord>,
    pub branch_protection: BTreeMap<String, ProtectionSettings>,
    pub issues: Vec<IssueEvent>,
    pub contributors: Vec<Contributor>,
    pub archived: bool,
    pub metadata_present: bool,
    pub known: KnownSections,
    /// Files that were listed but could not be read.
    pub warnings: Vec<String>,
}

impl RepoSnapshot {
    /// Builds a snapshot from in-memory files, mainly for tests and tooling
    /// that already holds repository content.
    pub fn from_memory<P, B>(
        repo: RepoId,
        files: impl IntoIterator<Item = (P, B)>,
        metadata: Option<ForgeMetadata>,
    ) -> RepoSnapshot
    where
        P: Into<String>,
        B: AsRef<[u8]>,
    {
        let mut entries: Vec<FileEntry> = files
            .into_iter()
            .map(|(p, b)| {
                let b = b.as_ref();
                FileEntry::from_bytes(p.into(), b, b.len() as u64)
            })
            .collect();
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        entries.dedup_by(|a, b| a.path == b.path);
        Self::assemble(PathBuf::new(), repo, entries, metadata)
    }

    fn assemble(
        root: PathBuf,
        repo: RepoId,
        files: Vec<FileEntry>,
        metadata: Option<ForgeMetadata>,
    ) -> RepoSnapshot {
        let metadata_present = metadata.is_some();
        let m = metadata.unwrap_or_default();
        RepoSnapshot {
            root,
            repo,
            files,
            default_branch: if metadata_present {
                m.default_branch
            } else {
                String::new()
            },
            commits: m.commits,
            releases: m.releases,
            tags: m.tags,
            branch_protection: m.branches,
            issues: m.issues,
            contributors: m.contributors,
            archived: m.archived,
            metadata_present,
            known: m.known,
            warnings: Vec::new(),
        }
    }

    pub fn with_repo(mut self, repo: RepoId) -> RepoSnapshot {
        self.repo = repo;
        self
    }

    pub fn files_of_kind(&self, kind: FileKind) -> impl Iterator<Item = &FileEntry> {
        self.files.iter().filter(move |f| f.kind == kind)
    }

    pub fn file(&self, path: &str) -> Option<&FileEntry> {
        self.files
            .binary_search_by(|f| f.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.files[i])
    }

    /// Case-insensitive path lookup.
    pub fn find_file_ci(&self, path: &str) -> Option<&FileEntry> {
        self.files
            .iter()
            .find(|f| f.path.eq_ignore_ascii_case(path))
    }

    /// True when the repository tracks no content.
    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

pub fn is_empty(snapshot: &RepoSnapshot) -> bool {
    snapshot.is_empty()
}

/// Loads a checkout plus an optional forge-metadata fixture.
pub fn load_snapshot(root: &Path, metadata: Option<&Path>) -> Result<RepoSnapshot> {
    let meta = root
        .metadata()
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", root.display())))?;
    if !meta.is_dir() {
        return Err(Error::Input(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let metadata = metadata.map(ForgeMetadata::from_file).transpose()?;

    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git");
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e
                .path()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| root.to_path_buf());
            Error::io(path, e.into())
        })?;
        if entry.depth() == 0 || entry.file_type().is_dir() {
            continue;
        }
        let rel = relative_path(root, entry.path());
        if entry.path_is_symlink() {
            files.push(FileEntry {
                path: rel,
                size_bytes: 0,
                kind: FileKind::Other,
                line_count: 0,
                symlink: true,
                text: None,
            });
            continue;
        }
        let size = entry
            .metadata()
            .map_err(|e| Error::io(entry.path(), e.into()))?
            .len();
        match read_for_snapshot(entry.path(), size) {
            Ok(bytes) => files.push(FileEntry::from_bytes(rel, &bytes, size)),
            Err(e) => {
                warnings.push(format!("{rel}: unreadable, content skipped ({e})"));
                files.push(FileEntry {
                    path: rel,
                    size_bytes: size,
                    kind: FileKind::Other,
                    line_count: 0,
                    symlink: false,
                    text: None,
                });
            }
        }
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let repo = resolve_repo_id(root, metadata.as_ref());
    let mut snapshot = RepoSnapshot::assemble(root.to_path_buf(), repo, files, metadata);
    snapshot.warnings = warnings;
    Ok(snapshot)
}

fn read_for_snapshot(path: &Path, size: u64) -> Result<Vec<u8>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let limit = if size > MAX_TEXT_BYTES {
        PREFIX_LEN as u64
    } else {
        size
    };
    let mut buf = Vec::with_capacity(limit as usize);
    file.take(limit)
        .read_to_end(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

fn relative_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Fixture `repo` field, then the `origin` remote, then the directory name.
fn resolve_repo_id(root: &Path, metadata: Option<&ForgeMetadata>) -> RepoId {
    if let Some(id) = metadata
        .and_then(|m| m.repo.as_deref())
        .and_then(|r| RepoId::parse(r).ok())
    {
        return id;
    }
    if let Some(id) = origin_url(root).and_then(|u| RepoId::parse(&u).ok()) {
        return id;
    }
    let name = root
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "unknown".to_string());
    RepoId::local(&name)
}

fn origin_url(root: &Path) -> Option<String> {
    let config = std::fs::read_to_string(root.join(".git").join("config")).ok()?;
    let mut in_origin = false;
    for line in config.lines() {
        let line = line.trim();
        if line.starts_with('[') {
            in_origin = line == r#"[remote "origin"]"#;
        } else if in_origin {
            if let Some((key, value)) = line.split_once('=') {
                if key.trim() == "url" {
                    return Some(value.trim().to_string());
                }
            }
        }
    }
    None
}
