//! CI workflow parsing and the workflow-based checks.

mod contexts;
mod dangerous;
mod permissions;
mod publish;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use contexts::{context_paths, UntrustedContexts};
pub use dangerous::{
    check_dangerous_workflow, find_dangerous_patterns, FindingPattern, WorkflowFinding,
};
pub use permissions::check_token_permissions;
pub use publish::{detect_publish_signals, PublishMechanism, PublishSignal};

use crate::repo::{FileKind, RepoSnapshot};
use crate::yaml::{self, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Read,
    Write,
    None,
}

/// A `permissions:` block at workflow or job level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Permissions {
    NoneDeclared,
    ReadAll,
    WriteAll,
    Scoped(BTreeMap<String, Access>),
}

impl Permissions {
    pub fn grants_write(&self) -> bool {
        match self {
            Permissions::WriteAll => true,
            Permissions::Scoped(m) => m.values().any(|a| *a == Access::Write),
            Permissions::NoneDeclared | Permissions::ReadAll => false,
        }
    }

    fn from_node(node: Option<&Node>) -> Result<Permissions, String> {
        let Some(node) = node else {
            return Ok(Permissions::NoneDeclared);
        };
        match node {
            Node::Scalar { value, .. } => match value.trim() {
                "read-all" => Ok(Permissions::ReadAll),
                "write-all" => Ok(Permissions::WriteAll),
                "" | "{}" => Ok(Permissions::Scoped(BTreeMap::new())),
                other => Err(format!(
                    "line {}: unknown permissions value {other:?}",
                    node.line()
                )),
            },
            Node::Map { entries, .. } => {
                let mut scoped = BTreeMap::new();
                for (k, v) in entries {
                    let access = match v.as_str().map(str::trim) {
                        Some("read") => Access::Read,
                        Some("write") => Access::Write,
                        Some("none") => Access::None,
                        _ => {
                            return Err(format!(
                                "line {}: unknown access level for permission {:?}",
                                v.line(),
                                k.to_text()
                            ))
                        }
                    };
                    scoped.insert(k.to_text(), access);
                }
                Ok(Permissions::Scoped(scoped))
            }
            Node::Seq { line, .. } => Err(format!(
                "line {line}: permissions must be a mapping or scalar"
            )),
        }
    }
}

/// An `env:` assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvVar {
    pub name: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub index: usize,
    /// Line of the step's `run`/`uses` key (or the step itself when neither).
    pub line: usize,
    pub uses: Option<String>,
    pub run_script: Option<String>,
    pub with_args: BTreeMap<String, String>,
    /// Source line of each `with:` argument.
    pub with_lines: BTreeMap<String, usize>,
    pub env: Vec<EnvVar>,
    /// First source line of the script body (differs from `line` for block scalars).
    #[serde(skip)]
    pub(crate) script_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Job {
    pub id: String,
    pub line: usize,
    pub job_level_permissions: Permissions,
    /// Reusable-workflow reference, for `jobs.<id>.uses`.
    pub uses: Option<String>,
    pub env: Vec<EnvVar>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Workflow {
    pub path: String,
    pub triggers: BTreeSet<String>,
    pub top_level_permissions: Permissions,
    pub env: Vec<EnvVar>,
    pub jobs: Vec<Job>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseFailure {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedWorkflows {
    pub workflows: Vec<Workflow>,
    pub failures: Vec<ParseFailure>,
}

impl ParsedWorkflows {
    /// Number of workflow files in the snapshot, parsed or not.
    pub fn file_count(&self) -> usize {
        self.workflows.len() + self.failures.len()
    }
}

pub(crate) fn source_of<'a>(snapshot: &'a RepoSnapshot, path: &str) -> &'a str {
    snapshot.file(path).and_then(|f| f.text()).unwrap_or("")
}

/// Parses every workflow file; failures are reported, never dropped.
pub fn parse_workflows(snapshot: &RepoSnapshot) -> ParsedWorkflows {
    let mut out = ParsedWorkflows::default();
    for file in snapshot.files_of_kind(FileKind::Workflow) {
        let parsed = match file.text() {
            Some(text) => parse_workflow(&file.path, text),
            None => Err("file is not valid UTF-8 text".to_string()),
        };
        match parsed {
            Ok(wf) => out.workflows.push(wf),
            Err(reason) => out.failures.push(ParseFailure {
                path: file.path.clone(),
                reason,
            }),
        }
    }
    out
}

pub fn parse_workflow(path: &str, text: &str) -> Result<Workflow, String> {
    let (root, _) = yaml::parse_lenient(text)?;
    if root.entries().is_none() {
        return Err("workflow root is not a mapping".into());
    }
    let triggers = match root.get("on") {
        None => BTreeSet::new(),
        Some(Node::Scalar { value, .. }) => BTreeSet::from([value.clone()]),
        Some(Node::Seq { items, .. }) => items.iter().map(Node::to_text).collect(),
        Some(Node::Map { entries, .. }) => entries.iter().map(|(k, _)| k.to_text()).collect(),
    };
    let triggers: BTreeSet<String> = triggers.into_iter().filter(|t| !t.is_empty()).collect();
    if triggers.is_empty() {
        return Err("workflow declares no `on` triggers".into());
    }
    let top_level_permissions = Permissions::from_node(root.get("permissions"))?;
    let env = env_vars(root.get("env"));

    let mut jobs = Vec::new();
    if let Some(jobs_node) = root.get("jobs") {
        let Some(entries) = jobs_node.entries() else {
            if jobs_node.is_null() {
                return Ok(Workflow {
                    path: path.into(),
                    triggers,
                    top_level_permissions,
                    env,
                    jobs,
                });
            }
            return Err(format!(
                "line {}: `jobs` must be a mapping",
                jobs_node.line()
            ));
        };
        for (id, body) in entries {
            jobs.push(parse_job(id, body)?);
        }
    }
    Ok(Workflow {
        path: path.into(),
        triggers,
        top_level_permissions,
        env,
        jobs,
    })
}

fn parse_job(id: &Node, body: &Node) -> Result<Job, String> {
    if body.entries().is_none() {
        return Err(format!(
            "line {}: job {:?} is not a mapping",
            body.line(),
            id.to_text()
        ));
    }
    let mut steps = Vec::new();
    if let Some(steps_node) = body.get("steps") {
        let items = steps_node
            .items()
            .ok_or_else(|| format!("line {}: `steps` must be a sequence", steps_node.line()))?;
        for (index, step) in items.iter().enumerate() {
            steps.push(parse_step(index, step)?);
        }
    }
    Ok(Job {
        id: id.to_text(),
        line: id.line(),
        job_level_permissions: Permissions::from_node(body.get("permissions"))?,
        uses: body.get("uses").map(Node::to_text),
        env: env_vars(body.get("env")),
        steps,
    })
}

fn parse_step(index: usize, node: &Node) -> Result<Step, String> {
    if node.entries().is_none() {
        return Err(format!(
            "line {}: step {} is not a mapping",
            node.line(),
            index + 1
        ));
    }
    let uses = node.get_entry("uses");
    let run = node.get_entry("run");
    if uses.is_some() && run.is_some() {
        return Err(format!(
            "line {}: step {} has both `uses` and `run`",
            node.line(),
            index + 1
        ));
    }
    let (line, script_line) = match (uses, run) {
        (Some((k, _)), _) => (k.line(), k.line()),
        (_, Some((k, v))) => {
            let first = match v {
                Node::Scalar { block: true, .. } => k.line() + 1,
                other => other.line(),
            };
            (k.line(), first)
        }
        _ => (node.line(), node.line()),
    };
    let mut with_args = BTreeMap::new();
    let mut with_lines = BTreeMap::new();
    if let Some(entries) = node.get("with").and_then(Node::entries) {
        for (k, v) in entries {
            with_args.insert(k.to_text(), v.to_text());
            with_lines.insert(k.to_text(), k.line());
        }
    }
    Ok(Step {
        index,
        line,
        uses: uses.map(|(_, v)| v.to_text()),
        run_script: run.map(|(_, v)| v.to_text()),
        with_args,
        with_lines,
        env: env_vars(node.get("env")),
        script_line,
    })
}

fn env_vars(node: Option<&Node>) -> Vec<EnvVar> {
    node.and_then(Node::entries)
        .map(|entries| {
            entries
                .iter()
                .map(|(k, v)| EnvVar {
                    name: k.to_text(),
                    value: v.to_text(),
                    line: k.line(),
                })
                .collect()
        })
        .unwrap_or_default()
}

/// First line at or after `from` (1-based) whose text contains `needle`.
pub(crate) fn locate_line(source: &str, from: usize, needle: &str) -> Option<usize> {
    source
        .lines()
        .enumerate()
        .skip(from.saturating_sub(1))
        .find(|(_, l)| l.contains(needle))
        .map(|(i, _)| i + 1)
}
