use serde::Serialize;

use super::contexts::{context_paths, UntrustedContexts};
use super::{locate_line, parse_workflows, source_of, EnvVar, ParsedWorkflows, Step, Workflow};
use crate::check::{CheckName, CheckResult, Detail, Score};
use crate::repo::RepoSnapshot;

/// Triggers that run with a privileged token on behalf of outside contributors.
const PRIVILEGED_TRIGGERS: &[&str] = &["pull_request_target", "workflow_run"];

/// Expressions that resolve to the contributor's head commit or branch.
const PR_HEAD_REFS: &[&str] = &[
    "github.event.pull_request.head.sha",
    "github.event.pull_request.head.ref",
    "github.event.pull_request.merge_commit_sha",
    "github.event.workflow_run.head_sha",
    "github.event.workflow_run.head_branch",
    "github.head_ref",
    "github.event.number",
    "github.event.pull_request.number",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingPattern {
    UntrustedCheckout,
    ScriptInjection,
}

impl FindingPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingPattern::UntrustedCheckout => "untrusted-checkout",
            FindingPattern::ScriptInjection => "script-injection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WorkflowFinding {
    pub path: String,
    pub line: usize,
    pub pattern: FindingPattern,
    /// Names the offending expression in backticks.
    pub detail: String,
}

impl WorkflowFinding {
    /// The context path quoted in the detail text.
    pub fn expression(&self) -> Option<&str> {
        self.detail.split('`').nth(1)
    }
}

pub fn find_dangerous_patterns(
    snapshot: &RepoSnapshot,
    parsed: &ParsedWorkflows,
    table: &UntrustedContexts,
) -> Vec<WorkflowFinding> {
    let mut findings = Vec::new();
    for wf in &parsed.workflows {
        let source = source_of(snapshot, &wf.path);
        untrusted_checkouts(wf, &mut findings);
        script_injections(wf, source, table, &mut findings);
        env_indirections(wf, table, &mut findings);
    }
    findings.sort();
    findings.dedup();
    findings
}

fn untrusted_checkouts(wf: &Workflow, out: &mut Vec<WorkflowFinding>) {
    let Some(trigger) = wf
        .triggers
        .iter()
        .find(|t| PRIVILEGED_TRIGGERS.contains(&t.as_str()))
    else {
        return;
    };
    for step in wf.jobs.iter().flat_map(|j| &j.steps) {
        let is_checkout = step
            .uses
            .as_deref()
            .is_some_and(|u| u.to_ascii_lowercase().starts_with("actions/checkout@"));
        if !is_checkout {
            continue;
        }
        let Some(reference) = step.with_args.get("ref") else {
            continue;
        };
        let line = step.with_lines.get("ref").copied().unwrap_or(step.line);
        for path in context_paths(reference) {
            let lower = path.to_ascii_lowercase();
            if PR_HEAD_REFS.contains(&lower.as_str()) {
                out.push(WorkflowFinding {
                    path: wf.path.clone(),
                    line,
                    pattern: FindingPattern::UntrustedCheckout,
                    detail: format!("checkout of untrusted code via `{path}` on {trigger}"),
                });
            }
        }
    }
}

fn script_injections(
    wf: &Workflow,
    source: &str,
    table: &UntrustedContexts,
    out: &mut Vec<WorkflowFinding>,
) {
    for step in wf.jobs.iter().flat_map(|j| &j.steps) {
        let Some(script) = step.run_script.as_deref() else {
            continue;
        };
        let mut paths = table.find_in(script);
        paths.sort();
        paths.dedup();
        if paths.is_empty() {
            continue;
        }
        let end = value_end_line(source, step.line);
        for path in paths {
            let mut found = false;
            let mut from = step.script_line.min(step.line);
            while let Some(line) = locate_line(source, from, &path).filter(|l| *l < end) {
                out.push(injection(wf, line, &path));
                found = true;
                from = line + 1;
            }
            if !found {
                out.push(injection(wf, step.line, &path));
            }
        }
    }
}

fn injection(wf: &Workflow, line: usize, path: &str) -> WorkflowFinding {
    WorkflowFinding {
        path: wf.path.clone(),
        line,
        pattern: FindingPattern::ScriptInjection,
        detail: format!("untrusted expression `{path}` interpolated into a run script"),
    }
}

/// Untrusted contexts copied into `env:` and then expanded into a script
/// through `${{ env.NAME }}` are reported at the assignment.
fn env_indirections(wf: &Workflow, table: &UntrustedContexts, out: &mut Vec<WorkflowFinding>) {
    let all_steps: Vec<&Step> = wf.jobs.iter().flat_map(|j| &j.steps).collect();
    report_env(wf, &wf.env, &all_steps, table, out);
    for job in &wf.jobs {
        let steps: Vec<&Step> = job.steps.iter().collect();
        report_env(wf, &job.env, &steps, table, out);
        for step in &job.steps {
            report_env(wf, &step.env, &[step], table, out);
        }
    }
}

fn report_env(
    wf: &Workflow,
    vars: &[EnvVar],
    scope: &[&Step],
    table: &UntrustedContexts,
    out: &mut Vec<WorkflowFinding>,
) {
    for var in vars {
        let tainted = table.find_in(&var.value);
        if tainted.is_empty() {
            continue;
        }
        let reference = format!("env.{}", var.name);
        let used = scope.iter().any(|s| {
            s.run_script.as_deref().is_some_and(|script| {
                context_paths(script)
                    .iter()
                    .any(|p| p.eq_ignore_ascii_case(&reference))
            })
        });
        if !used {
            continue;
        }
        for path in tainted {
            out.push(WorkflowFinding {
                path: wf.path.clone(),
                line: var.line,
                pattern: FindingPattern::ScriptInjection,
                detail: format!(
                    "untrusted expression `{path}` assigned to env {} and interpolated via `{reference}` in a run script",
                    var.name
                ),
            });
        }
    }
}

/// First line after `key_line` that is indented no deeper than the key,
/// i.e. where the key's value ends.
fn value_end_line(source: &str, key_line: usize) -> usize {
    let lines: Vec<&str> = source.lines().collect();
    let Some(key_text) = lines.get(key_line.saturating_sub(1)) else {
        return key_line + 1;
    };
    let key_indent = key_indent(key_text);
    for (i, l) in lines.iter().enumerate().skip(key_line) {
        if l.trim().is_empty() || l.trim_start().starts_with('#') {
            continue;
        }
        if leading_spaces(l) <= key_indent {
            return i + 1;
        }
    }
    lines.len() + 1
}

fn leading_spaces(l: &str) -> usize {
    l.len() - l.trim_start_matches(' ').len()
}

/// Column of the mapping key on `line`, skipping sequence dashes.
fn key_indent(line: &str) -> usize {
    let mut col = leading_spaces(line);
    let mut rest = &line[col..];
    while let Some(r) = rest.strip_prefix('-') {
        let spaces = r.len() - r.trim_start_matches(' ').len();
        col += 1 + spaces;
        rest = &r[spaces..];
    }
    col
}

pub fn check_dangerous_workflow(snapshot: &RepoSnapshot) -> CheckResult {
    check_with_table(snapshot, &UntrustedContexts::default())
}

pub(crate) fn check_with_table(snapshot: &RepoSnapshot, table: &UntrustedContexts) -> CheckResult {
    let name = CheckName::DangerousWorkflow;
    let parsed = parse_workflows(snapshot);
    let failure_details: Vec<Detail> = parsed
        .failures
        .iter()
        .map(|f| Detail::in_file(&f.path, format!("parse failure: {}", f.reason)))
        .collect();
    if parsed.file_count() == 0 {
        return CheckResult::inconclusive(name, "no workflows found");
    }
    if parsed.workflows.is_empty() {
        return CheckResult::inconclusive(name, "no workflow could be parsed")
            .with_details(failure_details);
    }
    let findings = find_dangerous_patterns(snapshot, &parsed, table);
    let mut details = failure_details;
    details.extend(findings.iter().map(|f| {
        Detail::at(
            &f.path,
            f.line,
            format!("{}: {}", f.pattern.as_str(), f.detail),
        )
    }));
    if findings.is_empty() {
        CheckResult::new(name, Score::MAX, "no dangerous workflow patterns detected")
            .with_details(details)
    } else {
        CheckResult::new(
            name,
            Score::MIN,
            format!("{} dangerous workflow patterns detected", findings.len()),
        )
        .with_details(details)
    }
}
