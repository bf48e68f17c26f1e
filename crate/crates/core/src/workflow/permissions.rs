use super::{parse_workflows, Permissions};
use crate::check::{ratio_score, CheckName, CheckResult, Detail};
use crate::repo::RepoSnapshot;

/// Each parsed workflow must restrict its top-level token to read-only;
/// write scopes are allowed only at job level.
pub fn check_token_permissions(snapshot: &RepoSnapshot) -> CheckResult {
    let name = CheckName::TokenPermissions;
    let parsed = parse_workflows(snapshot);
    let mut details: Vec<Detail> = parsed
        .failures
        .iter()
        .map(|f| Detail::in_file(&f.path, format!("parse failure: {}", f.reason)))
        .collect();
    if parsed.file_count() == 0 {
        return CheckResult::inconclusive(name, "no workflows found");
    }
    if parsed.workflows.is_empty() {
        return CheckResult::inconclusive(name, "no workflow could be parsed")
            .with_details(details);
    }

    let mut compliant = 0;
    for wf in &parsed.workflows {
        match &wf.top_level_permissions {
            Permissions::NoneDeclared => details.push(Detail::in_file(
                &wf.path,
                "no top-level permissions declared; token defaults apply",
            )),
            p if p.grants_write() => details.push(Detail::in_file(
                &wf.path,
                format!("top-level permissions grant write access: {}", describe(p)),
            )),
            _ => compliant += 1,
        }
    }
    let total = parsed.workflows.len();
    CheckResult::new(
        name,
        ratio_score(compliant, total),
        format!("{compliant} of {total} workflows declare read-only top-level tokens"),
    )
    .with_details(details)
}

fn describe(p: &Permissions) -> String {
    match p {
        Permissions::WriteAll => "write-all".into(),
        Permissions::Scoped(m) => m
            .iter()
            .filter(|(_, a)| **a == super::Access::Write)
            .map(|(k, _)| format!("{k}: write"))
            .collect::<Vec<_>>()
            .join(", "),
        Permissions::ReadAll => "read-all".into(),
        Permissions::NoneDeclared => "none declared".into(),
    }
}
