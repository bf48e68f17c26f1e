use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use super::{locate_line, parse_workflows, source_of};
use crate::repo::RepoSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PublishMechanism {
    PypiAction,
    NpmAction,
    Twine,
    NpmCli,
    YarnCli,
    PnpmCli,
    PoetryCli,
    FlitCli,
    HatchCli,
    UvCli,
    CargoCli,
    GemCli,
}

impl PublishMechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            PublishMechanism::PypiAction => "pypi-action",
            PublishMechanism::NpmAction => "npm-action",
            PublishMechanism::Twine => "twine",
            PublishMechanism::NpmCli => "npm-cli",
            PublishMechanism::YarnCli => "yarn-cli",
            PublishMechanism::PnpmCli => "pnpm-cli",
            PublishMechanism::PoetryCli => "poetry-cli",
            PublishMechanism::FlitCli => "flit-cli",
            PublishMechanism::HatchCli => "hatch-cli",
            PublishMechanism::UvCli => "uv-cli",
            PublishMechanism::CargoCli => "cargo-cli",
            PublishMechanism::GemCli => "gem-cli",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PublishSignal {
    pub path: String,
    pub line: usize,
    pub mechanism: PublishMechanism,
}

const PUBLISH_ACTIONS: &[(&str, PublishMechanism)] = &[
    ("pypa/gh-action-pypi-publish", PublishMechanism::PypiAction),
    ("js-devtools/npm-publish", PublishMechanism::NpmAction),
];

static PUBLISH_COMMANDS: LazyLock<Vec<(Regex, PublishMechanism)>> = LazyLock::new(|| {
    [
        (r"\btwine\s+upload\b", PublishMechanism::Twine),
        (r"\bnpm\s+publish\b", PublishMechanism::NpmCli),
        (r"\byarn\s+(?:npm\s+)?publish\b", PublishMechanism::YarnCli),
        (r"\bpnpm\s+(?:-r\s+)?publish\b", PublishMechanism::PnpmCli),
        (r"\bpoetry\s+publish\b", PublishMechanism::PoetryCli),
        (r"\bflit\s+publish\b", PublishMechanism::FlitCli),
        (r"\bhatch\s+publish\b", PublishMechanism::HatchCli),
        (r"\buv\s+publish\b", PublishMechanism::UvCli),
        (r"\bcargo\s+publish\b", PublishMechanism::CargoCli),
        (r"\bgem\s+push\b", PublishMechanism::GemCli),
    ]
    .into_iter()
    .map(|(re, m)| (Regex::new(re).expect("publish regex"), m))
    .collect()
});

/// Steps that publish a package to a registry, found by step content.
/// Workflow file names are not consulted.
pub fn detect_publish_signals(snapshot: &RepoSnapshot) -> Vec<PublishSignal> {
    let parsed = parse_workflows(snapshot);
    let mut signals = Vec::new();
    for wf in &parsed.workflows {
        let source = source_of(snapshot, &wf.path);
        for step in wf.jobs.iter().flat_map(|j| &j.steps) {
            if let Some(uses) = &step.uses {
                let action = uses.split('@').next().unwrap_or("").to_ascii_lowercase();
                if let Some((_, m)) = PUBLISH_ACTIONS.iter().find(|(a, _)| *a == action) {
                    signals.push(PublishSignal {
                        path: wf.path.clone(),
                        line: step.line,
                        mechanism: *m,
                    });
                }
            }
            let Some(script) = &step.run_script else {
                continue;
            };
            for script_line in script.lines() {
                for (re, m) in PUBLISH_COMMANDS.iter() {
                    if let Some(hit) = re.find(script_line) {
                        let line =
                            locate_line(source, step.line, hit.as_str()).unwrap_or(step.line);
                        signals.push(PublishSignal {
                            path: wf.path.clone(),
                            line,
                            mechanism: *m,
                        });
                    }
                }
            }
        }
    }
    signals.sort();
    signals.dedup();
    signals
}
