//! Programmatic fixture corpus shared by the integration tests.
//!
//! Each fixture is a small repository plus an optional forge metadata file.
//! `Corpus::build` writes all of them, and one shared intel directory, into
//! a temporary directory.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tempfile::TempDir;

pub const NOW: i64 = 1_700_000_000;
pub const DAY: i64 = 86_400;
pub const SHA: &str = "8f4b7f84864484a7bf31766abe9204da3cbe65b3";

pub struct Fixture {
    pub name: &'static str,
    pub files: Vec<(String, Vec<u8>)>,
    pub metadata: Option<Value>,
}

impl Fixture {
    fn new(name: &'static str) -> Fixture {
        Fixture {
            name,
            files: Vec::new(),
            metadata: None,
        }
    }

    fn file(mut self, path: &str, content: impl AsRef<[u8]>) -> Fixture {
        self.files
            .push((path.to_string(), content.as_ref().to_vec()));
        self
    }

    fn meta(mut self, mut value: Value) -> Fixture {
        value["repo"] = json!(repo_id(self.name));
        self.metadata = Some(value);
        self
    }

    fn readme(self) -> Fixture {
        self.file("README.md", "# fixture\n")
    }
}

pub fn repo_id(name: &str) -> String {
    format!("github.com/fixtures/{name}")
}

pub struct Corpus {
    pub dir: TempDir,
    pub fixtures: Vec<&'static str>,
}

impl Corpus {
    pub fn build() -> Corpus {
        let dir = tempfile::tempdir().expect("tempdir");
        let fixtures = all_fixtures();
        let names = fixtures.iter().map(|f| f.name).collect();
        for f in &fixtures {
            let root = dir.path().join("repos").join(f.name);
            fs::create_dir_all(&root).unwrap();
            for (path, bytes) in &f.files {
                let target = root.join(path);
                fs::create_dir_all(target.parent().unwrap()).unwrap();
                fs::write(target, bytes).unwrap();
            }
            if let Some(m) = &f.metadata {
                let meta_dir = dir.path().join("meta");
                fs::create_dir_all(&meta_dir).unwrap();
                fs::write(
                    meta_dir.join(format!("{}.json", f.name)),
                    serde_json::to_vec_pretty(m).unwrap(),
                )
                .unwrap();
            }
        }
        write_intel(&dir.path().join("intel"));
        Corpus {
            dir,
            fixtures: names,
        }
    }

    pub fn repo(&self, name: &str) -> PathBuf {
        self.dir.path().join("repos").join(name)
    }

    pub fn metadata(&self, name: &str) -> Option<PathBuf> {
        let p = self.dir.path().join("meta").join(format!("{name}.json"));
        p.exists().then_some(p)
    }

    pub fn intel(&self) -> PathBuf {
        self.dir.path().join("intel")
    }
}

fn write_intel(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let ten: Vec<String> = (1..=10).map(|i| format!("OSV-2024-{i:03}")).collect();
    let osv = json!({ "repos": {
        repo_id("vulns-one"): ["OSV-2024-001"],
        repo_id("vulns-ten"): ten,
    }});
    fs::write(
        dir.join("osv.json"),
        serde_json::to_vec_pretty(&osv).unwrap(),
    )
    .unwrap();
    fs::write(
        dir.join("ossfuzz.txt"),
        format!("# projects on OSS-Fuzz\nhttps://{}\n", repo_id("all-good")),
    )
    .unwrap();
    let cii = json!({ repo_id("all-good"): "gold", repo_id("cii-passing"): "passing" });
    fs::write(
        dir.join("cii.json"),
        serde_json::to_vec_pretty(&cii).unwrap(),
    )
    .unwrap();
}

/// Bytes that are not valid UTF-8.
pub const BINARY_BYTES: &[u8] = &[0x7f, b'E', b'L', b'F', 0xff, 0xfe, 0x00, 0x01, 0x9c, 0x80];

pub const CASE_STUDY_WORKFLOW: &str = "\
name: issue triage
on:
  issues:
    types: [opened]

jobs:
  triage:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v3
      - name: print title
        run: echo \"ISSUE TITLE: ${{github.event.issue.title}}\"
";
/// 1-based line of the `run:` in [`CASE_STUDY_WORKFLOW`].
pub const CASE_STUDY_LINE: usize = 12;

pub const CHECKOUT_WORKFLOW: &str = "\
name: pr build
on: pull_request_target
permissions: read-all
jobs:
  build:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
        with:
          ref: ${{ github.event.pull_request.head.sha }}
      - run: make test
";
pub const CHECKOUT_LINE: usize = 10;

fn commits(n: usize, spacing_days: i64, author: &str, reviewed: bool) -> Value {
    let items: Vec<Value> = (0..n)
        .map(|i| {
            json!({
                "id": format!("c{i:03}"),
                "author": author,
                "committer": author,
                "merger": if reviewed { json!("lead") } else { Value::Null },
                "timestamp": NOW - (i as i64) * spacing_days * DAY - 60,
                "approved_review_platforms": [],
                "message": format!("change {i}"),
            })
        })
        .collect();
    Value::Array(items)
}

fn protection(tier: u8) -> Value {
    json!({
        "enabled": tier >= 1,
        "block_force_push": tier >= 1,
        "block_deletion": tier >= 1,
        "required_reviewers": if tier >= 4 { 2 } else if tier >= 2 { 1 } else { 0 },
        "status_checks_required": tier >= 3,
        "dismiss_stale_reviews": tier >= 5,
    })
}

fn releases(signed: &[bool]) -> Value {
    let items: Vec<Value> = signed
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut assets = vec![format!("pkg-{i}.tar.gz")];
            if *s {
                assets.push(format!("pkg-{i}.tar.gz.asc"));
            }
            json!({ "tag": format!("v1.{i}.0"), "created_at": NOW - (10 - i as i64) * 30 * DAY, "assets": assets })
        })
        .collect();
    Value::Array(items)
}

const GOOD_WORKFLOW_TEMPLATE: &str = "\
name: release
on:
  push:
    tags: ['v*']
permissions: read-all
jobs:
  publish:
    runs-on: ubuntu-latest
    permissions:
      id-token: write
    steps:
      - uses: actions/checkout@SHA
      - uses: pypa/gh-action-pypi-publish@SHA
";

fn good_workflow() -> String {
    GOOD_WORKFLOW_TEMPLATE.replace("SHA", SHA)
}

fn good_metadata() -> Value {
    json!({
        "default_branch": "main",
        "archived": false,
        "branches": { "main": protection(5) },
        "commits": commits(15, 5, "alice", true),
        "releases": releases(&[true; 6]),
        "tags": [],
        "issues": [],
        "contributors": [{ "login": "alice", "company": "acme" }],
    })
}

fn ci_workflow(body: &str) -> String {
    format!("name: ci\non: push\npermissions:\n  contents: read\njobs:\n  build:\n    runs-on: ubuntu-latest\n    steps:\n{body}")
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![
        Fixture::new("all-good")
            .file("README.md", "# all good\n")
            .file("LICENSE", "Apache License 2.0\n")
            .file("SECURITY.md", "Report issues to security@example.com\n")
            .file(".github/dependabot.yml", "version: 2\nupdates: []\n")
            .file(".github/workflows/release.yml", good_workflow())
            .meta(good_metadata()),
        Fixture::new("empty"),
        Fixture::new("case-study")
            .readme()
            .file(".github/workflows/triage.yml", CASE_STUDY_WORKFLOW),
        Fixture::new("untrusted-checkout")
            .readme()
            .file(".github/workflows/pr.yml", CHECKOUT_WORKFLOW),
        Fixture::new("no-workflows").readme().file("src/main.py", "print('hi')\n"),
        Fixture::new("txt-not-binary")
            .readme()
            .file("notes.txt", BINARY_BYTES)
            .file("data/dump.txt", BINARY_BYTES),
        Fixture::new("binary-one").readme().file("bin/tool.exe", BINARY_BYTES),
        {
            let mut f = Fixture::new("binaries-ten").readme();
            for i in 0..10 {
                f = f.file(&format!("lib/mod{i}.so"), BINARY_BYTES);
            }
            f
        },
        {
            let mut f = Fixture::new("binaries-twelve").readme();
            for i in 0..12 {
                f = f.file(&format!("classes/C{i}.class"), BINARY_BYTES);
            }
            f
        },
        Fixture::new("vulns-one").readme(),
        Fixture::new("vulns-ten").readme(),
        Fixture::new("signed-four-of-five").readme().meta(json!({
            "default_branch": "main",
            "releases": releases(&[false, false, false, true, true, true, true, false]),
        })),
        Fixture::new("unsigned-tags").readme().meta(json!({
            "default_branch": "main",
            "releases": [],
            "tags": [
                { "name": "v1.0.0", "timestamp": NOW - 300 * DAY, "verified": false },
                { "name": "v1.1.0", "timestamp": NOW - 200 * DAY, "verified": false },
                { "name": "v1.2.0", "timestamp": NOW - 100 * DAY, "verified": false },
            ],
        })),
        Fixture::new("license-in-readme").file("README.md", "# pkg\n\n## License\n\nMIT, see the notice above.\n"),
        Fixture::new("publish-in-ci").readme().file(
            ".github/workflows/ci.yml",
            ci_workflow("      - run: npm test\n      - run: npm publish --provenance\n"),
        ),
        Fixture::new("archived").readme().meta(json!({
            "default_branch": "main",
            "archived": true,
            "commits": commits(20, 1, "bob", false),
        })),
        Fixture::new("single-maintainer").readme().meta(json!({
            "default_branch": "main",
            "branches": { "main": protection(1) },
            "commits": commits(30, 2, "carol", false),
        })),
        Fixture::new("branch-tier-three").readme().meta(json!({
            "default_branch": "main",
            "branches": { "main": protection(3), "release-1.x": protection(1) },
            "commits": commits(5, 3, "dave", true),
        })),
        Fixture::new("env-indirection").readme().file(
            ".github/workflows/comment.yml",
            "on: issue_comment\npermissions: read-all\njobs:\n  a:\n    runs-on: ubuntu-latest\n    env:\n      BODY: ${{ github.event.comment.body }}\n    steps:\n      - run: echo \"${{ env.BODY }}\"\n",
        ),
        Fixture::new("block-script-injection").readme().file(
            ".github/workflows/pr.yml",
            "on: pull_request\npermissions: read-all\njobs:\n  a:\n    runs-on: ubuntu-latest\n    steps:\n      - run: |\n          echo start\n          echo \"${{ github.event.pull_request.title }}\"\n",
        ),
        Fixture::new("unpinned-dockerfile")
            .readme()
            .file("Dockerfile", "FROM python:3.12\nRUN pip install flask requests==2.31.0\n"),
        Fixture::new("pinned-dockerfile").readme().file(
            "Dockerfile",
            "FROM python@sha256:4d2191666712a2af6c8dbd2b3dbf1e7f32e2c1d41bb1e1f8ba0f5cc7e9cc4a1a\nRUN pip install requests==2.31.0\n",
        ),
        Fixture::new("curl-pipe-bash")
            .readme()
            .file("install.sh", "#!/bin/sh\nset -e\ncurl -fsSL https://get.example.com/setup.sh | bash\n"),
        Fixture::new("npm-with-lockfile")
            .readme()
            .file("package.json", "{\n  \"name\": \"x\",\n  \"dependencies\": {\n    \"left-pad\": \"^1.3.0\"\n  }\n}\n")
            .file("package-lock.json", "{\"lockfileVersion\": 3}\n"),
        Fixture::new("npm-without-lockfile")
            .readme()
            .file("package.json", "{\n  \"name\": \"x\",\n  \"dependencies\": {\n    \"left-pad\": \"^1.3.0\",\n    \"lodash\": \"4.17.21\"\n  }\n}\n"),
        Fixture::new("requirements-mixed")
            .readme()
            .file("requirements.txt", "requests==2.31.0\nflask>=2.0\nnumpy==1.26.0\nclick\n"),
        Fixture::new("pyproject-poetry").readme().file(
            "pyproject.toml",
            "[tool.poetry]\nname = \"x\"\nlicense = \"MIT\"\n\n[tool.poetry.dependencies]\npython = \"^3.10\"\nrequests = \"2.31.0\"\nhttpx = \"^0.27\"\n",
        ),
        Fixture::new("renovate").readme().file("renovate.json", "{\"extends\": [\"config:base\"]}\n"),
        Fixture::new("security-in-github-dir")
            .readme()
            .file(".github/SECURITY.md", "Email security@example.com\n"),
        Fixture::new("write-all-permissions").readme().file(
            ".github/workflows/ci.yml",
            "on: push\npermissions: write-all\njobs:\n  a:\n    runs-on: ubuntu-latest\n    steps:\n      - run: make\n",
        ),
        Fixture::new("undeclared-permissions").readme().file(
            ".github/workflows/ci.yml",
            "on: push\njobs:\n  a:\n    runs-on: ubuntu-latest\n    steps:\n      - run: make\n",
        ),
        Fixture::new("malformed-workflow")
            .readme()
            .file(".github/workflows/broken.yml", "on: [push\njobs: {\n"),
        Fixture::new("cii-passing").readme(),
        Fixture::new("gerrit-reviewed").readme().meta(json!({
            "default_branch": "main",
            "branches": { "main": protection(0) },
            "commits": [
                { "id": "a", "author": "x", "committer": "x", "timestamp": NOW - DAY, "approved_review_platforms": ["gerrit"] },
                { "id": "b", "author": "y", "committer": "y", "timestamp": NOW - 2 * DAY, "approved_review_platforms": ["prow"] },
                { "id": "c", "author": "z", "committer": "z", "timestamp": NOW - 3 * DAY },
                { "id": "d", "author": "x", "committer": "x", "merger": "y", "timestamp": NOW - 4 * DAY },
            ],
            "issues": [
                { "created_at": NOW - DAY, "author_association": "MEMBER" },
                { "created_at": NOW - DAY, "author_association": "NONE" },
            ],
        })),
        Fixture::new("licenses-dir").readme().file("LICENSES/Apache-2.0.txt", "Apache License\n"),
    ]
}
