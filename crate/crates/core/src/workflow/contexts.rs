//! Expression scanning and the untrusted-context table.

use std::sync::LazyLock;

use regex::Regex;

const BUILTIN_TABLE: &str = include_str!("untrusted_contexts.txt");

static EXPRESSION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)\$\{\{(.*?)\}\}").expect("expression regex"));

static CONTEXT_PATH: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"[A-Za-z_][A-Za-z0-9_-]*(?:\.[A-Za-z0-9_*-]+|\[[^\]]*\])*").expect("context regex")
});

/// Table of attacker-controllable context paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UntrustedContexts {
    patterns: Vec<Vec<String>>,
}

impl Default for UntrustedContexts {
    fn default() -> Self {
        UntrustedContexts::parse(BUILTIN_TABLE)
    }
}

impl UntrustedContexts {
    /// One path per line, `#` comments.
    pub fn parse(table: &str) -> UntrustedContexts {
        let patterns = table
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(segments)
            .collect();
        UntrustedContexts { patterns }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// True when some table entry is a (wildcard-aware) prefix of `path`.
    pub fn is_untrusted(&self, path: &str) -> bool {
        let segs = segments(path);
        self.patterns.iter().any(|p| {
            p.len() <= segs.len()
                && p.iter()
                    .zip(&segs)
                    .all(|(want, got)| want == "*" || want == got)
        })
    }

    /// Untrusted context paths referenced inside `${{ }}` expressions in
    /// `text`, as written, in order of appearance.
    pub fn find_in(&self, text: &str) -> Vec<String> {
        context_paths(text)
            .into_iter()
            .filter(|p| self.is_untrusted(p))
            .collect()
    }
}

/// Every context-path token inside `${{ }}` expressions, as written.
pub fn context_paths(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for cap in EXPRESSION.captures_iter(text) {
        let inner = &cap[1];
        // Skip quoted string literals so `'github.head_ref'` is not a reference.
        let stripped = strip_string_literals(inner);
        for m in CONTEXT_PATH.find_iter(&stripped) {
            out.push(inner[m.start()..m.end()].to_string());
        }
    }
    out
}

fn strip_string_literals(expr: &str) -> String {
    let mut out = String::with_capacity(expr.len());
    let mut in_str = false;
    for c in expr.chars() {
        if c == '\'' {
            in_str = !in_str;
            out.push(' ');
        } else if in_str {
            out.extend(std::iter::repeat_n(' ', c.len_utf8()));
        } else {
            out.push(c);
        }
    }
    out
}

/// `github.event.commits[0].message` -> `[github, event, commits, 0, message]`.
fn segments(path: &str) -> Vec<String> {
    let mut segs = Vec::new();
    for part in path.split('.') {
        let mut rest = part;
        while let Some(open) = rest.find('[') {
            if open > 0 {
                segs.push(rest[..open].to_ascii_lowercase());
            }
            let close = rest[open..].find(']').map_or(rest.len(), |c| open + c);
            let inner = rest[open + 1..close].trim_matches(|c| c == '\'' || c == '"');
            segs.push(inner.to_ascii_lowercase());
            rest = rest.get(close + 1..).unwrap_or("");
        }
        if !rest.is_empty() {
            segs.push(rest.to_ascii_lowercase());
        }
    }
    segs
}
