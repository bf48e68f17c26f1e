//! Minimal YAML document tree that remembers source lines.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

use yaml_rust2::parser::{Event, MarkedEventReceiver, Parser};
use yaml_rust2::scanner::{Marker, TScalarStyle};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Scalar {
        value: String,
        /// Block scalars (`|`, `>`) start on the line after their key.
        block: bool,
        line: usize,
    },
    Seq {
        items: Vec<Node>,
        line: usize,
    },
    Map {
        entries: Vec<(Node, Node)>,
        line: usize,
    },
}

impl Node {
    pub fn line(&self) -> usize {
        match self {
            Node::Scalar { line, .. } | Node::Seq { line, .. } | Node::Map { line, .. } => *line,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Node::Scalar { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn entries(&self) -> Option<&[(Node, Node)]> {
        match self {
            Node::Map { entries, .. } => Some(entries),
            _ => None,
        }
    }

    pub fn items(&self) -> Option<&[Node]> {
        match self {
            Node::Seq { items, .. } => Some(items),
            _ => None,
        }
    }

    /// Looks up a mapping entry by scalar key, returning key and value.
    pub fn get_entry(&self, key: &str) -> Option<(&Node, &Node)> {
        self.entries()?
            .iter()
            .find(|(k, _)| k.as_str() == Some(key))
            .map(|(k, v)| (k, v))
    }

    pub fn get(&self, key: &str) -> Option<&Node> {
        self.get_entry(key).map(|(_, v)| v)
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Node::Scalar { value, block: false, .. } if value.is_empty() || value == "~" || value == "null")
    }

    /// Scalar text, or a compact rendering for collections.
    pub fn to_text(&self) -> String {
        match self {
            Node::Scalar { value, .. } => value.clone(),
            Node::Seq { items, .. } => items
                .iter()
                .map(Node::to_text)
                .collect::<Vec<_>>()
                .join(","),
            Node::Map { entries, .. } => entries
                .iter()
                .map(|(k, v)| format!("{}: {}", k.to_text(), v.to_text()))
                .collect::<Vec<_>>()
                .join(", "),
        }
    }
}

enum Frame {
    Seq(Vec<Node>, usize, usize),
    Map(Vec<Node>, usize, usize),
}

#[derive(Default)]
struct Builder {
    stack: Vec<Frame>,
    anchors: HashMap<usize, Node>,
    docs: Vec<Node>,
}

impl Builder {
    fn push_node(&mut self, node: Node, anchor: usize) {
        if anchor > 0 {
            self.anchors.insert(anchor, node.clone());
        }
        match self.stack.last_mut() {
            Some(Frame::Seq(items, ..)) | Some(Frame::Map(items, ..)) => items.push(node),
            None => self.docs.push(node),
        }
    }
}

impl MarkedEventReceiver for Builder {
    fn on_event(&mut self, ev: Event, mark: Marker) {
        let line = mark.line();
        match ev {
            Event::Scalar(value, style, anchor, _) => {
                let block = matches!(style, TScalarStyle::Literal | TScalarStyle::Folded);
                self.push_node(Node::Scalar { value, block, line }, anchor);
            }
            Event::SequenceStart(anchor, _) => {
                self.stack.push(Frame::Seq(Vec::new(), line, anchor))
            }
            Event::MappingStart(anchor, _) => self.stack.push(Frame::Map(Vec::new(), line, anchor)),
            Event::SequenceEnd => {
                if let Some(Frame::Seq(items, line, anchor)) = self.stack.pop() {
                    self.push_node(Node::Seq { items, line }, anchor);
                }
            }
            Event::MappingEnd => {
                if let Some(Frame::Map(flat, line, anchor)) = self.stack.pop() {
                    let mut entries = Vec::with_capacity(flat.len() / 2);
                    let mut it = flat.into_iter();
                    while let (Some(k), Some(v)) = (it.next(), it.next()) {
                        entries.push((k, v));
                    }
                    self.push_node(Node::Map { entries, line }, anchor);
                }
            }
            Event::Alias(id) => {
                let node = self.anchors.get(&id).cloned().unwrap_or(Node::Scalar {
                    value: String::new(),
                    block: false,
                    line,
                });
                self.push_node(node, 0);
            }
            _ => {}
        }
    }
}

/// Parses the first document of `src`. An empty stream yields a null scalar.
pub(crate) fn parse(src: &str) -> Result<Node, String> {
    let mut builder = Builder::default();
    let mut parser = Parser::new_from_str(src);
    parser
        .load(&mut builder, false)
        .map_err(|e| e.to_string())?;
    Ok(builder.docs.into_iter().next().unwrap_or(Node::Scalar {
        value: String::new(),
        block: false,
        line: 1,
    }))
}

static PLAIN_PAIR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\s*(?:-\s+)*[A-Za-z0-9_.-]+:[ \t]+)(.*?)[ \t]*$").expect("pair regex")
});

/// Like [`parse`], but when the strict parse fails, retries once with plain
/// scalars that contain `": "` rewritten as single-quoted scalars. CI
/// runners accept such lines in practice. Rewriting is per line, so line
/// numbers are unchanged. Returns the repaired line numbers.
pub(crate) fn parse_lenient(src: &str) -> Result<(Node, Vec<usize>), String> {
    let err = match parse(src) {
        Ok(node) => return Ok((node, Vec::new())),
        Err(e) => e,
    };
    let mut repaired = Vec::new();
    let lines: Vec<String> = src
        .lines()
        .enumerate()
        .map(|(i, line)| match quote_plain_value(line) {
            Some(fixed) => {
                repaired.push(i + 1);
                fixed
            }
            None => line.to_string(),
        })
        .collect();
    if repaired.is_empty() {
        return Err(err);
    }
    let node = parse(&lines.join("\n")).map_err(|_| err)?;
    Ok((node, repaired))
}

fn quote_plain_value(line: &str) -> Option<String> {
    let caps = PLAIN_PAIR.captures(line)?;
    let value = caps.get(2)?.as_str();
    let value = value.split(" #").next().unwrap_or(value).trim_end();
    let quoted_or_special = value.starts_with([
        '"', '\'', '|', '>', '[', '{', '&', '*', '!', '#', '%', '@', '`',
    ]);
    if value.is_empty() || quoted_or_special || !value.contains(": ") {
        return None;
    }
    Some(format!("{}'{}'", &caps[1], value.replace('\'', "''")))
}
