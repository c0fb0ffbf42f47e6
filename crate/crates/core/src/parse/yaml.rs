//! Reader for the YAML subset used by ODD and COD documents.
//!
//! Accepted: block mappings, block sequences, single-line flow sequences,
//! `#` comments, plain and quoted scalars, any consistent indentation.
//! Rejected with a positioned error: tabs, anchors, aliases, tags, flow
//! mappings, block scalars, directives and multi-document markers.

use crate::model::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YamlError {
    pub message: String,
    pub pos: Pos,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, YamlError> {
    Err(YamlError { message: message.into(), pos: Pos::new(line, column) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarNode {
    pub text: String,
    pub quoted: bool,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// A key with no value; `pos` is the key's position.
    Null(Pos),
    Scalar(ScalarNode),
    Seq { items: Vec<ScalarNode>, pos: Pos },
    Map { entries: Vec<Entry>, pos: Pos },
}

impl Node {
    pub fn pos(&self) -> Pos {
        match self {
            Node::Null(p) => *p,
            Node::Scalar(s) => s.pos,
            Node::Seq { pos, .. } | Node::Map { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub key_pos: Pos,
    pub value: Node,
}

/// One non-blank line with comments and trailing spaces removed.
struct Line {
    no: usize,
    indent: usize,
    chars: Vec<char>,
}

impl Line {
    fn content(&self) -> &[char] {
        &self.chars[self.indent..]
    }

    fn is_seq_item(&self) -> bool {
        let c = self.content();
        c[0] == '-' && (c.len() == 1 || c[1] == ' ')
    }
}

fn opens_quote(chars: &[char], i: usize, indent: usize) -> bool {
    i == indent || matches!(chars[i - 1], ' ' | '[' | ',')
}

fn split_lines(text: &str) -> Result<Vec<Line>, YamlError> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let no = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let chars: Vec<char> = raw.chars().collect();
        let indent = chars.iter().take_while(|&&c| c == ' ').count();

        // Strip the comment while tracking quotes so `#` inside a string survives.
        let mut end = chars.len();
        let mut quote: Option<(char, usize)> = None;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '\t' {
                return err(no, i + 1, "tab characters are not allowed; indent with spaces");
            }
            match quote {
                Some(('"', _)) => {
                    if c == '\\' {
                        i += 1;
                    } else if c == '"' {
                        quote = None;
                    }
                }
                Some(('\'', _)) => {
                    if c == '\'' {
                        if chars.get(i + 1) == Some(&'\'') {
                            i += 1;
                        } else {
                            quote = None;
                        }
                    }
                }
                Some(_) => unreachable!(),
                None => {
                    if c == '#' && (i == 0 || chars[i - 1] == ' ') {
                        end = i;
                        break;
                    }
                    if (c == '"' || c == '\'') && opens_quote(&chars, i, indent) {
                        quote = Some((c, i));
                    }
                }
            }
            i += 1;
        }
        if let Some((_, start)) = quote {
            return err(no, start + 1, "unterminated quoted string");
        }
        let mut chars = chars[..end].to_vec();
        while chars.last() == Some(&' ') {
            chars.pop();
        }
        if chars.len() <= indent {
            continue;
        }
        if indent == 0 {
            let s: String = chars.iter().collect();
            if s == "---" || s == "..." || s.starts_with("--- ") {
                return err(no, 1, "multi-document streams are not supported here");
            }
            if s.starts_with('%') {
                return err(no, 1, "YAML directives are not supported");
            }
        }
        out.push(Line { no, indent, chars });
    }
    Ok(out)
}

/// Parses a document. Returns `None` when it holds no content.
pub fn parse_document(text: &str) -> Result<Option<Node>, YamlError> {
    let lines = split_lines(text)?;
    if lines.is_empty() {
        return Ok(None);
    }
    let mut p = Parser { lines: &lines, idx: 0 };
    let indent = lines[0].indent;
    let node = p.parse_block(indent)?;
    if let Some(line) = p.peek() {
        return err(line.no, line.indent + 1, "unexpected indentation");
    }
    Ok(Some(node))
}

struct Parser<'a> {
    lines: &'a [Line],
    idx: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Line> {
        self.lines.get(self.idx)
    }

    fn parse_block(&mut self, indent: usize) -> Result<Node, YamlError> {
        let line = &self.lines[self.idx];
        if line.is_seq_item() {
            self.parse_seq(indent)
        } else {
            self.parse_map(indent)
        }
    }

    fn parse_map(&mut self, indent: usize) -> Result<Node, YamlError> {
        let pos = Pos::new(self.lines[self.idx].no, indent + 1);
        let mut entries = Vec::new();
        while let Some(line) = self.peek() {
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return err(line.no, line.indent + 1, "unexpected indentation");
            }
            if line.is_seq_item() {
                return err(line.no, indent + 1, "expected a `key: value` entry, found a sequence item");
            }
            let no = line.no;
            let (key, key_col, rest_col) = split_key(line)?;
            let rest: Vec<char> = line.chars[rest_col.min(line.chars.len())..].to_vec();
            let key_pos = Pos::new(no, key_col + 1);
            self.idx += 1;
            let value = if rest.is_empty() {
                match self.peek() {
                    Some(next) if next.indent > indent => {
                        let child = next.indent;
                        self.parse_block(child)?
                    }
                    Some(next) if next.indent == indent && next.is_seq_item() => self.parse_seq(indent)?,
                    _ => Node::Null(key_pos),
                }
            } else {
                let v = parse_inline(&rest, no, rest_col + 1)?;
                if let Some(next) = self.peek() {
                    if next.indent > indent {
                        return err(next.no, next.indent + 1, "unexpected indentation after an inline value");
                    }
                }
                v
            };
            entries.push(Entry { key, key_pos, value });
        }
        Ok(Node::Map { entries, pos })
    }

    fn parse_seq(&mut self, indent: usize) -> Result<Node, YamlError> {
        let pos = Pos::new(self.lines[self.idx].no, indent + 1);
        let mut items = Vec::new();
        while let Some(line) = self.peek() {
            if line.indent != indent || !line.is_seq_item() {
                break;
            }
            let content = line.content();
            let skip = 1 + content[1..].iter().take_while(|&&c| c == ' ').count();
            let item = &content[skip..];
            let col = indent + skip + 1;
            if item.is_empty() {
                return err(line.no, indent + 1, "empty sequence item; nested blocks inside sequences are not supported");
            }
            items.push(parse_seq_element(item, line.no, col)?);
            self.idx += 1;
            if let Some(next) = self.peek() {
                if next.indent > indent {
                    return err(next.no, next.indent + 1, "unexpected indentation inside a sequence");
                }
            }
        }
        Ok(Node::Seq { items, pos })
    }
}

/// Splits `key: rest`, returning the key, its 0-based column and the 0-based
/// column where the value starts.
fn split_key(line: &Line) -> Result<(String, usize, usize), YamlError> {
    let chars = &line.chars;
    let start = line.indent;
    match chars[start] {
        '"' | '\'' => return err(line.no, start + 1, "quoted keys are not supported"),
        '?' if chars.get(start + 1).is_none_or(|&c| c == ' ') => {
            return err(line.no, start + 1, "complex mapping keys are not supported")
        }
        '[' | '{' => return err(line.no, start + 1, "flow collections are not supported as keys"),
        _ => {}
    }
    let colon = (start..chars.len()).find(|&i| chars[i] == ':' && chars.get(i + 1).is_none_or(|&c| c == ' '));
    let Some(colon) = colon else {
        return err(line.no, start + 1, "expected `key: value` (a colon followed by a space)");
    };
    let key: String = chars[start..colon].iter().collect::<String>().trim_end().to_string();
    if key.is_empty() {
        return err(line.no, start + 1, "empty mapping key");
    }
    let mut rest = colon + 1;
    while rest < chars.len() && chars[rest] == ' ' {
        rest += 1;
    }
    Ok((key, start, rest))
}

fn check_indicator(text: &[char], line: usize, col: usize) -> Result<(), YamlError> {
    let next = text.get(1).copied();
    match text[0] {
        '{' => err(line, col, "flow mappings are not supported"),
        '&' => err(line, col, "anchors are not supported"),
        '*' => err(line, col, "aliases are not supported"),
        '!' if next != Some('=') => err(line, col, "tags are not supported"),
        '|' => err(line, col, "block scalars are not supported"),
        '>' if matches!(next, None | Some('-') | Some('+')) => err(line, col, "block scalars are not supported"),
        '@' | '`' => err(line, col, format!("`{}` is reserved and cannot start a plain scalar", text[0])),
        _ => Ok(()),
    }
}

fn parse_inline(text: &[char], line: usize, col: usize) -> Result<Node, YamlError> {
    if text[0] == '[' {
        return parse_flow_seq(text, line, col);
    }
    check_indicator(text, line, col)?;
    if text[0] == '"' || text[0] == '\'' {
        let (s, used) = parse_quoted(text, line, col)?;
        if used < text.len() {
            return err(line, col + used, "unexpected text after quoted string");
        }
        return Ok(Node::Scalar(ScalarNode { text: s, quoted: true, pos: Pos::new(line, col) }));
    }
    plain_scalar(text, line, col).map(Node::Scalar)
}

fn plain_scalar(text: &[char], line: usize, col: usize) -> Result<ScalarNode, YamlError> {
    for i in 0..text.len() {
        if text[i] == ':' && text.get(i + 1).is_none_or(|&c| c == ' ') {
            return err(line, col + i, "nested mappings must start on their own line");
        }
    }
    Ok(ScalarNode { text: text.iter().collect(), quoted: false, pos: Pos::new(line, col) })
}

fn parse_seq_element(text: &[char], line: usize, col: usize) -> Result<ScalarNode, YamlError> {
    match text[0] {
        '[' => return err(line, col, "nested sequences are not supported"),
        '-' if text.get(1).is_none_or(|&c| c == ' ') => {
            return err(line, col, "nested sequences are not supported")
        }
        _ => {}
    }
    check_indicator(text, line, col)?;
    if text[0] == '"' || text[0] == '\'' {
        let (s, used) = parse_quoted(text, line, col)?;
        if used < text.len() {
            return err(line, col + used, "unexpected text after quoted string");
        }
        return Ok(ScalarNode { text: s, quoted: true, pos: Pos::new(line, col) });
    }
    plain_scalar(text, line, col).map_err(|e| YamlError {
        message: "mappings inside sequences are not supported".into(),
        pos: e.pos,
    })
}

/// Parses a quoted scalar at the start of `text`; returns the unescaped
/// string and the number of chars consumed.
fn parse_quoted(text: &[char], line: usize, col: usize) -> Result<(String, usize), YamlError> {
    let q = text[0];
    let mut out = String::new();
    let mut i = 1;
    while i < text.len() {
        let c = text[i];
        if q == '"' && c == '\\' {
            match text.get(i + 1) {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                _ => return err(line, col + i, "unsupported escape sequence; only \\\" and \\\\ are allowed"),
            }
            i += 2;
            continue;
        }
        if c == q {
            if q == '\'' && text.get(i + 1) == Some(&'\'') {
                out.push('\'');
                i += 2;
                continue;
            }
            return Ok((out, i + 1));
        }
        out.push(c);
        i += 1;
    }
    err(line, col, "unterminated quoted string")
}

fn parse_flow_seq(text: &[char], line: usize, col: usize) -> Result<Node, YamlError> {
    let pos = Pos::new(line, col);
    let mut items = Vec::new();
    let mut i = 1;
    let skip_spaces = |i: &mut usize| {
        while *i < text.len() && text[*i] == ' ' {
            *i += 1;
        }
    };
    skip_spaces(&mut i);
    if text.get(i) == Some(&']') {
        i += 1;
    } else {
        loop {
            skip_spaces(&mut i);
            let Some(&c) = text.get(i) else {
                return err(line, col, "unterminated flow sequence; flow sequences must fit on one line");
            };
            let elem_col = col + i;
            match c {
                '[' => return err(line, elem_col, "nested sequences are not supported"),
                ',' | ']' => return err(line, elem_col, "empty element in flow sequence"),
                '"' | '\'' => {
                    let (s, used) = parse_quoted(&text[i..], line, elem_col)?;
                    items.push(ScalarNode { text: s, quoted: true, pos: Pos::new(line, elem_col) });
                    i += used;
                }
                _ => {
                    check_indicator(&text[i..], line, elem_col)?;
                    let start = i;
                    while i < text.len() && text[i] != ',' && text[i] != ']' {
                        if matches!(text[i], '[' | '{' | '}') {
                            return err(line, col + i, format!("unexpected `{}` in flow sequence", text[i]));
                        }
                        i += 1;
                    }
                    let raw: String = text[start..i].iter().collect();
                    let trimmed = raw.trim_end_matches(' ');
                    if trimmed.contains(": ") || trimmed.ends_with(':') {
                        return err(line, elem_col, "flow mappings are not supported");
                    }
                    items.push(ScalarNode { text: trimmed.to_string(), quoted: false, pos: Pos::new(line, elem_col) });
                }
            }
            skip_spaces(&mut i);
            match text.get(i) {
                Some(',') => i += 1,
                Some(']') => {
                    i += 1;
                    break;
                }
                Some(_) => return err(line, col + i, "expected `,` or `]` in flow sequence"),
                None => return err(line, col, "unterminated flow sequence; flow sequences must fit on one line"),
            }
        }
    }
    if i < text.len() {
        return err(line, col + i, "unexpected text after flow sequence");
    }
    Ok(Node::Seq { items, pos })
}
