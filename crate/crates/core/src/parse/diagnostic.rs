use std::fmt;

use serde::Serialize;

use crate::model::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// What a diagnostic is about: malformed input or ill-sorted values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    Syntax,
    Sort,
}

/// A positioned message about an input document. `line` and `column` are
/// 1-based and `snippet` holds the offending source line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub snippet: String,
}

impl Diagnostic {
    pub fn error(text: &str, pos: Pos, message: impl Into<String>) -> Self {
        let snippet = text.lines().nth(pos.line.saturating_sub(1)).unwrap_or("");
        Self {
            severity: Severity::Error,
            kind: DiagnosticKind::Syntax,
            message: message.into(),
            line: pos.line.max(1),
            column: pos.column.max(1),
            snippet: snippet.trim_end_matches('\r').to_string(),
        }
    }

    pub fn with_kind(mut self, kind: DiagnosticKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `origin:line:column: error: message` followed by the source line and
    /// a caret under the column.
    pub fn render(&self, origin: &str) -> String {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let caret = " ".repeat(self.column.saturating_sub(1));
        format!(
            "{origin}:{}:{}: {severity}: {}\n  {}\n  {caret}^",
            self.line, self.column, self.message, self.snippet
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// An input document: full UTF-8 text plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDoc {
    pub text: String,
    pub origin: String,
}

impl SourceDoc {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        Self { text: text.into(), origin: origin.into() }
    }

    pub fn memory(text: impl Into<String>) -> Self {
        Self::new(text, "<memory>")
    }

    /// Decodes raw bytes, reporting the first invalid UTF-8 sequence.
    pub fn from_bytes(bytes: &[u8], origin: impl Into<String>) -> Result<Self, Diagnostic> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Ok(Self::new(text, origin)),
            Err(e) => {
                let valid = &bytes[..e.valid_up_to()];
                let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
                let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
                let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
                let line_end = bytes[line_start..]
                    .iter()
                    .position(|&b| b == b'\n')
                    .map_or(bytes.len(), |i| line_start + i);
                Err(Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::Syntax,
                    message: "input is not valid UTF-8".into(),
                    line,
                    column,
                    snippet: String::from_utf8_lossy(&bytes[line_start..line_end]).into_owned(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_utf8_is_positioned() {
        let err = SourceDoc::from_bytes(b"a: true\nbb\xff: x\n", "f").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn render_points_at_column() {
        let d = Diagnostic::error("m:\n  FOO_AND:\n", Pos::new(2, 3), "unknown operator key FOO_AND");
        assert_eq!(d.render("odd.yaml"), "odd.yaml:2:3: error: unknown operator key FOO_AND\n    FOO_AND:\n    ^");
    }
}
