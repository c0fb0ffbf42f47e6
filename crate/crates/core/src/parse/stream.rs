//! Multi-COD stream files: documents separated by a line that is exactly `---`.

use indexmap::IndexMap;

use crate::model::{AttributeDecl, CodSpec};

use super::cod::parse_cod;
use super::diagnostic::{Diagnostic, SourceDoc};

/// One document of a stream and the 1-based line it starts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamChunk {
    pub start_line: usize,
    pub text: String,
}

/// Splits a stream into documents. A blank stream holds no documents and a
/// separator on the very first line is skipped.
pub fn split_cod_stream(text: &str) -> Vec<StreamChunk> {
    if text.trim().is_empty() {
        return Vec::new();
    }
    let mut chunks = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (idx, line) in text.split('\n').enumerate() {
        let no = idx + 1;
        if line.strip_suffix('\r').unwrap_or(line) == "---" {
            if no > 1 {
                chunks.push(StreamChunk { start_line, text: std::mem::take(&mut current) });
            }
            start_line = no + 1;
            continue;
        }
        current.push_str(line);
        current.push('\n');
    }
    chunks.push(StreamChunk { start_line, text: current });
    chunks
}

/// Parses every document of a stream; diagnostics carry stream line numbers.
pub fn parse_cod_stream(
    text: &str,
    origin: &str,
    symbols: &IndexMap<String, AttributeDecl>,
) -> Result<Vec<CodSpec>, Vec<Diagnostic>> {
    let mut cods = Vec::new();
    let mut diags = Vec::new();
    for chunk in split_cod_stream(text) {
        match parse_cod(&SourceDoc::new(chunk.text, origin), symbols) {
            Ok(c) => cods.push(c),
            Err(ds) => diags.extend(ds.into_iter().map(|mut d| {
                d.line += chunk.start_line - 1;
                d
            })),
        }
    }
    if diags.is_empty() {
        Ok(cods)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_separator_lines() {
        let chunks = split_cod_stream("a: 1\n---\nb: 2\n---\n");
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[1], StreamChunk { start_line: 3, text: "b: 2\n".into() });
        assert_eq!(chunks[2].text.trim(), "");
    }

    #[test]
    fn leading_separator_and_blank_stream() {
        assert_eq!(split_cod_stream("---\na: 1\n").len(), 1);
        assert!(split_cod_stream("  \n\n").is_empty());
        assert_eq!(split_cod_stream("a: 1\r\n---\r\nb: 1\r\n").len(), 2);
    }

    #[test]
    fn diagnostics_use_stream_lines() {
        let odd = crate::parse::parse_odd(&SourceDoc::memory("m:\n  INCLUDE_AND:\n    x: true\n")).unwrap();
        let errs = parse_cod_stream("x: true\n---\nx: true\ny: 1\n", "s", odd.symbols()).unwrap_err();
        assert_eq!(errs[0].line, 4);
    }
}
