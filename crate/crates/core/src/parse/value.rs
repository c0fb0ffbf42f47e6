//! Grammar of a plain scalar in value position:
//!
//! ```text
//! value := cmp_op number unit? | "true" | "false" | number | identifier
//! cmp_op := ">" | "<" | ">=" | "<=" | "=" | "!="
//! ```

use thiserror::Error;

use crate::model::{CmpOp, ConstraintValue, Number, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ValueError {
    pub message: String,
    /// Char offset of the offending token inside the scalar text.
    pub offset: usize,
}

fn fail<T>(offset: usize, message: impl Into<String>) -> Result<T, ValueError> {
    Err(ValueError { message: message.into(), offset })
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Space-separated tokens with their char offsets.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (ci, (bi, c)) in text.char_indices().enumerate() {
        if c == ' ' {
            if let Some((cs, bs)) = start.take() {
                out.push((cs, &text[bs..bi]));
            }
        } else if start.is_none() {
            start = Some((ci, bi));
        }
    }
    if let Some((cs, bs)) = start {
        out.push((cs, &text[bs..]));
    }
    out
}

const OP_CHARS: [char; 4] = ['<', '>', '=', '!'];

/// Parses the text of an unquoted scalar. Quoted scalars are always string
/// equalities and never reach this function.
pub fn parse_constraint_value(text: &str) -> Result<ConstraintValue, ValueError> {
    let toks = tokens(text);
    let Some(&(first_off, first)) = toks.first() else {
        return fail(0, "missing value");
    };

    if first.starts_with(OP_CHARS) {
        let op_len = first.chars().take_while(|c| OP_CHARS.contains(c)).count();
        let op_text = &first[..op_len];
        let Some(op) = CmpOp::from_symbol(op_text) else {
            return fail(first_off, format!("unknown comparison operator `{op_text}`"));
        };
        // Accept both `> 12` and `>12`.
        let mut rest: Vec<(usize, &str)> = Vec::new();
        if op_len < first.len() {
            rest.push((first_off + op_len, &first[op_len..]));
        }
        rest.extend_from_slice(&toks[1..]);
        let Some(&(num_off, num_text)) = rest.first() else {
            return fail(first_off, format!("comparison `{op_text}` is missing a number"));
        };
        let Some(literal) = Number::parse(num_text) else {
            return fail(num_off, format!("expected a number after `{op_text}`, found `{num_text}`"));
        };
        let unit = match rest.get(1) {
            None => None,
            Some(&(_, u)) if is_identifier(u) => Some(u.to_string()),
            Some(&(off, u)) => return fail(off, format!("invalid unit `{u}`; units must be identifiers")),
        };
        if let Some(&(off, junk)) = rest.get(2) {
            return fail(off, format!("unexpected `{junk}` after comparison"));
        }
        return Ok(ConstraintValue::NumericCmp { op, literal, unit });
    }

    if toks.len() > 1 {
        let (off, _) = toks[1];
        return fail(
            off,
            "unquoted values must be a single identifier, number or comparison; quote strings containing spaces",
        );
    }
    match first {
        "true" => Ok(ConstraintValue::BoolLit(true)),
        "false" => Ok(ConstraintValue::BoolLit(false)),
        _ => {
            if let Some(n) = Number::parse(first) {
                Ok(ConstraintValue::ScalarEq(Scalar::Num(n)))
            } else if is_identifier(first) {
                Ok(ConstraintValue::ScalarEq(Scalar::Str(first.to_string())))
            } else {
                fail(first_off, format!("invalid value `{first}`; unquoted strings must be identifiers"))
            }
        }
    }
}

/// Parses one element of a value list (`OneOf`).
pub fn parse_list_element(text: &str, quoted: bool) -> Result<Scalar, ValueError> {
    if quoted {
        return Ok(Scalar::Str(text.to_string()));
    }
    match parse_constraint_value(text)? {
        ConstraintValue::ScalarEq(s) => Ok(s),
        ConstraintValue::BoolLit(_) => fail(0, "boolean values cannot appear in a value list"),
        ConstraintValue::NumericCmp { .. } => fail(0, "comparisons cannot appear in a value list"),
        ConstraintValue::OneOf(_) => unreachable!(),
    }
}
