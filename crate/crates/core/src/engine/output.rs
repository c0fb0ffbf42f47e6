//! Reader for `(get-model)` output.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::model::{Number, Value};

use super::solver::Model;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed model: {0}")]
pub struct ModelParseError(pub String);

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl Reader<'_> {
    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
            } else if c == ';' {
                for c in self.chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ModelParseError> {
        self.skip_blank();
        let Some(c) = self.chars.next() else { return Ok(None) };
        match c {
            '(' => {
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(ModelParseError("unbalanced parentheses".into())),
                        Some(')') => {
                            self.chars.next();
                            return Ok(Some(Sexp::List(items)));
                        }
                        Some(_) => items.push(self.read()?.expect("input is not exhausted")),
                    }
                }
            }
            ')' => Err(ModelParseError("unexpected `)`".into())),
            '"' => {
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(ModelParseError("unterminated string literal".into())),
                        Some('"') if self.chars.peek() == Some(&'"') => {
                            self.chars.next();
                            s.push('"');
                        }
                        Some('"') => return Ok(Some(Sexp::Str(unescape(&s)?))),
                        Some(c) => s.push(c),
                    }
                }
            }
            '|' => {
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(ModelParseError("unterminated quoted symbol".into())),
                        Some('|') => return Ok(Some(Sexp::Atom(s))),
                        Some(c) => s.push(c),
                    }
                }
            }
            c => {
                let mut s = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | '"' | ';') {
                        break;
                    }
                    s.push(d);
                    self.chars.next();
                }
                Ok(Some(Sexp::Atom(s)))
            }
        }
    }
}

/// Decodes `\u{h..}` and `\uhhhh` escapes; other backslashes stay literal.
fn unescape(s: &str) -> Result<String, ModelParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && chars.get(i + 1) == Some(&'u') {
            let (hex, next) = if chars.get(i + 2) == Some(&'{') {
                match chars[i + 3..].iter().position(|&c| c == '}') {
                    Some(end) => (chars[i + 3..i + 3 + end].iter().collect::<String>(), i + 4 + end),
                    None => (String::new(), i),
                }
            } else if i + 6 <= chars.len() {
                (chars[i + 2..i + 6].iter().collect::<String>(), i + 6)
            } else {
                (String::new(), i)
            };
            if next > i && !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit()) {
                let code = u32::from_str_radix(&hex, 16).map_err(|e| ModelParseError(e.to_string()))?;
                let c = char::from_u32(code).ok_or_else(|| ModelParseError(format!("invalid code point {hex}")))?;
                out.push(c);
                i = next;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    Ok(out)
}

fn numeric(e: &Sexp) -> Result<BigRational, ModelParseError> {
    match e {
        Sexp::Atom(a) => {
            Number::parse(a).map(|n| n.value).ok_or_else(|| ModelParseError(format!("`{a}` is not a number")))
        }
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => Ok(-numeric(x)?),
            [Sexp::Atom(op), a, b] if op == "/" => {
                let d = numeric(b)?;
                if d.is_zero() {
                    return Err(ModelParseError("division by zero".into()));
                }
                Ok(numeric(a)? / d)
            }
            _ => Err(ModelParseError("unsupported numeric term".into())),
        },
        Sexp::Str(_) => Err(ModelParseError("expected a number, found a string".into())),
    }
}

fn value(sort: &Sexp, term: &Sexp) -> Result<Value, ModelParseError> {
    match (sort, term) {
        (Sexp::Atom(s), Sexp::Atom(b)) if s == "Bool" => match b.as_str() {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            other => Err(ModelParseError(format!("`{other}` is not a Boolean"))),
        },
        (Sexp::Atom(s), Sexp::Str(v)) if s == "String" => Ok(Value::Str(v.clone())),
        (Sexp::Atom(s), t) if s == "Int" || s == "Real" => Ok(Value::Num(numeric(t)?)),
        _ => Err(ModelParseError("unsupported sort or value".into())),
    }
}

/// Boolean constants, strings and signed or fractional numerals. Symbols
/// such as `a0` in `(define-fun m () Bool a0)` are not literals.
fn is_literal(term: &Sexp) -> bool {
    match term {
        Sexp::Atom(a) => a == "true" || a == "false" || a.starts_with(|c: char| c.is_ascii_digit()),
        Sexp::Str(_) => true,
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), rest @ ..] if op == "-" || op == "/" => rest.iter().all(is_literal),
            _ => false,
        },
    }
}

fn collect(e: &Sexp, model: &mut Model) -> Result<(), ModelParseError> {
    let Sexp::List(items) = e else { return Ok(()) };
    if let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(params), sort, term] = items.as_slice() {
        if head == "define-fun" {
            // Functions and derived definitions are not attribute values.
            if params.is_empty() && is_literal(term) {
                model.insert(name.clone(), value(sort, term)?);
            }
            return Ok(());
        }
    }
    for item in items {
        collect(item, model)?;
    }
    Ok(())
}

/// Reads every nullary `define-fun` in the text, with or without a
/// surrounding `(model ...)` or bare list wrapper.
pub fn parse_model(text: &str) -> Result<Model, ModelParseError> {
    let mut reader = Reader { chars: text.chars().peekable() };
    let mut model = Model::new();
    while let Some(e) = reader.read()? {
        if let Sexp::List(items) = &e {
            if matches!(items.first(), Some(Sexp::Atom(h)) if h == "error") {
                let msg = match items.get(1) {
                    Some(Sexp::Str(s)) => s.clone(),
                    _ => "solver error".into(),
                };
                return Err(ModelParseError(msg));
            }
        }
        collect(&e, &mut model)?;
    }
    Ok(model)
}
