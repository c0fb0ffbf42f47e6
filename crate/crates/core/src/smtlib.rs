//! SMT-LIB v2 emission: one declaration per attribute, one nullary
//! `define-fun` per module, COD observations as assertions, and assembled
//! verification scripts.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::model::{decimal_digits, CmpOp, CodSpec, Formula, OddSpec, Sort, Value};

/// Names that cannot be declared as constants: SMT-LIB reserved words and the
/// core, integer and real theory symbols.
const RESERVED: &[&str] = &[
    "_", "as", "let", "exists", "forall", "match", "par", "NUMERAL", "DECIMAL", "STRING", "BINARY",
    "HEXADECIMAL", "true", "false", "not", "and", "or", "xor", "ite", "distinct", "abs", "div", "mod",
    "to_real", "to_int", "is_int",
];

pub fn is_reserved_symbol(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// String literal with `"` doubled; characters outside printable ASCII and
/// the backslash are written as `\u{..}` escapes.
pub fn string_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\"\""),
            '\\' => out.push_str("\\u{5c}"),
            ' '..='~' => out.push(c),
            _ => write!(out, "\\u{{{:x}}}", c as u32).unwrap(),
        }
    }
    out.push('"');
    out
}

/// Numeric literal in the given sort; negatives as `(- n)`.
pub fn number_literal(value: &BigRational, sort: Sort) -> String {
    let magnitude = value.abs();
    let body = if sort == Sort::Int && magnitude.is_integer() {
        magnitude.to_integer().to_string()
    } else {
        match decimal_digits(&magnitude) {
            Some(d) => d,
            None => format!("(/ {}.0 {}.0)", magnitude.numer(), magnitude.denom()),
        }
    };
    if value.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

pub fn value_literal(value: &Value, sort: Sort) -> String {
    match value {
        Value::Bool(b) => b.to_string(),
        Value::Num(n) => number_literal(n, sort),
        Value::Str(s) => string_literal(s),
    }
}

/// Single-line s-expression of a lowered formula.
pub fn formula_to_smt(formula: &Formula, odd: &OddSpec) -> String {
    let mut out = String::new();
    write_formula(&mut out, formula, odd);
    out
}

fn write_formula(out: &mut String, formula: &Formula, odd: &OddSpec) {
    let nary = |out: &mut String, head: &str, children: &[Formula]| {
        out.push('(');
        out.push_str(head);
        for c in children {
            out.push(' ');
            write_formula(out, c, odd);
        }
        out.push(')');
    };
    match formula {
        Formula::True => out.push_str("true"),
        Formula::And(cs) => nary(out, "and", cs),
        Formula::Or(cs) => nary(out, "or", cs),
        Formula::Not(c) => {
            out.push_str("(not ");
            write_formula(out, c, odd);
            out.push(')');
        }
        Formula::Cmp { attribute, op, literal } => {
            let sort = odd.attribute(attribute).map_or(literal.sort(), |d| d.sort);
            let lit = number_literal(&literal.value, sort);
            match op {
                CmpOp::Ne => write!(out, "(not (= {attribute} {lit}))").unwrap(),
                _ => write!(out, "({} {attribute} {lit})", op.symbol()).unwrap(),
            }
        }
        Formula::StrEq { attribute, value } => write!(out, "(= {attribute} {})", string_literal(value)).unwrap(),
        Formula::BoolVar(name) | Formula::ModRef(name) => out.push_str(name),
    }
}

fn declarations(odd: &OddSpec) -> Vec<String> {
    odd.symbols().values().map(|d| format!("(declare-const {} {})", d.name, d.sort.smt_name())).collect()
}

fn definitions(odd: &OddSpec) -> Vec<String> {
    odd.definition_order()
        .iter()
        .map(|name| {
            let body = odd.lowered(name).expect("ordered names are modules");
            format!("(define-fun {name} () Bool\n  {})", formula_to_smt(&body, odd))
        })
        .collect()
}

fn cod_assertions(cod: &CodSpec) -> Vec<String> {
    cod.observations()
        .map(|o| format!("(assert (= {} {}))", o.attribute, value_literal(&o.value, o.sort)))
        .collect()
}

fn lines(items: &[String]) -> String {
    items.iter().map(|l| format!("{l}\n")).collect()
}

/// Declarations in first-use order, a blank line, then one definition per
/// module with dependencies first. An empty ODD emits nothing.
pub fn emit_odd_smtlib(odd: &OddSpec) -> String {
    if odd.is_empty() {
        return String::new();
    }
    format!("{}\n{}", lines(&declarations(odd)), lines(&definitions(odd)))
}

/// One `(assert (= attr value))` per observation in source order.
pub fn emit_cod_smtlib(cod: &CodSpec) -> String {
    lines(&cod_assertions(cod))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssembleError {
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("no module selected")]
    NoModuleSelected,
}

/// A verification script split into its four sections.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SmtScript {
    pub declarations: Vec<String>,
    pub definitions: Vec<String>,
    pub assertions: Vec<String>,
    pub directives: Vec<String>,
}

impl SmtScript {
    /// A script holding only the given directives, e.g. a bare `(check-sat)`.
    pub fn directives_only(directives: &[&str]) -> Self {
        Self { directives: directives.iter().map(|d| d.to_string()).collect(), ..Self::default() }
    }

    pub fn wants_model(&self) -> bool {
        self.directives.iter().any(|d| d == "(get-model)")
    }

    /// Script text: declarations, definitions, then assertions followed by
    /// the directives, with blank lines between the sections.
    pub fn render(&self) -> String {
        let mut tail = self.assertions.clone();
        tail.extend(self.directives.iter().cloned());
        [&self.declarations, &self.definitions, &tail]
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| lines(s))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Merges the full ODD, optional COD observations and one assertion per
/// selected module, then `(check-sat)` and optionally `(get-model)`.
pub fn assemble_script<S: AsRef<str>>(
    odd: &OddSpec,
    cod: Option<&CodSpec>,
    selected: &[S],
    want_model: bool,
) -> Result<SmtScript, AssembleError> {
    if selected.is_empty() {
        return Err(AssembleError::NoModuleSelected);
    }
    for name in selected {
        if odd.module(name.as_ref()).is_none() {
            return Err(AssembleError::UnknownModule(name.as_ref().to_string()));
        }
    }
    let mut assertions = cod.map(cod_assertions).unwrap_or_default();
    assertions.extend(selected.iter().map(|m| format!("(assert {})", m.as_ref())));
    let mut directives = vec!["(check-sat)".to_string()];
    if want_model {
        directives.push("(get-model)".to_string());
    }
    Ok(SmtScript { declarations: declarations(odd), definitions: definitions(odd), assertions, directives })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_cod, parse_odd, SourceDoc};

    fn odd(text: &str) -> OddSpec {
        parse_odd(&SourceDoc::memory(text)).unwrap()
    }

    #[test]
    fn smallest_spec() {
        assert_eq!(
            emit_odd_smtlib(&odd("m:\n  INCLUDE_AND:\n    x: true\n")),
            "(declare-const x Bool)\n\n(define-fun m () Bool\n  x)\n"
        );
    }

    #[test]
    fn not_equal_is_negated_equality() {
        let text = emit_odd_smtlib(&odd("m:\n  INCLUDE_AND:\n    lanes: != 2\n"));
        assert!(text.contains("(not (= lanes 2))"), "{text}");
    }

    #[test]
    fn negative_and_real_literals() {
        let text = emit_odd_smtlib(&odd("m:\n  INCLUDE_AND:\n    t: > -5\n    v: < 2\n    v2: >= -0.5\n  INCLUDE_OR:\n    v: >= 1.25\n"));
        assert!(text.contains("(declare-const t Int)"));
        assert!(text.contains("(declare-const v Real)"));
        assert!(text.contains("(> t (- 5))"));
        assert!(text.contains("(< v 2.0)"));
        assert!(text.contains("(>= v2 (- 0.5))"));
        assert!(text.contains("(>= v 1.25)"));
    }

    #[test]
    fn string_escaping() {
        assert_eq!(string_literal("a\"b"), "\"a\"\"b\"");
        assert_eq!(string_literal("wet leaves"), "\"wet leaves\"");
        assert_eq!(string_literal("x\\y"), "\"x\\u{5c}y\"");
        assert_eq!(string_literal("ü"), "\"\\u{fc}\"");
    }

    #[test]
    fn cod_false_and_empty() {
        let o = odd("m:\n  INCLUDE_AND:\n    is_curve: true\n");
        let c = parse_cod(&SourceDoc::memory("is_curve: false\n"), o.symbols()).unwrap();
        assert_eq!(emit_cod_smtlib(&c), "(assert (= is_curve false))\n");
        assert_eq!(emit_cod_smtlib(&CodSpec::default()), "");
    }

    #[test]
    fn assemble_rejects_unknown_module() {
        let o = odd("m:\n  INCLUDE_AND:\n    x: true\n");
        assert_eq!(assemble_script(&o, None, &["nonexistent"], false), Err(AssembleError::UnknownModule("nonexistent".into())));
        assert_eq!(assemble_script::<&str>(&o, None, &[], false), Err(AssembleError::NoModuleSelected));
    }

    #[test]
    fn assembled_script_layout() {
        let o = odd("m:\n  INCLUDE_AND:\n    x: true\n");
        let s = assemble_script(&o, None, &["m"], true).unwrap();
        assert!(s.wants_model());
        assert_eq!(
            s.render(),
            "(declare-const x Bool)\n\n(define-fun m () Bool\n  x)\n\n(assert m)\n(check-sat)\n(get-model)\n"
        );
        assert_eq!(SmtScript::directives_only(&["(check-sat)"]).render(), "(check-sat)\n");
    }
}
