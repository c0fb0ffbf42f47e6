//! Canonical YAML rendering of parsed specifications.

use std::fmt::Write;

use crate::model::{decimal_digits, CodSpec, ConstraintValue, Member, Number, OddSpec, Scalar, Value};

use super::value::is_identifier;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn string_scalar(s: &str) -> String {
    if is_identifier(s) && s != "true" && s != "false" {
        s.to_string()
    } else {
        quote(s)
    }
}

fn number(n: &Number) -> String {
    if n.decimal {
        decimal_digits(&n.value).expect("source literals are finite decimals")
    } else {
        n.value.to_integer().to_string()
    }
}

fn scalar(s: &Scalar) -> String {
    match s {
        Scalar::Num(n) => number(n),
        Scalar::Str(s) => string_scalar(s),
    }
}

/// Renders an ODD in block style with two-space indentation. Reparsing the
/// output yields an equal spec.
pub fn odd_to_yaml(odd: &OddSpec) -> String {
    let mut out = String::new();
    for (i, module) in odd.modules().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "{}:", module.name).unwrap();
        for group in &module.groups {
            writeln!(out, "  {}:", group.kind.keyword()).unwrap();
            for member in &group.members {
                match member {
                    Member::ModuleRef { name, .. } => writeln!(out, "    - {name}").unwrap(),
                    Member::Constraint { attribute, value, .. } => match value {
                        ConstraintValue::NumericCmp { op, literal, unit } => {
                            write!(out, "    {attribute}: {} {}", op.symbol(), number(literal)).unwrap();
                            if let Some(u) = unit {
                                write!(out, " {u}").unwrap();
                            }
                            out.push('\n');
                        }
                        ConstraintValue::BoolLit(b) => writeln!(out, "    {attribute}: {b}").unwrap(),
                        ConstraintValue::ScalarEq(s) => writeln!(out, "    {attribute}: {}", scalar(s)).unwrap(),
                        ConstraintValue::OneOf(items) => {
                            writeln!(out, "    {attribute}:").unwrap();
                            for item in items {
                                writeln!(out, "      - {}", scalar(item)).unwrap();
                            }
                        }
                    },
                }
            }
        }
    }
    out
}

/// Renders a COD as one `attribute: value` line per observation.
pub fn cod_to_yaml(cod: &CodSpec) -> String {
    let mut out = String::new();
    for obs in cod.observations() {
        let value = match &obs.value {
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => string_scalar(s),
            Value::Num(_) => {
                let mut v = format!("= {}", obs.value.display(obs.sort));
                if let Some(u) = &obs.unit {
                    v.push(' ');
                    v.push_str(u);
                }
                v
            }
        };
        writeln!(out, "{}: {value}", obs.attribute).unwrap();
    }
    out
}
