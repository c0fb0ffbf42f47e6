//! Human-readable propositional view of ODDs and CODs.
//!
//! Every module reference is expanded in place; an expanded body keeps its
//! own `[...]` so the reader can see where one module was composed into
//! another. N-ary nodes and comparisons are always parenthesized and a
//! negation renders as `(!x)` with `x` parenthesized, so precedence never
//! matters when reading the output.

use std::fmt::Write;

use crate::model::{format_rational, CodSpec, Formula, OddSpec};

fn write_formula(out: &mut String, formula: &Formula, odd: &OddSpec) {
    let nary = |out: &mut String, sep: &str, children: &[Formula]| {
        out.push('(');
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                out.push_str(sep);
            }
            write_formula(out, c, odd);
        }
        out.push(')');
    };
    match formula {
        Formula::True => out.push_str("true"),
        Formula::And(cs) => nary(out, " & ", cs),
        Formula::Or(cs) => nary(out, " | ", cs),
        Formula::Not(c) => {
            out.push_str("(!");
            let self_parenthesized = matches!(
                **c,
                Formula::And(_) | Formula::Or(_) | Formula::Not(_) | Formula::Cmp { .. } | Formula::StrEq { .. }
            );
            if self_parenthesized {
                write_formula(out, c, odd);
            } else {
                out.push('(');
                write_formula(out, c, odd);
                out.push(')');
            }
            out.push(')');
        }
        Formula::Cmp { attribute, op, literal } => {
            let sort = odd.attribute(attribute).map_or(literal.sort(), |d| d.sort);
            write!(out, "({attribute} {} {})", op.symbol(), format_rational(&literal.value, sort)).unwrap();
        }
        Formula::StrEq { attribute, value } => write!(out, "({attribute} = {value})").unwrap(),
        Formula::BoolVar(name) => out.push_str(name),
        Formula::ModRef(name) => {
            let body = odd.lowered(name).expect("references resolve in a validated spec");
            out.push('[');
            write_formula(out, &body, odd);
            out.push(']');
        }
    }
}

/// Renders a formula, expanding module references into bracketed bodies.
pub fn formula_to_prop(formula: &Formula, odd: &OddSpec) -> String {
    let mut out = String::new();
    write_formula(&mut out, formula, odd);
    out
}

/// One `name:=` block per module in source order, blocks separated by a
/// blank line.
pub fn emit_odd_prop(odd: &OddSpec) -> String {
    let blocks: Vec<String> = odd
        .modules()
        .map(|m| {
            let body = odd.lowered(&m.name).expect("module exists");
            format!("{}:=\n[{}]\n", m.name, formula_to_prop(&body, odd))
        })
        .collect();
    blocks.join("\n")
}

/// One `attribute = value` line per observation; strings unquoted.
pub fn emit_cod_prop(cod: &CodSpec) -> String {
    cod.observations().map(|o| format!("{} = {}\n", o.attribute, o.value.display(o.sort))).collect()
}
