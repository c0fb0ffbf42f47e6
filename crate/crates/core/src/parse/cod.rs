use indexmap::IndexMap;

use crate::model::{AttributeDecl, CmpOp, CodSpec, ConstraintValue, Observation, Pos, Scalar, Sort, Value};

use super::diagnostic::{Diagnostic, DiagnosticKind, SourceDoc};
use super::value::{is_identifier, parse_constraint_value};
use super::yaml::{parse_document, Entry, Node};

/// Parses a COD document against the symbol table of an ODD.
///
/// `= 13` and `13` are the same observation; attributes the ODD declares but
/// the COD omits are simply unobserved.
pub fn parse_cod(doc: &SourceDoc, symbols: &IndexMap<String, AttributeDecl>) -> Result<CodSpec, Vec<Diagnostic>> {
    let text = doc.text.as_str();
    let root = match parse_document(text) {
        Ok(root) => root,
        Err(e) => return Err(vec![Diagnostic::error(text, e.pos, e.message)]),
    };
    let mut diags = Vec::new();
    let mut observations: IndexMap<String, Observation> = IndexMap::new();

    match root {
        None => {}
        Some(Node::Map { entries, .. }) => {
            for entry in &entries {
                match observe(entry, symbols) {
                    Ok(obs) => {
                        if observations.contains_key(&obs.attribute) {
                            diags.push(Diagnostic::error(
                                text,
                                entry.key_pos,
                                format!("attribute `{}` is observed more than once", entry.key),
                            ));
                        } else {
                            observations.insert(obs.attribute.clone(), obs);
                        }
                    }
                    Err((pos, msg, kind)) => diags.push(Diagnostic::error(text, pos, msg).with_kind(kind)),
                }
            }
        }
        Some(other) => diags.push(Diagnostic::error(
            text,
            other.pos(),
            "a COD document must be a mapping from attribute names to observed values",
        )),
    }

    if diags.is_empty() {
        Ok(CodSpec { observations })
    } else {
        Err(diags)
    }
}

type Rejection = (Pos, String, DiagnosticKind);

fn syntax(pos: Pos, message: impl Into<String>) -> Rejection {
    (pos, message.into(), DiagnosticKind::Syntax)
}

fn observe(entry: &Entry, symbols: &IndexMap<String, AttributeDecl>) -> Result<Observation, Rejection> {
    let key = &entry.key;
    if !is_identifier(key) {
        return Err(syntax(entry.key_pos, format!("invalid attribute name `{key}`")));
    }
    let Some(decl) = symbols.get(key) else {
        return Err(syntax(entry.key_pos, format!("unknown attribute `{key}`: the ODD does not use it")));
    };
    let scalar = match &entry.value {
        Node::Scalar(s) => s,
        Node::Null(_) => return Err(syntax(entry.key_pos, format!("attribute `{key}` has no value"))),
        Node::Seq { pos, .. } | Node::Map { pos, .. } => {
            return Err(syntax(*pos, "COD values must be exact observations, not collections"))
        }
    };

    let (value, literal_sort, unit) = if scalar.quoted {
        (Value::Str(scalar.text.clone()), Sort::Str, None)
    } else {
        let parsed = parse_constraint_value(&scalar.text)
            .map_err(|e| syntax(Pos::new(scalar.pos.line, scalar.pos.column + e.offset), e.message))?;
        match parsed {
            ConstraintValue::BoolLit(b) => (Value::Bool(b), Sort::Bool, None),
            ConstraintValue::ScalarEq(Scalar::Str(s)) => (Value::Str(s), Sort::Str, None),
            ConstraintValue::ScalarEq(Scalar::Num(n)) => {
                let sort = n.sort();
                (Value::Num(n.value), sort, None)
            }
            ConstraintValue::NumericCmp { op: CmpOp::Eq, literal, unit } => {
                let sort = literal.sort();
                (Value::Num(literal.value), sort, unit)
            }
            ConstraintValue::NumericCmp { .. } => {
                return Err(syntax(scalar.pos, "COD values must be exact observations"))
            }
            ConstraintValue::OneOf(_) => unreachable!("scalars never parse to lists"),
        }
    };

    let compatible = literal_sort == decl.sort || (literal_sort == Sort::Int && decl.sort == Sort::Real);
    if !compatible {
        return Err((
            scalar.pos,
            format!("attribute `{key}` has sort {} in the ODD but is observed as {literal_sort}", decl.sort),
            DiagnosticKind::Sort,
        ));
    }
    if let (Some(expected), Some(found)) = (&decl.unit, &unit) {
        if expected != found {
            return Err((
                scalar.pos,
                format!("attribute `{key}` uses unit `{expected}` in the ODD, not `{found}`"),
                DiagnosticKind::Sort,
            ));
        }
    }
    Ok(Observation { attribute: key.clone(), value, sort: decl.sort, unit, pos: entry.key_pos })
}
