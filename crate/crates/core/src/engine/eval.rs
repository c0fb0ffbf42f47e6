//! Direct evaluation of lowered formulas under a concrete assignment.

use thiserror::Error;

use crate::model::{Formula, Value};

use super::solver::Model;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("value of `{0}` has the wrong sort")]
    SortMismatch(String),
    #[error("module reference `{0}` must be inlined before evaluation")]
    UnexpandedReference(String),
}

/// Truth value of a reference-free formula.
pub fn evaluate(formula: &Formula, assignment: &Model) -> Result<bool, EvalError> {
    let lookup = |name: &str| assignment.get(name).ok_or_else(|| EvalError::MissingAssignment(name.to_string()));
    Ok(match formula {
        Formula::True => true,
        Formula::And(cs) => {
            for c in cs {
                if !evaluate(c, assignment)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(cs) => {
            for c in cs {
                if evaluate(c, assignment)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Not(c) => !evaluate(c, assignment)?,
        Formula::Cmp { attribute, op, literal } => match lookup(attribute)? {
            Value::Num(v) => op.holds(v, &literal.value),
            _ => return Err(EvalError::SortMismatch(attribute.clone())),
        },
        Formula::StrEq { attribute, value } => match lookup(attribute)? {
            Value::Str(v) => v == value,
            _ => return Err(EvalError::SortMismatch(attribute.clone())),
        },
        Formula::BoolVar(name) => match lookup(name)? {
            Value::Bool(b) => *b,
            _ => return Err(EvalError::SortMismatch(name.clone())),
        },
        Formula::ModRef(name) => return Err(EvalError::UnexpandedReference(name.clone())),
    })
}
