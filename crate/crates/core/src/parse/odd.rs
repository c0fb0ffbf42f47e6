use std::collections::HashSet;

use crate::analysis::{build_odd, ModelError};
use crate::smtlib::is_reserved_symbol;
use crate::model::{ConstraintValue, Member, ModuleDef, OddSpec, OperatorGroup, OperatorKind, Pos, Scalar};

use super::diagnostic::{Diagnostic, DiagnosticKind, SourceDoc};
use super::value::{is_identifier, parse_constraint_value, parse_list_element};
use super::yaml::{parse_document, Entry, Node, ScalarNode};

struct Ctx<'a> {
    text: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn error(&mut self, pos: Pos, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(self.text, pos, message));
    }
}

fn shift(pos: Pos, offset: usize) -> Pos {
    Pos::new(pos.line, pos.column + offset)
}

/// Parses an ODD document into a validated [`OddSpec`].
///
/// On failure every problem found is reported; no partial spec is returned.
pub fn parse_odd(doc: &SourceDoc) -> Result<OddSpec, Vec<Diagnostic>> {
    let text = doc.text.as_str();
    let root = match parse_document(text) {
        Ok(root) => root,
        Err(e) => return Err(vec![Diagnostic::error(text, e.pos, e.message)]),
    };
    let mut ctx = Ctx { text, diags: Vec::new() };
    let mut modules = Vec::new();

    match root {
        None => {}
        Some(Node::Map { entries, .. }) => {
            let mut names = HashSet::new();
            for entry in &entries {
                if !is_identifier(&entry.key) {
                    ctx.error(entry.key_pos, format!("invalid module name `{}`", entry.key));
                    continue;
                }
                if is_reserved_symbol(&entry.key) {
                    ctx.error(entry.key_pos, format!("`{}` is a reserved SMT-LIB symbol", entry.key));
                    continue;
                }
                if !names.insert(entry.key.as_str()) {
                    ctx.error(entry.key_pos, format!("duplicate module name `{}`", entry.key));
                    continue;
                }
                if let Some(m) = parse_module(&mut ctx, entry) {
                    modules.push(m);
                }
            }
        }
        Some(other) => ctx.error(other.pos(), "an ODD document must be a mapping from module names to operator groups"),
    }

    if !ctx.diags.is_empty() {
        return Err(ctx.diags);
    }
    build_odd(modules).map_err(|errors| {
        errors
            .into_iter()
            .map(|e| {
                let kind = match e {
                    ModelError::SortConflict { .. } | ModelError::UnitConflict { .. } => DiagnosticKind::Sort,
                    _ => DiagnosticKind::Syntax,
                };
                Diagnostic::error(text, e.pos(), e.to_string()).with_kind(kind)
            })
            .collect()
    })
}

fn parse_module(ctx: &mut Ctx<'_>, entry: &Entry) -> Option<ModuleDef> {
    let Node::Map { entries, .. } = &entry.value else {
        let msg = match &entry.value {
            Node::Null(_) => format!("module `{}` has no operator groups", entry.key),
            _ => format!("module `{}` must be a mapping of operator keys such as INCLUDE_AND", entry.key),
        };
        ctx.error(entry.value.pos(), msg);
        return None;
    };
    let before = ctx.diags.len();
    let mut groups: Vec<OperatorGroup> = Vec::new();
    for g in entries {
        let Some(kind) = OperatorKind::from_keyword(&g.key) else {
            ctx.error(
                g.key_pos,
                format!(
                    "unknown operator key {}; expected one of INCLUDE_AND, INCLUDE_OR, EXCLUDE_AND, EXCLUDE_OR",
                    g.key
                ),
            );
            continue;
        };
        if groups.iter().any(|existing| existing.kind == kind) {
            ctx.error(g.key_pos, format!("operator {} appears twice in module `{}`", g.key, entry.key));
            continue;
        }
        if let Some(members) = parse_payload(ctx, g) {
            groups.push(OperatorGroup { kind, members, pos: g.key_pos });
        }
    }
    (ctx.diags.len() == before).then(|| ModuleDef { name: entry.key.clone(), groups, pos: entry.key_pos })
}

fn parse_payload(ctx: &mut Ctx<'_>, group: &Entry) -> Option<Vec<Member>> {
    match &group.value {
        Node::Null(_) => {
            ctx.error(group.key_pos, format!("operator {} has an empty payload", group.key));
            None
        }
        Node::Scalar(s) => {
            ctx.error(
                s.pos,
                format!("operator {} expects a mapping of attribute constraints or a list of module names", group.key),
            );
            None
        }
        Node::Seq { items, pos } => {
            if items.is_empty() {
                ctx.error(*pos, format!("operator {} has an empty payload", group.key));
                return None;
            }
            let before = ctx.diags.len();
            let mut members = Vec::new();
            for item in items {
                if item.quoted || !is_identifier(&item.text) {
                    ctx.error(item.pos, format!("`{}` is not a module name", item.text));
                    continue;
                }
                members.push(Member::ModuleRef { name: item.text.clone(), pos: item.pos });
            }
            (ctx.diags.len() == before).then_some(members)
        }
        Node::Map { entries, .. } => {
            let before = ctx.diags.len();
            let mut seen = HashSet::new();
            let mut members = Vec::new();
            for e in entries {
                if !is_identifier(&e.key) {
                    ctx.error(e.key_pos, format!("invalid attribute name `{}`", e.key));
                    continue;
                }
                if is_reserved_symbol(&e.key) {
                    ctx.error(e.key_pos, format!("`{}` is a reserved SMT-LIB symbol", e.key));
                    continue;
                }
                if !seen.insert(e.key.as_str()) {
                    ctx.error(e.key_pos, format!("duplicate attribute key `{}` in one operator group", e.key));
                    continue;
                }
                if let Some(value) = parse_attribute_value(ctx, e) {
                    members.push(Member::Constraint { attribute: e.key.clone(), value, pos: e.key_pos });
                }
            }
            (ctx.diags.len() == before).then_some(members)
        }
    }
}

fn parse_scalar_value(ctx: &mut Ctx<'_>, s: &ScalarNode) -> Option<ConstraintValue> {
    if s.quoted {
        return Some(ConstraintValue::ScalarEq(Scalar::Str(s.text.clone())));
    }
    match parse_constraint_value(&s.text) {
        Ok(v) => Some(v),
        Err(e) => {
            ctx.error(shift(s.pos, e.offset), e.message);
            None
        }
    }
}

fn parse_attribute_value(ctx: &mut Ctx<'_>, e: &Entry) -> Option<ConstraintValue> {
    match &e.value {
        Node::Null(_) => {
            ctx.error(e.key_pos, format!("attribute `{}` has no value", e.key));
            None
        }
        Node::Map { pos, .. } => {
            ctx.error(*pos, format!("attribute `{}` cannot hold a nested mapping", e.key));
            None
        }
        Node::Scalar(s) => parse_scalar_value(ctx, s),
        Node::Seq { items, pos } => {
            if items.is_empty() {
                ctx.error(*pos, format!("value list for `{}` is empty", e.key));
                return None;
            }
            let mut values: Vec<Scalar> = Vec::new();
            for item in items {
                let v = match parse_list_element(&item.text, item.quoted) {
                    Ok(v) => v,
                    Err(err) => {
                        ctx.error(shift(item.pos, err.offset), err.message);
                        return None;
                    }
                };
                if let Some(first) = values.first() {
                    if first.sort().is_numeric() != v.sort().is_numeric() {
                        ctx.error(item.pos, format!("value list for `{}` mixes strings and numbers", e.key));
                        return None;
                    }
                }
                if values.contains(&v) {
                    ctx.error(item.pos, format!("duplicate value in list for `{}`", e.key));
                    return None;
                }
                values.push(v);
            }
            Some(ConstraintValue::OneOf(values))
        }
    }
}
