//! Semantic passes over parsed modules: sort inference, reference
//! resolution, cycle detection, topological ordering, lowering and inlining.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::{
    AttributeDecl, ConstraintValue, Formula, Member, ModuleDef, OddSpec, OperatorGroup,
    OperatorKind, Pos, Scalar, Sort,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("attribute `{name}` is used as {second} here but as {first} at line {first_pos}")]
    SortConflict { name: String, first: &'static str, first_pos: Pos, second: &'static str, pos: Pos },
    #[error("attribute `{name}` uses unit `{second}` here but unit `{first}` at line {first_pos}")]
    UnitConflict { name: String, first: String, first_pos: Pos, second: String, pos: Pos },
    #[error("module `{name}` is defined more than once")]
    DuplicateModule { name: String, pos: Pos },
    #[error("`{name}` is used both as a module and as an attribute")]
    NameCollision { name: String, pos: Pos },
    #[error("reference to undefined module `{name}`")]
    UnresolvedReference { name: String, pos: Pos },
    #[error("module reference cycle: {}", cycle.join(" -> "))]
    ReferenceCycle { cycle: Vec<String>, pos: Pos },
}

impl ModelError {
    pub fn pos(&self) -> Pos {
        match self {
            ModelError::SortConflict { pos, .. }
            | ModelError::UnitConflict { pos, .. }
            | ModelError::DuplicateModule { pos, .. }
            | ModelError::NameCollision { pos, .. }
            | ModelError::UnresolvedReference { pos, .. }
            | ModelError::ReferenceCycle { pos, .. } => *pos,
        }
    }
}

fn kind_name(sort: Sort) -> &'static str {
    match sort {
        Sort::Int | Sort::Real => "a number",
        Sort::Bool => "a boolean",
        Sort::Str => "a string",
    }
}

/// Sort implied by one constraint value.
fn value_sort(value: &ConstraintValue) -> Sort {
    match value {
        ConstraintValue::NumericCmp { literal, .. } => literal.sort(),
        ConstraintValue::BoolLit(_) => Sort::Bool,
        ConstraintValue::ScalarEq(s) => s.sort(),
        ConstraintValue::OneOf(items) => {
            // Homogeneity is checked by the parser; numeric lists widen.
            if items.iter().any(|s| matches!(s, Scalar::Str(_))) {
                Sort::Str
            } else if items.iter().any(|s| s.sort() == Sort::Real) {
                Sort::Real
            } else {
                Sort::Int
            }
        }
    }
}

/// Builds the attribute symbol table in order of first textual use.
///
/// Integer and decimal literals on one attribute widen it to `Real`.
pub fn infer_sorts(modules: &[ModuleDef]) -> Result<IndexMap<String, AttributeDecl>, Vec<ModelError>> {
    let mut table: IndexMap<String, AttributeDecl> = IndexMap::new();
    let mut unit_pos: HashMap<String, Pos> = HashMap::new();
    let mut errors = Vec::new();

    for module in modules {
        for group in &module.groups {
            for member in &group.members {
                let Member::Constraint { attribute, value, pos } = member else { continue };
                let sort = value_sort(value);
                let unit = value.unit();
                match table.get_mut(attribute) {
                    None => {
                        if unit.is_some() {
                            unit_pos.insert(attribute.clone(), *pos);
                        }
                        table.insert(
                            attribute.clone(),
                            AttributeDecl {
                                name: attribute.clone(),
                                sort,
                                unit: unit.map(str::to_string),
                                first_use: *pos,
                            },
                        );
                    }
                    Some(decl) => {
                        if decl.sort.is_numeric() && sort.is_numeric() {
                            if sort == Sort::Real {
                                decl.sort = Sort::Real;
                            }
                        } else if decl.sort != sort {
                            errors.push(ModelError::SortConflict {
                                name: attribute.clone(),
                                first: kind_name(decl.sort),
                                first_pos: decl.first_use,
                                second: kind_name(sort),
                                pos: *pos,
                            });
                            continue;
                        }
                        match (&decl.unit, unit) {
                            (Some(existing), Some(new)) if existing != new => {
                                errors.push(ModelError::UnitConflict {
                                    name: attribute.clone(),
                                    first: existing.clone(),
                                    first_pos: unit_pos[attribute],
                                    second: new.to_string(),
                                    pos: *pos,
                                });
                            }
                            (None, Some(new)) => {
                                decl.unit = Some(new.to_string());
                                unit_pos.insert(attribute.clone(), *pos);
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }

    if errors.is_empty() {
        Ok(table)
    } else {
        Err(errors)
    }
}

/// Stable topological order of the module reference graph: dependencies
/// first, otherwise source order.
///
/// All references must resolve; a cycle is reported with its members.
pub fn resolve_and_order(modules: &[ModuleDef]) -> Result<Vec<String>, ModelError> {
    let index: HashMap<&str, usize> =
        modules.iter().enumerate().map(|(i, m)| (m.name.as_str(), i)).collect();

    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(modules.len());
    for m in modules {
        let mut ds = Vec::new();
        for g in &m.groups {
            for member in &g.members {
                if let Member::ModuleRef { name, pos } = member {
                    let Some(&d) = index.get(name.as_str()) else {
                        return Err(ModelError::UnresolvedReference { name: name.clone(), pos: *pos });
                    };
                    if !ds.contains(&d) {
                        ds.push(d);
                    }
                }
            }
        }
        deps.push(ds);
    }

    if let Some(cycle) = find_cycle(&deps) {
        let first = cycle[0];
        return Err(ModelError::ReferenceCycle {
            cycle: cycle.iter().map(|&i| modules[i].name.clone()).collect(),
            pos: modules[first].pos,
        });
    }

    // Kahn's algorithm, always releasing the lowest source index first.
    let mut remaining: Vec<usize> = deps.iter().map(Vec::len).collect();
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); modules.len()];
    for (i, ds) in deps.iter().enumerate() {
        for &d in ds {
            dependents[d].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..modules.len()).filter(|&i| remaining[i] == 0).collect();
    let mut order = Vec::with_capacity(modules.len());
    while let Some(i) = ready.pop_first() {
        order.push(modules[i].name.clone());
        for &j in &dependents[i] {
            remaining[j] -= 1;
            if remaining[j] == 0 {
                ready.insert(j);
            }
        }
    }
    Ok(order)
}

/// Returns one cycle (as module indices, starting at its lowest-indexed
/// entry point in DFS order), if any.
fn find_cycle(deps: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(n: usize, deps: &[Vec<usize>], marks: &mut [Mark], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        marks[n] = Mark::Active;
        stack.push(n);
        for &d in &deps[n] {
            match marks[d] {
                Mark::Active => {
                    let start = stack.iter().position(|&s| s == d).unwrap();
                    return Some(stack[start..].to_vec());
                }
                Mark::New => {
                    if let Some(c) = visit(d, deps, marks, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[n] = Mark::Done;
        None
    }

    let mut marks = vec![Mark::New; deps.len()];
    for n in 0..deps.len() {
        if marks[n] == Mark::New {
            if let Some(c) = visit(n, deps, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}

/// Validates a list of parsed modules and builds the [`OddSpec`].
pub fn build_odd(modules: Vec<ModuleDef>) -> Result<OddSpec, Vec<ModelError>> {
    let mut errors = Vec::new();

    let mut seen: HashMap<&str, ()> = HashMap::new();
    for m in &modules {
        if seen.insert(&m.name, ()).is_some() {
            errors.push(ModelError::DuplicateModule { name: m.name.clone(), pos: m.pos });
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let symbols = match infer_sorts(&modules) {
        Ok(s) => s,
        Err(mut e) => {
            errors.append(&mut e);
            IndexMap::new()
        }
    };

    for m in &modules {
        for g in &m.groups {
            for member in &g.members {
                if let Member::Constraint { attribute, pos, .. } = member {
                    if seen.contains_key(attribute.as_str()) {
                        errors.push(ModelError::NameCollision { name: attribute.clone(), pos: *pos });
                    }
                }
            }
        }
    }

    // Report every unresolved reference, not just the first.
    for m in &modules {
        for g in &m.groups {
            for member in &g.members {
                if let Member::ModuleRef { name, pos } = member {
                    if !seen.contains_key(name.as_str()) {
                        errors.push(ModelError::UnresolvedReference { name: name.clone(), pos: *pos });
                    }
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    resolve_and_order(&modules).map_err(|e| vec![e])?;
    let modules = modules.into_iter().map(|m| (m.name.clone(), m)).collect();
    Ok(OddSpec { modules, symbols })
}

impl OddSpec {
    /// Module names with every module after the modules it references.
    pub fn definition_order(&self) -> Vec<String> {
        let modules: Vec<ModuleDef> = self.modules.values().cloned().collect();
        resolve_and_order(&modules).expect("validated spec has an acyclic reference graph")
    }

    /// Lowered formula of a module, with module references kept as leaves.
    pub fn lowered(&self, module: &str) -> Option<Formula> {
        self.modules.get(module).map(lower_module)
    }

    /// Lowered formula of a module with all module references expanded.
    pub fn inlined(&self, module: &str) -> Option<Formula> {
        self.lowered(module).map(|f| inline(&f, self))
    }
}

fn lower_member(member: &Member) -> Formula {
    match member {
        Member::ModuleRef { name, .. } => Formula::ModRef(name.clone()),
        Member::Constraint { attribute, value, .. } => {
            let eq = |s: &Scalar| match s {
                Scalar::Str(v) => Formula::StrEq { attribute: attribute.clone(), value: v.clone() },
                Scalar::Num(n) => Formula::Cmp {
                    attribute: attribute.clone(),
                    op: crate::model::CmpOp::Eq,
                    literal: n.clone(),
                },
            };
            match value {
                ConstraintValue::NumericCmp { op, literal, .. } => Formula::Cmp {
                    attribute: attribute.clone(),
                    op: *op,
                    literal: literal.clone(),
                },
                ConstraintValue::BoolLit(true) => Formula::BoolVar(attribute.clone()),
                ConstraintValue::BoolLit(false) => Formula::not(Formula::BoolVar(attribute.clone())),
                ConstraintValue::ScalarEq(s) => eq(s),
                ConstraintValue::OneOf(items) => Formula::or(items.iter().map(eq).collect()),
            }
        }
    }
}

/// Applies an operator kind to already-lowered members.
pub fn apply_operator(kind: OperatorKind, members: Vec<Formula>) -> Formula {
    let body = if kind.is_conjunctive() { Formula::and(members) } else { Formula::or(members) };
    if kind.is_negated() {
        Formula::not(body)
    } else {
        body
    }
}

pub fn lower_group(group: &OperatorGroup) -> Formula {
    apply_operator(group.kind, group.members.iter().map(lower_member).collect())
}

/// Lowers one module: groups combine with `And` in source order.
pub fn lower_module(module: &ModuleDef) -> Formula {
    Formula::and(module.groups.iter().map(lower_group).collect())
}

/// Replaces every module reference with the inlined body of the module.
pub fn inline(formula: &Formula, odd: &OddSpec) -> Formula {
    match formula {
        Formula::ModRef(name) => {
            let body = odd.lowered(name).expect("references resolve in a validated spec");
            inline(&body, odd)
        }
        Formula::And(cs) => Formula::And(cs.iter().map(|c| inline(c, odd)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| inline(c, odd)).collect()),
        Formula::Not(c) => Formula::not(inline(c, odd)),
        leaf => leaf.clone(),
    }
}
