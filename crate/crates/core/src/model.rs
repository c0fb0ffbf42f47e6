//! Data model shared by the parsers, the code generators and the engine.
//!
//! An [`OddSpec`] is an ordered set of named modules plus the attribute
//! symbol table inferred from them. A [`CodSpec`] is a flat list of exact
//! observations checked against that table. Both are immutable once built.

use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// 1-based source position.
///
/// Positions are metadata: two nodes parsed from differently formatted text
/// compare equal, so `PartialEq` ignores them.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Hash for Pos {
    fn hash<H: Hasher>(&self, _state: &mut H) {}
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Sort {
    Int,
    Real,
    Bool,
    Str,
}

impl Sort {
    /// SMT-LIB spelling of the sort.
    pub fn smt_name(self) -> &'static str {
        match self {
            Sort::Int => "Int",
            Sort::Real => "Real",
            Sort::Bool => "Bool",
            Sort::Str => "String",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Sort::Int | Sort::Real)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.smt_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub sort: Sort,
    pub unit: Option<String>,
    pub first_use: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Gt, CmpOp::Lt, CmpOp::Ge, CmpOp::Le, CmpOp::Eq, CmpOp::Ne];

    /// Surface spelling, as written in the YAML input and the propositional view.
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        CmpOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            CmpOp::Gt => lhs > rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

/// A numeric literal from the source. `decimal` records whether it was
/// written with a decimal point, which decides between `Int` and `Real`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Number {
    pub value: BigRational,
    pub decimal: bool,
}

impl Number {
    pub fn int(v: i64) -> Self {
        Self { value: BigRational::from_integer(BigInt::from(v)), decimal: false }
    }

    pub fn sort(&self) -> Sort {
        if self.decimal {
            Sort::Real
        } else {
            Sort::Int
        }
    }

    /// Parses `-?[0-9]+(\.[0-9]+)?`.
    pub fn parse(text: &str) -> Option<Number> {
        let (neg, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (digits, None),
        };
        let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !frac_part.is_none_or(all_digits) {
            return None;
        }
        let frac = frac_part.unwrap_or("");
        let mantissa: BigInt = format!("{int_part}{frac}").parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mut value = BigRational::new(mantissa, scale);
        if neg {
            value = -value;
        }
        Some(Number { value, decimal: frac_part.is_some() })
    }
}

/// Renders a rational for the given numeric sort: integers for `Int`,
/// decimal notation for `Real`. Values without a finite decimal expansion
/// fall back to `n/d`.
pub fn format_rational(value: &BigRational, sort: Sort) -> String {
    if sort == Sort::Int && value.is_integer() {
        return value.to_integer().to_string();
    }
    match decimal_digits(value) {
        Some(s) => s,
        None => format!("{}/{}", value.numer(), value.denom()),
    }
}

/// Decimal notation with at least one fractional digit, or `None` when the
/// expansion does not terminate.
pub(crate) fn decimal_digits(value: &BigRational) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let scale = twos.max(fives).max(1);
    let factor = BigInt::from(10u32).pow(scale);
    let scaled = (value * BigRational::from_integer(factor)).to_integer();
    let digits = scaled.abs().to_string();
    let width = scale as usize + 1;
    let padded = format!("{digits:0>width$}");
    let (int_part, frac_part) = padded.split_at(padded.len() - scale as usize);
    let mut frac = frac_part.trim_end_matches('0').to_string();
    if frac.is_empty() {
        frac.push('0');
    }
    let sign = if value.is_negative() { "-" } else { "" };
    Some(format!("{sign}{int_part}.{frac}"))
}

/// Concrete value of an attribute: used by COD observations, solver models
/// and the evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Num(BigRational),
    Str(String),
}

impl Value {
    pub fn int(v: i64) -> Self {
        Value::Num(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    /// Human-readable rendering: strings unquoted, numbers per `sort`.
    pub fn display(&self, sort: Sort) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Num(n) => format_rational(n, sort),
            Value::Str(s) => s.clone(),
        }
    }

    pub fn fits(&self, sort: Sort) -> bool {
        match (self, sort) {
            (Value::Bool(_), Sort::Bool) | (Value::Str(_), Sort::Str) => true,
            (Value::Num(_), Sort::Real) => true,
            (Value::Num(n), Sort::Int) => n.is_integer(),
            _ => false,
        }
    }
}

/// Scalar appearing as an exact value (equality target or list element).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Num(Number),
    Str(String),
}

impl Scalar {
    pub fn sort(&self) -> Sort {
        match self {
            Scalar::Num(n) => n.sort(),
            Scalar::Str(_) => Sort::Str,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintValue {
    NumericCmp { op: CmpOp, literal: Number, unit: Option<String> },
    BoolLit(bool),
    ScalarEq(Scalar),
    OneOf(Vec<Scalar>),
}

impl ConstraintValue {
    pub fn unit(&self) -> Option<&str> {
        match self {
            ConstraintValue::NumericCmp { unit, .. } => unit.as_deref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    IncludeAnd,
    IncludeOr,
    ExcludeAnd,
    ExcludeOr,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::IncludeAnd,
        OperatorKind::IncludeOr,
        OperatorKind::ExcludeAnd,
        OperatorKind::ExcludeOr,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            OperatorKind::IncludeAnd => "INCLUDE_AND",
            OperatorKind::IncludeOr => "INCLUDE_OR",
            OperatorKind::ExcludeAnd => "EXCLUDE_AND",
            OperatorKind::ExcludeOr => "EXCLUDE_OR",
        }
    }

    pub fn from_keyword(s: &str) -> Option<OperatorKind> {
        OperatorKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn is_conjunctive(self) -> bool {
        matches!(self, OperatorKind::IncludeAnd | OperatorKind::ExcludeAnd)
    }

    pub fn is_negated(self) -> bool {
        matches!(self, OperatorKind::ExcludeAnd | OperatorKind::ExcludeOr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Constraint { attribute: String, value: ConstraintValue, pos: Pos },
    ModuleRef { name: String, pos: Pos },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorGroup {
    pub kind: OperatorKind,
    pub members: Vec<Member>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDef {
    pub name: String,
    pub groups: Vec<OperatorGroup>,
    pub pos: Pos,
}

impl ModuleDef {
    /// Referenced module names in member order, duplicates removed.
    pub fn references(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for g in &self.groups {
            for m in &g.members {
                if let Member::ModuleRef { name, .. } = m {
                    if !out.contains(&name.as_str()) {
                        out.push(name);
                    }
                }
            }
        }
        out
    }
}

/// A validated ODD: every reference resolves, the reference graph is
/// acyclic and each attribute has exactly one sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddSpec {
    pub(crate) modules: IndexMap<String, ModuleDef>,
    pub(crate) symbols: IndexMap<String, AttributeDecl>,
}

impl OddSpec {
    pub fn modules(&self) -> impl Iterator<Item = &ModuleDef> {
        self.modules.values()
    }

    pub fn module(&self, name: &str) -> Option<&ModuleDef> {
        self.modules.get(name)
    }

    pub fn module_names(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(String::as_str)
    }

    pub fn symbols(&self) -> &IndexMap<String, AttributeDecl> {
        &self.symbols
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.symbols.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// Modules no other module references, in source order.
    pub fn sinks(&self) -> Vec<&str> {
        self.modules
            .keys()
            .filter(|name| {
                !self.modules.values().any(|m| m.references().contains(&name.as_str()))
            })
            .map(String::as_str)
            .collect()
    }

    /// The top-level module: the unique sink of the reference graph.
    pub fn top_level(&self) -> Option<&str> {
        match self.sinks().as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub attribute: String,
    pub value: Value,
    pub sort: Sort,
    pub unit: Option<String>,
    pub pos: Pos,
}

/// A current operational domain: exact observations in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodSpec {
    pub(crate) observations: IndexMap<String, Observation>,
}

impl CodSpec {
    pub fn observations(&self) -> impl Iterator<Item = &Observation> {
        self.observations.values()
    }

    pub fn get(&self, attribute: &str) -> Option<&Observation> {
        self.observations.get(attribute)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Lowered logical form shared by both code generators and the evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Cmp { attribute: String, op: CmpOp, literal: Number },
    StrEq { attribute: String, value: String },
    BoolVar(String),
    ModRef(String),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction that collapses a single child to the child itself.
    pub fn and(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::True,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction that collapses a single child to the child itself.
    pub fn or(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::not(Formula::True),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn has_module_refs(&self) -> bool {
        match self {
            Formula::ModRef(_) => true,
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(Formula::has_module_refs),
            Formula::Not(c) => c.has_module_refs(),
            _ => false,
        }
    }

    /// Attribute names at the leaves, in first-occurrence order.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_attributes(out)),
            Formula::Not(c) => c.collect_attributes(out),
            Formula::Cmp { attribute, .. }
            | Formula::StrEq { attribute, .. }
            | Formula::BoolVar(attribute) => {
                if !out.contains(&attribute.as_str()) {
                    out.push(attribute);
                }
            }
            Formula::True | Formula::ModRef(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_parsing() {
        let n = Number::parse("12").unwrap();
        assert_eq!(n.sort(), Sort::Int);
        assert_eq!(n, Number::int(12));
        let r = Number::parse("-1.50").unwrap();
        assert_eq!(r.sort(), Sort::Real);
        assert_eq!(r.value, BigRational::new(BigInt::from(-3), BigInt::from(2)));
        for bad in ["", "-", "1.", ".5", "1e3", "12m", "--1", "1.2.3"] {
            assert!(Number::parse(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn rational_formatting() {
        let n = |s: &str| Number::parse(s).unwrap().value;
        assert_eq!(format_rational(&n("12"), Sort::Int), "12");
        assert_eq!(format_rational(&n("-7"), Sort::Int), "-7");
        assert_eq!(format_rational(&n("12"), Sort::Real), "12.0");
        assert_eq!(format_rational(&n("1.50"), Sort::Real), "1.5");
        assert_eq!(format_rational(&n("-0.05"), Sort::Real), "-0.05");
        assert_eq!(format_rational(&n("0.125"), Sort::Real), "0.125");
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(format_rational(&third, Sort::Real), "1/3");
    }

    #[test]
    fn positions_do_not_affect_equality() {
        assert_eq!(Pos::new(1, 1), Pos::new(7, 3));
    }

    #[test]
    fn collapsing_constructors() {
        let x = Formula::BoolVar("x".into());
        assert_eq!(Formula::and(vec![x.clone()]), x);
        assert_eq!(Formula::or(vec![x.clone()]), x);
        assert!(matches!(Formula::and(vec![x.clone(), x.clone()]), Formula::And(v) if v.len() == 2));
    }
}
