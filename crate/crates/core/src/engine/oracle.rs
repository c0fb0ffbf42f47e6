//! Exhaustive satisfiability check over a finite abstraction of each
//! attribute's domain. Independent of the SMT path; used to cross-check
//! solver verdicts on small specs.
//!
//! Every atom compares one attribute against a constant, so an atom's truth
//! value only changes at the constants. Picking one value inside every
//! region the constants cut the line into is therefore exact:
//!
//! * Int: `c - 1`, `c`, `c + 1` for each constant `c`
//! * Real: `c - 1/2`, `c`, `c + 1/2`, and the midpoint of each pair of
//!   neighbouring constants
//! * String: every literal compared against the attribute plus one fresh value
//! * Bool: both values
//!
//! An attribute fixed by a COD observation has the observed value only.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::model::{CodSpec, Formula, OddSpec, Sort, Value};

use super::solver::Model;

pub const DEFAULT_DOMAIN_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("abstract domain has {size} assignments, above the cap of {cap}")]
    DomainTooLarge { size: u128, cap: u128 },
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("no module selected")]
    NoModuleSelected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub attribute: String,
    pub sort: Sort,
    pub values: Vec<Value>,
}

#[derive(Default)]
struct Constants {
    numbers: BTreeSet<BigRational>,
    strings: BTreeSet<String>,
}

fn collect_constants(f: &Formula, out: &mut HashMap<String, Constants>) {
    match f {
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| collect_constants(c, out)),
        Formula::Not(c) => collect_constants(c, out),
        Formula::Cmp { attribute, literal, .. } => {
            out.entry(attribute.clone()).or_default().numbers.insert(literal.value.clone());
        }
        Formula::StrEq { attribute, value } => {
            out.entry(attribute.clone()).or_default().strings.insert(value.clone());
        }
        Formula::True | Formula::BoolVar(_) | Formula::ModRef(_) => {}
    }
}

fn fresh_string(taken: &BTreeSet<String>) -> String {
    let mut s = String::from("~other");
    while taken.contains(&s) {
        s.push('~');
    }
    s
}

fn numeric_domain(constants: &BTreeSet<BigRational>, sort: Sort) -> Vec<Value> {
    if constants.is_empty() {
        return vec![Value::int(0)];
    }
    let step = match sort {
        Sort::Int => BigRational::from_integer(BigInt::from(1)),
        _ => BigRational::new(BigInt::from(1), BigInt::from(2)),
    };
    let mut points = BTreeSet::new();
    for c in constants {
        points.insert(c - &step);
        points.insert(c.clone());
        points.insert(c + &step);
    }
    if sort == Sort::Real {
        let two = BigRational::from_integer(BigInt::from(2));
        for (a, b) in constants.iter().zip(constants.iter().skip(1)) {
            points.insert((a + b) / &two);
        }
    }
    points.into_iter().map(Value::Num).collect()
}

/// Finite abstraction of every declared attribute, in declaration order.
pub fn finite_domains(odd: &OddSpec, cod: Option<&CodSpec>) -> Vec<Domain> {
    let mut constants: HashMap<String, Constants> = HashMap::new();
    for name in odd.module_names() {
        collect_constants(&odd.lowered(name).expect("module exists"), &mut constants);
    }
    odd.symbols()
        .values()
        .map(|decl| {
            let values = match cod.and_then(|c| c.get(&decl.name)) {
                Some(o) => vec![o.value.clone()],
                None => {
                    let empty = Constants::default();
                    let c = constants.get(&decl.name).unwrap_or(&empty);
                    match decl.sort {
                        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
                        Sort::Str => {
                            let mut v: Vec<Value> = c.strings.iter().cloned().map(Value::Str).collect();
                            v.push(Value::Str(fresh_string(&c.strings)));
                            v
                        }
                        sort => numeric_domain(&c.numbers, sort),
                    }
                }
            };
            Domain { attribute: decl.name.clone(), sort: decl.sort, values }
        })
        .collect()
}

/// Formula with each atom replaced by its truth table over one domain.
enum Compiled {
    Const(bool),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Not(Box<Compiled>),
    Leaf { var: usize, table: Vec<bool> },
}

impl Compiled {
    fn eval(&self, choice: &[usize]) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::And(cs) => cs.iter().all(|c| c.eval(choice)),
            Compiled::Or(cs) => cs.iter().any(|c| c.eval(choice)),
            Compiled::Not(c) => !c.eval(choice),
            Compiled::Leaf { var, table } => table[choice[*var]],
        }
    }
}

fn compile(f: &Formula, index: &HashMap<&str, usize>, domains: &[&Domain]) -> Compiled {
    let leaf = |attribute: &str, test: &dyn Fn(&Value) -> bool| {
        let var = index[attribute];
        Compiled::Leaf { var, table: domains[var].values.iter().map(test).collect() }
    };
    match f {
        Formula::True => Compiled::Const(true),
        Formula::And(cs) => Compiled::And(cs.iter().map(|c| compile(c, index, domains)).collect()),
        Formula::Or(cs) => Compiled::Or(cs.iter().map(|c| compile(c, index, domains)).collect()),
        Formula::Not(c) => Compiled::Not(Box::new(compile(c, index, domains))),
        Formula::Cmp { attribute, op, literal } => {
            leaf(attribute, &|v| matches!(v, Value::Num(n) if op.holds(n, &literal.value)))
        }
        Formula::StrEq { attribute, value } => leaf(attribute, &|v| matches!(v, Value::Str(s) if s == value)),
        Formula::BoolVar(name) => leaf(name, &|v| matches!(v, Value::Bool(true))),
        Formula::ModRef(_) => unreachable!("formulas are inlined before compilation"),
    }
}

/// A satisfying assignment of the selected modules together with the COD
/// observations, or `None` when there is none.
pub fn brute_force_witness<S: AsRef<str>>(
    odd: &OddSpec,
    cod: Option<&CodSpec>,
    selected: &[S],
    cap: u128,
) -> Result<Option<Model>, OracleError> {
    if selected.is_empty() {
        return Err(OracleError::NoModuleSelected);
    }
    let mut formulas = Vec::new();
    for name in selected {
        let f = odd.inlined(name.as_ref()).ok_or_else(|| OracleError::UnknownModule(name.as_ref().to_string()))?;
        formulas.push(f);
    }
    let goal = Formula::and(formulas);

    let all = finite_domains(odd, cod);
    let used = goal.attributes();
    let domains: Vec<&Domain> = all.iter().filter(|d| used.contains(&d.attribute.as_str())).collect();
    let size = domains.iter().fold(1u128, |acc, d| acc.saturating_mul(d.values.len() as u128));
    if size > cap {
        return Err(OracleError::DomainTooLarge { size, cap });
    }
    let index: HashMap<&str, usize> = domains.iter().enumerate().map(|(i, d)| (d.attribute.as_str(), i)).collect();
    let compiled = compile(&goal, &index, &domains);

    let mut choice = vec![0usize; domains.len()];
    loop {
        if compiled.eval(&choice) {
            let mut model = Model::new();
            for (d, &i) in domains.iter().zip(&choice) {
                model.insert(d.attribute.clone(), d.values[i].clone());
            }
            for o in cod.into_iter().flat_map(|c| c.observations()) {
                model.entry(o.attribute.clone()).or_insert_with(|| o.value.clone());
            }
            return Ok(Some(model));
        }
        // Odometer increment; done once every position wraps.
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(None);
            }
            choice[k] += 1;
            if choice[k] < domains[k].values.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Satisfiability of the selected modules (and COD, if given) with the
/// default domain cap.
pub fn brute_force_satisfiable<S: AsRef<str>>(
    odd: &OddSpec,
    cod: Option<&CodSpec>,
    selected: &[S],
) -> Result<bool, OracleError> {
    brute_force_witness(odd, cod, selected, DEFAULT_DOMAIN_CAP).map(|w| w.is_some())
}
