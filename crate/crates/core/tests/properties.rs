use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use veriodd::analysis::apply_operator;
use veriodd::engine::synth::random_instance;
use veriodd::engine::{finite_domains, Model};
use veriodd::model::{CmpOp, Number, OperatorKind};
use veriodd::parse::{cod_to_yaml, odd_to_yaml};
use veriodd::{emit_odd_prop, emit_odd_smtlib, evaluate, parse_cod, parse_odd, Formula, OddSpec, Sort, SourceDoc, Value};

fn instance(seed: u64) -> (String, OddSpec, Option<String>) {
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
    let odd = parse_odd(&SourceDoc::memory(inst.odd.as_str())).unwrap();
    (inst.odd, odd, inst.cod)
}

/// Random total assignments drawn from the finite abstraction.
fn assignments(odd: &OddSpec, seed: u64, count: usize) -> Vec<Model> {
    let domains = finite_domains(odd, None);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| domains.iter().map(|d| (d.attribute.clone(), d.values.choose(&mut rng).unwrap().clone())).collect())
        .collect()
}

/// Evaluation that resolves module references by evaluating the referenced
/// module's own body.
fn eval_by_substitution(f: &Formula, odd: &OddSpec, m: &Model) -> bool {
    match f {
        Formula::ModRef(name) => eval_by_substitution(&odd.lowered(name).unwrap(), odd, m),
        Formula::And(cs) => cs.iter().all(|c| eval_by_substitution(c, odd, m)),
        Formula::Or(cs) => cs.iter().any(|c| eval_by_substitution(c, odd, m)),
        Formula::Not(c) => !eval_by_substitution(c, odd, m),
        leaf => evaluate(leaf, m).unwrap(),
    }
}

mod infix {
    //! A small reader for the propositional view: `!` binds tighter than
    //! `&`, which binds tighter than `|`; `(...)` and `[...]` group.

    use super::*;

    #[derive(Debug)]
    pub enum Expr {
        And(Vec<Expr>),
        Or(Vec<Expr>),
        Not(Box<Expr>),
        Var(String),
        Cmp(String, String, String),
    }

    fn tokens(text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' => i += 1,
                '(' | ')' | '[' | ']' | '&' | '|' => {
                    out.push(c.to_string());
                    i += 1;
                }
                '!' | '<' | '>' | '=' => {
                    if chars.get(i + 1) == Some(&'=') && c != '=' {
                        out.push(format!("{c}="));
                        i += 2;
                    } else {
                        out.push(c.to_string());
                        i += 1;
                    }
                }
                _ => {
                    let start = i;
                    while i < chars.len() && !" ()[]&|!<>=".contains(chars[i]) {
                        i += 1;
                    }
                    out.push(chars[start..i].iter().collect());
                }
            }
        }
        out
    }

    struct Parser {
        toks: Vec<String>,
        at: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&str> {
            self.toks.get(self.at).map(String::as_str)
        }

        fn next(&mut self) -> String {
            self.at += 1;
            self.toks[self.at - 1].clone()
        }

        fn expect(&mut self, t: &str) {
            assert_eq!(self.next(), t);
        }

        fn or(&mut self) -> Expr {
            let mut parts = vec![self.and()];
            while self.peek() == Some("|") {
                self.next();
                parts.push(self.and());
            }
            if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Or(parts) }
        }

        fn and(&mut self) -> Expr {
            let mut parts = vec![self.unary()];
            while self.peek() == Some("&") {
                self.next();
                parts.push(self.unary());
            }
            if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) }
        }

        fn unary(&mut self) -> Expr {
            if self.peek() == Some("!") {
                self.next();
                return Expr::Not(Box::new(self.unary()));
            }
            match self.next().as_str() {
                "(" => {
                    let e = self.or();
                    self.expect(")");
                    e
                }
                "[" => {
                    let e = self.or();
                    self.expect("]");
                    e
                }
                name => {
                    let name = name.to_string();
                    match self.peek() {
                        Some(op @ ("=" | "!=" | "<" | "<=" | ">" | ">=")) => {
                            let op = op.to_string();
                            self.next();
                            let value = self.next();
                            Expr::Cmp(name, op, value)
                        }
                        _ => Expr::Var(name),
                    }
                }
            }
        }
    }

    pub fn read(text: &str) -> Expr {
        let mut p = Parser { toks: tokens(text), at: 0 };
        let e = p.or();
        assert_eq!(p.at, p.toks.len(), "trailing tokens in {text}");
        e
    }

    fn number(text: &str) -> BigRational {
        let (neg, digits) = text.strip_prefix('-').map_or((false, text), |d| (true, d));
        let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
        let n: BigInt = format!("{whole}{frac}").parse().unwrap();
        let v = BigRational::new(n, BigInt::from(10).pow(frac.len() as u32));
        if neg { -v } else { v }
    }

    pub fn eval(e: &Expr, m: &Model) -> bool {
        match e {
            Expr::And(ps) => ps.iter().all(|p| eval(p, m)),
            Expr::Or(ps) => ps.iter().any(|p| eval(p, m)),
            Expr::Not(p) => !eval(p, m),
            Expr::Var(name) => m[name.as_str()] == Value::Bool(true),
            Expr::Cmp(name, op, text) => match &m[name.as_str()] {
                Value::Num(v) => {
                    let rhs = number(text);
                    match op.as_str() {
                        "=" => *v == rhs,
                        "!=" => *v != rhs,
                        "<" => *v < rhs,
                        "<=" => *v <= rhs,
                        ">" => *v > rhs,
                        _ => *v >= rhs,
                    }
                }
                Value::Str(s) => (s == text) == (op == "="),
                Value::Bool(_) => panic!("comparison on a Boolean"),
            },
        }
    }
}

/// The `name:=` blocks of a propositional view with their bodies.
fn prop_blocks(text: &str) -> Vec<(String, String)> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    lines
        .chunks(2)
        .map(|pair| (pair[0].strip_suffix(":=").unwrap().to_string(), pair[1].to_string()))
        .collect()
}

fn member_formula(seed: u64) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = [
        Formula::BoolVar("a".into()),
        Formula::not(Formula::BoolVar("b".into())),
        Formula::Cmp { attribute: "n".into(), op: CmpOp::Ge, literal: Number::int(3) },
        Formula::StrEq { attribute: "s".into(), value: "wet".into() },
        Formula::ModRef("m".into()),
        Formula::Or(vec![Formula::BoolVar("c".into()), Formula::BoolVar("d".into())]),
    ];
    let n = rand::Rng::random_range(&mut rng, 1..=4);
    (0..n).map(|_| leaves.choose(&mut rng).unwrap().clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_fixpoint(seed in any::<u64>()) {
        let (_, odd, cod) = instance(seed);
        let printed = odd_to_yaml(&odd);
        let again = parse_odd(&SourceDoc::memory(printed.as_str())).unwrap();
        prop_assert_eq!(&again, &odd);
        prop_assert_eq!(odd_to_yaml(&again), printed);
        if let Some(text) = cod {
            let cod = parse_cod(&SourceDoc::memory(text), odd.symbols()).unwrap();
            let printed = cod_to_yaml(&cod);
            prop_assert_eq!(parse_cod(&SourceDoc::memory(printed), odd.symbols()).unwrap(), cod);
        }
    }

    #[test]
    fn parsing_and_emission_are_deterministic(seed in any::<u64>()) {
        let (text, odd, _) = instance(seed);
        let again = parse_odd(&SourceDoc::memory(text.as_str())).unwrap();
        prop_assert_eq!(&again, &odd);
        prop_assert_eq!(emit_odd_smtlib(&again), emit_odd_smtlib(&odd));
        prop_assert_eq!(emit_odd_prop(&again), emit_odd_prop(&odd));
    }

    #[test]
    fn dependencies_are_defined_first(seed in any::<u64>()) {
        let (_, odd, _) = instance(seed);
        let order = odd.definition_order();
        for m in odd.modules() {
            let at = order.iter().position(|n| *n == m.name).unwrap();
            for r in m.references() {
                prop_assert!(order.iter().position(|n| n == r).unwrap() < at);
            }
        }
    }

    /// Every symbol a `define-fun` body uses is declared or defined above it.
    #[test]
    fn smtlib_defines_before_use(seed in any::<u64>()) {
        let (_, odd, _) = instance(seed);
        let text = emit_odd_smtlib(&odd);
        let mut known: HashSet<String> = ["and", "or", "not", "true", "false", "-", "=", "<", "<=", ">", ">="]
            .into_iter().map(String::from).collect();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("(declare-const ") {
                known.insert(rest.split(' ').next().unwrap().to_string());
            } else if let Some(rest) = line.strip_prefix("(define-fun ") {
                known.insert(rest.split(' ').next().unwrap().to_string());
            } else if !line.is_empty() {
                let mut in_string = false;
                for tok in line.split(['(', ')', ' ']) {
                    if tok.starts_with('"') { in_string = !tok.ends_with('"') || tok.len() == 1; continue; }
                    if in_string { in_string = !tok.ends_with('"'); continue; }
                    if tok.is_empty() || tok.starts_with(|c: char| c.is_ascii_digit()) { continue; }
                    prop_assert!(known.contains(tok), "`{}` used before definition in\n{}", tok, text);
                }
            }
        }
    }

    #[test]
    fn exclusion_is_negated_inclusion(seed in any::<u64>()) {
        let members = member_formula(seed);
        prop_assert_eq!(
            apply_operator(OperatorKind::ExcludeAnd, members.clone()),
            Formula::not(apply_operator(OperatorKind::IncludeAnd, members.clone()))
        );
        prop_assert_eq!(
            apply_operator(OperatorKind::ExcludeOr, members.clone()),
            Formula::not(apply_operator(OperatorKind::IncludeOr, members))
        );
    }

    #[test]
    fn inlining_preserves_meaning(seed in any::<u64>()) {
        let (_, odd, _) = instance(seed);
        for model in assignments(&odd, seed, 40) {
            for m in odd.modules() {
                let inlined = odd.inlined(&m.name).unwrap();
                prop_assert!(!inlined.has_module_refs());
                prop_assert_eq!(
                    evaluate(&inlined, &model).unwrap(),
                    eval_by_substitution(&odd.lowered(&m.name).unwrap(), &odd, &model)
                );
            }
        }
    }

    #[test]
    fn leaves_match_the_symbol_table(seed in any::<u64>()) {
        let (_, odd, _) = instance(seed);
        fn check(f: &Formula, odd: &OddSpec) -> bool {
            match f {
                Formula::And(cs) | Formula::Or(cs) => cs.iter().all(|c| check(c, odd)),
                Formula::Not(c) => check(c, odd),
                Formula::Cmp { attribute, literal, .. } => odd.attribute(attribute).is_some_and(|d| {
                    d.sort.is_numeric() && (d.sort == Sort::Real || literal.sort() == Sort::Int)
                }),
                Formula::StrEq { attribute, .. } => odd.attribute(attribute).is_some_and(|d| d.sort == Sort::Str),
                Formula::BoolVar(name) => odd.attribute(name).is_some_and(|d| d.sort == Sort::Bool),
                Formula::ModRef(name) => odd.module(name).is_some(),
                Formula::True => true,
            }
        }
        for m in odd.modules() {
            prop_assert!(check(&odd.lowered(&m.name).unwrap(), &odd));
        }
    }

    /// Reading the propositional view back with an independent infix reader
    /// gives the same truth values as the inlined formulas.
    #[test]
    fn prop_view_reads_back_faithfully(seed in any::<u64>()) {
        let (_, odd, _) = instance(seed);
        let blocks = prop_blocks(&emit_odd_prop(&odd));
        prop_assert_eq!(blocks.len(), odd.modules().count());
        for model in assignments(&odd, seed ^ 0x5eed, 40) {
            for (name, body) in &blocks {
                let expr = infix::read(body);
                prop_assert_eq!(infix::eval(&expr, &model), evaluate(&odd.inlined(name).unwrap(), &model).unwrap());
            }
        }
    }
}

#[test]
fn golden_inputs_print_and_reparse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/cases");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let odd = parse_odd(&SourceDoc::memory(std::fs::read_to_string(path.join("odd.yaml")).unwrap())).unwrap();
        let again = parse_odd(&SourceDoc::memory(odd_to_yaml(&odd))).unwrap();
        assert_eq!(again, odd, "{}", path.display());
        let cod_text = std::fs::read_to_string(path.join("cod.yaml")).unwrap();
        let cod = parse_cod(&SourceDoc::memory(cod_text), odd.symbols()).unwrap();
        assert_eq!(parse_cod(&SourceDoc::memory(cod_to_yaml(&cod)), odd.symbols()).unwrap(), cod, "{}", path.display());
        seen += 1;
    }
    assert!(seen > 0);
}
