//! Seeded generators for benchmark and randomized-test inputs.

use std::fmt::Write;

use indexmap::IndexMap;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::model::{CmpOp, CodSpec, Observation, OddSpec, Pos, Sort};

use super::oracle::finite_domains;

/// An ODD over `vars` attributes, alternating Boolean flags and integer
/// thresholds, grouped ten per `INCLUDE_AND` module under one `top` module
/// that includes them all.
pub fn scaling_odd(vars: usize, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    let groups = vars.div_ceil(10);
    for g in 0..groups {
        writeln!(out, "group_{g}:\n  INCLUDE_AND:").unwrap();
        for i in g * 10..((g + 1) * 10).min(vars) {
            if i % 2 == 0 {
                writeln!(out, "    flag_{i}: {}", rng.random_bool(0.5)).unwrap();
            } else {
                let op = ["<", "<=", ">", ">="].choose(rng).unwrap();
                writeln!(out, "    level_{i}: {op} {}", rng.random_range(0..100)).unwrap();
            }
        }
        out.push('\n');
    }
    out.push_str("top:\n  INCLUDE_AND:\n");
    for g in 0..groups {
        writeln!(out, "    - group_{g}").unwrap();
    }
    out
}

/// A COD observing every declared attribute, each value drawn uniformly
/// from the attribute's finite abstraction.
pub fn random_cod(odd: &OddSpec, rng: &mut impl Rng) -> CodSpec {
    let mut observations = IndexMap::new();
    for domain in finite_domains(odd, None) {
        let value = domain.values.choose(rng).expect("domains are non-empty").clone();
        observations.insert(
            domain.attribute.clone(),
            Observation { attribute: domain.attribute, value, sort: domain.sort, unit: None, pos: Pos::default() },
        );
    }
    CodSpec { observations }
}

/// A random ODD document with its top module name and, optionally, a COD
/// document over some of its attributes.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub odd: String,
    pub cod: Option<String>,
    pub module: String,
}

const WORDS: &[&str] = &["dry", "wet", "snow", "ice", "gravel"];

fn literal(sort: Sort, rng: &mut impl Rng) -> String {
    match sort {
        Sort::Int => rng.random_range(-5..=5).to_string(),
        Sort::Real => {
            let tenths: i32 = rng.random_range(-30..=30);
            let sign = if tenths < 0 { "-" } else { "" };
            format!("{sign}{}.{}", tenths.abs() / 10, tenths.abs() % 10)
        }
        Sort::Str => WORDS.choose(rng).unwrap().to_string(),
        Sort::Bool => rng.random_bool(0.5).to_string(),
    }
}

fn constraint(sort: Sort, rng: &mut impl Rng) -> String {
    match sort {
        Sort::Bool => rng.random_bool(0.5).to_string(),
        Sort::Str if rng.random_bool(0.4) => {
            let mut words = WORDS.to_vec();
            words.shuffle(rng);
            format!("[{}]", words[..rng.random_range(2..=3)].join(", "))
        }
        Sort::Str => literal(sort, rng),
        Sort::Int if rng.random_bool(0.2) => {
            let a: i32 = rng.random_range(-5..=5);
            format!("[{a}, {}]", a + rng.random_range(1..=3))
        }
        _ => format!("{} {}", CmpOp::ALL.choose(rng).unwrap().symbol(), literal(sort, rng)),
    }
}

/// Small ODD over at most five attributes and four modules; later modules
/// may reference earlier ones and the last module is the one to check.
pub fn random_instance(rng: &mut impl Rng) -> RandomInstance {
    let sorts = [Sort::Bool, Sort::Int, Sort::Real, Sort::Str];
    let attrs: Vec<(String, Sort)> =
        (0..rng.random_range(1..=5)).map(|i| (format!("a{i}"), *sorts.choose(rng).unwrap())).collect();
    let keywords = ["INCLUDE_AND", "INCLUDE_OR", "EXCLUDE_AND", "EXCLUDE_OR"];

    let modules = rng.random_range(1..=4);
    let mut used = vec![false; attrs.len()];
    let mut odd = String::new();
    for m in 0..modules {
        writeln!(odd, "m{m}:").unwrap();
        let mut kinds = keywords.to_vec();
        kinds.shuffle(rng);
        for kind in &kinds[..rng.random_range(1..=2)] {
            writeln!(odd, "  {kind}:").unwrap();
            if m > 0 && rng.random_bool(0.35) {
                let mut refs: Vec<usize> = (0..m).collect();
                refs.shuffle(rng);
                for r in &refs[..rng.random_range(1..=m.min(2))] {
                    writeln!(odd, "    - m{r}").unwrap();
                }
            } else {
                let mut picked: Vec<usize> = (0..attrs.len()).collect();
                picked.shuffle(rng);
                for &i in &picked[..rng.random_range(1..=picked.len().min(3))] {
                    used[i] = true;
                    writeln!(odd, "    {}: {}", attrs[i].0, constraint(attrs[i].1, rng)).unwrap();
                }
            }
        }
    }

    let cod = rng.random_bool(0.5).then(|| {
        let mut text = String::new();
        for ((name, sort), _) in attrs.iter().zip(&used).filter(|(_, u)| **u) {
            if !rng.random_bool(0.6) {
                continue;
            }
            let value = match sort {
                Sort::Int | Sort::Real => format!("= {}", literal(*sort, rng)),
                _ => literal(*sort, rng),
            };
            writeln!(text, "{name}: {value}").unwrap();
        }
        text
    });
    RandomInstance { odd, cod, module: format!("m{}", modules - 1) }
}
