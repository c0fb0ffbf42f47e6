#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use veriodd::engine::finite_domains;
use veriodd::engine::synth::{random_instance, RandomInstance};
use veriodd::{
    brute_force_satisfiable, check_consistency, evaluate, parse_cod, parse_odd, verify_cod, CodSpec, Formula, OddSpec,
    SolverConfig, SolverVerdict, Sort, SourceDoc,
};

pub struct Instance {
    pub source: RandomInstance,
    pub odd: OddSpec,
    pub cod: Option<CodSpec>,
}

/// Random instances within the oracle's bounds: at most six attributes,
/// four modules and three string literals per attribute.
pub fn instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let source = random_instance(&mut rng);
        let odd = parse_odd(&SourceDoc::memory(source.odd.as_str())).expect("generated ODDs parse");
        let cod = source
            .cod
            .as_deref()
            .map(|text| parse_cod(&SourceDoc::memory(text), odd.symbols()).expect("generated CODs parse"));
        let within = odd.symbols().len() <= 6
            && odd.modules().count() <= 4
            && finite_domains(&odd, None).iter().all(|d| d.sort != Sort::Str || d.values.len() <= 4);
        if within {
            out.push(Instance { source, odd, cod });
        }
    }
    out
}

pub struct Disagreement {
    pub instance: String,
    pub solver: String,
    pub oracle: String,
}

/// Runs each instance through the solver and the brute-force oracle and
/// returns the cases where they differ. Unknown solver answers and errors
/// count as disagreements.
pub fn oracle_agreement(instances: &[Instance], config: &SolverConfig) -> Vec<Disagreement> {
    let mut out = Vec::new();
    for inst in instances {
        let selected = [inst.source.module.as_str()];
        let solver = match &inst.cod {
            Some(cod) => verify_cod(&inst.odd, cod, &selected, config, false),
            None => check_consistency(&inst.odd, &selected, config, false),
        };
        let oracle = brute_force_satisfiable(&inst.odd, inst.cod.as_ref(), &selected);
        let agree = match (&solver, &oracle) {
            (Ok(r), Ok(sat)) => match r.outcome.verdict {
                SolverVerdict::Sat => *sat,
                SolverVerdict::Unsat => !*sat,
                SolverVerdict::Unknown => false,
            },
            _ => false,
        };
        if !agree {
            out.push(Disagreement {
                instance: format!("{}---\n{}", inst.source.odd, inst.source.cod.as_deref().unwrap_or("")),
                solver: match solver {
                    Ok(r) => format!("{:?}", r.outcome.verdict),
                    Err(e) => e.to_string(),
                },
                oracle: format!("{oracle:?}"),
            });
        }
    }
    out
}

pub struct SoundnessReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Asks the solver for models of consistent instances and evaluates the
/// inlined module against each model.
pub fn model_soundness(wanted: usize, seed: u64, config: &SolverConfig) -> SoundnessReport {
    let mut rng_seed = seed;
    let mut checked = 0;
    let mut failures = Vec::new();
    while checked < wanted {
        for inst in instances(50, rng_seed) {
            if checked == wanted {
                break;
            }
            let selected = [inst.source.module.as_str()];
            let result = match check_consistency(&inst.odd, &selected, config, true) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("{}: {e}", inst.source.odd));
                    checked += 1;
                    continue;
                }
            };
            if result.outcome.verdict != SolverVerdict::Sat {
                continue;
            }
            checked += 1;
            let Some(model) = &result.outcome.model else {
                failures.push(format!("{}: no model returned", inst.source.odd));
                continue;
            };
            let goal: Formula = inst.odd.inlined(&inst.source.module).expect("module exists");
            match evaluate(&goal, model) {
                Ok(true) => {}
                other => failures.push(format!("{}: model {model:?} evaluates to {other:?}", inst.source.odd)),
            }
        }
        rng_seed += 1;
    }
    SoundnessReport { checked, failures }
}
