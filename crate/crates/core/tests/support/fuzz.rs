#![allow(dead_code)]

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use veriodd::{parse_cod, parse_odd, Diagnostic, OddSpec, SourceDoc};

const SEED_ODD: &str = "supported:\n  INCLUDE_AND:\n    length: > 12 m\n    is_curve: true\n\nunsupported:\n  INCLUDE_OR:\n    surface: [puddle, \"snow covered\"]\n    location:\n      - on_shoulder\n      - 'lane''s edge'\n\ntop:\n  INCLUDE_AND:\n    - supported\n  EXCLUDE_OR: [unsupported]\n";
const SEED_COD: &str = "length: = 13 m\nis_curve: false\nsurface: \"snow covered\"\nlocation: on_shoulder\n";
const ALPHABET: &[u8] = b" \n\t:-[],#'\"\\>=<!.0123456789abzAZ_\r\xc3\xff";

#[derive(Default)]
pub struct FuzzReport {
    pub inputs: usize,
    /// Parser runs that produced a spec.
    pub accepted: usize,
    /// Parser runs that produced diagnostics.
    pub rejected: usize,
    pub panics: Vec<Vec<u8>>,
    pub unpositioned: Vec<(Vec<u8>, String)>,
}

fn random_bytes(rng: &mut impl Rng) -> Vec<u8> {
    let len = rng.random_range(0..160);
    if rng.random_bool(0.5) {
        (0..len).map(|_| rng.random()).collect()
    } else {
        (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
    }
}

fn mutate(seed: &str, rng: &mut impl Rng) -> Vec<u8> {
    let mut bytes = seed.as_bytes().to_vec();
    for _ in 0..rng.random_range(1..=6) {
        let at = rng.random_range(0..=bytes.len());
        match rng.random_range(0..3) {
            0 => bytes.insert(at, *ALPHABET.choose(rng).unwrap()),
            1 if at < bytes.len() => {
                bytes.remove(at);
            }
            _ if at < bytes.len() => bytes[at] = *ALPHABET.choose(rng).unwrap(),
            _ => {}
        }
    }
    bytes
}

/// A diagnostic is positioned when its line exists in the input (or is the
/// line just past the end) and its column is at most one past that line.
fn positioned(text: &str, d: &Diagnostic) -> bool {
    let lines: Vec<&str> = text.split('\n').collect();
    if d.line == 0 || d.column == 0 || d.line > lines.len() + 1 {
        return false;
    }
    let width = lines.get(d.line - 1).map_or(0, |l| l.chars().count());
    d.column <= width + 1
}

fn record(bytes: &[u8], outcome: std::thread::Result<Result<(), Vec<Diagnostic>>>, report: &mut FuzzReport) {
    match outcome {
        Err(_) => report.panics.push(bytes.to_vec()),
        Ok(Ok(())) => report.accepted += 1,
        Ok(Err(diags)) => {
            report.rejected += 1;
            let text = String::from_utf8_lossy(bytes);
            if diags.is_empty() || diags.iter().any(|d| !positioned(&text, d)) {
                report.unpositioned.push((bytes.to_vec(), format!("{diags:?}")));
            }
        }
    }
}

fn check(bytes: &[u8], odd: &OddSpec, report: &mut FuzzReport) {
    report.inputs += 1;
    let doc = match SourceDoc::from_bytes(bytes, "fuzz") {
        Ok(doc) => doc,
        Err(d) => return record(bytes, Ok(Err(vec![d])), report),
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| parse_odd(&doc).map(drop)));
    record(bytes, outcome, report);
    let outcome = catch_unwind(AssertUnwindSafe(|| parse_cod(&doc, odd.symbols()).map(drop)));
    record(bytes, outcome, report);
}

/// Feeds `count` random and mutated byte strings to both parsers. Every
/// input goes through the ODD parser and, against a fixed symbol table, the
/// COD parser.
pub fn fuzz_parsers(count: usize, seed: u64) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let odd = parse_odd(&SourceDoc::memory(SEED_ODD)).expect("seed ODD parses");
    let mut report = FuzzReport::default();
    let quiet = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    for i in 0..count {
        let bytes = match i % 3 {
            0 => random_bytes(&mut rng),
            1 => mutate(SEED_ODD, &mut rng),
            _ => mutate(SEED_COD, &mut rng),
        };
        check(&bytes, &odd, &mut report);
    }
    std::panic::set_hook(quiet);
    report
}
