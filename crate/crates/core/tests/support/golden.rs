#![allow(dead_code)]

use std::path::{Path, PathBuf};

use veriodd::{emit_cod_prop, emit_cod_smtlib, emit_odd_prop, emit_odd_smtlib, parse_cod, parse_odd, SourceDoc};

pub struct Comparison {
    pub case: String,
    pub file: &'static str,
    pub expected: String,
    pub actual: String,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

pub fn cases_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/cases")
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(file).display()))
}

/// Every golden comparison in the corpus, one per translator and case.
pub fn run_corpus() -> Vec<Comparison> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(cases_dir())
        .expect("golden corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut out = Vec::new();
    for dir in dirs {
        let case = dir.file_name().unwrap().to_string_lossy().into_owned();
        let odd_doc = SourceDoc::new(read(&dir, "odd.yaml"), "odd.yaml");
        let odd = parse_odd(&odd_doc).unwrap_or_else(|d| panic!("{case}: {d:?}"));
        let cod_doc = SourceDoc::new(read(&dir, "cod.yaml"), "cod.yaml");
        let cod = parse_cod(&cod_doc, odd.symbols()).unwrap_or_else(|d| panic!("{case}: {d:?}"));
        let outputs = [
            ("odd.smt2", emit_odd_smtlib(&odd)),
            ("odd.prop", emit_odd_prop(&odd)),
            ("cod.smt2", emit_cod_smtlib(&cod)),
            ("cod.prop", emit_cod_prop(&cod)),
        ];
        for (file, actual) in outputs {
            out.push(Comparison { case: case.clone(), file, expected: read(&dir, file), actual });
        }
    }
    out
}
