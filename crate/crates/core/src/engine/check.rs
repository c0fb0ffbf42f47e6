use serde::Serialize;
use thiserror::Error;

use crate::model::{CodSpec, OddSpec};
use crate::smtlib::{assemble_script, AssembleError};

use super::solver::{run_solver, SolverConfig, SolverError, SolverOutcome, SolverVerdict};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Consistency,
    Verification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Consistent,
    Inconsistent,
    WithinOdd,
    Violation,
    Unknown,
}

impl CheckVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckVerdict::Consistent => "consistent",
            CheckVerdict::Inconsistent => "inconsistent",
            CheckVerdict::WithinOdd => "within-odd",
            CheckVerdict::Violation => "violation",
            CheckVerdict::Unknown => "unknown",
        }
    }

    fn from_solver(kind: CheckKind, verdict: SolverVerdict) -> Self {
        match (kind, verdict) {
            (_, SolverVerdict::Unknown) => CheckVerdict::Unknown,
            (CheckKind::Consistency, SolverVerdict::Sat) => CheckVerdict::Consistent,
            (CheckKind::Consistency, SolverVerdict::Unsat) => CheckVerdict::Inconsistent,
            (CheckKind::Verification, SolverVerdict::Sat) => CheckVerdict::WithinOdd,
            (CheckKind::Verification, SolverVerdict::Unsat) => CheckVerdict::Violation,
        }
    }
}

impl std::fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub verdict: CheckVerdict,
    pub outcome: SolverOutcome,
    /// Modules asserted, in the order given.
    pub modules: Vec<String>,
    /// The exact script handed to the solver.
    pub script: String,
}

fn run<S: AsRef<str>>(
    kind: CheckKind,
    odd: &OddSpec,
    cod: Option<&CodSpec>,
    selected: &[S],
    config: &SolverConfig,
    want_model: bool,
) -> Result<CheckResult, EngineError> {
    let script = assemble_script(odd, cod, selected, want_model)?;
    let outcome = run_solver(&script, config)?;
    Ok(CheckResult {
        kind,
        verdict: CheckVerdict::from_solver(kind, outcome.verdict),
        outcome,
        modules: selected.iter().map(|s| s.as_ref().to_string()).collect(),
        script: script.render(),
    })
}

/// Whether some assignment satisfies every selected module.
pub fn check_consistency<S: AsRef<str>>(
    odd: &OddSpec,
    selected: &[S],
    config: &SolverConfig,
    want_model: bool,
) -> Result<CheckResult, EngineError> {
    run(CheckKind::Consistency, odd, None, selected, config, want_model)
}

/// Whether the observations are compatible with every selected module.
pub fn verify_cod<S: AsRef<str>>(
    odd: &OddSpec,
    cod: &CodSpec,
    selected: &[S],
    config: &SolverConfig,
    want_model: bool,
) -> Result<CheckResult, EngineError> {
    run(CheckKind::Verification, odd, Some(cod), selected, config, want_model)
}
