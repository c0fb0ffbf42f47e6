//! Compiles operational design domain (ODD) specifications and current
//! operational domain (COD) observations, written in a small YAML subset,
//! into a propositional view and SMT-LIB v2, and checks them with an
//! external SMT solver.

pub mod analysis;
pub mod engine;
pub mod model;
pub mod normalize;
pub mod parse;
pub mod prop;
pub mod smtlib;

pub use engine::{
    brute_force_satisfiable, check_consistency, evaluate, run_batch, verify_cod, BatchReport, CheckResult,
    CheckVerdict, EngineError, SolverConfig, SolverError, SolverVerdict,
};
pub use model::{CodSpec, Formula, OddSpec, Sort, Value};
pub use parse::{parse_cod, parse_odd, Diagnostic, SourceDoc};
pub use prop::{emit_cod_prop, emit_odd_prop};
pub use smtlib::{assemble_script, emit_cod_smtlib, emit_odd_smtlib, SmtScript};
