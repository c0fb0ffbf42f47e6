//! Solver orchestration, direct evaluation and the brute-force oracle.

mod batch;
mod check;
mod eval;
mod oracle;
mod output;
mod solver;
pub mod synth;

pub use batch::{run_batch, BatchReport, BatchRow, BatchTotals, RowVerdict};
pub use check::{check_consistency, verify_cod, CheckKind, CheckResult, CheckVerdict, EngineError};
pub use eval::{evaluate, EvalError};
pub use oracle::{
    brute_force_satisfiable, brute_force_witness, finite_domains, Domain, OracleError, DEFAULT_DOMAIN_CAP,
};
pub use output::{parse_model, ModelParseError};
pub use solver::{
    run_solver, run_solver_text, Model, SolverConfig, SolverError, SolverOutcome, SolverVerdict, DEFAULT_SOLVER,
    DEFAULT_TIMEOUT_MS, SOLVER_ENV,
};
