//! Verification of many CODs against one ODD on a worker pool.

use std::fmt::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{CodSpec, OddSpec};

use super::check::{verify_cod, CheckVerdict, EngineError};
use super::solver::{SolverConfig, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowVerdict {
    WithinOdd,
    Violation,
    Unknown,
    Error,
}

impl RowVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RowVerdict::WithinOdd => "within-odd",
            RowVerdict::Violation => "violation",
            RowVerdict::Unknown => "unknown",
            RowVerdict::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchRow {
    pub index: usize,
    pub verdict: RowVerdict,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchTotals {
    pub count: usize,
    pub within_odd: usize,
    pub violation: usize,
    pub unknown: usize,
    pub error: usize,
    /// Sum of the per-row times.
    pub total_ms: f64,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Wall-clock time of the whole batch.
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchReport {
    pub rows: Vec<BatchRow>,
    pub totals: BatchTotals,
}

impl BatchReport {
    /// `index,verdict,wall_ms` with one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,verdict,wall_ms\n");
        for r in &self.rows {
            writeln!(out, "{},{},{:.3}", r.index, r.verdict.as_str(), r.wall_ms).unwrap();
        }
        out
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn verify_row<S: AsRef<str> + Sync>(
    index: usize,
    odd: &OddSpec,
    cod: &CodSpec,
    selected: &[S],
    config: &SolverConfig,
) -> BatchRow {
    let start = Instant::now();
    let result = verify_cod(odd, cod, selected, config, false);
    let wall_ms = millis(start.elapsed());
    let (verdict, error) = match result {
        Ok(r) => match r.verdict {
            CheckVerdict::WithinOdd => (RowVerdict::WithinOdd, None),
            CheckVerdict::Violation => (RowVerdict::Violation, None),
            _ => (RowVerdict::Unknown, None),
        },
        Err(EngineError::Solver(e @ SolverError::SolverTimeout { .. })) => (RowVerdict::Unknown, Some(e.to_string())),
        Err(e) => (RowVerdict::Error, Some(e.to_string())),
    };
    BatchRow { index, verdict, wall_ms, error }
}

/// Verifies every COD, `workers` at a time. Rows keep input order; a failed
/// row records its error and the batch carries on.
pub fn run_batch<S: AsRef<str> + Sync>(
    odd: &OddSpec,
    cods: &[CodSpec],
    selected: &[S],
    config: &SolverConfig,
    workers: usize,
) -> Result<BatchReport, EngineError> {
    // Selection problems would fail every row identically; report them once.
    crate::smtlib::assemble_script(odd, None, selected, false)?;

    let start = Instant::now();
    let rows: Vec<BatchRow> = if workers <= 1 {
        cods.iter().enumerate().map(|(i, c)| verify_row(i, odd, c, selected, config)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool with a positive thread count");
        pool.install(|| {
            cods.par_iter().enumerate().map(|(i, c)| verify_row(i, odd, c, selected, config)).collect()
        })
    };
    let elapsed_ms = millis(start.elapsed());

    let count_of = |v: RowVerdict| rows.iter().filter(|r| r.verdict == v).count();
    let total_ms: f64 = rows.iter().map(|r| r.wall_ms).sum();
    let totals = BatchTotals {
        count: rows.len(),
        within_odd: count_of(RowVerdict::WithinOdd),
        violation: count_of(RowVerdict::Violation),
        unknown: count_of(RowVerdict::Unknown),
        error: count_of(RowVerdict::Error),
        total_ms,
        mean_ms: if rows.is_empty() { 0.0 } else { total_ms / rows.len() as f64 },
        min_ms: rows.iter().map(|r| r.wall_ms).reduce(f64::min).unwrap_or(0.0),
        max_ms: rows.iter().map(|r| r.wall_ms).reduce(f64::max).unwrap_or(0.0),
        elapsed_ms,
    };
    Ok(BatchReport { rows, totals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::solver::tests::fake_solver;
    use crate::parse::{parse_cod, parse_odd, SourceDoc};

    #[test]
    fn rows_keep_order_and_errors_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        // Verdict depends on the asserted value so that order is observable.
        let exe = fake_solver(&dir, "fake", "if grep -q '(= n 1)' \"$1\"; then echo garbage; elif grep -q '(= n 2)' \"$1\"; then echo unsat; else echo sat; fi");
        let odd = parse_odd(&SourceDoc::memory("m:\n  INCLUDE_AND:\n    n: > 0\n")).unwrap();
        let cods: Vec<CodSpec> = (0..6)
            .map(|i| parse_cod(&SourceDoc::memory(format!("n: {i}\n")), odd.symbols()).unwrap())
            .collect();
        let config = SolverConfig::default().with_executable(exe);
        let report = run_batch(&odd, &cods, &["m"], &config, 3).unwrap();
        let verdicts: Vec<&str> = report.rows.iter().map(|r| r.verdict.as_str()).collect();
        assert_eq!(verdicts, ["within-odd", "error", "violation", "within-odd", "within-odd", "within-odd"]);
        assert!(report.rows.iter().enumerate().all(|(i, r)| r.index == i));
        assert_eq!(report.totals.count, 6);
        assert_eq!(report.totals.error, 1);
        assert!(report.to_csv().starts_with("index,verdict,wall_ms\n0,within-odd,"));
    }

    #[test]
    fn unknown_module_fails_the_batch() {
        let odd = parse_odd(&SourceDoc::memory("m:\n  INCLUDE_AND:\n    n: > 0\n")).unwrap();
        assert!(run_batch(&odd, &[], &["nope"], &SolverConfig::default(), 1).is_err());
    }
}
