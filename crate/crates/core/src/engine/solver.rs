//! External solver process: one child per script, script passed as a file
//! path argument, result read from stdout.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::model::Value;
use crate::smtlib::SmtScript;

use super::output::parse_model;

/// Environment variable overriding the solver executable.
pub const SOLVER_ENV: &str = "VERIODD_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3";
pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;

/// Attribute values returned by `(get-model)`, in solver output order.
pub type Model = IndexMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            executable: PathBuf::from(DEFAULT_SOLVER),
            args: Vec::new(),
            timeout: Duration::from_millis(DEFAULT_TIMEOUT_MS),
        }
    }
}

impl SolverConfig {
    /// Default configuration with the executable taken from `VERIODD_SOLVER`
    /// when set.
    pub fn from_env() -> Self {
        let mut config = Self::default();
        if let Some(path) = std::env::var_os(SOLVER_ENV).filter(|p| !p.is_empty()) {
            config.executable = PathBuf::from(path);
        }
        config
    }

    pub fn with_executable(mut self, executable: impl Into<PathBuf>) -> Self {
        self.executable = executable.into();
        self
    }

    pub fn with_timeout_ms(mut self, ms: u64) -> Self {
        self.timeout = Duration::from_millis(ms);
        self
    }

    /// Whether the executable can be launched at all.
    pub fn is_reachable(&self) -> bool {
        let script = SmtScript::directives_only(&["(check-sat)"]);
        run_solver(&script, &self.clone().with_timeout_ms(5_000)).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverVerdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub verdict: SolverVerdict,
    /// Present only for `Sat` when the script asked for a model.
    pub model: Option<Model>,
    /// Captured stdout (and stderr, when non-empty).
    pub raw: String,
    pub wall_time: Duration,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver `{path}` could not be started: {reason}")]
    SolverNotFound { path: String, reason: String },
    #[error("solver timed out after {} ms", timeout.as_millis())]
    SolverTimeout { timeout: Duration },
    #[error("unexpected solver output: {message}")]
    SolverGarbage { message: String, raw: String },
    #[error("solver timeout must be positive")]
    InvalidTimeout,
    #[error("i/o error while running the solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs a script and interprets the verdict and, when requested, the model.
pub fn run_solver(script: &SmtScript, config: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    run_solver_text(&script.render(), script.wants_model(), config)
}

/// Like [`run_solver`] for script text assembled elsewhere.
pub fn run_solver_text(text: &str, want_model: bool, config: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    if config.timeout.is_zero() {
        return Err(SolverError::InvalidTimeout);
    }
    let mut file = tempfile::Builder::new().prefix("veriodd-").suffix(".smt2").tempfile()?;
    file.write_all(text.as_bytes())?;
    file.flush()?;

    let start = Instant::now();
    let mut child = Command::new(&config.executable)
        .args(&config.args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => SolverError::SolverNotFound {
                path: config.executable.display().to_string(),
                reason: e.to_string(),
            },
            _ => SolverError::Io(e),
        })?;

    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    if child.wait_timeout(config.timeout)?.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        // The readers are left detached: a grandchild may still hold the pipes.
        return Err(SolverError::SolverTimeout { timeout: config.timeout });
    }
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    let wall_time = start.elapsed();

    let raw = if stderr.trim().is_empty() { stdout.clone() } else { format!("{stdout}\n{stderr}") };
    let mut lines = stdout.lines().map(str::trim).skip_while(|l| l.is_empty());
    let first = lines.next().unwrap_or("");
    let verdict = match first {
        "sat" => SolverVerdict::Sat,
        "unsat" => SolverVerdict::Unsat,
        "unknown" | "timeout" => SolverVerdict::Unknown,
        _ => {
            let message = if first.is_empty() { "no verdict on stdout".to_string() } else { format!("`{first}`") };
            return Err(SolverError::SolverGarbage { message, raw });
        }
    };

    let model = if verdict == SolverVerdict::Sat && want_model {
        let rest: Vec<&str> = lines.collect();
        let model = parse_model(&rest.join("\n"))
            .map_err(|e| SolverError::SolverGarbage { message: e.to_string(), raw: raw.clone() })?;
        Some(model)
    } else {
        None
    };

    Ok(SolverOutcome { verdict, model, raw, wall_time })
}

#[cfg(test)]
pub(crate) mod tests {
    use std::os::unix::fs::PermissionsExt;

    use super::*;

    /// Writes an executable shell script acting as a fake solver.
    pub(crate) fn fake_solver(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        path
    }

    fn check_sat() -> SmtScript {
        SmtScript::directives_only(&["(check-sat)"])
    }

    #[test]
    fn missing_executable() {
        let config = SolverConfig::default().with_executable("/nonexistent/solver-binary");
        assert!(matches!(run_solver(&check_sat(), &config), Err(SolverError::SolverNotFound { .. })));
    }

    #[test]
    fn garbage_output_is_preserved() {
        let dir = tempfile::tempdir().unwrap();
        let exe = fake_solver(&dir, "garbage", "echo 'hello there'");
        let err = run_solver(&check_sat(), &SolverConfig::default().with_executable(exe)).unwrap_err();
        match err {
            SolverError::SolverGarbage { raw, .. } => assert!(raw.contains("hello there")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonzero_exit_with_verdict_is_tolerated() {
        let dir = tempfile::tempdir().unwrap();
        let exe = fake_solver(&dir, "unsat", "echo unsat; exit 1");
        let out = run_solver(&check_sat(), &SolverConfig::default().with_executable(exe)).unwrap();
        assert_eq!(out.verdict, SolverVerdict::Unsat);
    }

    #[test]
    fn script_path_is_the_last_argument() {
        let dir = tempfile::tempdir().unwrap();
        let exe = fake_solver(&dir, "cat", "echo sat; cat \"$2\" >&2");
        let config = SolverConfig { args: vec!["-smt2".into()], ..SolverConfig::default().with_executable(exe) };
        let out = run_solver(&check_sat(), &config).unwrap();
        assert!(out.raw.contains("(check-sat)"), "{}", out.raw);
    }

    #[test]
    fn timeout_kills_the_process() {
        let dir = tempfile::tempdir().unwrap();
        let exe = fake_solver(&dir, "slow", "exec sleep 10");
        let config = SolverConfig::default().with_executable(exe).with_timeout_ms(200);
        let start = Instant::now();
        let err = run_solver(&check_sat(), &config).unwrap_err();
        assert!(matches!(err, SolverError::SolverTimeout { .. }));
        assert!(start.elapsed() < Duration::from_millis(200 + 500));
    }

    #[test]
    fn zero_timeout_is_rejected() {
        let config = SolverConfig::default().with_timeout_ms(0);
        assert!(matches!(run_solver(&check_sat(), &config), Err(SolverError::InvalidTimeout)));
    }

    #[test]
    fn model_parsed_only_when_requested() {
        let dir = tempfile::tempdir().unwrap();
        let exe = fake_solver(&dir, "model", "echo sat; echo '((define-fun x () Int (- 3)))'");
        let config = SolverConfig::default().with_executable(exe);
        let with = run_solver_text("(check-sat)\n(get-model)\n", true, &config).unwrap();
        assert_eq!(with.model.unwrap()["x"], Value::int(-3));
        let without = run_solver_text("(check-sat)\n", false, &config).unwrap();
        assert!(without.model.is_none());
    }
}
