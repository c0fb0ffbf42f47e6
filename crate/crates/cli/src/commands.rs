use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use veriodd::engine::Model;
use veriodd::parse::parse_cod_stream;
use veriodd::smtlib::string_literal;
use veriodd::{
    check_consistency, emit_cod_prop, emit_cod_smtlib, emit_odd_prop, emit_odd_smtlib, parse_cod, parse_odd,
    run_batch, verify_cod, CheckResult, CodSpec, Diagnostic, EngineError, OddSpec, SolverConfig, SolverError,
    Sort, SourceDoc, Value,
};

use crate::select::{select_modules, SelectError};

pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 3;
    pub const UNKNOWN: i32 = 4;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const UNAVAILABLE: i32 = 69;
    pub const CANT_CREATE: i32 = 73;
}

#[derive(Debug, Parser)]
#[command(name = "veriodd", version, about = "Compile and verify ODD/COD specifications")]
pub struct Cli {
    /// Solver executable; defaults to $VERIODD_SOLVER or `z3`.
    #[arg(long, global = true, value_name = "PATH")]
    pub solver: Option<PathBuf>,
    /// Per-solver-run timeout.
    #[arg(long, global = true, value_name = "MS", default_value_t = veriodd::engine::DEFAULT_TIMEOUT_MS,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout_ms: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate an ODD (and optionally a COD) to SMT-LIB or propositional logic.
    Compile(CompileArgs),
    /// Check that the selected modules are satisfiable on their own.
    Check(CheckArgs),
    /// Check a COD against the selected modules.
    Verify(VerifyArgs),
    /// Verify many CODs, one fresh solver process each.
    Batch(BatchArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Smtlib,
    Prop,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub odd: PathBuf,
    #[arg(long)]
    pub cod: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub target: Target,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Selection {
    /// Modules to assert (comma-separated or repeated); defaults to the
    /// unique top-level module.
    #[arg(long, value_delimiter = ',')]
    pub modules: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub odd: PathBuf,
    #[command(flatten)]
    pub selection: Selection,
    /// Print a satisfying assignment.
    #[arg(long)]
    pub model: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub odd: PathBuf,
    #[arg(long)]
    pub cod: PathBuf,
    #[command(flatten)]
    pub selection: Selection,
    #[arg(long)]
    pub model: bool,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub odd: PathBuf,
    /// Directory of `.yaml` CODs, or one file with CODs separated by `---` lines.
    #[arg(long)]
    pub cods: PathBuf,
    #[command(flatten)]
    pub selection: Selection,
    /// CSV report destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Maximum number of concurrent solver runs; further requests queue.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_solvers: u64,
    /// Origin allowed by CORS; any origin when absent.
    #[arg(long)]
    pub cors_origin: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Unreadable { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot write {path}: {source}")]
    Unwritable { path: String, source: std::io::Error },
    #[error("{0}")]
    Serve(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unreadable { .. } => exit::NO_INPUT,
            CliError::Invalid(_) => exit::DATA,
            CliError::Select(_) => exit::USAGE,
            CliError::Engine(EngineError::Assemble(_)) => exit::USAGE,
            CliError::Engine(EngineError::Solver(SolverError::SolverTimeout { .. })) => exit::UNKNOWN,
            CliError::Engine(EngineError::Solver(_)) => exit::UNAVAILABLE,
            CliError::Unwritable { .. } => exit::CANT_CREATE,
            CliError::Serve(_) => exit::UNAVAILABLE,
        }
    }
}

fn read_doc(path: &Path) -> Result<SourceDoc, CliError> {
    let origin = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Unreadable { path: origin.clone(), source })?;
    SourceDoc::from_bytes(&bytes, origin.clone()).map_err(|d| CliError::Invalid(d.render(&origin)))
}

fn render_all(diags: &[Diagnostic], origin: &str) -> String {
    diags.iter().map(|d| d.render(origin)).collect::<Vec<_>>().join("\n")
}

fn load_odd(path: &Path) -> Result<OddSpec, CliError> {
    let doc = read_doc(path)?;
    parse_odd(&doc).map_err(|d| CliError::Invalid(render_all(&d, &doc.origin)))
}

fn load_cod(path: &Path, odd: &OddSpec) -> Result<CodSpec, CliError> {
    let doc = read_doc(path)?;
    parse_cod(&doc, odd.symbols()).map_err(|d| CliError::Invalid(render_all(&d, &doc.origin)))
}

/// CODs from a directory (`.yaml`/`.yml` files in file-name order) or from
/// one `---`-separated stream file.
pub fn load_cods(path: &Path, odd: &OddSpec) -> Result<Vec<CodSpec>, CliError> {
    let unreadable = |source| CliError::Unreadable { path: path.display().to_string(), source };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(unreadable)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("yaml" | "yml")))
            .collect();
        files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
        let mut cods = Vec::with_capacity(files.len());
        let mut errors = Vec::new();
        for f in &files {
            match load_cod(f, odd) {
                Ok(c) => cods.push(c),
                Err(CliError::Invalid(msg)) => errors.push(msg),
                Err(e) => return Err(e),
            }
        }
        if errors.is_empty() {
            Ok(cods)
        } else {
            Err(CliError::Invalid(errors.join("\n")))
        }
    } else {
        let doc = read_doc(path)?;
        parse_cod_stream(&doc.text, &doc.origin, odd.symbols())
            .map_err(|d| CliError::Invalid(render_all(&d, &doc.origin)))
    }
}

fn write_output(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|source| CliError::Unwritable { path: p.display().to_string(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Unwritable { path: "<stdout>".into(), source }),
    }
}

fn solver_config(cli: &Cli) -> SolverConfig {
    let mut config = SolverConfig::from_env().with_timeout_ms(cli.timeout_ms);
    if let Some(path) = &cli.solver {
        config.executable = path.clone();
    }
    config
}

/// A model value as shown to users: strings quoted so that empty and
/// blank values stay visible.
pub fn binding_text(value: &Value, sort: Sort) -> String {
    match value {
        Value::Str(s) => string_literal(s),
        _ => value.display(sort),
    }
}

/// `name = value` lines for the ODD's attributes, in declaration order.
pub fn model_lines(odd: &OddSpec, model: &Model) -> Vec<String> {
    odd.symbols()
        .values()
        .filter_map(|d| model.get(&d.name).map(|v| format!("{} = {}", d.name, binding_text(v, d.sort))))
        .collect()
}

fn report_check(result: &CheckResult, odd: &OddSpec, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut text = format!("{}\n", result.verdict);
    if let Some(model) = &result.outcome.model {
        for line in model_lines(odd, model) {
            text.push_str(&line);
            text.push('\n');
        }
    }
    write_output(None, &text, stdout)?;
    Ok(match result.verdict {
        veriodd::CheckVerdict::Consistent | veriodd::CheckVerdict::WithinOdd => exit::OK,
        veriodd::CheckVerdict::Inconsistent | veriodd::CheckVerdict::Violation => exit::NEGATIVE,
        veriodd::CheckVerdict::Unknown => exit::UNKNOWN,
    })
}

fn compile(args: &CompileArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let odd = load_odd(&args.odd)?;
    let cod = args.cod.as_deref().map(|p| load_cod(p, &odd)).transpose()?;
    let mut text = match args.target {
        Target::Smtlib => emit_odd_smtlib(&odd),
        Target::Prop => emit_odd_prop(&odd),
    };
    if let Some(cod) = &cod {
        text.push('\n');
        text.push_str(&match args.target {
            Target::Smtlib => emit_cod_smtlib(cod),
            Target::Prop => emit_cod_prop(cod),
        });
    }
    write_output(args.output.as_deref(), &text, stdout)?;
    Ok(exit::OK)
}

fn batch(args: &BatchArgs, config: &SolverConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let odd = load_odd(&args.odd)?;
    let modules = select_modules(&odd, &args.selection.modules)?;
    let cods = load_cods(&args.cods, &odd)?;
    let report = run_batch(&odd, &cods, &modules, config, args.workers as usize)?;
    let t = &report.totals;
    let summary = format!(
        "cods: {}\nwithin-odd: {}\nviolation: {}\nunknown: {}\nerror: {}\ntotal: {:.1} ms (mean {:.1}, min {:.1}, max {:.1})\nelapsed: {:.1} ms\n",
        t.count, t.within_odd, t.violation, t.unknown, t.error, t.total_ms, t.mean_ms, t.min_ms, t.max_ms, t.elapsed_ms
    );
    match &args.csv {
        Some(path) => {
            write_output(Some(path), &report.to_csv(), stdout)?;
            write_output(None, &summary, stdout)?;
        }
        None => {
            write_output(None, &report.to_csv(), stdout)?;
            eprint!("{summary}");
        }
    }
    Ok(exit::OK)
}

fn serve(args: &ServeArgs, config: SolverConfig) -> Result<i32, CliError> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Serve(e.to_string()))?;
    let state = crate::service::AppState::new(config, args.max_solvers as usize);
    let app = crate::service::router(state, args.cors_origin.as_deref()).map_err(CliError::Serve)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| CliError::Serve(format!("cannot bind {}:{}: {e}", args.host, args.port)))?;
        let addr = listener.local_addr().map_err(|e| CliError::Serve(e.to_string()))?;
        eprintln!("listening on http://{addr}");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Serve(e.to_string()))
    })?;
    Ok(exit::OK)
}

/// Runs a parsed command line and returns the process exit code. Errors are
/// reported on stderr.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> i32 {
    let config = solver_config(cli);
    let result = match &cli.command {
        Command::Compile(args) => compile(args, stdout),
        Command::Check(args) => (|| {
            let odd = load_odd(&args.odd)?;
            let modules = select_modules(&odd, &args.selection.modules)?;
            let result = check_consistency(&odd, &modules, &config, args.model)?;
            report_check(&result, &odd, stdout)
        })(),
        Command::Verify(args) => (|| {
            let odd = load_odd(&args.odd)?;
            let cod = load_cod(&args.cod, &odd)?;
            let modules = select_modules(&odd, &args.selection.modules)?;
            let result = verify_cod(&odd, &cod, &modules, &config, args.model)?;
            report_check(&result, &odd, stdout)
        })(),
        Command::Batch(args) => batch(args, &config, stdout),
        Command::Serve(args) => serve(args, config.clone()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            if code == exit::UNKNOWN {
                let _ = writeln!(stdout, "unknown");
            }
            eprintln!("veriodd: {e}");
            code
        }
    }
}

/// Parses arguments and runs; usage errors exit with 64, `--help` and
/// `--version` with 0.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout),
        Err(e) => {
            let _ = e.print();
            if e.exit_code() == 0 {
                exit::OK
            } else {
                exit::USAGE
            }
        }
    }
}
