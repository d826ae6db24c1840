//! Seeded experiment driver. `run` parses arguments, merges an optional JSON
//! config, runs one subcommand and writes its report.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub mod args;
mod commands;
pub mod report;

use args::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GATE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<qdlab_core::Error> for CliError {
    fn from(e: qdlab_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Options shared by every subcommand after merging the config file.
#[derive(Debug)]
pub(crate) struct Common {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Common {
    pub fn require_seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Usage(format!("{what} is stochastic and needs --seed")))
    }
}

/// Runs the tool on a full argument vector (program name first) and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qdlab: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let mut file = match &cli.config {
        Some(path) => load_config(path)?,
        None => Map::new(),
    };
    let common = Common {
        seed: pick(cli.seed, file.remove("seed"), "seed")?,
        out: pick(cli.out, file.remove("out"), "out")?,
        format: pick(cli.format, file.remove("format"), "format")?.unwrap_or(Format::Csv),
        threads: pick(cli.threads, file.remove("threads"), "threads")?,
    };
    if common.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;

    let start = Instant::now();
    let report = pool.install(|| match cli.command {
        Command::Disc(a) => commands::disc(merge(a, file)?, &common),
        Command::Qdisc(a) => commands::qdisc(merge(a, file)?, &common),
        Command::Ubound(a) => commands::ubound(merge(a, file)?, &common),
        Command::Lbound(a) => commands::lbound(merge(a, file)?, &common),
        Command::Dpp(a) => {
            let action = a.action;
            let mut merged: args::DppArgs = merge(a, file)?;
            merged.action = action;
            commands::dpp(merged, &common)
        }
        Command::Compare(a) => commands::compare(merge(a, file)?, &common),
        Command::Haar(a) => commands::haar(merge(a, file)?, &common),
    })?;
    // Wall time stays out of the report so that reruns are byte-identical.
    eprintln!("qdlab: {} finished in {:.3}s", report.header.subcommand, start.elapsed().as_secs_f64());

    let mut buf = Vec::new();
    report
        .write(common.format, &mut buf)
        .map_err(|e| CliError::Validation(format!("cannot format report: {e}")))?;
    match &common.out {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&buf)
                .map_err(|e| CliError::Validation(format!("cannot write report: {e}")))?;
        }
    }
    Ok(if report.gate_failed { EXIT_GATE } else { EXIT_OK })
}

fn load_config(path: &std::path::Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!("config {} must be a JSON object", path.display()))),
        Err(e) => Err(CliError::Usage(format!("config {} is not valid JSON: {e}", path.display()))),
    }
}

// Command-line value if given, else the config value.
fn pick<V: DeserializeOwned>(cli: Option<V>, file: Option<Value>, key: &str) -> Result<Option<V>, CliError> {
    if cli.is_some() {
        return Ok(cli);
    }
    match file {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
    }
}

/// Overlays the flags given on the command line onto the config file's
/// subcommand keys; unknown keys are rejected.
pub(crate) fn merge<A: Serialize + DeserializeOwned>(cli: A, mut file: Map<String, Value>) -> Result<A, CliError> {
    let given = serde_json::to_value(&cli).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Value::Object(given) = given {
        for (k, v) in given {
            if !v.is_null() {
                file.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(file)).map_err(|e| CliError::Usage(format!("config: {e}")))
}
