mod args;
mod cache;
mod commands;
mod input;
mod manifest;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{Ctx, Status};
use manifest::{Outcome, RunManifest};

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] blockers_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}

fn run(cli: &Cli) -> u8 {
    let started_at = manifest::now();
    let g = &cli.global;
    let code = match execute(cli) {
        Ok(status) => match status {
            Status::Ok => EXIT_OK,
            Status::Violation => EXIT_VIOLATION,
            Status::Incomplete => EXIT_BUDGET,
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    if let Some(path) = &g.manifest {
        let mut parameters: BTreeMap<String, serde_json::Value> = match cli.command.parameters() {
            serde_json::Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        parameters.insert("json".into(), g.json.into());
        parameters.insert("limit".into(), serde_json::to_value(g.limit).unwrap_or_default());
        let m = RunManifest {
            command: cli.command.name().into(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at,
            finished_at: manifest::now(),
            input_hash: manifest::hash_inputs(&cli.command.input_files()).ok().flatten(),
            outcome: match code {
                EXIT_USAGE => Outcome::Error,
                EXIT_BUDGET => Outcome::Incomplete,
                _ => Outcome::Success,
            },
            exit_code: code as i32,
        };
        if let Err(e) = manifest::write(path, &m) {
            eprintln!("error: cannot write manifest {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    code
}

fn execute(cli: &Cli) -> Result<Status, CliError> {
    let g = &cli.global;
    if let Some(k) = g.threads {
        if k == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let ctx = Ctx {
        json: g.json,
        limit: g.limit,
        use_cache: !g.no_cache,
    };
    let rep = commands::run(&cli.command, &ctx)?;
    match &g.out {
        Some(path) => std::fs::write(path, &rep.body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(rep.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(rep.status)
}
