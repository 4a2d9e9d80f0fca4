//! `cubetight`: command-line front end.
//!
//! Exit status 0 on success, 2 for invalid input (with a JSON error object on
//! stderr), 1 for internal consistency failures.

mod args;
mod commands;
mod render;

use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::{execute, Artifact};
use cubetight::Error;

const THREADS_VAR: &str = "CUBETIGHT_THREADS";

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parameter(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn report(error: &Error, argv: &[String]) -> ExitCode {
    let code = if error.is_internal() { 1 } else { 2 };
    let mut body = json!({ "error": { "kind": error.kind(), "message": error.to_string() } });
    if error.is_internal() {
        body["error"]["reproduce"] = json!(argv);
    }
    eprintln!("{}", serde_json::to_string(&body).expect("JSON values always serialize"));
    ExitCode::from(code)
}

fn emit(artifact: Artifact, output: Option<&std::path::Path>) -> Result<(), Error> {
    let text = match artifact {
        Artifact::Json(value) => render::to_pretty(&value),
        Artifact::Text(text) => text,
    };
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Parameter(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Error::Internal(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let body = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Err(e) = configure_threads() {
        return report(&e, &argv);
    }
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(|| execute(&cli.command, &cli.global));
    let _ = panic::take_hook();
    match outcome {
        Ok(Ok(artifact)) => match emit(artifact, cli.global.output.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => report(&e, &argv),
        },
        Ok(Err(e)) => report(&e, &argv),
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            report(&Error::Internal(message), &argv)
        }
    }
}
