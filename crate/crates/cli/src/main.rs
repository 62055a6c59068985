mod args;
mod commands;
mod output;
mod report;

use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;
use std::path::Path;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Core(mems_radial::Error),
    /// A verification ran but its threshold was not met; the report is already written.
    Check(String),
    Io(String),
}

impl From<mems_radial::Error> for CliError {
    fn from(e: mems_radial::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "Validation",
            CliError::Core(e) => e.kind(),
            CliError::Check(_) => "CheckFailed",
            CliError::Io(_) => "Io",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Validation(m) | CliError::Check(m) | CliError::Io(m) => m.clone(),
        }
    }

    /// 1 for bad input, 2 for numerical failure.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Check(_) => 2,
        }
    }
}

fn error_record(kind: &str, message: &str, code: u8) -> serde_json::Value {
    output::summary(json!({ "error": { "kind": kind, "message": message, "exit_code": code } }))
}

fn out_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Bifurcate(a) => a.output.out.as_deref(),
        Command::ExactVerify(a) => a.output.out.as_deref(),
        Command::Phase(a) => a.output.out.as_deref(),
        Command::Picard(a) => a.output.out.as_deref(),
        Command::Critical(a) => a.output.out.as_deref(),
        Command::Mu1(a) => a.out.as_deref(),
        Command::Report(a) => a.output.out.as_deref(),
    }
}

fn run(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Bifurcate(a) => commands::bifurcate(a),
        Command::ExactVerify(a) => commands::exact_verify(a),
        Command::Phase(a) => commands::phase(a),
        Command::Picard(a) => commands::picard(a),
        Command::Critical(a) => commands::critical(a),
        Command::Mu1(a) => commands::mu1(a),
        Command::Report(a) => report::report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let doc = error_record("Usage", e.kind().as_str().unwrap_or("invalid arguments"), 1);
            let _ = output::emit_document(None, &doc);
            return ExitCode::from(1);
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {}", e.message());
            // a failed check has already written its report, which records the failure
            if !matches!(e, CliError::Check(_)) {
                let doc = error_record(e.kind(), &e.message(), code);
                if output::emit_document(out_path(&cli.command), &doc).is_err() {
                    let _ = output::emit_document(None, &doc);
                }
            }
            ExitCode::from(code)
        }
    }
}
