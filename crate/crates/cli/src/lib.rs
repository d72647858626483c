//! The `sesim` command line: file formats, run manifests and one subcommand
//! per library operation. Each subcommand parses its inputs, calls the
//! library, and writes JSON or CSV plus a manifest into the output directory.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod matrix_file;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::{exit, CliError};
pub use manifest::{RunContext, RunManifest, OUT_DIR_ENV};
pub use matrix_file::MatrixFile;

fn dispatch(command: &Command, ctx: &mut RunContext) -> Result<(), CliError> {
    match command {
        Command::Compile(a) => commands::compile_cmd(a, ctx),
        Command::Evolve(a) => commands::evolve_cmd(a, ctx),
        Command::PrepUnif(a) => commands::prep_cmd(a, ctx),
        Command::Grover(a) => commands::grover_cmd(a, ctx),
        Command::Solve(a) => commands::solve_cmd(a, ctx),
        Command::Leakage(a) => commands::leakage_cmd(a, ctx),
        Command::Bench(a) => commands::bench_cmd(a, ctx),
    }
}

fn manifest(command: &str, args: &[String], ctx: &RunContext) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        args: args.to_vec(),
        config: serde_json::Value::Null,
        inputs: ctx.inputs.clone(),
        seed: None,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        outputs: ctx.outputs.clone(),
        exit_code: exit::OK,
        error: None,
    }
}

/// Runs one invocation (`argv[0]` included) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut ctx = RunContext::new(manifest::out_dir());

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = e.exit_code();
            if code == exit::OK {
                return code;
            }
            let mut m = manifest("sesim", &args, &ctx);
            m.exit_code = exit::PARSE;
            m.error = Some(e.kind().to_string());
            if let Err(w) = m.write(ctx.dir()) {
                eprintln!("error: {w}");
            }
            return exit::PARSE;
        }
    };

    let result = dispatch(&cli.command, &mut ctx);
    let mut m = manifest(cli.command.name(), &args, &ctx);
    m.config = serde_json::to_value(&cli.command)
        .ok()
        .and_then(|v| v.as_object().and_then(|o| o.values().next().cloned()))
        .unwrap_or_default();
    m.seed = cli.command.seed();
    if let Err(e) = &result {
        eprintln!("error: {e}");
        m.exit_code = e.exit_code();
        m.error = Some(e.to_string());
    }
    match m.write(ctx.dir()) {
        Ok(_) => m.exit_code,
        Err(w) => {
            eprintln!("error: {w}");
            if m.exit_code == exit::OK {
                exit::OTHER
            } else {
                m.exit_code
            }
        }
    }
}
