//! `cdga`: command-line front end. JSON results go to stdout, a one-line summary to stderr.
//!
//! Exit codes: 0 clean, 1 verification failure, 2 obstruction, 3 malformed input.

mod commands;
mod render;

use std::io::{Read, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdga::document::ParseOptions;
use cdga::pipeline::Route;
use cdga::{Error, Field, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use commands::Outcome;

const MALFORMED: i32 = 3;

#[derive(Parser)]
#[command(name = "cdga", version, about = "Oriented CDGAs: Hodge decompositions, extensions and Poincaré duality models")]
struct Cli {
    /// Coefficient field: Q or Fp:<p> (odd prime).
    #[arg(long, global = true, value_name = "Q|Fp:p")]
    field: Option<String>,
    /// Truncation degree applied while reading input documents.
    #[arg(long, global = true, value_name = "T")]
    trunc: Option<usize>,
    /// Run the subcommand on every *.json file of a directory in parallel.
    #[arg(long, global = true, value_name = "DIR")]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CDGA axioms, cyclic pairing axioms and Poincaré-duality flags.
    Check { file: Option<String> },
    /// Homology dimensions and representatives.
    Homology { file: Option<String> },
    /// Hodge decomposition, or the certificate that none exists.
    Hodge {
        file: Option<String>,
        /// Only decide solvability on the middle degree pair.
        #[arg(long)]
        middle_only: bool,
    },
    /// Standard homotopy of the Hodge decomposition with its verification.
    Homotopy { file: Option<String> },
    /// Small subalgebra generated by the harmonic vectors.
    Small {
        file: Option<String>,
        #[arg(long)]
        cap: usize,
        /// List every nonzero colored-tree evaluation.
        #[arg(long)]
        trees: bool,
    },
    /// Extension to an algebra of Hodge type.
    Extend { file: Option<String> },
    /// Poincaré duality model with its verified zig-zag.
    Model {
        file: Option<String>,
        #[arg(long, default_value = "auto", value_name = "auto|small|extend")]
        route: Route,
    },
    /// Checks a map document between two algebra documents.
    VerifyMap { source: String, target: String, map: String },
    /// Quotient by the radical of the pairing.
    Quotient { file: Option<String> },
    /// Built-in example algebras.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    List,
    Emit { name: String },
}

fn read_input(path: &str) -> Result<String> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Error::Malformed(format!("{path}: {e}")))?;
    Ok(text)
}

fn code_of(r: &Result<Outcome>) -> i32 {
    match r {
        Ok(o) => o.code,
        Err(e) => e.exit_code(),
    }
}

fn value_of(r: Result<Outcome>) -> (Value, String) {
    match r {
        Ok(o) => (o.value, o.summary),
        Err(e) => (render::error(&e), format!("error: {e}")),
    }
}

/// Runs a single-file subcommand on document text.
fn run_file(command: &Command, text: &str, opts: ParseOptions) -> Result<Outcome> {
    match command {
        Command::Check { .. } => commands::check(text, opts),
        Command::Homology { .. } => commands::homology_cmd(text, opts),
        Command::Hodge { middle_only, .. } => commands::hodge(text, opts, *middle_only),
        Command::Homotopy { .. } => commands::homotopy(text, opts),
        Command::Small { cap, trees, .. } => commands::small(text, opts, *cap, *trees),
        Command::Extend { .. } => commands::extend(text, opts),
        Command::Model { route, .. } => commands::model(text, opts, *route),
        Command::Quotient { .. } => commands::quotient(text, opts),
        Command::VerifyMap { .. } | Command::Examples { .. } => unreachable!("not a single-file subcommand"),
    }
}

fn file_arg(command: &Command) -> Option<&Option<String>> {
    match command {
        Command::Check { file }
        | Command::Homology { file }
        | Command::Hodge { file, .. }
        | Command::Homotopy { file }
        | Command::Small { file, .. }
        | Command::Extend { file }
        | Command::Model { file, .. }
        | Command::Quotient { file } => Some(file),
        Command::VerifyMap { .. } | Command::Examples { .. } => None,
    }
}

/// Panics inside one computation become verification errors for that input only.
fn isolated(f: impl FnOnce() -> Result<Outcome>) -> Result<Outcome> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".into());
            Err(Error::Verification(format!("internal failure: {msg}")))
        }
    }
}

fn batch(command: &Command, dir: &Path, opts: ParseOptions) -> Result<Outcome> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Malformed(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(String, i32, Value, String)> = files
        .par_iter()
        .map(|p| {
            let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let r = isolated(|| run_file(command, &read_input(&p.to_string_lossy())?, opts));
            let code = code_of(&r);
            let (value, summary) = value_of(r);
            (name, code, value, summary)
        })
        .collect();
    let code = results.iter().map(|r| r.1).max().unwrap_or(0);
    let summary = results.iter().map(|(f, c, _, s)| format!("[{c}] {f}: {s}")).collect::<Vec<_>>().join("\n");
    let value = json!({
        "batch": dir.display().to_string(),
        "results": results.into_iter().map(|(file, code, output, _)| json!({"file": file, "exitCode": code, "output": output})).collect::<Vec<_>>(),
    });
    Ok(Outcome { value, summary, code })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let field = cli.field.as_deref().map(Field::parse).transpose()?;
    let opts = ParseOptions { field, truncation: cli.trunc };
    if let Some(dir) = &cli.batch {
        if file_arg(&cli.command).is_none() {
            return Err(Error::Malformed("--batch applies to single-file subcommands only".into()));
        }
        return batch(&cli.command, dir, opts);
    }
    match &cli.command {
        Command::Examples { action: ExamplesAction::List } => Ok(commands::examples_list()),
        Command::Examples { action: ExamplesAction::Emit { .. } } => unreachable!("handled by main"),
        Command::VerifyMap { source, target, map } => {
            commands::verify_map(&read_input(source)?, &read_input(target)?, &read_input(map)?, opts)
        }
        other => {
            let path = file_arg(other)
                .and_then(|f| f.clone())
                .ok_or_else(|| Error::Malformed("an input file (or - for stdin) is required".into()))?;
            let text = read_input(&path)?;
            isolated(|| run_file(other, &text, opts))
        }
    }
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    // Panics are reported as JSON errors by `isolated`.
    panic::set_hook(Box::new(|_| {}));
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return exit(0);
        }
        Err(e) => {
            let msg = e.to_string();
            emit(&format!("{}\n", json!({ "error": { "kind": "usage", "message": msg.trim(), "exitCode": MALFORMED } })));
            eprint!("{msg}");
            return exit(MALFORMED);
        }
    };
    if let Command::Examples { action: ExamplesAction::Emit { name } } = &cli.command {
        let opts = match cli.field.as_deref().map(Field::parse).transpose() {
            Ok(field) => ParseOptions { field, truncation: cli.trunc },
            Err(e) => {
                emit(&format!("{}\n", render::error(&e)));
                eprintln!("error: {e}");
                return exit(e.exit_code());
            }
        };
        return match commands::examples_emit(name, opts) {
            Ok(text) => {
                emit(&text);
                eprintln!("{name}: {}", cdga::corpus::description(name));
                exit(0)
            }
            Err(e) => {
                emit(&format!("{}\n", render::error(&e)));
                eprintln!("error: {e}");
                exit(e.exit_code())
            }
        };
    }
    let r = run(&cli);
    let code = code_of(&r);
    let (value, summary) = value_of(r);
    emit(&format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")));
    eprintln!("{summary}");
    exit(code)
}
