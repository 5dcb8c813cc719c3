//! `tdm` command-line tool: check, configs, generate, fmt.
//!
//! Exit codes: 0 success, 1 model errors or failed generation, 2 usage
//! error, 3 I/O failure. Diagnostics go to standard error; payloads (counts,
//! lists, manifests) to standard output.

use clap::{Parser, Subcommand};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tdm::check::{check, ResolvedModel};
use tdm::diag::Diagnostic;
use tdm::engine::{
    complete_configuration, enumerate_configurations, EngineError, EnumerateOptions,
    DEFAULT_STATE_CAP,
};
use tdm::parser::parse_model;
use tdm::printer::pretty_print;
use tdm::release::{emit_manifest, generate_release, ReleaseError};

const EXIT_OK: u8 = 0;
const EXIT_MODEL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "tdm", version, about = "Toolchain for the TDM variability language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and semantically check a model
    Check { file: PathBuf },
    /// Count or list valid configurations
    Configs {
        file: PathBuf,
        /// Print the number of valid configurations
        #[arg(long)]
        count: bool,
        /// Print one configuration per line
        #[arg(long)]
        list: bool,
        /// Truncate the listing after N configurations
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        limit: Option<u64>,
        /// Restrict to completions of the named configuration spec
        #[arg(long)]
        spec: Option<String>,
        /// Bypass the state-space safety cap
        #[arg(long)]
        force: bool,
    },
    /// Derive a release and write its manifest
    Generate {
        file: PathBuf,
        spec: String,
        /// Output path, or `-` for standard output
        out: String,
    },
    /// Canonically format a model file
    Fmt {
        file: PathBuf,
        /// Rewrite the file in place
        #[arg(long)]
        write: bool,
        /// Exit nonzero if the file is not already canonical
        #[arg(long)]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { file } => cmd_check(&file),
        Command::Configs {
            file,
            count,
            list,
            limit,
            spec,
            force,
        } => cmd_configs(&file, count, list, limit, spec.as_deref(), force),
        Command::Generate { file, spec, out } => cmd_generate(&file, &spec, &out),
        Command::Fmt { file, write, verify } => cmd_fmt(&file, write, verify),
    };
    ExitCode::from(code)
}

fn read_source(file: &Path) -> Result<String, u8> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        EXIT_IO
    })
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

/// Parses and checks; prints all diagnostics. `Err` carries the exit code.
fn load_certified(file: &Path) -> Result<ResolvedModel, u8> {
    let source = read_source(file)?;
    let name = file.to_string_lossy();
    let model = match parse_model(&source, &name) {
        Ok(m) => m,
        Err(diags) => {
            print_diagnostics(&diags);
            return Err(EXIT_MODEL);
        }
    };
    let (resolved, diags) = check(&model);
    print_diagnostics(&diags);
    if resolved.certified {
        Ok(resolved)
    } else {
        Err(EXIT_MODEL)
    }
}

fn cmd_check(file: &Path) -> u8 {
    match load_certified(file) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

fn engine_options(force: bool, limit: Option<u64>) -> Result<EnumerateOptions, u8> {
    let cap = match std::env::var("TDM_STATE_CAP") {
        Ok(v) => match v.parse::<u64>() {
            Ok(n) if n >= 1 => n,
            _ => {
                eprintln!("error: TDM_STATE_CAP must be a positive integer, got `{v}`");
                return Err(EXIT_USAGE);
            }
        },
        Err(_) => DEFAULT_STATE_CAP,
    };
    Ok(EnumerateOptions {
        limit: limit.map(|l| l as usize),
        cap,
        force,
    })
}

fn cmd_configs(
    file: &Path,
    count: bool,
    list: bool,
    limit: Option<u64>,
    spec: Option<&str>,
    force: bool,
) -> u8 {
    if count == list {
        eprintln!("error: pass exactly one of --count or --list");
        return EXIT_USAGE;
    }
    if count && limit.is_some() {
        eprintln!("error: --limit only applies to --list");
        return EXIT_USAGE;
    }
    let opts = match engine_options(force, if list { limit } else { None }) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let resolved = match load_certified(file) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let spec = match spec {
        None => None,
        Some(name) => match resolved.configuration(name) {
            Some(s) => Some(s.clone()),
            None => {
                let available: Vec<&str> = resolved
                    .model
                    .meta
                    .configurations
                    .iter()
                    .map(|c| c.name.as_str())
                    .collect();
                let listing = if available.is_empty() {
                    "none declared".to_string()
                } else {
                    available.join(", ")
                };
                eprintln!("error: unknown configuration `{name}` (available: {listing})");
                return EXIT_MODEL;
            }
        },
    };
    let (assignments, truncated) = match &spec {
        Some(s) => match complete_configuration(&resolved, s, &opts) {
            Ok(a) => {
                let truncated = opts.limit.is_some_and(|l| a.len() > l);
                let mut a = a;
                if let Some(l) = opts.limit {
                    a.truncate(l);
                }
                (a, truncated)
            }
            Err(e) => return report_engine_error(&e),
        },
        None => match enumerate_configurations(&resolved, &opts) {
            Ok(e) => (e.assignments, e.truncated),
            Err(e) => return report_engine_error(&e),
        },
    };
    if count {
        println!("{}", assignments.len());
    } else {
        for a in &assignments {
            let line: Vec<String> = resolved
                .enumeration_space()
                .iter()
                .map(|f| format!("{}={}", f.name, a.get(&f.name).unwrap_or("?")))
                .collect();
            println!("{}", line.join(", "));
        }
        if truncated {
            eprintln!("note: listing truncated at --limit");
        }
    }
    EXIT_OK
}

fn report_engine_error(e: &EngineError) -> u8 {
    eprintln!("error: {e}");
    EXIT_MODEL
}

fn cmd_generate(file: &Path, spec: &str, out: &str) -> u8 {
    let opts = match engine_options(false, None) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let resolved = match load_certified(file) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let release = match generate_release(&resolved, spec, &opts) {
        Ok(r) => r,
        Err(ReleaseError::Diagnostics(diags)) => {
            print_diagnostics(&diags);
            return EXIT_MODEL;
        }
        Err(other) => {
            eprintln!("error: {other}");
            return EXIT_MODEL;
        }
    };
    let manifest = emit_manifest(&release);
    if out == "-" {
        print!("{manifest}");
        if std::io::stdout().flush().is_err() {
            return EXIT_IO;
        }
        EXIT_OK
    } else {
        match std::fs::write(out, manifest) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write {out}: {e}");
                EXIT_IO
            }
        }
    }
}

fn cmd_fmt(file: &Path, write: bool, verify: bool) -> u8 {
    if write == verify {
        eprintln!("error: pass exactly one of --write or --verify");
        return EXIT_USAGE;
    }
    let source = match read_source(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let name = file.to_string_lossy();
    let model = match parse_model(&source, &name) {
        Ok(m) => m,
        Err(diags) => {
            print_diagnostics(&diags);
            return EXIT_MODEL;
        }
    };
    let canonical = pretty_print(&model);
    if verify {
        if canonical == source {
            EXIT_OK
        } else {
            eprintln!("{}: not canonically formatted", file.display());
            EXIT_MODEL
        }
    } else {
        if canonical != source {
            if let Err(e) = std::fs::write(file, canonical) {
                eprintln!("error: cannot write {}: {e}", file.display());
                return EXIT_IO;
            }
        }
        EXIT_OK
    }
}
