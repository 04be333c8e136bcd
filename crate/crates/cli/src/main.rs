//! `cobord`: coefficient tables, verification suites and product checks.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error.

mod tables;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cobord_core::products::{run_product_spec, ProductSpec};
use cobord_core::verify::{self, Fault, Suite, VerifyConfig, DEFAULT_SEED};
use cobord_core::AlgebraError;
use serde::Serialize;

/// Weights above this grow combinatorially; `--unsafe` lifts the limit.
const SAFE_WEIGHT: u32 = 12;

#[derive(Parser, Debug)]
#[command(name = "cobord", version, about = "Exact cobordism algebra: tables, invariant suites, product checks")]
struct Cli {
    /// Truncation weight for tables and suites.
    #[arg(long, global = true, default_value_t = 6)]
    max_weight: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized parameters.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow weights above 12.
    #[arg(long = "unsafe", global = true)]
    allow_large: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients α_ij of the universal formal group law.
    Fgl,
    /// Coefficients of the logarithm and exponential.
    Log,
    /// Products s_a·s_b in the basis {s_w}.
    StructureConstants,
    /// Run an invariant suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, hide = true, value_parser = parse_fault)]
        inject_fault: Option<Fault>,
    },
    /// Evaluate a product described by a JSON spec file.
    ProductCheck {
        spec: PathBuf,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: AlgebraError| e.to_string())
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    s.parse().map_err(|e: AlgebraError| e.to_string())
}

#[derive(Debug)]
enum Failure {
    /// Bad flags, spec or preconditions.
    Usage(String),
    /// The computation ran and some check failed.
    Check(String),
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_weight(cli: &Cli, w: u32) -> Result<(), Failure> {
    if w == 0 {
        return Err(Failure::Usage("max weight must be at least 1".into()));
    }
    if w > SAFE_WEIGHT && !cli.allow_large {
        return Err(Failure::Usage(format!("weight {w} exceeds {SAFE_WEIGHT}; pass --unsafe to proceed")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Fgl => {
            check_weight(cli, cli.max_weight)?;
            let t = tables::fgl(cli.max_weight)?;
            emit(cli, &t, &tables::FGL_HEADER, tables::fgl_csv(&t))
        }
        Command::Log => {
            check_weight(cli, cli.max_weight)?;
            let t = tables::log(cli.max_weight)?;
            emit(cli, &t, &tables::LOG_HEADER, tables::log_csv(&t))
        }
        Command::StructureConstants => {
            check_weight(cli, cli.max_weight)?;
            let t = tables::structure(cli.max_weight)?;
            emit(cli, &t, &tables::STRUCTURE_HEADER, tables::structure_csv(&t))
        }
        Command::Verify { suite, inject_fault } => {
            check_weight(cli, cli.max_weight)?;
            let config = VerifyConfig { max_weight: cli.max_weight, seed: cli.seed, fault: *inject_fault };
            let report = verify::run(*suite, &config)?;
            let rows = report
                .checks
                .iter()
                .map(|c| {
                    [
                        c.suite.clone(),
                        c.name.clone(),
                        c.weight.to_string(),
                        c.pass.to_string(),
                        c.detail.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            emit(cli, &report, &["suite", "name", "weight", "pass", "detail"], rows)?;
            if report.passed {
                Ok(())
            } else {
                let names: Vec<String> = report.failures().map(|c| format!("{}: {}", c.suite, c.name)).collect();
                Err(Failure::Check(format!("failed checks:\n  {}", names.join("\n  "))))
            }
        }
        Command::ProductCheck { spec } => {
            let spec = read_spec(spec)?;
            check_weight(cli, spec.check_weight)?;
            let out = run_product_spec(&spec)?;
            let w = out.witness.clone().unwrap_or_default();
            let row = [out.associative.to_string(), w[0].clone(), w[1].clone(), w[2].clone()];
            emit(cli, &out, &["associative", "witness_x", "witness_y", "witness_z"], vec![row])
        }
    }
}

fn read_spec(path: &Path) -> Result<ProductSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: invalid spec: {e}", path.display())))
}

fn emit<T: Serialize, const N: usize>(
    cli: &Cli,
    value: &T,
    header: &[&str; N],
    rows: Vec<[String; N]>,
) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, value).map_err(|e| Failure::Usage(e.to_string()))?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(|e| Failure::Usage(e.to_string()))?;
            for r in rows {
                w.write_record(&r).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    match &cli.out {
        Some(p) => fs::write(p, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
