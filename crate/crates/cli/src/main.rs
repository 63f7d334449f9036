//! `pairquant`: scans of the two-level pairing model.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pairquant_core::bcs::{branch_report, solve_bcs_with};
use pairquant_core::crosscheck::standard_checks;
use pairquant_core::model::{Occupancy, PairingModel};
use pairquant_core::scan::{self, Format, Method, ScanError, ScanSpec, ScanTable};
use serde::Serialize;
use thiserror::Error;

use config::{FileConfig, ModelArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Spec(_) | ScanError::Model(_) => CliError::Validation(e.to_string()),
            ScanError::Io { .. } | ScanError::Encode { .. } => CliError::Io(e.to_string()),
            ScanError::EmptyTable | ScanError::Pool(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "pairquant", version, about = "BCS, projected BCS and exact pair-mode correlations")]
struct Cli {
    /// TOML file with model parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Output file; stdout when omitted (no sidecar is written then).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(clap::Args)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Inclusive pair-number range `a:b`.
    #[arg(long)]
    p_range: Option<String>,
    #[arg(long)]
    p: Option<u32>,
    /// Pair type 1, 2 or 3.
    #[arg(long = "type", short = 't')]
    pair_type: Option<String>,
    /// Also report the discord with the measurement on qubit A.
    #[arg(long)]
    a_side: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the BCS equations at one pair number and print JSON.
    Bcs {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: Option<u32>,
        /// Solve both occupation branches and print both.
        #[arg(long)]
        branch_report: bool,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Projected-BCS two-qubit measures over a range of pair numbers.
    PbcsScan(ScanArgs),
    /// Exact ground-state measures over a range of pair numbers.
    ExactScan(ScanArgs),
    /// Mean-field BCS measures over a range of pair numbers.
    BcsScan(ScanArgs),
    /// Closed-form single-level measures.
    OneLevel {
        #[arg(long)]
        omega: u32,
        #[arg(long)]
        p_range: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep a uniform pairing strength.
    Gscan {
        #[command(flatten)]
        scan: ScanArgs,
        /// Comma-separated strengths.
        #[arg(long, value_delimiter = ',')]
        g_values: Vec<f64>,
        /// Strength the discord ratio is taken against.
        #[arg(long)]
        reference: Option<f64>,
        /// pbcs | exact | bcs
        #[arg(long, default_value = "pbcs")]
        method: String,
    },
    /// Cross-check the solvers against brute-force oracles on small systems.
    Validate {
        #[arg(long, short = 'g', default_value_t = 0.6)]
        g: f64,
    },
}

#[derive(Serialize)]
struct ErrorRow<'a> {
    p: u32,
    g: f64,
    error: &'a str,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    version: &'a str,
    config_file: Option<String>,
    config_file_contents: &'a FileConfig,
    spec: &'a ScanSpec,
    format: Format,
    columns: &'a [&'static str],
    rows: usize,
    error_rows: Vec<ErrorRow<'a>>,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

struct Context {
    command: &'static str,
    config_path: Option<PathBuf>,
    file: FileConfig,
}

fn run_and_emit(ctx: &Context, spec: &ScanSpec, output: &Output) -> Result<(), CliError> {
    let format: Format = output.format.parse()?;
    let table: ScanTable = scan::run_scan(spec)?;
    match &output.out {
        Some(path) => {
            scan::emit(&table, format, path)?;
            let meta = Sidecar {
                command: ctx.command,
                version: env!("CARGO_PKG_VERSION"),
                config_file: ctx.config_path.as_ref().map(|p| p.display().to_string()),
                config_file_contents: &ctx.file,
                spec,
                format,
                columns: &table.columns,
                rows: table.rows.len(),
                error_rows: table
                    .error_rows()
                    .map(|r| ErrorRow {
                        p: r.p,
                        g: r.g,
                        error: r.error.as_deref().unwrap_or(""),
                    })
                    .collect(),
            };
            let mut bytes = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            write_bytes(Some(&sidecar_path(path)), &bytes)?;
        }
        None => {
            if table.rows.is_empty() {
                return Err(ScanError::EmptyTable.into());
            }
            let bytes = scan::render(&table, format).map_err(CliError::Io)?;
            write_bytes(None, &bytes)?;
        }
    }
    let failed: Vec<_> = table.error_rows().collect();
    for r in &failed {
        eprintln!("p={} g={}: {}", r.p, r.g, r.error.as_deref().unwrap_or(""));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} of {} points failed", failed.len(), table.rows.len())))
    }
}

fn scan_spec(ctx: &Context, method: Method, args: &ScanArgs) -> Result<ScanSpec, CliError> {
    let resolved = config::resolve_model(&ctx.file, &args.model)?;
    let max = resolved.model.max_pairs();
    let (p_min, p_max) = config::resolve_p_range(args.p_range.as_deref(), args.p, &ctx.file, max)?;
    let pair_type = config::resolve_pair_type(args.pair_type.as_deref(), &ctx.file)?;
    let mut spec = ScanSpec::new(method, resolved.model, p_min, p_max, pair_type);
    spec.bcs = resolved.bcs;
    spec.a_side = args.a_side;
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::load(cli.config.as_deref())?;
    let mut ctx = Context {
        command: "",
        config_path: cli.config.clone(),
        file,
    };
    match cli.command {
        Command::Bcs {
            model,
            p,
            branch_report: report,
            out,
        } => {
            let resolved = config::resolve_model(&ctx.file, &model)?;
            let p = p.or(ctx.file.p).ok_or_else(|| CliError::Validation("--p is required".into()))?;
            let occ = Occupancy::new(p);
            pairquant_core::model::check_occupancy(&resolved.model, occ)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let mut bytes = if report {
                let r = branch_report(&resolved.model, occ, &resolved.bcs);
                if r.selected.is_none() {
                    return Err(CliError::Numerical("no branch converged".into()));
                }
                serde_json::to_vec_pretty(&r)
            } else {
                let sol = solve_bcs_with(&resolved.model, occ, &resolved.bcs)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                serde_json::to_vec_pretty(&sol)
            }
            .map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            write_bytes(out.as_deref(), &bytes)
        }
        Command::PbcsScan(args) => {
            ctx.command = "pbcs-scan";
            let spec = scan_spec(&ctx, Method::Pbcs, &args)?;
            run_and_emit(&ctx, &spec, &args.output)
        }
        Command::ExactScan(args) => {
            ctx.command = "exact-scan";
            let spec = scan_spec(&ctx, Method::Exact, &args)?;
            run_and_emit(&ctx, &spec, &args.output)
        }
        Command::BcsScan(args) => {
            ctx.command = "bcs-scan";
            let spec = scan_spec(&ctx, Method::Bcs, &args)?;
            run_and_emit(&ctx, &spec, &args.output)
        }
        Command::OneLevel { omega, p_range, output } => {
            ctx.command = "one-level";
            let model = PairingModel::symmetric(omega, 0.0).map_err(|e| CliError::Validation(e.to_string()))?;
            let (p_min, p_max) = match p_range {
                Some(r) => config::parse_range(&r)?,
                None => (0, omega),
            };
            let spec = ScanSpec::new(
                Method::OneLevel,
                model,
                p_min,
                p_max,
                pairquant_core::model::PairType::SameLower,
            );
            run_and_emit(&ctx, &spec, &output)
        }
        Command::Gscan {
            scan,
            g_values,
            reference,
            method,
        } => {
            ctx.command = "gscan";
            let method = match method.to_ascii_lowercase().as_str() {
                "pbcs" => Method::Pbcs,
                "exact" => Method::Exact,
                "bcs" => Method::Bcs,
                other => return Err(CliError::Validation(format!("unknown method '{other}'"))),
            };
            let mut spec = scan_spec(&ctx, method, &scan)?;
            spec.g_values = if !g_values.is_empty() {
                g_values
            } else if let Some(g) = &ctx.file.g_values {
                g.clone()
            } else {
                vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
            };
            spec.ratio_reference = Some(reference.or(ctx.file.reference).unwrap_or(0.6));
            run_and_emit(&ctx, &spec, &scan.output)
        }
        Command::Validate { g } => {
            let checks = standard_checks(g);
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                println!(
                    "{} {} (max error {:.3e}, tolerance {:.0e}, {} points)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_error,
                    c.tolerance,
                    c.points
                );
            }
            if ok {
                Ok(())
            } else {
                Err(CliError::Numerical("oracle cross-checks failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
