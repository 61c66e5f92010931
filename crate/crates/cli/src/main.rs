//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure
//! (failed sweep rows or failed selftest checks).

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use antiwick_cli::config::{ConfigError, SweepConfig};
use antiwick_cli::report::{emit_ainfty, emit_profiles, emit_report, ReportFormat};
use antiwick_cli::sweep::{
    run_ainfty, run_gap_only, run_quantize, run_semiclassical, run_sweep,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "antiwick",
    version,
    about = "Anti-Wick operators, spectral bottoms, and ball-average gap estimators"
)]
struct Cli {
    /// Sweep configuration (JSON); the built-in standard suite when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and exports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Worker threads (overrides the config).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for the seeded checks (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record wall-clock timings per row (breaks byte-reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble operators and export them as dense symmetric matrix files.
    Quantize,
    /// Gap estimators only (no assembly or eigensolve).
    Gap,
    /// Full pipeline: assembly, eigensolve, gap estimators, report.
    Sweep,
    /// Semiclassical pipeline: spec_bottom against λ′ with h^N slack.
    Semiclassical {
        /// Order N of the h^N slack column.
        #[arg(long, default_value_t = 4)]
        order: u32,
    },
    /// Muckenhoupt-style weight diagnostics over p ∈ {2, 4, 8}.
    Ainfty,
    /// Run the acceptance battery and print one line per check.
    Selftest,
}

fn load_config(cli: &Cli) -> Result<SweepConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_path(path)?,
        None => match cli.cmd {
            Cmd::Semiclassical { .. } => SweepConfig::default_semiclassical(),
            _ => SweepConfig::default_suite(),
        },
    };
    if let Some(w) = cli.workers {
        cfg.workers = w.max(1);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.timings {
        cfg.record_timings = true;
    }
    Ok(cfg)
}

fn ensure_out(dir: &PathBuf) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = ensure_out(&cli.out) {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    let format: ReportFormat = cli.format.into();

    let emit_outcome = |outcome: antiwick_cli::SweepOutcome, stem: &str| -> ExitCode {
        match emit_report(&outcome.rows, format, &cli.out, stem) {
            Ok(path) => println!("wrote {}", path.display()),
            Err(e) => {
                eprintln!("report error: {e}");
                return ExitCode::from(2);
            }
        }
        if !outcome.profiles.is_empty() {
            match emit_profiles(&outcome.profiles, &cli.out, &format!("{stem}_profiles")) {
                Ok(path) => println!("wrote {}", path.display()),
                Err(e) => {
                    eprintln!("report error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        println!(
            "{} rows, {} failed",
            outcome.rows.len(),
            outcome.failed_rows
        );
        if outcome.failed_rows > 0 {
            ExitCode::from(3)
        } else {
            ExitCode::SUCCESS
        }
    };

    match cli.cmd {
        Cmd::Sweep => match run_sweep(&cfg) {
            Ok(out) => emit_outcome(out, "report"),
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Gap => match run_gap_only(&cfg) {
            Ok(out) => emit_outcome(out, "gap_report"),
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Semiclassical { order } => match run_semiclassical(&cfg, order) {
            Ok(out) => emit_outcome(out, "semiclassical_report"),
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Ainfty => match run_ainfty(&cfg) {
            Ok(rows) => match emit_ainfty(&rows, &cli.out, "ainfty") {
                Ok(path) => {
                    println!("wrote {}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("report error: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Quantize => match run_quantize(&cfg, &cli.out) {
            Ok(paths) => {
                for p in &paths {
                    println!("wrote {}", p.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Selftest => {
            let checks = antiwick_cli::selftest::run_all(cfg.seed);
            let mut failed = 0;
            for c in &checks {
                println!("{}", c.line());
                if !c.passed {
                    failed += 1;
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
