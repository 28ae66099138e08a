use std::path::PathBuf;
use std::process::ExitCode;

use abvar::config::{load_config, Suite, SuiteConfig};
use abvar::report::{emit_report, Format};
use abvar::suites::run_suite;
use clap::{Parser, Subcommand};

/// Numerical certification of theta-function embeddings near a degenerate fiber.
#[derive(Parser)]
#[command(name = "abvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify {
        /// Suite name; see `list-suites`.
        suite: Suite,
        /// Configuration file; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Report destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// List the available suites.
    ListSuites,
    /// Show the default configuration.
    Defaults {
        /// Print it as a configuration file.
        #[arg(long)]
        print: bool,
    },
}

const CONFIG_ERROR: u8 = 2;

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("ABVAR_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("ABVAR_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn verify(
    suite: Suite,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
) -> ExitCode {
    let mut cfg = match &config {
        Some(path) => match load_config(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(CONFIG_ERROR);
            }
        },
        None => SuiteConfig::resolved(),
    };
    cfg.suite = suite;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    let report = run_suite(&cfg);
    if let Err(e) = emit_report(&report, format, out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    if out.is_some() {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    match cli.command {
        Command::Verify {
            suite,
            config,
            seed,
            out,
            format,
        } => verify(suite, config, seed, out, format),
        Command::ListSuites => {
            for s in Suite::ALL {
                println!("{:<18} {}", s.name(), s.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Defaults { .. } => {
            print!("{}", SuiteConfig::resolved().to_toml());
            ExitCode::SUCCESS
        }
    }
}
