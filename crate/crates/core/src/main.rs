use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ballot_runs::cli::config::AnalysisConfig;
use ballot_runs::cli::ingest::load_transcript;
use ballot_runs::cli::plot::plot_svg;
use ballot_runs::cli::report::{analyze_ingested, render_table};
use ballot_runs::cli::simulate::{simulate, SimulationSpec};
use ballot_runs::cli::verify::verify_tables;
use ballot_runs::cli::{exit_code, write_atomic, EXIT_OK, EXIT_VERIFICATION};
use ballot_runs::Error;

#[derive(Parser)]
#[command(
    name = "ballot-runs",
    version,
    about = "Run-based anomaly tests for ballot counting transcripts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Machine,
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Significance table for one transcript.
    Analyze {
        #[arg(long)]
        transcript: PathBuf,
        /// Analysis settings (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute the published tables from their integer inputs.
    VerifyTables {
        #[command(flatten)]
        output: Output,
    },
    /// Render a transcript as an SVG grid.
    Plot {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detection and false-positive rates over synthetic transcripts.
    Simulate {
        /// Simulation spec (TOML with a [scenario] table).
        #[arg(long, alias = "scenario")]
        config: PathBuf,
        /// Base seed; overrides the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count; overrides the spec.
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

fn load_config(path: Option<&Path>) -> Result<AnalysisConfig, Error> {
    path.map_or_else(|| Ok(AnalysisConfig::default()), AnalysisConfig::load)
}

fn emit(output: &Output, table: String, machine: String) -> Result<(), Error> {
    let text = match output.format {
        Format::Table => table,
        Format::Machine => machine,
    };
    match &output.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Analyze {
            transcript,
            config,
            output,
        } => {
            let config = load_config(config.as_deref())?;
            let ingested = load_transcript(&transcript, config.max_marks)?;
            let report = analyze_ingested(&ingested, &config)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(&output, render_table(&report), report.to_json() + "\n")?;
            Ok(EXIT_OK)
        }
        Command::VerifyTables { output } => {
            let report = verify_tables()?;
            let machine = report
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{}\t{}\t{}\t{}\n",
                        if c.pass { "pass" } else { "fail" },
                        c.item,
                        c.printed,
                        c.computed
                    )
                })
                .collect();
            emit(&output, report.render(), machine)?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
        Command::Plot {
            transcript,
            config,
            out,
        } => {
            let config = load_config(config.as_deref())?;
            let ingested = load_transcript(&transcript, config.max_marks)?;
            let svg = plot_svg(&ingested.transcript, config.top_k, config.tuned_top_k)?;
            write_atomic(&out, &svg)?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            config,
            seed,
            trials,
            output,
        } => {
            let mut spec = SimulationSpec::load(&config)?;
            if let Some(seed) = seed {
                spec.scenario.seed = seed;
            }
            if let Some(trials) = trials {
                spec.trials = trials;
            }
            let report = simulate(&spec)?;
            emit(&output, report.render(), report.to_json() + "\n")?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
