//! Command-line entry points.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use gnmf_core::datagen::{try_generate_synthetic, SyntheticSpec};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiment::{self, AGGREGATE_FILE};
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "gnmf",
    version,
    about = "Graph-regularized row-sparse NMF experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the repetitions described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic data matrix (TOML layout spec) as CSV.
    GenSynthetic {
        spec: PathBuf,
        out: PathBuf,
        /// Also write the ground-truth labels here.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Turn a trace CSV into `iteration,objective` pairs.
    TracePlotData { trace: PathBuf, out: PathBuf },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out } => run(&config, out.as_deref()),
        Command::GenSynthetic { spec, out, labels } => {
            gen_synthetic(&spec, &out, labels.as_deref())
        }
        Command::TracePlotData { trace, out } => {
            let points = io::load_trace_points(&trace)?;
            io::write_text(&out, &io::format_plot_points(&points))
        }
    }
}

fn run(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = ExperimentConfig::load(config_path)?;
    let dir = out.map_or_else(|| config.output_dir.clone(), Path::to_path_buf);
    let report = experiment::run_experiment(&config)?;
    experiment::write_report(&report, &dir)?;
    // results are already on disk; a closed stdout is not a failure
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", experiment::format_summary(&report.aggregate));
    let _ = writeln!(stdout, "wrote {}", dir.join(AGGREGATE_FILE).display());
    Ok(())
}

fn gen_synthetic(spec_path: &Path, out: &Path, labels_out: Option<&Path>) -> Result<()> {
    let text = io::read_text(spec_path)?;
    let spec: SyntheticSpec = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", spec_path.display())))?;
    let (x, labels) = try_generate_synthetic(&spec)
        .map_err(|e| Error::Config(format!("{}: {e}", spec_path.display())))?;
    io::write_csv_matrix(out, &x)?;
    if let Some(path) = labels_out {
        io::write_labels(path, &labels)?;
    }
    Ok(())
}
