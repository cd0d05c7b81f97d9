use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pcs_cli::config::{ConfigFile, Overrides};
use pcs_cli::{
    cmd_compare, cmd_enhance, cmd_export_features, cmd_sweep, CliError, Outcome, RunConfig, EXIT_CONFIG_ERROR,
};

/// Perceptual contrast stretching for speech enhancement.
#[derive(Parser)]
#[command(name = "pcs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optional baseline, then PP-PCS; writes <id>.pcs.wav per input.
    Enhance {
        /// WAV files, directories or glob patterns.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// segSNR / LSD of each input against the same-named file in --ref.
    Compare {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Fixed-gamma sweep plus the PCS schedule, scored against --ref.
    Sweep {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Export log1p input and contrast-stretched target features (PCSF).
    ExportFeatures {
        clean_dir: PathBuf,
        noisy_dir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// FFT size in samples (even).
    #[arg(long)]
    fft: Option<usize>,
    /// Defaults to fft / 2.
    #[arg(long)]
    hop: Option<usize>,
    /// hann, hamming or rectangular.
    #[arg(long)]
    window: Option<String>,
    /// pcs or fixed.
    #[arg(long)]
    schedule: Option<String>,
    /// Exponent of the fixed schedule.
    #[arg(long)]
    gamma: Option<f64>,
    /// Upper exponent of the PCS schedule.
    #[arg(long = "gamma-max")]
    gamma_max: Option<f64>,
    /// none, wiener or specsub.
    #[arg(long)]
    baseline: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory of same-named reference files.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    /// Sweep grid, inclusive of both ends.
    #[arg(long = "sweep-lo")]
    sweep_lo: Option<f64>,
    #[arg(long = "sweep-hi")]
    sweep_hi: Option<f64>,
    #[arg(long = "sweep-step")]
    sweep_step: Option<f64>,
    /// Worker threads for file-level parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// float32 or pcm16 for written WAVs.
    #[arg(long)]
    encoding: Option<String>,
    /// Comma-separated subset of segsnr,lsd.
    #[arg(long)]
    metrics: Option<String>,
}

impl Opts {
    fn resolve(self, inputs: Vec<String>) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = Overrides {
            fft: self.fft,
            hop: self.hop,
            window: self.window,
            schedule: self.schedule,
            gamma: self.gamma,
            gamma_max: self.gamma_max,
            baseline: self.baseline,
            out: self.out,
            reference: self.reference,
            sweep_lo: self.sweep_lo,
            sweep_hi: self.sweep_hi,
            sweep_step: self.sweep_step,
            jobs: self.jobs,
            encoding: self.encoding,
            metrics: self.metrics,
        };
        RunConfig::resolve(inputs, flags, &file)
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let outcome = match cli.command {
        Command::Enhance { inputs, opts } => cmd_enhance(&opts.resolve(inputs)?)?,
        Command::Compare { inputs, opts } => cmd_compare(&opts.resolve(inputs)?, &mut out)?,
        Command::Sweep { inputs, opts } => cmd_sweep(&opts.resolve(inputs)?, &mut out)?,
        Command::ExportFeatures { clean_dir, noisy_dir, opts } => {
            cmd_export_features(&opts.resolve(Vec::new())?, &clean_dir, &noisy_dir)?
        }
    };
    out.flush()?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let _ = outcome.report_failures(&mut io::stderr());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("pcs: {e}");
            ExitCode::from(EXIT_CONFIG_ERROR as u8)
        }
    }
}
