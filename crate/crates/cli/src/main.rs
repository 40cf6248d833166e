//! `surro` — batch surrogate generation for nonstationary 1-D signals.
//!
//! Subcommands: `changepoints`, `peaks`, `augment-eeg`, `augment-ecg`,
//! `metrics`. Inputs are headered CSVs (one column per channel, optional
//! `# fs=<hz>` comment); outputs are JSON reports and surrogate CSVs.
//! Every command is deterministic given its input bytes, flags and seed.

mod commands;
mod config;
mod csv_io;
mod error;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use surro_core::{IaaftConfig, Mode};

#[derive(Parser)]
#[command(name = "surro", version, about = "Changepoint- and peak-aware surrogate generation for 1-D time series")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct IoArgs {
    /// Input CSV: header row of channel names, one row per sample.
    #[arg(long)]
    input: PathBuf,
    /// Directory for all outputs (created if missing).
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Sampling rate in Hz; overrides the file's `# fs=` metadata.
    #[arg(long)]
    fs: Option<f64>,
    /// Comma-separated channel names to process (default: all).
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<String>>,
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct CpFlags {
    /// EWMA forgetting factor, in (0, 1).
    #[arg(long)]
    lambda: Option<f64>,
    /// Lagged-difference lag in samples.
    #[arg(long)]
    kappa: Option<usize>,
    /// Threshold multiplier on the standard deviation.
    #[arg(long)]
    sigma_mult: Option<f64>,
    /// Neighborhood fraction required to confirm an excursion, in (0, 1].
    #[arg(long)]
    density: Option<f64>,
    /// Minimum distance between reported changepoints, in samples.
    #[arg(long)]
    min_separation: Option<usize>,
    /// Leading lagged-difference samples excluded from threshold statistics.
    #[arg(long)]
    warmup: Option<usize>,
}

impl CpFlags {
    fn overrides(&self) -> config::ChangepointOverrides {
        config::ChangepointOverrides {
            lambda: self.lambda,
            kappa: self.kappa,
            sigma_mult: self.sigma_mult,
            density: self.density,
            min_separation: self.min_separation,
            warmup: self.warmup,
        }
    }
}

#[derive(Args, Default)]
struct PeakFlags {
    /// Minimum spacing between retained peaks, in samples.
    #[arg(long)]
    min_distance: Option<usize>,
    /// Largest allowed gap between fixed indices, in samples.
    #[arg(long)]
    max_interval: Option<usize>,
    /// Peak qualification threshold (default: half the signal's std).
    #[arg(long)]
    prominence: Option<f64>,
}

impl PeakFlags {
    fn overrides(&self) -> config::PeakOverrides {
        config::PeakOverrides {
            min_distance: self.min_distance,
            max_interval: self.max_interval,
            prominence: self.prominence,
        }
    }
}

#[derive(Args, Default)]
struct IaaftFlags {
    /// Number of surrogates to generate.
    #[arg(long)]
    n_surrogates: Option<usize>,
    /// Iteration cap per surrogate.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Spectrum-MSE convergence threshold.
    #[arg(long)]
    mse_threshold: Option<f64>,
    /// Fraction of each segment pinned at both edges (EEG recipe).
    #[arg(long)]
    edge_fraction: Option<f64>,
    /// Samples pinned around each fixed index (ECG recipe).
    #[arg(long)]
    point_margin: Option<usize>,
    /// RNG seed; required, augmentation must be reproducible.
    #[arg(long)]
    seed: Option<u64>,
}

impl IaaftFlags {
    fn overrides(&self) -> config::IaaftOverrides {
        config::IaaftOverrides {
            n_surrogates: self.n_surrogates,
            max_iter: self.max_iter,
            mse_threshold: self.mse_threshold,
            edge_fraction: self.edge_fraction,
            point_margin: self.point_margin,
        }
    }

    fn require_seed(&self) -> Result<u64, error::CliError> {
        self.seed.ok_or_else(|| {
            error::CliError::Usage("--seed is required for augmentation commands".into())
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Detect changepoints and write one JSON report per channel.
    Changepoints {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cp: CpFlags,
    },
    /// Detect R-peaks, fill gaps, and write one JSON report per channel.
    Peaks {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        pk: PeakFlags,
    },
    /// Changepoint-guided EEG augmentation: per-segment fixed-edges
    /// surrogates, concatenated.
    AugmentEeg {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cp: CpFlags,
        #[command(flatten)]
        ia: IaaftFlags,
    },
    /// Peak-preserving ECG augmentation: fixed-points surrogates plus
    /// Gaussian smoothing around the peaks.
    AugmentEcg {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        pk: PeakFlags,
        #[command(flatten)]
        ia: IaaftFlags,
    },
    /// Compare a surrogate CSV against its original and write a spectral
    /// report per channel.
    Metrics {
        #[command(flatten)]
        io: IoArgs,
        /// Surrogate CSV to compare against --input.
        #[arg(long)]
        surrogate: PathBuf,
        /// STFT window length in samples.
        #[arg(long, default_value_t = surro_core::metrics::DEFAULT_STFT_WINDOW)]
        stft_window: usize,
        /// STFT hop in samples.
        #[arg(long, default_value_t = surro_core::metrics::DEFAULT_STFT_HOP)]
        stft_hop: usize,
        /// Also dump each report panel as CSV for external plotting.
        #[arg(long)]
        dump_csv: bool,
    },
}

fn run(cli: Cli) -> Result<(), error::CliError> {
    match cli.command {
        Cmd::Changepoints { io, cp } => {
            let file = config::load(io.config.as_deref())?;
            let cfg = cp.overrides().resolve(&file.changepoint);
            for path in commands::cmd_changepoints(
                &io.input,
                &io.output_dir,
                io.fs,
                io.channels.as_deref(),
                &cfg,
            )? {
                println!("wrote {}", path.display());
            }
        }
        Cmd::Peaks { io, pk } => {
            let file = config::load(io.config.as_deref())?;
            let cfg = pk.overrides().resolve(&file.peaks);
            for path in
                commands::cmd_peaks(&io.input, &io.output_dir, io.fs, io.channels.as_deref(), &cfg)?
            {
                println!("wrote {}", path.display());
            }
        }
        Cmd::AugmentEeg { io, cp, ia } => {
            let file = config::load(io.config.as_deref())?;
            let seed = ia.require_seed()?;
            let (cp_cfg, pk_cfg, ia_cfg) = commands::resolve_configs(
                &file,
                &cp.overrides(),
                &PeakFlags::default().overrides(),
                &ia.overrides(),
                IaaftConfig::fixed_edges_defaults(),
                seed,
            );
            let out = commands::cmd_augment(
                Mode::Eeg,
                &io.input,
                &io.output_dir,
                io.fs,
                io.channels.as_deref(),
                cp_cfg,
                pk_cfg,
                ia_cfg,
            )?;
            report_augment(&out);
        }
        Cmd::AugmentEcg { io, pk, ia } => {
            let file = config::load(io.config.as_deref())?;
            let seed = ia.require_seed()?;
            let (cp_cfg, pk_cfg, ia_cfg) = commands::resolve_configs(
                &file,
                &CpFlags::default().overrides(),
                &pk.overrides(),
                &ia.overrides(),
                IaaftConfig::fixed_points_defaults(),
                seed,
            );
            let out = commands::cmd_augment(
                Mode::Ecg,
                &io.input,
                &io.output_dir,
                io.fs,
                io.channels.as_deref(),
                cp_cfg,
                pk_cfg,
                ia_cfg,
            )?;
            report_augment(&out);
        }
        Cmd::Metrics {
            io,
            surrogate,
            stft_window,
            stft_hop,
            dump_csv,
        } => {
            for path in commands::cmd_metrics(
                &io.input,
                &surrogate,
                &io.output_dir,
                io.fs,
                io.channels.as_deref(),
                stft_window,
                stft_hop,
                dump_csv,
            )? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn report_augment(out: &commands::AugmentOutput) {
    for path in &out.surrogate_csvs {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", out.provenance_json.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("surro: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
