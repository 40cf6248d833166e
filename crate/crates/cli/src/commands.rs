//! Command implementations shared by the binary and the integration tests.

use crate::config::FileConfig;
use crate::csv_io::{read_table, write_plain, write_table, SignalTable};
use crate::error::{CliError, CliResult};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use surro_core::{
    augment_ecg, augment_eeg, compare, detect_changepoints, detect_peaks, fill_gaps,
    AugmentationRequest, ChangepointConfig, ChangepointReport, Feature, FixedIndexSet,
    IaaftConfig, Mode, PeakConfig, Signal,
};

/// Classifies a core error for the non-augmentation commands: errors a user
/// can fix by changing flags are usage errors, everything else points at
/// the data.
fn classify(e: surro_core::Error) -> CliError {
    use surro_core::Error as E;
    match e {
        E::InvalidConfig(_) | E::InvalidBand { .. } | E::InvalidMargin { .. } => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Data(e.to_string()),
    }
}

pub struct LoadedSignals {
    pub fs: f64,
    pub channel_names: Vec<String>,
    pub signals: Vec<Signal>,
}

/// Reads the input table, applies channel selection, and resolves fs from
/// the --fs flag or the file's `# fs=` metadata.
pub fn load_signals(
    input: &Path,
    fs_flag: Option<f64>,
    channels: Option<&[String]>,
) -> CliResult<LoadedSignals> {
    let table = read_table(input)?;
    let table: SignalTable = match channels {
        Some(names) => table.select(names)?,
        None => table,
    };
    let fs = fs_flag.or(table.fs).ok_or_else(|| {
        CliError::Usage(format!(
            "{}: sampling rate unknown; pass --fs or add a '# fs=<hz>' line",
            input.display()
        ))
    })?;
    let signals = table
        .columns
        .iter()
        .map(|col| Signal::new(col.clone(), fs).map_err(classify))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(LoadedSignals {
        fs,
        channel_names: table.channel_names,
        signals,
    })
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Engine(format!("cannot serialize report: {e}")))?;
    bytes.push(b'\n');
    fs::write(path, bytes)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn ensure_output_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))
}

pub fn cmd_changepoints(
    input: &Path,
    output_dir: &Path,
    fs_flag: Option<f64>,
    channels: Option<&[String]>,
    cfg: &ChangepointConfig,
) -> CliResult<Vec<PathBuf>> {
    ensure_output_dir(output_dir)?;
    let loaded = load_signals(input, fs_flag, channels)?;
    let mut written = Vec::new();
    for (name, signal) in loaded.channel_names.iter().zip(&loaded.signals) {
        let set = detect_changepoints(signal, &Feature::default_set(), cfg)
            .map_err(|e| CliError::Engine(format!("channel '{name}': {e}")))?;
        let report = ChangepointReport::new(set, loaded.fs, cfg.clone());
        let path = output_dir.join(format!("changepoints_{}.json", sanitize(name)));
        write_json(&path, &report)?;
        written.push(path);
    }
    Ok(written)
}

/// Peak report: the gap-filled fixed-index set plus the configuration that
/// produced it.
#[derive(Serialize)]
struct PeakReport<'a> {
    fs: f64,
    entries: &'a [surro_core::FixedIndex],
    config: &'a PeakConfig,
}

pub fn cmd_peaks(
    input: &Path,
    output_dir: &Path,
    fs_flag: Option<f64>,
    channels: Option<&[String]>,
    cfg: &PeakConfig,
) -> CliResult<Vec<PathBuf>> {
    ensure_output_dir(output_dir)?;
    let loaded = load_signals(input, fs_flag, channels)?;
    let mut written = Vec::new();
    for (name, signal) in loaded.channel_names.iter().zip(&loaded.signals) {
        let peaks = detect_peaks(signal, cfg).map_err(classify)?;
        let fixed: FixedIndexSet =
            fill_gaps(&peaks, signal.len(), cfg.max_interval).map_err(classify)?;
        let report = PeakReport {
            fs: loaded.fs,
            entries: &fixed.entries,
            config: cfg,
        };
        let path = output_dir.join(format!("peaks_{}.json", sanitize(name)));
        write_json(&path, &report)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    input: String,
    fs: f64,
    seed: u64,
    channels: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    changepoint_config: Option<&'a ChangepointConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    peak_config: Option<&'a PeakConfig>,
    iaaft_config: &'a IaaftConfig,
    per_channel: &'a [surro_core::pipeline::ChannelProvenance],
}

pub struct AugmentOutput {
    pub surrogate_csvs: Vec<PathBuf>,
    pub provenance_json: PathBuf,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_augment(
    mode: Mode,
    input: &Path,
    output_dir: &Path,
    fs_flag: Option<f64>,
    channels: Option<&[String]>,
    changepoint_cfg: ChangepointConfig,
    peak_cfg: PeakConfig,
    iaaft_cfg: IaaftConfig,
) -> CliResult<AugmentOutput> {
    ensure_output_dir(output_dir)?;
    let loaded = load_signals(input, fs_flag, channels)?;
    if mode == Mode::Ecg && loaded.signals.len() != 1 {
        return Err(CliError::Usage(format!(
            "augment-ecg processes exactly one channel; the input has {} (use --channels)",
            loaded.signals.len()
        )));
    }

    let request = AugmentationRequest {
        channels: loaded.signals,
        mode,
        changepoint_cfg: changepoint_cfg.clone(),
        peak_cfg: peak_cfg.clone(),
        iaaft_cfg: iaaft_cfg.clone(),
    };
    let result = match mode {
        Mode::Eeg => augment_eeg(&request),
        Mode::Ecg => augment_ecg(&request),
    }
    .map_err(|e| CliError::Engine(e.to_string()))?;

    let mut surrogate_csvs = Vec::with_capacity(result.surrogates.len());
    for (si, channels_data) in result.surrogates.iter().enumerate() {
        let path = output_dir.join(format!("surrogate_{si:03}.csv"));
        write_table(&path, loaded.fs, &loaded.channel_names, channels_data)?;
        surrogate_csvs.push(path);
    }

    let (command, changepoint_config, peak_config) = match mode {
        Mode::Eeg => ("augment-eeg", Some(&changepoint_cfg), None),
        Mode::Ecg => ("augment-ecg", None, Some(&peak_cfg)),
    };
    let provenance = Provenance {
        command,
        input: input.display().to_string(),
        fs: loaded.fs,
        seed: iaaft_cfg.rng_seed,
        channels: &loaded.channel_names,
        changepoint_config,
        peak_config,
        iaaft_config: &iaaft_cfg,
        per_channel: &result.provenance,
    };
    let provenance_json = output_dir.join("provenance.json");
    write_json(&provenance_json, &provenance)?;

    Ok(AugmentOutput {
        surrogate_csvs,
        provenance_json,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_metrics(
    original: &Path,
    surrogate: &Path,
    output_dir: &Path,
    fs_flag: Option<f64>,
    channels: Option<&[String]>,
    stft_window: usize,
    stft_hop: usize,
    dump_csv: bool,
) -> CliResult<Vec<PathBuf>> {
    ensure_output_dir(output_dir)?;
    let orig = load_signals(original, fs_flag, channels)?;
    let surr_table = read_table(surrogate)?;
    let surr_table = match channels {
        Some(names) => surr_table.select(names)?,
        None => surr_table,
    };
    if orig.channel_names != surr_table.channel_names {
        return Err(CliError::Data(format!(
            "channel mismatch: original has [{}], surrogate has [{}]",
            orig.channel_names.join(", "),
            surr_table.channel_names.join(", ")
        )));
    }

    let mut written = Vec::new();
    for ((name, signal), surr_col) in orig
        .channel_names
        .iter()
        .zip(&orig.signals)
        .zip(&surr_table.columns)
    {
        let report = compare(signal, surr_col, stft_window, stft_hop).map_err(classify)?;
        let safe = sanitize(name);
        let path = output_dir.join(format!("metrics_{safe}.json"));
        write_json(&path, &report)?;
        written.push(path);

        if dump_csv {
            dump_panels(output_dir, &safe, &report)?;
        }
    }
    Ok(written)
}

/// Per-panel CSV dumps for external plotting.
fn dump_panels(
    output_dir: &Path,
    channel: &str,
    report: &surro_core::SpectralReport,
) -> CliResult<()> {
    let p = &report.periodogram;
    write_plain(
        &output_dir.join(format!("metrics_{channel}_periodogram.csv")),
        &["freq_hz".into(), "original".into(), "surrogate".into()],
        &[p.freqs_hz.clone(), p.original.clone(), p.surrogate.clone()],
    )?;

    let h = &report.histogram;
    let lo = h.bin_edges[..h.bin_edges.len() - 1].to_vec();
    let hi = h.bin_edges[1..].to_vec();
    write_plain(
        &output_dir.join(format!("metrics_{channel}_histogram.csv")),
        &["bin_lo".into(), "bin_hi".into(), "original".into(), "surrogate".into()],
        &[
            lo,
            hi,
            h.original.iter().map(|&c| c as f64).collect(),
            h.surrogate.iter().map(|&c| c as f64).collect(),
        ],
    )?;

    let s = &report.spectrogram;
    for (suffix, frames) in [("original", &s.original), ("surrogate", &s.surrogate)] {
        let mut names = vec!["time_s".to_string()];
        names.extend(s.freqs_hz.iter().map(|f| format!("f_{f}")));
        let mut columns = vec![s.times_s.clone()];
        for bin in 0..s.freqs_hz.len() {
            columns.push(frames.iter().map(|frame| frame[bin]).collect());
        }
        write_plain(
            &output_dir.join(format!("metrics_{channel}_spectrogram_{suffix}.csv")),
            &names,
            &columns,
        )?;
    }
    Ok(())
}

/// Shared helper for the binary: resolve configs with file < flags
/// precedence.
pub fn resolve_configs(
    file: &FileConfig,
    cp_flags: &crate::config::ChangepointOverrides,
    pk_flags: &crate::config::PeakOverrides,
    ia_flags: &crate::config::IaaftOverrides,
    base_iaaft: IaaftConfig,
    seed: u64,
) -> (ChangepointConfig, PeakConfig, IaaftConfig) {
    (
        cp_flags.resolve(&file.changepoint),
        pk_flags.resolve(&file.peaks),
        ia_flags.resolve(&file.iaaft, base_iaaft, seed),
    )
}
