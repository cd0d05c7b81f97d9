use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pcs_core::audio_io::{read_wav, write_wav, AudioBuffer};
use pcs_core::baselines::{spectral_subtraction, wiener_enhance, WienerConfig};
use pcs_core::metrics::{log_spectral_distance, segmental_snr, MIN_FRAME_LEN};
use pcs_core::pcs::{export_training_targets, pp_pcs, GammaSchedule, PcsError};

use crate::config::{Baseline, RunConfig, ScheduleChoice};
use crate::inputs::{expand_inputs, file_id, wav_files_in};
use crate::{CliError, FileError, EXIT_OK, EXIT_PARTIAL_FAILURE};

/// Spectral-subtraction settings used by `--baseline specsub`.
pub const SPECSUB_OVERSUBTRACTION: f64 = 2.0;
pub const SPECSUB_FLOOR: f64 = 0.1;

#[derive(Debug)]
pub struct FileFailure {
    pub path: PathBuf,
    pub error: FileError,
}

/// What a command did: files it wrote and files that failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub failures: Vec<FileFailure>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_PARTIAL_FAILURE
        }
    }

    pub fn report_failures(&self, err: &mut impl Write) -> std::io::Result<()> {
        for f in &self.failures {
            writeln!(err, "error: {}: {}", f.path.display(), f.error)?;
        }
        Ok(())
    }
}

/// Maps `f` over `items`, on a rayon pool sized by `jobs` when the
/// `parallel` feature is on. Output order follows `items`.
fn per_file<T, R, F>(jobs: Option<usize>, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Config(format!("cannot start {jobs:?} workers: {e}")))?;
        Ok(pool.install(|| items.par_iter().map(f).collect()))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        Ok(items.iter().map(f).collect())
    }
}

fn schedule_for(cfg: &RunConfig, sample_rate: u32) -> Result<GammaSchedule, PcsError> {
    match cfg.schedule {
        ScheduleChoice::Fixed => GammaSchedule::fixed(cfg.gamma, &cfg.stft, sample_rate),
        ScheduleChoice::Pcs => GammaSchedule::pcs(&cfg.stft, sample_rate, cfg.gamma_max),
    }
}

fn apply_baseline(cfg: &RunConfig, x: AudioBuffer) -> Result<AudioBuffer, FileError> {
    Ok(match cfg.baseline {
        Baseline::None => x,
        Baseline::Wiener => wiener_enhance(&x, &cfg.stft, &WienerConfig::default())?,
        Baseline::SpecSub => spectral_subtraction(&x, &cfg.stft, SPECSUB_OVERSUBTRACTION, SPECSUB_FLOOR)?,
    })
}

/// Optional baseline, then PP-PCS with the configured schedule.
pub fn enhance_buffer(cfg: &RunConfig, noisy: AudioBuffer) -> Result<AudioBuffer, FileError> {
    let schedule = schedule_for(cfg, noisy.sample_rate)?;
    let pre = apply_baseline(cfg, noisy)?;
    Ok(pp_pcs(&pre, &cfg.stft, &schedule)?)
}

fn enhanced_path(cfg: &RunConfig, input: &Path) -> PathBuf {
    let dir = cfg
        .out_dir
        .clone()
        .unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
    dir.join(format!("{}.pcs.wav", file_id(input)))
}

pub fn cmd_enhance(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let files = expand_inputs(&cfg.inputs)?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
    }
    let results = per_file(cfg.jobs, &files, |path| -> Result<PathBuf, FileError> {
        let noisy = read_wav(path)?;
        let enhanced = enhance_buffer(cfg, noisy)?;
        let out = enhanced_path(cfg, path);
        write_wav(&out, &enhanced, cfg.encoding)?;
        Ok(out)
    })?;
    Ok(collect(files, results))
}

fn collect(files: Vec<PathBuf>, results: Vec<Result<PathBuf, FileError>>) -> Outcome {
    let mut outcome = Outcome::default();
    for (path, r) in files.into_iter().zip(results) {
        match r {
            Ok(p) => outcome.written.push(p),
            Err(error) => outcome.failures.push(FileFailure { path, error }),
        }
    }
    outcome
}

#[derive(Debug, Clone, Copy)]
struct Scores {
    seg_snr: Option<f64>,
    lsd: Option<f64>,
}

fn score(cfg: &RunConfig, reference: &AudioBuffer, test: &AudioBuffer) -> Result<Scores, FileError> {
    let seg_snr = cfg
        .metrics
        .seg_snr
        .then(|| segmental_snr(reference, test, cfg.stft.fft_size.max(MIN_FRAME_LEN), cfg.stft.hop_size))
        .transpose()?;
    let lsd = cfg.metrics.lsd.then(|| log_spectral_distance(reference, test, &cfg.stft)).transpose()?;
    Ok(Scores { seg_snr, lsd })
}

fn ref_dir(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.ref_dir.as_deref().ok_or_else(|| CliError::Config("--ref <dir> is required".into()))
}

fn load_pair(reference_dir: &Path, test: &Path) -> Result<(AudioBuffer, AudioBuffer), FileError> {
    let ref_path = reference_dir.join(test.file_name().unwrap_or_default());
    if !ref_path.is_file() {
        return Err(FileError::MissingReference(ref_path));
    }
    Ok((read_wav(&ref_path)?, read_wav(test)?))
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn write_row(out: &mut impl Write, label: &str, s: Scores) -> std::io::Result<()> {
    writeln!(out, "{label}\t{}\t{}", fmt_metric(s.seg_snr), fmt_metric(s.lsd))
}

/// One TSV row per test file against the same-named reference, then a
/// `MEAN` row.
pub fn cmd_compare(cfg: &RunConfig, out: &mut impl Write) -> Result<Outcome, CliError> {
    let reference_dir = ref_dir(cfg)?;
    let files = expand_inputs(&cfg.inputs)?;
    let results = per_file(cfg.jobs, &files, |path| {
        let (reference, test) = load_pair(reference_dir, path)?;
        score(cfg, &reference, &test)
    })?;

    writeln!(out, "file\tsegsnr_db\tlsd_db")?;
    let mut outcome = Outcome::default();
    let mut scored = Vec::new();
    for (path, r) in files.into_iter().zip(results) {
        match r {
            Ok(s) => {
                write_row(out, &file_id(&path), s)?;
                scored.push(s);
            }
            Err(error) => outcome.failures.push(FileFailure { path, error }),
        }
    }
    if !scored.is_empty() {
        let m = Scores {
            seg_snr: mean(scored.iter().map(|s| s.seg_snr)),
            lsd: mean(scored.iter().map(|s| s.lsd)),
        };
        write_row(out, "MEAN", m)?;
    }
    Ok(outcome)
}

/// Mean metrics of the fixed-γ pipeline for every γ on the sweep grid, then
/// one row for the PCS schedule.
pub fn cmd_sweep(cfg: &RunConfig, out: &mut impl Write) -> Result<Outcome, CliError> {
    let reference_dir = ref_dir(cfg)?;
    let files = expand_inputs(&cfg.inputs)?;
    let gammas = cfg.sweep.values();

    let results = per_file(cfg.jobs, &files, |path| -> Result<Vec<Scores>, FileError> {
        let (reference, test) = load_pair(reference_dir, path)?;
        let pre = apply_baseline(cfg, test)?;
        let mut schedules = gammas
            .iter()
            .map(|&g| GammaSchedule::fixed(g, &cfg.stft, pre.sample_rate))
            .collect::<Result<Vec<_>, _>>()?;
        schedules.push(GammaSchedule::pcs(&cfg.stft, pre.sample_rate, cfg.gamma_max)?);
        schedules
            .iter()
            .map(|s| {
                let y = pp_pcs(&pre, &cfg.stft, s)?;
                score(cfg, &reference, &y)
            })
            .collect()
    })?;

    let mut outcome = Outcome::default();
    let mut per_file_rows = Vec::new();
    for (path, r) in files.into_iter().zip(results) {
        match r {
            Ok(rows) => per_file_rows.push(rows),
            Err(error) => outcome.failures.push(FileFailure { path, error }),
        }
    }

    writeln!(out, "gamma\tsegsnr_db\tlsd_db")?;
    let labels = gammas.iter().map(|g| format!("{g:.2}")).chain(std::iter::once("pcs".to_string()));
    for (i, label) in labels.enumerate() {
        let m = Scores {
            seg_snr: mean(per_file_rows.iter().map(|rows| rows[i].seg_snr)),
            lsd: mean(per_file_rows.iter().map(|rows| rows[i].lsd)),
        };
        write_row(out, &label, m)?;
    }
    Ok(outcome)
}

/// Writes `<id>.in.pcsf` / `<id>.tgt.pcsf` for every same-named pair in the
/// clean and noisy directories.
pub fn cmd_export_features(cfg: &RunConfig, clean_dir: &Path, noisy_dir: &Path) -> Result<Outcome, CliError> {
    let out_dir = cfg.out_dir.as_deref().ok_or_else(|| CliError::Config("--out <dir> is required".into()))?;
    let names: BTreeSet<_> = wav_files_in(clean_dir)?
        .into_iter()
        .chain(wav_files_in(noisy_dir)?)
        .filter_map(|p| p.file_name().map(|n| n.to_os_string()))
        .collect();
    if names.is_empty() {
        return Err(CliError::NoInputs(format!(
            "no .wav files in {} or {}",
            clean_dir.display(),
            noisy_dir.display()
        )));
    }
    fs::create_dir_all(out_dir)?;
    let names: Vec<_> = names.into_iter().collect();
    let results = per_file(cfg.jobs, &names, |name| -> Result<Vec<PathBuf>, FileError> {
        let clean_path = clean_dir.join(name);
        let noisy_path = noisy_dir.join(name);
        for p in [&clean_path, &noisy_path] {
            if !p.is_file() {
                return Err(FileError::PairMismatch(format!("{} has no counterpart", p.display())));
            }
        }
        let clean = read_wav(&clean_path)?;
        let noisy = read_wav(&noisy_path)?;
        if clean.len() != noisy.len() || clean.sample_rate != noisy.sample_rate {
            return Err(FileError::PairMismatch(format!(
                "{}: clean {} samples at {} Hz, noisy {} samples at {} Hz",
                name.to_string_lossy(),
                clean.len(),
                clean.sample_rate,
                noisy.len(),
                noisy.sample_rate
            )));
        }
        let schedule = schedule_for(cfg, clean.sample_rate)?;
        let (a, b) = export_training_targets(&clean, &noisy, &cfg.stft, &schedule, out_dir, &file_id(&clean_path))?;
        Ok(vec![a, b])
    })?;

    let mut outcome = Outcome::default();
    for (name, r) in names.into_iter().zip(results) {
        match r {
            Ok(paths) => outcome.written.extend(paths),
            Err(error) => outcome.failures.push(FileFailure { path: noisy_dir.join(name), error }),
        }
    }
    Ok(outcome)
}
