//! Run configuration: command-line flags over a `key = value` file over
//! built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pcs_core::audio_io::WavEncoding;
use pcs_core::pcs::{DEFAULT_GAMMA_MAX, DEFAULT_GAMMA_MIN};
use pcs_core::stft::{StftConfig, Window};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleChoice {
    Pcs,
    Fixed,
}

impl FromStr for ScheduleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pcs" => Ok(Self::Pcs),
            "fixed" => Ok(Self::Fixed),
            _ => Err(format!("schedule must be 'pcs' or 'fixed', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    None,
    Wiener,
    SpecSub,
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "wiener" => Ok(Self::Wiener),
            "specsub" => Ok(Self::SpecSub),
            _ => Err(format!("baseline must be one of none, wiener, specsub; got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self { lo: 0.5, hi: 2.0, step: 0.1 }
    }
}

impl SweepRange {
    /// Inclusive grid `lo, lo + step, …, hi`. Values are rounded to 1e-9 so
    /// that accumulated float error does not drop the endpoint.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| ((self.lo + i as f64 * self.step) * 1e9).round() / 1e9).collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.lo > 0.0 && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(CliError::Config(format!("sweep bounds must be finite and > 0, got {}..{}", self.lo, self.hi)));
        }
        if self.hi < self.lo {
            return Err(CliError::Config(format!("sweep-hi {} is below sweep-lo {}", self.hi, self.lo)));
        }
        if !(self.step > 0.0) {
            return Err(CliError::Config(format!("sweep-step must be > 0, got {}", self.step)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricToggles {
    pub seg_snr: bool,
    pub lsd: bool,
}

impl Default for MetricToggles {
    fn default() -> Self {
        Self { seg_snr: true, lsd: true }
    }
}

impl FromStr for MetricToggles {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut t = Self { seg_snr: false, lsd: false };
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "segsnr" => t.seg_snr = true,
                "lsd" => t.lsd = true,
                other => return Err(format!("unknown metric '{other}' (expected segsnr, lsd)")),
            }
        }
        Ok(t)
    }
}

/// Raw `key = value` settings. Blank lines and `#` comments are ignored;
/// dashes and underscores in keys are interchangeable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "fft", "hop", "window", "schedule", "gamma", "gamma_max", "baseline", "out", "ref", "sweep_lo", "sweep_hi",
    "sweep_step", "jobs", "encoding", "metrics",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("{key} = {v}: {e}"))))
            .transpose()
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub fft: Option<usize>,
    pub hop: Option<usize>,
    pub window: Option<String>,
    pub schedule: Option<String>,
    pub gamma: Option<f64>,
    pub gamma_max: Option<f64>,
    pub baseline: Option<String>,
    pub out: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub sweep_lo: Option<f64>,
    pub sweep_hi: Option<f64>,
    pub sweep_step: Option<f64>,
    pub jobs: Option<usize>,
    pub encoding: Option<String>,
    pub metrics: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<String>,
    pub out_dir: Option<PathBuf>,
    pub ref_dir: Option<PathBuf>,
    pub stft: StftConfig,
    pub schedule: ScheduleChoice,
    /// Exponent for the fixed schedule.
    pub gamma: f64,
    /// Upper exponent for the PCS schedule.
    pub gamma_max: f64,
    pub baseline: Baseline,
    pub metrics: MetricToggles,
    pub sweep: SweepRange,
    pub jobs: Option<usize>,
    pub encoding: WavEncoding,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            out_dir: None,
            ref_dir: None,
            stft: StftConfig::default(),
            schedule: ScheduleChoice::Pcs,
            gamma: DEFAULT_GAMMA_MAX,
            gamma_max: DEFAULT_GAMMA_MAX,
            baseline: Baseline::None,
            metrics: MetricToggles::default(),
            sweep: SweepRange::default(),
            jobs: None,
            encoding: WavEncoding::Float32,
        }
    }
}

fn parse_encoding(s: &str) -> Result<WavEncoding, CliError> {
    match s {
        "float32" | "f32" => Ok(WavEncoding::Float32),
        "pcm16" | "s16" => Ok(WavEncoding::Pcm16),
        _ => Err(CliError::Config(format!("encoding must be float32 or pcm16, got '{s}'"))),
    }
}

fn pick<T: FromStr>(flag: Option<String>, file: &ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => v.parse::<T>().map(Some).map_err(|e| CliError::Config(format!("--{}: {e}", key.replace('_', "-")))),
        None => file.get(key),
    }
}

impl RunConfig {
    /// Merges flags over the config file over defaults and validates the
    /// result.
    pub fn resolve(inputs: Vec<String>, flags: Overrides, file: &ConfigFile) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let fft = flags.fft.or(file.get("fft")?).unwrap_or(d.stft.fft_size);
        let hop = flags.hop.or(file.get("hop")?).unwrap_or(fft / 2);
        let window: Window = pick(flags.window, file, "window")?.unwrap_or(d.stft.window);
        let stft = StftConfig::new(fft, hop, window).map_err(|e| CliError::Config(e.to_string()))?;

        let encoding = match flags.encoding.or(file.get("encoding")?) {
            Some(s) => parse_encoding(&s)?,
            None => d.encoding,
        };

        let cfg = RunConfig {
            inputs,
            out_dir: flags.out.or(file.get("out")?),
            ref_dir: flags.reference.or(file.get("ref")?),
            stft,
            schedule: pick(flags.schedule, file, "schedule")?.unwrap_or(d.schedule),
            gamma: flags.gamma.or(file.get("gamma")?).unwrap_or(d.gamma),
            gamma_max: flags.gamma_max.or(file.get("gamma_max")?).unwrap_or(d.gamma_max),
            baseline: pick(flags.baseline, file, "baseline")?.unwrap_or(d.baseline),
            metrics: pick(flags.metrics, file, "metrics")?.unwrap_or(d.metrics),
            sweep: SweepRange {
                lo: flags.sweep_lo.or(file.get("sweep_lo")?).unwrap_or(d.sweep.lo),
                hi: flags.sweep_hi.or(file.get("sweep_hi")?).unwrap_or(d.sweep.hi),
                step: flags.sweep_step.or(file.get("sweep_step")?).unwrap_or(d.sweep.step),
            },
            jobs: flags.jobs.or(file.get("jobs")?),
            encoding,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.stft.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(CliError::Config(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        if !(self.gamma_max.is_finite() && self.gamma_max > DEFAULT_GAMMA_MIN) {
            return Err(CliError::Config(format!("gamma-max must be > {DEFAULT_GAMMA_MIN}, got {}", self.gamma_max)));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be >= 1".into()));
        }
        self.sweep.validate()
    }
}
