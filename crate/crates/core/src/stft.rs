//! Short-time Fourier analysis and weighted overlap-add synthesis.
//!
//! Synthesis divides by the summed squared analysis window, so any
//! configuration whose squared-window overlap-add is nonzero reconstructs
//! exactly. [`StftConfig::is_cola`] checks the stronger constant-sum condition
//! for callers that want it enforced via [`stft_strict`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::par;

/// Minimum overlap-add denominator accepted at interior samples.
pub const MIN_OLA_NORM: f64 = 1e-10;

/// Relative deviation tolerated by [`StftConfig::is_cola`].
pub const COLA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum StftError {
    #[error("invalid STFT configuration: {0}")]
    InvalidConfig(String),
    #[error("empty signal")]
    EmptySignal,
    #[error("overlap-add normalisation {value:e} below threshold at sample {sample}")]
    DegenerateNormalization { sample: usize, value: f64 },
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch { expected: (usize, usize), actual: (usize, usize) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    /// Periodic (DFT-even) window of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let phase = |i: usize| 2.0 * PI * i as f64 / n as f64;
        match self {
            Window::Hann => (0..n).map(|i| 0.5 - 0.5 * phase(i).cos()).collect(),
            Window::Hamming => (0..n).map(|i| 0.54 - 0.46 * phase(i).cos()).collect(),
            Window::Rectangular => vec![1.0; n],
        }
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Window::Hann),
            "hamming" => Ok(Window::Hamming),
            "rect" | "rectangular" | "boxcar" => Ok(Window::Rectangular),
            other => Err(format!("unknown window '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    pub fft_size: usize,
    pub hop_size: usize,
    pub window: Window,
    /// Centre frame `t` on sample `t * hop_size`, reflecting the signal at
    /// both ends by `fft_size / 2` samples.
    pub center_padding: bool,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { fft_size: 512, hop_size: 256, window: Window::Hann, center_padding: true }
    }
}

impl StftConfig {
    pub fn new(fft_size: usize, hop_size: usize, window: Window) -> Result<Self, StftError> {
        let config = Self { fft_size, hop_size, window, center_padding: true };
        config.validate()?;
        Ok(config)
    }

    pub fn with_center_padding(mut self, center_padding: bool) -> Self {
        self.center_padding = center_padding;
        self
    }

    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn validate(&self) -> Result<(), StftError> {
        if self.fft_size < 2 || !self.fft_size.is_multiple_of(2) {
            return Err(StftError::InvalidConfig(format!(
                "fft_size must be a positive even integer, got {}",
                self.fft_size
            )));
        }
        if self.hop_size == 0 || self.hop_size > self.fft_size {
            return Err(StftError::InvalidConfig(format!(
                "hop_size must be in 1..={}, got {}",
                self.fft_size, self.hop_size
            )));
        }
        Ok(())
    }

    /// Largest relative deviation of the steady-state squared-window
    /// overlap-add sum from its mean.
    pub fn cola_deviation(&self) -> f64 {
        let w = self.window.coefficients(self.fft_size);
        let sums: Vec<f64> = (0..self.hop_size)
            .map(|offset| w.iter().skip(offset).step_by(self.hop_size).map(|v| v * v).sum())
            .collect();
        let mean = sums.iter().sum::<f64>() / sums.len() as f64;
        if mean == 0.0 {
            return f64::INFINITY;
        }
        sums.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max) / mean
    }

    /// Whether the squared window overlap-adds to a constant at this hop.
    pub fn is_cola(&self) -> bool {
        self.cola_deviation() <= COLA_TOLERANCE
    }

    fn n_frames(&self, len: usize) -> usize {
        if self.center_padding {
            1 + len / self.hop_size
        } else if len <= self.fft_size {
            1
        } else {
            1 + (len - self.fft_size).div_ceil(self.hop_size)
        }
    }

    fn pad(&self) -> usize {
        if self.center_padding {
            self.fft_size / 2
        } else {
            0
        }
    }
}

/// Complex STFT frames (`n_frames × (fft_size/2 + 1)`) plus what is needed to
/// invert them.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    frames: Matrix<Complex64>,
    config: StftConfig,
    sample_rate: u32,
    original_length: usize,
}

impl Spectrogram {
    pub fn new(
        frames: Matrix<Complex64>,
        config: StftConfig,
        sample_rate: u32,
        original_length: usize,
    ) -> Result<Self, StftError> {
        config.validate()?;
        if frames.cols() != config.n_bins() {
            return Err(StftError::ShapeMismatch {
                expected: (frames.rows(), config.n_bins()),
                actual: frames.shape(),
            });
        }
        Ok(Self { frames, config, sample_rate, original_length })
    }

    pub fn frames(&self) -> &Matrix<Complex64> {
        &self.frames
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn n_frames(&self) -> usize {
        self.frames.rows()
    }

    pub fn n_bins(&self) -> usize {
        self.frames.cols()
    }

    /// Same metadata, new frames of identical shape.
    pub fn with_frames(&self, frames: Matrix<Complex64>) -> Result<Self, StftError> {
        if frames.shape() != self.frames.shape() {
            return Err(StftError::ShapeMismatch { expected: self.frames.shape(), actual: frames.shape() });
        }
        Ok(Self { frames, ..self.clone() })
    }

    pub fn magnitude(&self) -> Matrix<f64> {
        self.frames.map(|z| z.norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudePhase {
    pub magnitude: Matrix<f64>,
    /// Radians in (-π, π]; exactly 0 where the frame value is 0.
    pub phase: Matrix<f64>,
}

/// Index into a signal of length `n` extended by whole-sample reflection
/// (`x[-1] = x[1]`), repeating as often as needed.
fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

fn padded_sample(samples: &[f64], config: &StftConfig, p: usize) -> f64 {
    let i = p as isize - config.pad() as isize;
    if config.center_padding {
        samples[reflect_index(i, samples.len())]
    } else {
        samples.get(i as usize).copied().unwrap_or(0.0)
    }
}

pub fn stft(buffer: &AudioBuffer, config: &StftConfig) -> Result<Spectrogram, StftError> {
    config.validate()?;
    if buffer.samples.is_empty() {
        return Err(StftError::EmptySignal);
    }
    let n = config.fft_size;
    let n_bins = config.n_bins();
    let n_frames = config.n_frames(buffer.samples.len());
    let window = config.window.coefficients(n);
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(n);

    let mut data = vec![Complex64::new(0.0, 0.0); n_frames * n_bins];
    let samples = &buffer.samples;
    par::for_each_row_init(
        &mut data,
        n_bins,
        || {
            (
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            )
        },
        |(frame, scratch), t, row| {
            let start = t * config.hop_size;
            for (j, (slot, w)) in frame.iter_mut().zip(&window).enumerate() {
                *slot = Complex64::new(padded_sample(samples, config, start + j) * w, 0.0);
            }
            fft.process_with_scratch(frame, scratch);
            row.copy_from_slice(&frame[..n_bins]);
        },
    );

    Spectrogram::new(
        Matrix::from_vec(n_frames, n_bins, data).expect("frame buffer sized n_frames * n_bins"),
        *config,
        buffer.sample_rate,
        buffer.samples.len(),
    )
}

/// Like [`stft`], but rejects configurations that fail [`StftConfig::is_cola`].
pub fn stft_strict(buffer: &AudioBuffer, config: &StftConfig) -> Result<Spectrogram, StftError> {
    config.validate()?;
    if !config.is_cola() {
        return Err(StftError::InvalidConfig(format!(
            "squared {:?} window at fft {} / hop {} is not constant-overlap-add (deviation {:.3e})",
            config.window,
            config.fft_size,
            config.hop_size,
            config.cola_deviation()
        )));
    }
    stft(buffer, config)
}

pub fn istft(spec: &Spectrogram) -> Result<AudioBuffer, StftError> {
    let config = spec.config;
    config.validate()?;
    let n = config.fft_size;
    let hop = config.hop_size;
    let n_bins = config.n_bins();
    let n_frames = spec.n_frames();
    let window = config.window.coefficients(n);
    let ifft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(n);

    // Windowed time-domain frames, computed independently per frame.
    let mut frames_td = vec![0.0; n_frames * n];
    par::for_each_row_init(
        &mut frames_td,
        n,
        || {
            (
                vec![Complex64::new(0.0, 0.0); n],
                vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()],
            )
        },
        |(full, scratch), t, out| {
            let half = spec.frames.row(t);
            // Hermitian extension; DC and Nyquist must be real for a real frame.
            full[0] = Complex64::new(half[0].re, 0.0);
            full[n / 2] = Complex64::new(half[n_bins - 1].re, 0.0);
            for k in 1..n / 2 {
                full[k] = half[k];
                full[n - k] = half[k].conj();
            }
            ifft.process_with_scratch(full, scratch);
            let scale = 1.0 / n as f64;
            for ((o, z), w) in out.iter_mut().zip(full.iter()).zip(&window) {
                *o = z.re * scale * w;
            }
        },
    );

    let total = (n_frames - 1) * hop + n;
    let mut acc = vec![0.0; total];
    let mut norm = vec![0.0; total];
    for (t, frame) in frames_td.chunks_exact(n).enumerate() {
        let start = t * hop;
        for j in 0..n {
            acc[start + j] += frame[j];
            norm[start + j] += window[j] * window[j];
        }
    }

    let pad = config.pad();
    let len = spec.original_length;
    let mut samples = vec![0.0; len];
    for (i, out) in samples.iter_mut().enumerate() {
        let p = i + pad;
        let (value, weight) = match (acc.get(p), norm.get(p)) {
            (Some(&a), Some(&w)) => (a, w),
            _ => (0.0, 0.0),
        };
        if weight >= MIN_OLA_NORM {
            *out = value / weight;
        } else if is_interior(p, n, hop, n_frames) {
            return Err(StftError::DegenerateNormalization { sample: i, value: weight });
        }
    }
    Ok(AudioBuffer::new(samples, spec.sample_rate))
}

/// A padded-domain position is interior when every frame of the infinite
/// hop grid that would overlap it was actually computed.
fn is_interior(p: usize, fft_size: usize, hop: usize, n_frames: usize) -> bool {
    p + hop >= fft_size && p / hop < n_frames
}

pub fn split(spec: &Spectrogram) -> MagnitudePhase {
    MagnitudePhase {
        magnitude: spec.frames.map(|z| z.norm()),
        phase: spec.frames.map(|z| phase_of(*z)),
    }
}

fn phase_of(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    // atan2 yields -π for a negative real with -0.0 imaginary part.
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Rebuilds a spectrogram from polar parts using `like`'s metadata.
pub fn recombine(mp: &MagnitudePhase, like: &Spectrogram) -> Result<Spectrogram, StftError> {
    let expected = like.frames.shape();
    for actual in [mp.magnitude.shape(), mp.phase.shape()] {
        if actual != expected {
            return Err(StftError::ShapeMismatch { expected, actual });
        }
    }
    let data = mp
        .magnitude
        .as_slice()
        .iter()
        .zip(mp.phase.as_slice())
        .map(|(&m, &p)| Complex64::from_polar(m, p))
        .collect();
    like.with_frames(Matrix::from_vec(expected.0, expected.1, data).unwrap())
}
