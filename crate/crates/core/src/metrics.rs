//! Objective before/after measures: segmental SNR and log-spectral distance.

use thiserror::Error;

use crate::audio_io::AudioBuffer;
use crate::par;
use crate::stft::{stft, StftConfig, StftError};

/// Per-frame segmental SNR is clamped to this range, in dB.
pub const SEG_SNR_MIN_DB: f64 = -10.0;
pub const SEG_SNR_MAX_DB: f64 = 35.0;
/// Frames whose reference energy falls below this are skipped.
pub const SILENT_FRAME_ENERGY: f64 = 1e-12;
/// Added to both magnitudes before taking the log ratio.
pub const LSD_EPSILON: f64 = 1e-8;
/// Smallest frame length accepted by [`segmental_snr`].
pub const MIN_FRAME_LEN: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: reference {reference} samples at {reference_rate} Hz, test {test} samples at {test_rate} Hz")]
    LengthMismatch { reference: usize, test: usize, reference_rate: u32, test_rate: u32 },
    #[error("every frame of the reference is silent")]
    AllFramesSilent,
    #[error("invalid frame parameters: {0}")]
    InvalidFrame(String),
    #[error(transparent)]
    Stft(#[from] StftError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementReport {
    pub file_id: String,
    pub seg_snr_db: f64,
    pub lsd_db: f64,
    pub n_frames_scored: usize,
}

impl EnhancementReport {
    /// Scores `test` against `reference` with both metrics.
    pub fn compute(
        file_id: impl Into<String>,
        reference: &AudioBuffer,
        test: &AudioBuffer,
        config: &StftConfig,
    ) -> Result<Self, MetricsError> {
        let (seg_snr_db, n_frames_scored) =
            segmental_snr_scored(reference, test, config.fft_size.max(MIN_FRAME_LEN), config.hop_size)?;
        let lsd_db = log_spectral_distance(reference, test, config)?;
        Ok(Self { file_id: file_id.into(), seg_snr_db, lsd_db, n_frames_scored })
    }
}

fn check_pair(reference: &AudioBuffer, test: &AudioBuffer) -> Result<(), MetricsError> {
    if reference.len() != test.len() || reference.sample_rate != test.sample_rate {
        return Err(MetricsError::LengthMismatch {
            reference: reference.len(),
            test: test.len(),
            reference_rate: reference.sample_rate,
            test_rate: test.sample_rate,
        });
    }
    Ok(())
}

/// Frame start positions: every `hop` while the frame fits, or one short
/// frame covering the whole signal when it is shorter than `frame_len`.
fn frame_starts(len: usize, frame_len: usize, hop: usize) -> Vec<(usize, usize)> {
    if len < frame_len {
        return vec![(0, len)];
    }
    (0..=(len - frame_len) / hop).map(|k| (k * hop, k * hop + frame_len)).collect()
}

/// Mean over non-silent frames of `10·log10(Σref² / Σ(ref − test)²)`, each
/// frame clamped to [-10, 35] dB.
pub fn segmental_snr(reference: &AudioBuffer, test: &AudioBuffer, frame_len: usize, hop: usize) -> Result<f64, MetricsError> {
    segmental_snr_scored(reference, test, frame_len, hop).map(|(snr, _)| snr)
}

fn segmental_snr_scored(
    reference: &AudioBuffer,
    test: &AudioBuffer,
    frame_len: usize,
    hop: usize,
) -> Result<(f64, usize), MetricsError> {
    check_pair(reference, test)?;
    if frame_len < MIN_FRAME_LEN || hop == 0 {
        return Err(MetricsError::InvalidFrame(format!(
            "need frame_len >= {MIN_FRAME_LEN} and hop >= 1, got {frame_len} / {hop}"
        )));
    }
    let frames = frame_starts(reference.len(), frame_len, hop);
    let per_frame = par::map_range(frames.len(), |k| {
        let (s, e) = frames[k];
        let r = &reference.samples[s..e];
        let t = &test.samples[s..e];
        let signal: f64 = r.iter().map(|v| v * v).sum();
        if signal < SILENT_FRAME_ENERGY {
            return None;
        }
        let noise: f64 = r.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum();
        let db = if noise == 0.0 { SEG_SNR_MAX_DB } else { 10.0 * (signal / noise).log10() };
        Some(db.clamp(SEG_SNR_MIN_DB, SEG_SNR_MAX_DB))
    });
    let scored: Vec<f64> = per_frame.into_iter().flatten().collect();
    if scored.is_empty() {
        return Err(MetricsError::AllFramesSilent);
    }
    Ok((scored.iter().sum::<f64>() / scored.len() as f64, scored.len()))
}

/// Mean over STFT frames of the RMS (over bins) of
/// `20·log10((|R| + ε) / (|T| + ε))`.
pub fn log_spectral_distance(reference: &AudioBuffer, test: &AudioBuffer, config: &StftConfig) -> Result<f64, MetricsError> {
    check_pair(reference, test)?;
    let r = stft(reference, config)?.magnitude();
    let t = stft(test, config)?.magnitude();
    let n_bins = r.cols();
    let per_frame = par::map_range(r.rows(), |f| {
        let sq: f64 = r
            .row(f)
            .iter()
            .zip(t.row(f))
            .map(|(a, b)| (20.0 * ((a + LSD_EPSILON) / (b + LSD_EPSILON)).log10()).powi(2))
            .sum();
        (sq / n_bins as f64).sqrt()
    });
    Ok(per_frame.iter().sum::<f64>() / per_frame.len() as f64)
}
