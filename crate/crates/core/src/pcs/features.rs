//! PCSF feature files and training-target export.
//!
//! Layout, all little-endian, no padding:
//!
//! | field       | type  |
//! |-------------|-------|
//! | magic       | `b"PCSF"` |
//! | version     | u32 (= 1) |
//! | n_frames    | u32 |
//! | n_bins      | u32 |
//! | sample_rate | f64 |
//! | fft_size    | u32 |
//! | hop_size    | u32 |
//! | values      | `n_frames · n_bins` × f32, frame-major |

use std::fs;
use std::path::{Path, PathBuf};

use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::stft::{stft, StftConfig};

use super::{GammaSchedule, PcsError};

pub const PCSF_MAGIC: &[u8; 4] = b"PCSF";
pub const PCSF_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 4 + 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub sample_rate: f64,
    pub fft_size: u32,
    pub hop_size: u32,
    pub features: Matrix<f32>,
}

pub fn encode_pcsf(file: &FeatureFile) -> Result<Vec<u8>, PcsError> {
    let dim = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| PcsError::Format(format!("{what} {v} does not fit in u32")))
    };
    let n_frames = dim(file.features.rows(), "n_frames")?;
    let n_bins = dim(file.features.cols(), "n_bins")?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * file.features.as_slice().len());
    out.extend_from_slice(PCSF_MAGIC);
    out.extend_from_slice(&PCSF_VERSION.to_le_bytes());
    out.extend_from_slice(&n_frames.to_le_bytes());
    out.extend_from_slice(&n_bins.to_le_bytes());
    out.extend_from_slice(&file.sample_rate.to_le_bytes());
    out.extend_from_slice(&file.fft_size.to_le_bytes());
    out.extend_from_slice(&file.hop_size.to_le_bytes());
    for v in file.features.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_pcsf(bytes: &[u8]) -> Result<FeatureFile, PcsError> {
    if bytes.len() < HEADER_LEN {
        return Err(PcsError::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[0..4] != PCSF_MAGIC {
        return Err(PcsError::Format("bad magic".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != PCSF_VERSION {
        return Err(PcsError::Format(format!("unsupported version {version}")));
    }
    let n_frames = u32_at(8) as usize;
    let n_bins = u32_at(12) as usize;
    let sample_rate = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let fft_size = u32_at(24);
    let hop_size = u32_at(28);

    let payload = &bytes[HEADER_LEN..];
    let expected = n_frames.checked_mul(n_bins).and_then(|n| n.checked_mul(4));
    if expected != Some(payload.len()) {
        return Err(PcsError::Format(format!(
            "payload of {} bytes does not match {n_frames} x {n_bins} f32 values",
            payload.len()
        )));
    }
    let values = payload.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    Ok(FeatureFile {
        sample_rate,
        fft_size,
        hop_size,
        features: Matrix::from_vec(n_frames, n_bins, values).expect("payload length checked"),
    })
}

pub fn write_pcsf(path: impl AsRef<Path>, file: &FeatureFile) -> Result<(), PcsError> {
    fs::write(path, encode_pcsf(file)?)?;
    Ok(())
}

pub fn read_pcsf(path: impl AsRef<Path>) -> Result<FeatureFile, PcsError> {
    decode_pcsf(&fs::read(path)?)
}

/// Input and target feature matrices for one clean/noisy pair:
/// `log1p(|STFT(noisy)|)` and `γ[b] · log1p(|STFT(clean)|)`.
///
/// The target is the log1p of the contrast-stretched clean magnitude,
/// written directly in its log1p form. Phase is discarded.
pub fn training_features(
    clean: &AudioBuffer,
    noisy: &AudioBuffer,
    config: &StftConfig,
    schedule: &GammaSchedule,
) -> Result<(Matrix<f32>, Matrix<f32>), PcsError> {
    if clean.len() != noisy.len() {
        return Err(PcsError::LengthMismatch(format!(
            "clean has {} samples, noisy has {}",
            clean.len(),
            noisy.len()
        )));
    }
    if clean.sample_rate != noisy.sample_rate {
        return Err(PcsError::LengthMismatch(format!(
            "clean is {} Hz, noisy is {} Hz",
            clean.sample_rate, noisy.sample_rate
        )));
    }
    if schedule.len() != config.n_bins() {
        return Err(PcsError::ShapeMismatch { expected: (1, config.n_bins()), actual: (1, schedule.len()) });
    }
    clean.validate()?;
    noisy.validate()?;

    let input = stft(noisy, config)?.magnitude().map(|m| m.ln_1p() as f32);
    let clean_mag = stft(clean, config)?.magnitude();
    let gamma = schedule.gamma_per_bin();
    let n_bins = clean_mag.cols();
    let target: Vec<f32> = clean_mag
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, m)| (gamma[i % n_bins] * m.ln_1p()) as f32)
        .collect();
    let target = Matrix::from_vec(clean_mag.rows(), n_bins, target).expect("same shape as clean magnitude");
    Ok((input, target))
}

/// Writes `<stem>.in.pcsf` and `<stem>.tgt.pcsf` under `out_dir`, returning
/// their paths in that order.
pub fn export_training_targets(
    clean: &AudioBuffer,
    noisy: &AudioBuffer,
    config: &StftConfig,
    schedule: &GammaSchedule,
    out_dir: impl AsRef<Path>,
    stem: &str,
) -> Result<(PathBuf, PathBuf), PcsError> {
    let (input, target) = training_features(clean, noisy, config, schedule)?;
    let wrap = |features| FeatureFile {
        sample_rate: noisy.sample_rate as f64,
        fft_size: config.fft_size as u32,
        hop_size: config.hop_size as u32,
        features,
    };
    let in_path = out_dir.as_ref().join(format!("{stem}.in.pcsf"));
    let tgt_path = out_dir.as_ref().join(format!("{stem}.tgt.pcsf"));
    write_pcsf(&in_path, &wrap(input))?;
    write_pcsf(&tgt_path, &wrap(target))?;
    Ok((in_path, tgt_path))
}
