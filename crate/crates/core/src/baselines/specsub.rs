use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::par;
use crate::stft::{istft, recombine, split, stft, StftConfig};

use super::noise::{check_length, leading_mean, DEFAULT_NOISE_FRAMES};
use super::BaselineError;

fn check_params(oversubtraction: f64, floor: f64) -> Result<(), BaselineError> {
    if !(oversubtraction >= 1.0 && oversubtraction.is_finite()) {
        return Err(BaselineError::InvalidParameter(format!("oversubtraction must be >= 1, got {oversubtraction}")));
    }
    if !(floor > 0.0 && floor < 1.0) {
        return Err(BaselineError::InvalidParameter(format!("floor must be in (0, 1), got {floor}")));
    }
    Ok(())
}

/// `max(|X| − oversubtraction · N, floor · |X|)` per cell, with `N` a per-bin
/// noise magnitude.
pub fn subtract_magnitude(
    magnitude: &Matrix<f64>,
    noise_magnitude: &[f64],
    oversubtraction: f64,
    floor: f64,
) -> Result<Matrix<f64>, BaselineError> {
    check_params(oversubtraction, floor)?;
    if noise_magnitude.len() != magnitude.cols() {
        return Err(BaselineError::InvalidParameter(format!(
            "noise estimate has {} bins, spectrum has {}",
            noise_magnitude.len(),
            magnitude.cols()
        )));
    }
    let mut out = magnitude.clone();
    par::for_each_row(out.as_mut_slice(), noise_magnitude.len(), |_, row| {
        for (m, &n) in row.iter_mut().zip(noise_magnitude) {
            *m = (*m - oversubtraction * n).max(floor * *m);
        }
    });
    Ok(out)
}

/// Magnitude spectral subtraction with a caller-supplied noise magnitude.
pub fn spectral_subtraction_with_noise(
    noisy: &AudioBuffer,
    config: &StftConfig,
    noise_magnitude: &[f64],
    oversubtraction: f64,
    floor: f64,
) -> Result<AudioBuffer, BaselineError> {
    let spec = stft(noisy, config)?;
    let mut parts = split(&spec);
    parts.magnitude = subtract_magnitude(&parts.magnitude, noise_magnitude, oversubtraction, floor)?;
    Ok(istft(&recombine(&parts, &spec)?)?)
}

/// Magnitude spectral subtraction; the noise magnitude is the mean over the
/// first [`DEFAULT_NOISE_FRAMES`] frames.
pub fn spectral_subtraction(
    noisy: &AudioBuffer,
    config: &StftConfig,
    oversubtraction: f64,
    floor: f64,
) -> Result<AudioBuffer, BaselineError> {
    check_params(oversubtraction, floor)?;
    config.validate()?;
    check_length(noisy, config, DEFAULT_NOISE_FRAMES)?;
    let spec = stft(noisy, config)?;
    let mut parts = split(&spec);
    let noise = leading_mean(&parts.magnitude, DEFAULT_NOISE_FRAMES, |m| m);
    parts.magnitude = subtract_magnitude(&parts.magnitude, &noise, oversubtraction, floor)?;
    Ok(istft(&recombine(&parts, &spec)?)?)
}
