use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::stft::StftConfig;

use super::BaselineError;

/// Leading frames assumed to be noise-only.
pub const DEFAULT_NOISE_FRAMES: usize = 6;

pub(crate) fn check_length(noisy: &AudioBuffer, config: &StftConfig, frames: usize) -> Result<(), BaselineError> {
    if frames == 0 {
        return Err(BaselineError::InvalidParameter("noise estimation needs at least one frame".into()));
    }
    let needed = frames * config.hop_size + config.fft_size;
    if noisy.len() < needed {
        return Err(BaselineError::SignalTooShort { len: noisy.len(), needed });
    }
    Ok(())
}

/// Per-bin mean of `f(value)` over the first `frames` rows.
pub(crate) fn leading_mean(values: &Matrix<f64>, frames: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let frames = frames.min(values.rows());
    let mut acc = vec![0.0; values.cols()];
    for row in values.iter_rows().take(frames) {
        for (a, &v) in acc.iter_mut().zip(row) {
            *a += f(v);
        }
    }
    acc.iter_mut().for_each(|a| *a /= frames as f64);
    acc
}
