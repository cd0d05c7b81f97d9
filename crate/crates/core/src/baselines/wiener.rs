use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::par;
use crate::stft::{istft, recombine, split, stft, StftConfig};

use super::noise::{check_length, leading_mean, DEFAULT_NOISE_FRAMES};
use super::BaselineError;

/// Keeps the a-posteriori SNR finite when the noise estimate is exactly zero.
const NOISE_POWER_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerConfig {
    /// Leading frames averaged into the noise power estimate.
    pub noise_estimation_frames: usize,
    /// Decision-directed weight on the previous frame's clean-speech estimate.
    pub smoothing_alpha: f64,
    pub gain_floor: f64,
}

impl Default for WienerConfig {
    fn default() -> Self {
        Self { noise_estimation_frames: DEFAULT_NOISE_FRAMES, smoothing_alpha: 0.98, gain_floor: 0.1 }
    }
}

impl WienerConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.noise_estimation_frames == 0 {
            return Err(BaselineError::InvalidParameter("noise_estimation_frames must be positive".into()));
        }
        if !(self.smoothing_alpha > 0.0 && self.smoothing_alpha < 1.0) {
            return Err(BaselineError::InvalidParameter(format!(
                "smoothing_alpha must be in (0, 1), got {}",
                self.smoothing_alpha
            )));
        }
        if !(self.gain_floor > 0.0 && self.gain_floor < 1.0) {
            return Err(BaselineError::InvalidParameter(format!(
                "gain_floor must be in (0, 1), got {}",
                self.gain_floor
            )));
        }
        Ok(())
    }
}

/// Decision-directed Wiener gains for a `frames × bins` magnitude matrix.
///
/// Noise power per bin is the mean power of the leading frames. Per bin and
/// frame, with a-posteriori SNR `γ = |X|² / λ`:
///
/// ```text
/// ξ[0] = α + (1 − α) · max(γ[0] − 1, 0)
/// ξ[t] = α · G[t−1]² |X[t−1]|² / λ + (1 − α) · max(γ[t] − 1, 0)
/// G[t] = clamp(ξ / (1 + ξ), floor, 1)
/// ```
pub fn wiener_gains(magnitude: &Matrix<f64>, wcfg: &WienerConfig) -> Result<Matrix<f64>, BaselineError> {
    wcfg.validate()?;
    let noise_power: Vec<f64> =
        leading_mean(magnitude, wcfg.noise_estimation_frames, |m| m * m).into_iter().map(|p| p.max(NOISE_POWER_FLOOR)).collect();
    let (n_frames, n_bins) = magnitude.shape();
    let alpha = wcfg.smoothing_alpha;

    // The recursion runs along time, so bins are the independent unit.
    let columns = par::map_range(n_bins, |b| {
        let lambda = noise_power[b];
        let mut gains = Vec::with_capacity(n_frames);
        let mut prev_clean_power = 0.0;
        for t in 0..n_frames {
            let power = magnitude[(t, b)].powi(2);
            let post_snr = power / lambda;
            let ml = (post_snr - 1.0).max(0.0);
            let xi = if t == 0 {
                alpha + (1.0 - alpha) * ml
            } else {
                alpha * prev_clean_power / lambda + (1.0 - alpha) * ml
            };
            let g = (xi / (1.0 + xi)).clamp(wcfg.gain_floor, 1.0);
            prev_clean_power = g * g * power;
            gains.push(g);
        }
        gains
    });

    let mut out = Matrix::filled(n_frames, n_bins, 0.0);
    for (b, col) in columns.iter().enumerate() {
        for (t, &g) in col.iter().enumerate() {
            out[(t, b)] = g;
        }
    }
    Ok(out)
}

pub fn wiener_enhance(noisy: &AudioBuffer, config: &StftConfig, wcfg: &WienerConfig) -> Result<AudioBuffer, BaselineError> {
    wcfg.validate()?;
    config.validate()?;
    check_length(noisy, config, wcfg.noise_estimation_frames)?;
    let spec = stft(noisy, config)?;
    let mut parts = split(&spec);
    let gains = wiener_gains(&parts.magnitude, wcfg)?;
    parts
        .magnitude
        .as_mut_slice()
        .iter_mut()
        .zip(gains.as_slice())
        .for_each(|(m, g)| *m *= g);
    Ok(istft(&recombine(&parts, &spec)?)?)
}
