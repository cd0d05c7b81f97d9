use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::stft::{istft, recombine, split, stft, StftConfig};

use super::stretch::stretch_magnitude;
use super::{GammaSchedule, PcsError, ScheduleKind};

/// Runs a magnitude-domain transform as a waveform post-processor.
///
/// The waveform is analysed, `transform` rewrites the magnitude matrix, the
/// result is recombined with the input's own phase, resynthesised, and scaled
/// so its peak matches the input peak. An all-zero result is left as is.
pub fn post_process<F, E>(input: &AudioBuffer, config: &StftConfig, transform: F) -> Result<AudioBuffer, E>
where
    F: FnOnce(&Matrix<f64>) -> Result<Matrix<f64>, E>,
    E: From<PcsError>,
{
    input.validate().map_err(PcsError::from)?;
    let spec = stft(input, config).map_err(PcsError::from)?;
    let mut parts = split(&spec);
    let stretched = transform(&parts.magnitude)?;
    if stretched.shape() != parts.magnitude.shape() {
        return Err(PcsError::ShapeMismatch { expected: parts.magnitude.shape(), actual: stretched.shape() }.into());
    }
    parts.magnitude = stretched;
    let resynth = recombine(&parts, &spec).and_then(|s| istft(&s)).map_err(PcsError::from)?;
    let mut out = resynth;
    match_peak(&mut out, input.peak());
    Ok(out)
}

fn match_peak(buffer: &mut AudioBuffer, target_peak: f64) {
    let peak = buffer.peak();
    if peak > 0.0 {
        let gain = target_peak / peak;
        buffer.samples.iter_mut().for_each(|s| *s *= gain);
    }
}

/// Perceptual contrast stretching as a post-processor (PP-PCS).
///
/// With `center_padding` off, every output frame depends only on the same
/// input frame, so a causal front end stays causal.
pub fn pp_pcs(noisy: &AudioBuffer, config: &StftConfig, schedule: &GammaSchedule) -> Result<AudioBuffer, PcsError> {
    if matches!(schedule.kind(), ScheduleKind::Pcs { .. }) && schedule.sample_rate() != noisy.sample_rate {
        return Err(PcsError::RateMismatch { schedule: schedule.sample_rate(), signal: noisy.sample_rate });
    }
    post_process(noisy, config, |mag| stretch_magnitude(mag, schedule))
}
