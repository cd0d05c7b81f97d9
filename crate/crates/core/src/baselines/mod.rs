//! Conventional enhancement baselines and spectrogram contrast methods that
//! PCS is compared against.
//!
//! [`wiener_enhance`] and [`spectral_subtraction`] are waveform-in,
//! waveform-out and compose with [`crate::pcs::pp_pcs`]. The equalisers act
//! on magnitude matrices and can replace the stretch step inside the
//! post-processing pipeline through [`FeatureEnhancer`].

use thiserror::Error;

use crate::pcs::PcsError;
use crate::stft::StftError;

mod equalize;
mod noise;
mod specsub;
mod wiener;

pub use equalize::{
    adaptive_equalize, histogram_equalize, minmax_normalize, pp_feature_enhance, FeatureEnhancer, DEFAULT_LEVELS,
};
pub use noise::DEFAULT_NOISE_FRAMES;
pub use specsub::{spectral_subtraction, spectral_subtraction_with_noise, subtract_magnitude};
pub use wiener::{wiener_enhance, wiener_gains, WienerConfig};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("signal has {len} samples, need at least {needed} for noise estimation")]
    SignalTooShort { len: usize, needed: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Stft(#[from] StftError),
    #[error(transparent)]
    Pcs(#[from] PcsError),
}
