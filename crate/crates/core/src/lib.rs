//! Perceptual contrast stretching (PCS) for speech enhancement.
//!
//! The crate is organised around a single processing chain:
//! waveform → [`stft::stft`] → magnitude/phase split → per-bin gamma
//! stretching in the log1p domain → recombination with the original phase →
//! [`stft::istft`] → peak renormalisation. Around it sit the band-importance
//! gamma schedules, conventional enhancement baselines (Wiener, spectral
//! subtraction, histogram-style equalisers), objective metrics and the PCSF
//! feature file format used for training-target export.
//!
//! Frame- and bin-level loops run on rayon when the `parallel` feature is
//! enabled (the default) and fall back to plain iterators otherwise; results
//! are bit-identical either way.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audio_io;
pub mod baselines;
pub mod matrix;
pub mod metrics;
mod par;
pub mod pcs;
pub mod stft;

pub use audio_io::{read_wav, write_wav, AudioBuffer, AudioError, WavEncoding};
pub use baselines::{
    adaptive_equalize, histogram_equalize, minmax_normalize, spectral_subtraction, wiener_enhance, BaselineError,
    FeatureEnhancer, WienerConfig,
};
pub use matrix::Matrix;

pub use metrics::{log_spectral_distance, segmental_snr, EnhancementReport, MetricsError};
pub use pcs::{
    build_schedule, export_training_targets, pp_pcs, rescale_bif, stretch_magnitude, BandImportanceTable,
    GammaSchedule, PcsError, ScheduleKind,
};
pub use stft::{istft, recombine, split, stft, MagnitudePhase, Spectrogram, StftConfig, StftError, Window};
