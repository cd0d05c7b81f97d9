//! Perceptual contrast stretching.
//!
//! Spectral magnitudes are stretched per frequency bin in the log1p domain,
//! `log1p(Y) = γ[b] · log1p(M)`, with `γ[b]` taken either from a single fixed
//! exponent or from the band-importance table rescaled into `[1, γ_max]`.

use std::io;

use thiserror::Error;

use crate::audio_io::AudioError;
use crate::stft::StftError;

mod features;
mod pipeline;
mod schedule;
mod stretch;

pub use features::{
    decode_pcsf, encode_pcsf, export_training_targets, read_pcsf, training_features, write_pcsf, FeatureFile,
    PCSF_MAGIC, PCSF_VERSION,
};
pub use pipeline::{post_process, pp_pcs};
pub use schedule::{
    build_schedule, rescale_bif, BandImportanceTable, BandRow, GammaSchedule, ScheduleKind, DEFAULT_GAMMA_MAX,
    DEFAULT_GAMMA_MIN,
};
pub use stretch::{stretch_magnitude, stretch_value};

#[derive(Debug, Error)]
pub enum PcsError {
    #[error("negative or non-finite magnitude {value} at frame {frame}, bin {bin}")]
    NegativeMagnitude { frame: usize, bin: usize, value: f64 },
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch { expected: (usize, usize), actual: (usize, usize) },
    #[error("band importance table is degenerate: all BIF values equal")]
    DegenerateTable,
    #[error("invalid band importance table: {0}")]
    InvalidTable(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("schedule built for {schedule} Hz applied to {signal} Hz audio")]
    RateMismatch { schedule: u32, signal: u32 },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("malformed feature file: {0}")]
    Format(String),
    #[error(transparent)]
    Stft(#[from] StftError),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
