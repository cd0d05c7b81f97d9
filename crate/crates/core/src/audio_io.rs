//! Mono RIFF/WAVE reading and writing.
//!
//! Only two encodings are understood: 16-bit integer PCM (format code 1) and
//! 32-bit IEEE float (format code 3). `WAVE_FORMAT_EXTENSIBLE` headers are
//! accepted when their sub-format is one of those two. Integer samples are
//! scaled by 1/32768.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("unsupported encoding: format code {format}, {bits} bits per sample")]
    UnsupportedEncoding { format: u16, bits: u16 },
    #[error("expected 1 channel, found {0}")]
    ChannelCountError(u16),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Mono waveform with its sample rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    /// Checks the rate and that every sample is finite. Empty buffers pass;
    /// callers that need samples check for that themselves.
    pub fn validate(&self) -> Result<(), AudioError> {
        if self.sample_rate == 0 {
            return Err(AudioError::InvalidBuffer("sample rate is zero".into()));
        }
        if let Some(i) = self.samples.iter().position(|s| !s.is_finite()) {
            return Err(AudioError::InvalidBuffer(format!("non-finite sample at index {i}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => AudioError::MissingFile(path.to_path_buf()),
        _ => AudioError::Io(e),
    })?;
    decode_wav(&bytes)
}

struct Fmt {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Decodes an in-memory WAV file.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer, AudioError> {
    let corrupt = |msg: &str| AudioError::CorruptHeader(msg.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(corrupt("missing RIFF/WAVE signature"));
    }

    let mut fmt: Option<Fmt> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        // Some writers leave the data size unset (0 or 0xFFFFFFFF) when streaming.
        let body_end = body_start.checked_add(size).filter(|&e| e <= bytes.len());
        match id {
            b"fmt " => {
                let end = body_end.ok_or_else(|| corrupt("truncated fmt chunk"))?;
                fmt = Some(parse_fmt(&bytes[body_start..end])?);
            }
            b"data" => {
                let end = body_end.unwrap_or(bytes.len());
                data = Some(&bytes[body_start..end]);
                break;
            }
            _ => {}
        }
        let Some(end) = body_end else { break };
        // Chunks are word aligned.
        pos = end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| corrupt("no fmt chunk"))?;
    let data = data.ok_or_else(|| corrupt("no data chunk"))?;

    let supported = matches!((fmt.format, fmt.bits), (FORMAT_PCM, 16) | (FORMAT_IEEE_FLOAT, 32));
    if !supported {
        return Err(AudioError::UnsupportedEncoding { format: fmt.format, bits: fmt.bits });
    }
    if fmt.channels != 1 {
        return Err(AudioError::ChannelCountError(fmt.channels));
    }
    if fmt.sample_rate == 0 {
        return Err(corrupt("sample rate is zero"));
    }

    let samples: Vec<f64> = match fmt.format {
        FORMAT_PCM => data
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / PCM16_SCALE)
            .collect(),
        _ => data
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect(),
    };
    if samples.is_empty() {
        return Err(AudioError::InvalidBuffer("no samples in data chunk".into()));
    }
    let buffer = AudioBuffer::new(samples, fmt.sample_rate);
    buffer.validate()?;
    Ok(buffer)
}

fn parse_fmt(body: &[u8]) -> Result<Fmt, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::CorruptHeader("fmt chunk shorter than 16 bytes".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([body[i], body[i + 1]]);
    let mut format = u16_at(0);
    let channels = u16_at(2);
    let sample_rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
    let bits = u16_at(14);
    if format == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID, whose
        // first two bytes carry the plain format code.
        if body.len() < 26 {
            return Err(AudioError::CorruptHeader("truncated extensible fmt chunk".into()));
        }
        format = u16_at(24);
    }
    Ok(Fmt { format, channels, sample_rate, bits })
}

/// Quantises one sample to 16-bit PCM: clamp to [-1, 32767/32768], scale by
/// 32768 and round half away from zero.
pub fn quantize_pcm16(sample: f64) -> i16 {
    let clamped = sample.clamp(-1.0, 32767.0 / PCM16_SCALE);
    (clamped * PCM16_SCALE).round() as i16
}

pub fn encode_wav(buffer: &AudioBuffer, encoding: WavEncoding) -> Result<Vec<u8>, AudioError> {
    buffer.validate()?;
    let (format, bits) = match encoding {
        WavEncoding::Pcm16 => (FORMAT_PCM, 16u16),
        WavEncoding::Float32 => (FORMAT_IEEE_FLOAT, 32u16),
    };
    let block_align = bits / 8;
    let data_len = buffer.samples.len() * block_align as usize;
    let data_len_u32 = u32::try_from(data_len)
        .ok()
        .filter(|n| n.checked_add(36).is_some())
        .ok_or_else(|| AudioError::InvalidBuffer("too many samples for a RIFF file".into()))?;

    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len_u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&buffer.sample_rate.to_le_bytes());
    out.extend_from_slice(&(buffer.sample_rate * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len_u32.to_le_bytes());
    match encoding {
        WavEncoding::Pcm16 => {
            for &s in &buffer.samples {
                out.extend_from_slice(&quantize_pcm16(s).to_le_bytes());
            }
        }
        WavEncoding::Float32 => {
            for &s in &buffer.samples {
                out.extend_from_slice(&(s as f32).to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn write_wav(path: impl AsRef<Path>, buffer: &AudioBuffer, encoding: WavEncoding) -> Result<(), AudioError> {
    let bytes = encode_wav(buffer, encoding)?;
    fs::write(path, bytes)?;
    Ok(())
}
