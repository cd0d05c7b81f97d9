#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pcs_core::audio_io::{write_wav, AudioBuffer, WavEncoding};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_noise(rng: &mut ChaCha8Rng, len: usize, amp: f64, rate: u32) -> AudioBuffer {
    AudioBuffer::new((0..len).map(|_| rng.gen_range(-amp..amp)).collect(), rate)
}

pub fn white_noise(rng: &mut ChaCha8Rng, len: usize, sigma: f64, rate: u32) -> AudioBuffer {
    AudioBuffer::new((0..len).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect(), rate)
}

pub fn tone(len: usize, freq: f64, amp: f64, rate: u32) -> AudioBuffer {
    let w = 2.0 * std::f64::consts::PI * freq / rate as f64;
    AudioBuffer::new((0..len).map(|i| amp * (w * i as f64).sin()).collect(), rate)
}

pub fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// `clean` plus white noise at `snr_db`.
pub fn add_noise(clean: &AudioBuffer, snr_db: f64, seed: u64) -> AudioBuffer {
    let sigma = (power(&clean.samples) / 10f64.powf(snr_db / 10.0)).sqrt();
    let noise = white_noise(&mut rng(seed), clean.len(), sigma, clean.sample_rate);
    AudioBuffer::new(clean.samples.iter().zip(&noise.samples).map(|(a, b)| a + b).collect(), clean.sample_rate)
}

/// 1 kHz tone plus white noise at 5 dB SNR, 16 kHz.
pub fn tone_in_noise(len: usize, seed: u64) -> AudioBuffer {
    add_noise(&tone(len, 1000.0, 0.5, 16000), 5.0, seed)
}

pub fn write(path: &Path, buffer: &AudioBuffer) {
    write_wav(path, buffer, WavEncoding::Float32).unwrap();
}

/// Two-channel 16-bit PCM file.
pub fn write_stereo(path: &Path, frames: usize) {
    let data_len = (frames * 4) as u32;
    let mut b = Vec::new();
    b.extend_from_slice(b"RIFF");
    b.extend_from_slice(&(36 + data_len).to_le_bytes());
    b.extend_from_slice(b"WAVEfmt ");
    b.extend_from_slice(&16u32.to_le_bytes());
    b.extend_from_slice(&1u16.to_le_bytes());
    b.extend_from_slice(&2u16.to_le_bytes());
    b.extend_from_slice(&16000u32.to_le_bytes());
    b.extend_from_slice(&(16000u32 * 4).to_le_bytes());
    b.extend_from_slice(&4u16.to_le_bytes());
    b.extend_from_slice(&16u16.to_le_bytes());
    b.extend_from_slice(b"data");
    b.extend_from_slice(&data_len.to_le_bytes());
    for i in 0..frames {
        let v = ((i % 64) as i16 - 32) * 100;
        b.extend_from_slice(&v.to_le_bytes());
        b.extend_from_slice(&(-v).to_le_bytes());
    }
    std::fs::write(path, b).unwrap();
}

pub fn pcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcs")).args(args).output().unwrap()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

pub fn sorted_entries(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

/// Parsed TSV: header and rows of cells.
pub fn tsv(stdout: &[u8]) -> (String, Vec<Vec<String>>) {
    let text = String::from_utf8(stdout.to_vec()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    (header, lines.map(|l| l.split('\t').map(str::to_string).collect()).collect())
}
