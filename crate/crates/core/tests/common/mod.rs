#![allow(dead_code)]

use pcs_core::AudioBuffer;
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

/// 1 kHz tone plus white noise at 5 dB SNR, 16 kHz.
pub fn tone_in_noise(len: usize, seed: u64) -> AudioBuffer {
    let clean = tone(len, 1000.0, 0.5, 16000);
    let sigma = (power(&clean.samples) / 10f64.powf(0.5)).sqrt();
    let noise = white_noise(&mut rng(seed), len, sigma, 16000);
    AudioBuffer::new(clean.samples.iter().zip(&noise.samples).map(|(a, b)| a + b).collect(), 16000)
}
