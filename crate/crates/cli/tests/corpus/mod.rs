//! Seeded synthetic corpus: tonal bursts (label 1) against noise bursts
//! (label 0), written as 16-bit PCM WAVs plus a `path,label` manifest.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use imfclass_core::encode_wav_pcm16;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const RATE: u32 = 8000;
pub const LEN: usize = 4096;

fn hann_burst(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let width = rng.random_range(LEN / 3..LEN * 3 / 4);
    let start = rng.random_range(0..LEN - width);
    (0..LEN)
        .map(|i| {
            if i < start || i >= start + width {
                0.0
            } else {
                let p = (i - start) as f64 / (width - 1) as f64;
                0.5 - 0.5 * (2.0 * PI * p).cos()
            }
        })
        .collect()
}

pub fn tonal_burst(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let env = hann_burst(rng);
    let f = rng.random_range(250.0..900.0);
    let phase = rng.random_range(0.0..2.0 * PI);
    env.iter()
        .enumerate()
        .map(|(i, e)| {
            let t = i as f64 / f64::from(RATE);
            let noise: f64 = StandardNormal.sample(rng);
            0.6 * e * (2.0 * PI * f * t + phase).sin() + 0.02 * noise
        })
        .collect()
}

pub fn noise_burst(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let env = hann_burst(rng);
    env.iter()
        .map(|e| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            (0.25 * e * a + 0.02 * b).clamp(-1.0, 1.0)
        })
        .collect()
}

/// Writes `per_class` files of each kind into `dir` and returns the
/// manifest path. Rows alternate label 1, label 0.
pub fn write_corpus(dir: &Path, per_class: usize, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut manifest = String::from("path,label\n");
    for i in 0..per_class {
        for (label, name) in [(1, "tone"), (0, "noise")] {
            let x = if label == 1 {
                tonal_burst(&mut rng)
            } else {
                noise_burst(&mut rng)
            };
            let file = format!("{name}_{i:03}.wav");
            std::fs::write(dir.join(&file), encode_wav_pcm16(&x, RATE)).unwrap();
            manifest.push_str(&format!("{file},{label}\n"));
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).unwrap();
    path
}
