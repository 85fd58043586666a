//! Seeded stand-in corpus: one harmonic voice per emotion, named in the TESS
//! style so it goes through the same ingestion path as real data.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Emotion;
use crate::signal_io::{write_wav, WavEncoding};
use crate::{Error, Result, CANONICAL_RATE};

pub const DEFAULT_PER_CLASS: usize = 15;
/// Samples per utterance (0.6 s).
pub const UTTERANCE_LEN: usize = 9_600;

/// Per class: fundamental (Hz), spectral tilt, relative pitch glide over
/// the utterance, tremolo rate (Hz).
const VOICES: [(f64, f64, f64, f64); Emotion::COUNT] = [
    (110.0, 0.6, 0.25, 3.0),
    (140.0, 1.6, -0.20, 7.0),
    (175.0, 0.9, 0.10, 11.0),
    (215.0, 2.0, -0.10, 5.0),
    (260.0, 1.2, 0.0, 9.0),
    (310.0, 0.7, -0.25, 4.0),
    (365.0, 1.8, 0.05, 13.0),
];

fn tess_word(e: Emotion) -> &'static str {
    match e {
        Emotion::Anger => "angry",
        Emotion::Disgust => "disgust",
        Emotion::Fear => "fear",
        Emotion::Happiness => "happy",
        Emotion::Neutral => "neutral",
        Emotion::PleasantSurprise => "ps",
        Emotion::Sadness => "sad",
    }
}

pub fn file_name(e: Emotion, index: usize) -> String {
    format!("SYN_w{index:03}_{}.wav", tess_word(e))
}

/// One utterance at 16 kHz: a gliding harmonic voice with a class-specific
/// tilt and tremolo, smooth onset/offset, and faint noise. Utterances of a
/// class differ only by small pitch, gain and noise perturbations.
pub fn synth_utterance(e: Emotion, index: usize, seed: u64) -> Vec<f64> {
    let (f0, tilt, glide, tremolo) = VOICES[e.index()];
    let fs = CANONICAL_RATE as f64;
    let n_harm = ((0.4 * fs / (f0 * (1.0 + glide.max(0.0)))) as usize).min(24);
    let mut class_rng = ChaCha8Rng::seed_from_u64(e.index() as u64);
    let phases: Vec<f64> = (0..n_harm).map(|_| class_rng.random_range(0.0..2.0 * PI)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((e.index() * 1_000_003 + index) as u64);
    let f0 = f0 * (1.0 + rng.random_range(-0.003..0.003));
    let gain = 0.3 * (1.0 + rng.random_range(-0.03..0.03));

    let norm: f64 = (1..=n_harm).map(|h| (h as f64).powf(-tilt)).sum();
    let dur = UTTERANCE_LEN as f64 / fs;
    let ramp = 400.0;
    (0..UTTERANCE_LEN)
        .map(|k| {
            let t = k as f64 / fs;
            // phase of a linear glide from f0 to f0 * (1 + glide)
            let cycles = f0 * (t + 0.5 * glide * t * t / dur);
            let voiced: f64 = phases
                .iter()
                .enumerate()
                .map(|(h, ph)| {
                    let h = h as f64 + 1.0;
                    h.powf(-tilt) * (2.0 * PI * h * cycles + ph).sin()
                })
                .sum();
            let kf = k as f64;
            let env = (kf / ramp).min(1.0).min((UTTERANCE_LEN as f64 - 1.0 - kf) / ramp).max(0.0)
                * (1.0 + 0.3 * (2.0 * PI * tremolo * t).sin());
            gain * env * voiced / norm + rng.random_range(-0.001..0.001)
        })
        .collect()
}

/// Writes `per_class` PCM16 files per emotion into `dir` and returns their
/// paths in label-then-index order.
pub fn write_mini_corpus(dir: &Path, per_class: usize, seed: u64) -> Result<Vec<PathBuf>> {
    if per_class == 0 {
        return Err(Error::InvalidParameter("per_class must be at least 1".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in Emotion::ALL {
        for i in 0..per_class {
            let p = dir.join(file_name(e, i));
            write_wav(&p, &synth_utterance(e, i, seed), CANONICAL_RATE, WavEncoding::Pcm16)?;
            paths.push(p);
        }
    }
    Ok(paths)
}
