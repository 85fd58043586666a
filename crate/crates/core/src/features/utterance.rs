use super::cepstral::CepstralBank;
use super::descriptors::spectral_descriptors;
use super::periodicity::{log_energy, pitch_and_harmonic_ratio};
use super::{delta, layout, FeatureConfig, FrameFeatures, SourceMode, UtteranceFeatures};
use super::{CEPSTRAL_BLOCK, FRAME_DIM, UTTERANCE_DIM};
use crate::emd::{decompose_signal, SiftConfig};
use crate::signal_io::{frame_signal_raw, hamming_periodic, SpectrumAnalyzer};
use crate::signal_io::AudioBuffer;
use crate::{Error, Result};

/// Selects the signal that features are computed from.
pub fn apply_source_mode(samples: &[f64], mode: SourceMode, sift: &SiftConfig) -> Vec<f64> {
    match mode {
        SourceMode::Raw => samples.to_vec(),
        SourceMode::EmdDetrend => {
            let d = decompose_signal(samples, sift);
            samples.iter().zip(&d.residual).map(|(x, r)| x - r).collect()
        }
        SourceMode::ImfSum(n) => decompose_signal(samples, sift).partial_sum(n),
    }
}

/// Per-frame 66-vectors of an already source-selected signal.
pub fn frame_features(samples: &[f64], sample_rate: u32, cfg: &FeatureConfig) -> Vec<FrameFeatures> {
    let raw = frame_signal_raw(samples, cfg.frame_len, cfg.hop);
    if raw.is_empty() {
        return Vec::new();
    }
    let window = hamming_periodic(cfg.frame_len);
    let analyzer = SpectrumAnalyzer::new(cfg.fft_size, sample_rate);

    let spectra: Vec<_> = raw
        .iter()
        .map(|f| {
            let windowed: Vec<f64> = f.iter().zip(&window).map(|(a, w)| a * w).collect();
            analyzer.analyze(&windowed)
        })
        .collect();
    let bank = CepstralBank::new(cfg, &spectra[0].bin_freqs);
    let mfccs: Vec<Vec<f64>> = spectra.iter().map(|s| bank.mfcc(s)).collect();
    let gtccs: Vec<Vec<f64>> = spectra.iter().map(|s| bank.gtcc(s)).collect();
    let d_mfcc = delta(&mfccs, cfg.delta_window);
    let d_gtcc = delta(&gtccs, cfg.delta_window);

    (0..raw.len())
        .map(|t| {
            let mut v = [0.0; FRAME_DIM];
            let put = |v: &mut [f64; FRAME_DIM], at: usize, src: &[f64]| {
                v[at..at + src.len().min(CEPSTRAL_BLOCK)]
                    .copy_from_slice(&src[..src.len().min(CEPSTRAL_BLOCK)]);
            };
            put(&mut v, layout::MFCC, &mfccs[t]);
            put(&mut v, layout::DELTA_MFCC, &d_mfcc[t]);
            put(&mut v, layout::GTCC, &gtccs[t]);
            put(&mut v, layout::DELTA_GTCC, &d_gtcc[t]);

            let prev = t.checked_sub(1).map(|p| &spectra[p]);
            let d = spectral_descriptors(&spectra[t], prev, cfg.rolloff_fraction);
            v[layout::CENTROID] = d.centroid;
            v[layout::SPREAD] = d.spread;
            v[layout::ENTROPY] = d.entropy;
            v[layout::FLUX] = d.flux;
            v[layout::ROLLOFF] = d.rolloff;
            v[layout::FLATNESS] = d.flatness;
            v[layout::SKEWNESS] = d.skewness;

            let (pitch, hr) =
                pitch_and_harmonic_ratio(&raw[t], sample_rate, cfg.pitch_min_hz, cfg.pitch_max_hz);
            v[layout::HARMONIC_RATIO] = hr;
            v[layout::PITCH] = pitch;
            v[layout::LOG_ENERGY] = log_energy(&raw[t]);
            FrameFeatures(v)
        })
        .collect()
}

/// Per-dimension mean, then per-dimension population variance.
pub fn aggregate(frames: &[FrameFeatures]) -> Vec<f64> {
    let mut out = vec![0.0; UTTERANCE_DIM];
    if frames.is_empty() {
        return out;
    }
    let n = frames.len() as f64;
    for f in frames {
        for (o, v) in out[..FRAME_DIM].iter_mut().zip(&f.0) {
            *o += v;
        }
    }
    out[..FRAME_DIM].iter_mut().for_each(|m| *m /= n);
    for f in frames {
        for j in 0..FRAME_DIM {
            let dev = f.0[j] - out[j];
            out[FRAME_DIM + j] += dev * dev;
        }
    }
    out[FRAME_DIM..].iter_mut().for_each(|v| *v /= n);
    out
}

/// Full per-utterance pipeline: source selection, framing, 66 features per
/// frame, mean/variance aggregation.
pub fn extract_utterance(
    buffer: &AudioBuffer,
    cfg: &FeatureConfig,
    sift: &SiftConfig,
) -> Result<UtteranceFeatures> {
    cfg.validate()?;
    if buffer.samples.len() < cfg.frame_len {
        return Err(Error::UtteranceTooShort {
            len: buffer.samples.len(),
            frame_len: cfg.frame_len,
        });
    }
    let source = apply_source_mode(&buffer.samples, cfg.source_mode, sift);
    let frames = frame_features(&source, buffer.sample_rate, cfg);
    Ok(UtteranceFeatures {
        values: aggregate(&frames),
        label: None,
        source_path: buffer.source_path.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn noisy_tone(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|k| {
                0.4 * (2.0 * PI * 180.0 * k as f64 / 16000.0).sin()
                    + 0.2 * (2.0 * PI * 1260.0 * k as f64 / 16000.0).sin()
                    + rng.random_range(-0.05..0.05)
            })
            .collect()
    }

    fn raw_cfg() -> FeatureConfig {
        FeatureConfig {
            source_mode: SourceMode::Raw,
            ..Default::default()
        }
    }

    #[test]
    fn dimensions_and_reserved_zeros() {
        let buf = AudioBuffer::new(noisy_tone(8000, 1), 16000);
        let u = extract_utterance(&buf, &FeatureConfig::default(), &SiftConfig::default()).unwrap();
        assert_eq!(u.values.len(), 132);
        assert!(u.values.iter().all(|v| v.is_finite()));
        assert!(u.variances().iter().all(|&v| v >= 0.0));
        for j in layout::RESERVED {
            assert_eq!(u.values[j], 0.0);
            assert_eq!(u.values[FRAME_DIM + j], 0.0);
        }
        let m = u.means();
        assert!((0.0..=1.0).contains(&m[layout::ENTROPY]));
        assert!((0.0..=1.0).contains(&m[layout::FLATNESS]));
        assert!((0.0..=1.0).contains(&m[layout::HARMONIC_RATIO]));
    }

    #[test]
    fn single_frame_has_zero_variance() {
        let buf = AudioBuffer::new(noisy_tone(400, 2), 16000);
        let u = extract_utterance(&buf, &raw_cfg(), &SiftConfig::default()).unwrap();
        assert!(u.variances().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_frames_aggregate() {
        let mut v = [0.0; FRAME_DIM];
        v.iter_mut().enumerate().for_each(|(i, x)| *x = i as f64 * 0.5);
        let agg = aggregate(&vec![FrameFeatures(v); 7]);
        assert_eq!(&agg[..FRAME_DIM], &v[..]);
        assert!(agg[FRAME_DIM..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn too_short() {
        let buf = AudioBuffer::new(vec![0.1; 399], 16000);
        assert!(matches!(
            extract_utterance(&buf, &raw_cfg(), &SiftConfig::default()),
            Err(Error::UtteranceTooShort { len: 399, .. })
        ));
    }

    #[test]
    fn amplitude_scaling() {
        let x = noisy_tone(6000, 3);
        let alpha = 0.37;
        let y: Vec<f64> = x.iter().map(|v| v * alpha).collect();
        let cfg = raw_cfg();
        let fx = frame_features(&x, 16000, &cfg);
        let fy = frame_features(&y, 16000, &cfg);
        for (a, b) in fx.iter().zip(&fy) {
            for j in [
                layout::CENTROID,
                layout::SPREAD,
                layout::SKEWNESS,
                layout::ENTROPY,
                layout::ROLLOFF,
                layout::FLATNESS,
                layout::HARMONIC_RATIO,
                layout::PITCH,
            ] {
                let tol = 1e-6 * a.0[j].abs().max(1.0);
                assert!((a.0[j] - b.0[j]).abs() <= tol, "dim {j}: {} vs {}", a.0[j], b.0[j]);
            }
            let shift = b.0[layout::LOG_ENERGY] - a.0[layout::LOG_ENERGY];
            assert!((shift - 2.0 * alpha.ln()).abs() < 1e-6);
            assert!((b.0[layout::FLUX] - alpha * a.0[layout::FLUX]).abs() <= 1e-9 * a.0[layout::FLUX].max(1.0));
        }
    }

    #[test]
    fn hop_shift_barely_moves_means() {
        let cfg = raw_cfg();
        let shifted_means = |freqs: &[f64]| {
            let n = 16000 + 160;
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    freqs
                        .iter()
                        .map(|f| 0.3 * (2.0 * PI * f * k as f64 / 16000.0).sin())
                        .sum()
                })
                .collect();
            (
                aggregate(&frame_features(&x[..16000], 16000, &cfg)),
                aggregate(&frame_features(&x[160..], 16000, &cfg)),
            )
        };

        // period divides the hop: every frame is the same, so are the means
        let (a, b) = shifted_means(&[200.0, 600.0]);
        for j in 0..FRAME_DIM {
            assert!((a[j] - b[j]).abs() <= 1e-9 * a[j].abs().max(1.0), "dim {j}");
        }

        // general tone: static features within 1%; delta means are
        // boundary terms near zero and are skipped
        let (a, b) = shifted_means(&[220.0, 1310.0]);
        for j in (0..FRAME_DIM).filter(|&j| {
            !(layout::DELTA_MFCC..layout::DELTA_MFCC + 13).contains(&j)
                && !(layout::DELTA_GTCC..layout::DELTA_GTCC + 13).contains(&j)
        }) {
            let rel = (a[j] - b[j]).abs() / a[j].abs().max(1.0);
            assert!(rel < 0.01, "dim {j}: {} vs {}", a[j], b[j]);
        }
    }

    #[test]
    fn detrend_on_pure_oscillation_matches_raw() {
        // 25 whole periods of a 100 Hz tone: EMD returns it as one IMF and an
        // essentially empty residual.
        let n = 4000;
        let x: Vec<f64> = (0..n)
            .map(|k| 0.5 * (2.0 * PI * 100.0 * k as f64 / 16000.0).sin())
            .collect();
        let sift = SiftConfig::default();
        let d = decompose_signal(&x, &sift);
        let resid_peak = d.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(resid_peak < 1e-3, "residual peak {resid_peak}");
        let buf = AudioBuffer::new(x, 16000);
        let raw = extract_utterance(&buf, &raw_cfg(), &sift).unwrap();
        let det = extract_utterance(&buf, &FeatureConfig::default(), &sift).unwrap();
        for (j, (a, b)) in raw.values.iter().zip(&det.values).enumerate() {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "entry {j}: {a} vs {b}");
        }
    }
}
