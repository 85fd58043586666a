//! Mel and gammatone filterbanks with DCT-II cepstra.

use std::f64::consts::PI;

use super::FeatureConfig;
use crate::signal_io::Spectrum;

/// Floor added inside every logarithm.
pub(crate) const LOG_FLOOR: f64 = 1e-10;
/// Gammatone bandwidth scale.
const GT_BANDWIDTH: f64 = 1.019;
const GT_LOW_HZ: f64 = 50.0;
const UPPER_HZ: f64 = 8000.0;

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

pub fn erb_rate(f: f64) -> f64 {
    21.4 * (1.0 + 0.00437 * f).log10()
}

fn erb_rate_to_hz(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 0.00437
}

/// Equivalent rectangular bandwidth at `fc` Hz.
pub fn erb(fc: f64) -> f64 {
    24.7 * (1.0 + 4.37 * fc / 1000.0)
}

/// Orthonormal DCT-II basis, `n_out` rows of length `n_in`.
pub fn dct_ii_orthonormal(n_in: usize, n_out: usize) -> Vec<Vec<f64>> {
    let n = n_in as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            (0..n_in)
                .map(|i| scale * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos())
                .collect()
        })
        .collect()
}

fn triangular_bank(n_filters: usize, bin_freqs: &[f64], upper_hz: f64) -> Vec<Vec<f64>> {
    let top = hz_to_mel(upper_hz);
    let edges: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
        .collect();
    (0..n_filters)
        .map(|m| {
            let (lo, c, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            bin_freqs
                .iter()
                .map(|&f| {
                    if f > lo && f <= c {
                        (f - lo) / (c - lo)
                    } else if f > c && f < hi {
                        (hi - f) / (hi - c)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Centre frequencies spaced evenly in ERB-rate between 50 Hz and `upper_hz`.
pub(crate) fn gammatone_centres(n_filters: usize, upper_hz: f64) -> Vec<f64> {
    let lo = erb_rate(GT_LOW_HZ);
    let hi = erb_rate(upper_hz);
    (0..n_filters)
        .map(|i| {
            let t = if n_filters == 1 {
                0.0
            } else {
                i as f64 / (n_filters - 1) as f64
            };
            erb_rate_to_hz(lo + t * (hi - lo))
        })
        .collect()
}

fn gammatone_bank(n_filters: usize, bin_freqs: &[f64], upper_hz: f64) -> Vec<Vec<f64>> {
    gammatone_centres(n_filters, upper_hz)
        .into_iter()
        .map(|fc| {
            let bw = GT_BANDWIDTH * erb(fc);
            bin_freqs
                .iter()
                .map(|&f| {
                    let r = (f - fc) / bw;
                    (1.0 + r * r).powi(-2)
                })
                .collect()
        })
        .collect()
}

/// Precomputed filter and DCT matrices for one spectrum geometry.
#[derive(Debug, Clone)]
pub struct CepstralBank {
    mel: Vec<Vec<f64>>,
    gammatone: Vec<Vec<f64>>,
    mel_dct: Vec<Vec<f64>>,
    gt_dct: Vec<Vec<f64>>,
}

impl CepstralBank {
    pub fn new(cfg: &FeatureConfig, bin_freqs: &[f64]) -> Self {
        let nyquist = bin_freqs.last().copied().unwrap_or(UPPER_HZ);
        let upper = UPPER_HZ.min(nyquist);
        Self {
            mel: triangular_bank(cfg.n_mel_filters, bin_freqs, upper),
            gammatone: gammatone_bank(cfg.n_gt_filters, bin_freqs, upper),
            mel_dct: dct_ii_orthonormal(cfg.n_mel_filters, cfg.n_mfcc),
            gt_dct: dct_ii_orthonormal(cfg.n_gt_filters, cfg.n_gtcc),
        }
    }

    fn cepstrum(bank: &[Vec<f64>], dct: &[Vec<f64>], spectrum: &Spectrum) -> Vec<f64> {
        let power: Vec<f64> = spectrum.magnitudes.iter().map(|m| m * m).collect();
        let log_bands: Vec<f64> = bank
            .iter()
            .map(|w| {
                let e: f64 = w.iter().zip(&power).map(|(a, b)| a * b).sum();
                (e + LOG_FLOOR).ln()
            })
            .collect();
        dct.iter()
            .map(|row| row.iter().zip(&log_bands).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mfcc(&self, spectrum: &Spectrum) -> Vec<f64> {
        Self::cepstrum(&self.mel, &self.mel_dct, spectrum)
    }

    pub fn gtcc(&self, spectrum: &Spectrum) -> Vec<f64> {
        Self::cepstrum(&self.gammatone, &self.gt_dct, spectrum)
    }

    /// Log band energies of the gammatone bank (before the DCT).
    pub fn gammatone_log_energies(&self, spectrum: &Spectrum) -> Vec<f64> {
        let power: Vec<f64> = spectrum.magnitudes.iter().map(|m| m * m).collect();
        self.gammatone
            .iter()
            .map(|w| (w.iter().zip(&power).map(|(a, b)| a * b).sum::<f64>() + LOG_FLOOR).ln())
            .collect()
    }
}

/// Mel-frequency cepstral coefficients of one spectrum.
pub fn mfcc(spectrum: &Spectrum, cfg: &FeatureConfig) -> Vec<f64> {
    CepstralBank::new(cfg, &spectrum.bin_freqs).mfcc(spectrum)
}

/// Gammatone cepstral coefficients of one spectrum.
pub fn gtcc(spectrum: &Spectrum, cfg: &FeatureConfig) -> Vec<f64> {
    CepstralBank::new(cfg, &spectrum.bin_freqs).gtcc(spectrum)
}
