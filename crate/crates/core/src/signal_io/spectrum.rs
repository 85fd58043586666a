use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// One-sided magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
    pub bin_freqs: Vec<f64>,
    pub fft_size: usize,
}

impl Spectrum {
    pub fn num_bins(&self) -> usize {
        self.magnitudes.len()
    }

    /// Builds a spectrum from magnitudes with the standard bin spacing
    /// `k * sample_rate / fft_size`.
    pub fn from_magnitudes(magnitudes: Vec<f64>, sample_rate: u32) -> Self {
        let fft_size = 2 * (magnitudes.len() - 1);
        let bin_freqs = bin_frequencies(fft_size, sample_rate);
        Self {
            magnitudes,
            bin_freqs,
            fft_size,
        }
    }
}

fn bin_frequencies(fft_size: usize, sample_rate: u32) -> Vec<f64> {
    (0..=fft_size / 2)
        .map(|k| k as f64 * sample_rate as f64 / fft_size as f64)
        .collect()
}

/// Reusable forward transform of a fixed size.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_size: usize,
    bin_freqs: Vec<f64>,
}

impl SpectrumAnalyzer {
    /// # Panics
    /// If `fft_size` is not a power of two.
    pub fn new(fft_size: usize, sample_rate: u32) -> Self {
        assert!(fft_size.is_power_of_two(), "fft_size must be a power of two");
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Self {
            fft,
            fft_size,
            bin_freqs: bin_frequencies(fft_size, sample_rate),
        }
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    /// Zero-pads `frame` to the transform size and returns `|X_k|`,
    /// `k = 0..=fft_size/2`.
    ///
    /// # Panics
    /// If the frame is longer than the transform.
    pub fn analyze(&self, frame: &[f64]) -> Spectrum {
        assert!(frame.len() <= self.fft_size, "frame longer than fft_size");
        let mut buf: Vec<Complex<f64>> = frame
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.fft_size)
            .collect();
        self.fft.process(&mut buf);
        Spectrum {
            magnitudes: buf[..=self.fft_size / 2].iter().map(|c| c.norm()).collect(),
            bin_freqs: self.bin_freqs.clone(),
            fft_size: self.fft_size,
        }
    }
}

/// One-shot convenience wrapper around [`SpectrumAnalyzer`].
pub fn magnitude_spectrum(frame: &[f64], fft_size: usize, sample_rate: u32) -> Spectrum {
    SpectrumAnalyzer::new(fft_size, sample_rate).analyze(frame)
}
