//! Audio decoding, resampling, framing and magnitude spectra.

mod frame;
mod resample;
mod spectrum;
mod wav;

pub use frame::{frame_signal, frame_signal_raw, hamming_periodic, FrameSequence};
pub use resample::resample;
pub use spectrum::{magnitude_spectrum, Spectrum, SpectrumAnalyzer};
pub use wav::{load_wav, write_wav, WavEncoding};

/// Default analysis frame: 25 ms at 16 kHz.
pub const FRAME_LEN: usize = 400;
/// Default hop: 10 ms at 16 kHz.
pub const HOP: usize = 160;
/// Default transform size.
pub const FFT_SIZE: usize = 512;

/// Mono audio, samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub source_path: String,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
            source_path: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}
