//! Frame-level acoustic features and their utterance-level aggregate.
//!
//! Every frame yields a fixed 66-entry vector (see [`layout`]); an utterance
//! is summarised by the per-entry mean over frames followed by the
//! per-entry population variance, 132 values in all.

mod cepstral;
mod delta;
mod descriptors;
mod periodicity;
mod utterance;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cepstral::{dct_ii_orthonormal, erb, erb_rate, gtcc, hz_to_mel, mel_to_hz, mfcc, CepstralBank};
pub use delta::delta;
pub use descriptors::{spectral_descriptors, SpectralDescriptors};
pub use periodicity::{log_energy, pitch_and_harmonic_ratio};
pub use utterance::{aggregate, apply_source_mode, extract_utterance, frame_features};

use crate::harness::Emotion;
use crate::{Error, Result};

pub const FRAME_DIM: usize = 66;
pub const UTTERANCE_DIM: usize = 2 * FRAME_DIM;
/// Width of each cepstral block in the frame layout.
pub const CEPSTRAL_BLOCK: usize = 13;

/// Offsets into the 66-entry frame vector.
pub mod layout {
    pub const MFCC: usize = 0;
    pub const DELTA_MFCC: usize = 13;
    pub const GTCC: usize = 26;
    pub const DELTA_GTCC: usize = 39;
    pub const CENTROID: usize = 52;
    pub const SPREAD: usize = 53;
    pub const ENTROPY: usize = 54;
    pub const FLUX: usize = 55;
    pub const ROLLOFF: usize = 56;
    pub const FLATNESS: usize = 57;
    pub const SKEWNESS: usize = 58;
    pub const HARMONIC_RATIO: usize = 59;
    pub const PITCH: usize = 60;
    pub const LOG_ENERGY: usize = 61;
    /// Always zero; pads the layout to 66 entries.
    pub const RESERVED: std::ops::Range<usize> = 62..66;
}

/// Which part of the EMD output feeds feature extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SourceMode {
    /// The signal as loaded.
    Raw,
    /// Signal minus the EMD residual, i.e. the sum of all IMFs.
    #[default]
    EmdDetrend,
    /// Sum of the first N IMFs.
    ImfSum(usize),
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceMode::Raw => write!(f, "raw"),
            SourceMode::EmdDetrend => write!(f, "emd-detrend"),
            SourceMode::ImfSum(n) => write!(f, "imf-sum:{n}"),
        }
    }
}

impl FromStr for SourceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "raw" => Ok(SourceMode::Raw),
            "emd-detrend" => Ok(SourceMode::EmdDetrend),
            other => other
                .strip_prefix("imf-sum:")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(SourceMode::ImfSum)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown source mode `{s}`"))),
        }
    }
}

impl TryFrom<String> for SourceMode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SourceMode> for String {
    fn from(m: SourceMode) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// At most 13; unused slots of the block stay zero.
    pub n_mfcc: usize,
    pub n_gtcc: usize,
    pub n_mel_filters: usize,
    pub n_gt_filters: usize,
    /// Odd, at least 3.
    pub delta_window: usize,
    pub rolloff_fraction: f64,
    pub pitch_min_hz: f64,
    pub pitch_max_hz: f64,
    pub source_mode: SourceMode,
    pub frame_len: usize,
    pub hop: usize,
    pub fft_size: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            n_mfcc: 13,
            n_gtcc: 13,
            n_mel_filters: 26,
            n_gt_filters: 32,
            delta_window: 9,
            rolloff_fraction: 0.95,
            pitch_min_hz: 50.0,
            pitch_max_hz: 400.0,
            source_mode: SourceMode::EmdDetrend,
            frame_len: crate::signal_io::FRAME_LEN,
            hop: crate::signal_io::HOP,
            fft_size: crate::signal_io::FFT_SIZE,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.n_mfcc == 0 || self.n_mfcc > self.n_mel_filters || self.n_mfcc > CEPSTRAL_BLOCK {
            return bad("n_mfcc must be in 1..=min(13, n_mel_filters)");
        }
        if self.n_gtcc == 0 || self.n_gtcc > self.n_gt_filters || self.n_gtcc > CEPSTRAL_BLOCK {
            return bad("n_gtcc must be in 1..=min(13, n_gt_filters)");
        }
        if self.delta_window < 3 || self.delta_window.is_multiple_of(2) {
            return bad("delta_window must be odd and at least 3");
        }
        if !(self.rolloff_fraction > 0.0 && self.rolloff_fraction < 1.0) {
            return bad("rolloff_fraction must lie in (0, 1)");
        }
        if !(self.pitch_min_hz > 0.0 && self.pitch_min_hz < self.pitch_max_hz) {
            return bad("pitch range must satisfy 0 < min < max");
        }
        if self.frame_len < 2 || self.hop == 0 || self.hop > self.frame_len {
            return bad("frame_len >= 2 and 0 < hop <= frame_len required");
        }
        if !self.fft_size.is_power_of_two() || self.fft_size < self.frame_len {
            return bad("fft_size must be a power of two no smaller than frame_len");
        }
        Ok(())
    }
}

/// One analysis frame's 66 features.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures(pub [f64; FRAME_DIM]);

/// 132-entry utterance summary: 66 means then 66 population variances.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceFeatures {
    pub values: Vec<f64>,
    pub label: Option<Emotion>,
    pub source_path: String,
}

impl UtteranceFeatures {
    pub fn means(&self) -> &[f64] {
        &self.values[..FRAME_DIM]
    }

    pub fn variances(&self) -> &[f64] {
        &self.values[FRAME_DIM..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_mode_text() {
        for m in [SourceMode::Raw, SourceMode::EmdDetrend, SourceMode::ImfSum(3)] {
            assert_eq!(m.to_string().parse::<SourceMode>().unwrap(), m);
        }
        assert_eq!("emd_detrend".parse::<SourceMode>().unwrap(), SourceMode::EmdDetrend);
        assert!("imf-sum:0".parse::<SourceMode>().is_err());
        assert!("bogus".parse::<SourceMode>().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        FeatureConfig::default().validate().unwrap();
        let bad = FeatureConfig {
            delta_window: 4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
