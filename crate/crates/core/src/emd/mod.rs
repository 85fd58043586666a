//! Empirical Mode Decomposition.
//!
//! A signal `x(k)` is split into intrinsic mode functions `c_i(k)` and a
//! residual `r(k)` with `x(k) = sum_i c_i(k) + r(k)`. Each IMF is found by
//! sifting: subtract the mean of the cubic-spline envelopes through the
//! local maxima and minima until the detail behaves like an IMF, then repeat
//! on what is left.

mod extrema;
mod sift;
mod spline;

use serde::{Deserialize, Serialize};

pub use extrema::{count_zero_crossings, find_extrema, ExtremaSet};
pub use sift::{
    decompose, decompose_signal, extract_imf, is_imf, is_imf_with, reconstruct, sift_once,
    Termination,
};
pub use spline::{natural_cubic_spline, spline_envelope};

/// Mean-envelope tolerance used when `is_imf` gates sifting.
pub const IMF_TOLERANCE: f64 = 0.1;

/// Sifting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiftConfig {
    /// Cauchy-type stop: `sum (d_prev - d_new)^2 / sum d_prev^2` below this.
    pub sd_threshold: f64,
    /// Hard cap on sifts per IMF; only long, dense signals come near it.
    pub max_sift_iters: usize,
    pub max_imfs: usize,
    /// Extrema mirrored beyond each signal end before spline fitting.
    pub boundary_reflect_count: usize,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.2,
            max_sift_iters: 1000,
            max_imfs: 10,
            boundary_reflect_count: 2,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.sd_threshold.is_nan() || self.sd_threshold <= 0.0 {
            return Err(crate::Error::InvalidParameter(
                "sd_threshold must be positive".into(),
            ));
        }
        if self.max_sift_iters == 0 || self.max_imfs == 0 {
            return Err(crate::Error::InvalidParameter(
                "max_sift_iters and max_imfs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// IMFs in extraction order (highest frequency first) plus the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfDecomposition {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub original_len: usize,
}

impl ImfDecomposition {
    pub fn num_imfs(&self) -> usize {
        self.imfs.len()
    }

    /// Sum of the first `n` IMFs (all of them if `n` exceeds the count).
    pub fn partial_sum(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.original_len];
        for imf in self.imfs.iter().take(n) {
            out.iter_mut().zip(imf).for_each(|(o, v)| *o += v);
        }
        out
    }
}
