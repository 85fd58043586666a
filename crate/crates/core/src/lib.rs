//! Speech emotion recognition on Empirical-Mode-Decomposition-conditioned
//! audio features.
//!
//! The crate is organised as a pipeline:
//!
//! - [`signal_io`] decodes WAV audio, resamples to 16 kHz, frames and
//!   transforms it.
//! - [`emd`] splits a signal into intrinsic mode functions plus a residual.
//! - [`features`] turns an utterance into a 132-dim mean/variance vector of
//!   66 frame-level sub-features.
//! - [`classifiers`] holds the four learners (kernel SVM, MLP, weighted KNN,
//!   bagged trees), feature standardisation and model persistence.
//! - [`harness`] ingests CREMA-D/TESS style corpora, splits, caches
//!   features, trains, evaluates and drives the CLI.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise.

pub mod classifiers;
pub mod emd;
mod error;
pub mod features;
pub mod harness;
pub mod par;
pub mod signal_io;

pub use error::{Error, Result};

/// Canonical processing rate; every loaded file is resampled to it.
pub const CANONICAL_RATE: u32 = 16_000;
