use super::extrema::{count_zero_crossings, find_extrema};
use super::spline::spline_envelope;
use super::{ImfDecomposition, SiftConfig, IMF_TOLERANCE};
use crate::signal_io::AudioBuffer;

/// Sifting cannot continue: fewer than two maxima or two minima.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Termination;

fn envelopes(signal: &[f64], reflect: usize) -> Result<(Vec<f64>, Vec<f64>), Termination> {
    let ext = find_extrema(signal);
    if ext.maxima.len() < 2 || ext.minima.len() < 2 {
        return Err(Termination);
    }
    let n = signal.len();
    let upper = spline_envelope(n, &ext.maxima, reflect).ok_or(Termination)?;
    let lower = spline_envelope(n, &ext.minima, reflect).ok_or(Termination)?;
    Ok((lower, upper))
}

/// One sifting step: `d(k) = x(k) - (e_min(k) + e_max(k)) / 2`.
pub fn sift_once(signal: &[f64], cfg: &SiftConfig) -> Result<Vec<f64>, Termination> {
    let (lower, upper) = envelopes(signal, cfg.boundary_reflect_count)?;
    Ok(signal
        .iter()
        .zip(lower.iter().zip(&upper))
        .map(|(x, (lo, hi))| x - 0.5 * (lo + hi))
        .collect())
}

/// IMF test with the default two-extremum boundary reflection.
pub fn is_imf(signal: &[f64], tol: f64) -> bool {
    is_imf_with(signal, tol, SiftConfig::default().boundary_reflect_count)
}

/// Extrema and zero-crossing counts differ by at most one and the mean
/// envelope stays within `tol * max|signal|`.
///
/// A signal with no extrema at all passes on the count test alone; one
/// whose maxima or minima are too few to span an envelope fails.
pub fn is_imf_with(signal: &[f64], tol: f64, reflect: usize) -> bool {
    let ext = find_extrema(signal);
    let n_ext = ext.count();
    let zc = count_zero_crossings(signal);
    if n_ext.abs_diff(zc) > 1 {
        return false;
    }
    if n_ext == 0 {
        return true;
    }
    let (Some(upper), Some(lower)) = (
        spline_envelope(signal.len(), &ext.maxima, reflect),
        spline_envelope(signal.len(), &ext.minima, reflect),
    ) else {
        return false;
    };
    let peak = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = lower
        .iter()
        .zip(&upper)
        .fold(0.0f64, |m, (lo, hi)| m.max((0.5 * (lo + hi)).abs()));
    worst <= tol * peak
}

/// Sifts `signal` until the detail qualifies as an IMF. Returns the IMF and
/// `signal - imf`.
///
/// Stops once the SD between successive details is below `cfg.sd_threshold`
/// and the detail passes [`is_imf`] at [`IMF_TOLERANCE`], or after
/// `cfg.max_sift_iters` steps. If envelopes become unbuildable first, the
/// detail is returned when it is an IMF and `Termination` otherwise.
pub fn extract_imf(signal: &[f64], cfg: &SiftConfig) -> Result<(Vec<f64>, Vec<f64>), Termination> {
    let mut current = signal.to_vec();
    for iter in 0..cfg.max_sift_iters {
        let detail = match sift_once(&current, cfg) {
            Ok(d) => d,
            Err(t) if iter == 0 => return Err(t),
            // a detail that can no longer be sifted is kept only if it is
            // already an IMF
            Err(t) if !is_imf_with(&current, IMF_TOLERANCE, cfg.boundary_reflect_count) => {
                return Err(t)
            }
            Err(_) => break,
        };
        let num: f64 = current
            .iter()
            .zip(&detail)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = current.iter().map(|a| a * a).sum();
        current = detail;
        let sd = if den > 0.0 { num / den } else { 0.0 };
        if sd < cfg.sd_threshold
            && is_imf_with(&current, IMF_TOLERANCE, cfg.boundary_reflect_count)
        {
            break;
        }
    }
    let remainder = signal.iter().zip(&current).map(|(s, c)| s - c).collect();
    Ok((current, remainder))
}

/// Decomposes a raw sample sequence.
pub fn decompose_signal(signal: &[f64], cfg: &SiftConfig) -> ImfDecomposition {
    let mut imfs = Vec::new();
    let mut remainder = signal.to_vec();
    if signal.len() >= 3 {
        while imfs.len() < cfg.max_imfs && find_extrema(&remainder).count() >= 3 {
            match extract_imf(&remainder, cfg) {
                Ok((imf, rest)) => {
                    imfs.push(imf);
                    remainder = rest;
                }
                Err(Termination) => break,
            }
        }
    }
    ImfDecomposition {
        imfs,
        residual: remainder,
        original_len: signal.len(),
    }
}

pub fn decompose(buffer: &AudioBuffer, cfg: &SiftConfig) -> ImfDecomposition {
    decompose_signal(&buffer.samples, cfg)
}

/// `sum_i c_i(k) + r(k)`.
pub fn reconstruct(decomp: &ImfDecomposition) -> Vec<f64> {
    let mut out = decomp.residual.clone();
    for imf in &decomp.imfs {
        out.iter_mut().zip(imf).for_each(|(o, v)| *o += v);
    }
    out
}
