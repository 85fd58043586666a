use super::cepstral::LOG_FLOOR;

/// Autocorrelation pitch estimate and harmonic ratio.
///
/// `rho(tau) = sum x_t x_{t+tau} / sqrt(sum x_t^2 * sum x_{t+tau}^2)` over
/// lags `sample_rate/max_hz ..= min(sample_rate/min_hz, len-1)`. The harmonic
/// ratio is `max(0, max rho)`; pitch is `sample_rate / argmax rho`, taking
/// the shortest lag among numerically tied maxima. Silent frames give
/// `(0, 0)`.
pub fn pitch_and_harmonic_ratio(
    frame: &[f64],
    sample_rate: u32,
    min_hz: f64,
    max_hz: f64,
) -> (f64, f64) {
    let n = frame.len();
    let rate = sample_rate as f64;
    let lo = (rate / max_hz).round().max(1.0) as usize;
    let hi = ((rate / min_hz).round() as usize).min(n.saturating_sub(1));
    if lo > hi || frame.iter().all(|&v| v == 0.0) {
        return (0.0, 0.0);
    }

    // prefix sums of squares give both window energies in O(1)
    let mut sq = vec![0.0; n + 1];
    for (i, v) in frame.iter().enumerate() {
        sq[i + 1] = sq[i] + v * v;
    }

    let mut best_lag = 0usize;
    let mut best = f64::NEG_INFINITY;
    for lag in lo..=hi {
        let head = sq[n - lag];
        let tail = sq[n] - sq[lag];
        let denom = (head * tail).sqrt();
        if denom <= 0.0 {
            continue;
        }
        let num: f64 = frame[..n - lag]
            .iter()
            .zip(&frame[lag..])
            .map(|(a, b)| a * b)
            .sum();
        let rho = num / denom;
        if rho > best + 1e-9 {
            best = rho;
            best_lag = lag;
        }
    }
    if best_lag == 0 {
        return (0.0, 0.0);
    }
    (rate / best_lag as f64, best.clamp(0.0, 1.0))
}

/// `ln(sum x^2 + 1e-10)`.
pub fn log_energy(frame: &[f64]) -> f64 {
    (frame.iter().map(|v| v * v).sum::<f64>() + LOG_FLOOR).ln()
}
