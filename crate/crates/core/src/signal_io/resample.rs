//! Rational windowed-sinc resampling.
//!
//! Each output sample sits at input position `n * M / L` (with `L/M` the
//! reduced target/source ratio); it is a weighted sum of the 32 input samples
//! around that position, weights being a Kaiser-windowed (beta = 8) sinc whose
//! cutoff tracks the lower of the two Nyquist rates. Weights are normalised to
//! unit sum so DC passes exactly away from the edges.

use super::AudioBuffer;

const TAPS: usize = 32;
const HALF: i64 = (TAPS / 2) as i64;
const KAISER_BETA: f64 = 8.0;
/// Passband edge as a fraction of the output Nyquist rate.
const ROLLOFF: f64 = 0.95;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Resamples to `target_rate`. Returns an identical copy when the rates match.
///
/// # Panics
/// If `target_rate` is zero.
pub fn resample(buffer: &AudioBuffer, target_rate: u32) -> AudioBuffer {
    assert!(target_rate > 0, "target rate must be positive");
    if target_rate == buffer.sample_rate || buffer.samples.is_empty() {
        return AudioBuffer {
            samples: buffer.samples.clone(),
            sample_rate: target_rate,
            source_path: buffer.source_path.clone(),
        };
    }

    let src = buffer.sample_rate as u64;
    let dst = target_rate as u64;
    let g = gcd(src, dst);
    let up = dst / g;
    let down = src / g;

    let input = &buffer.samples;
    let len_in = input.len();
    let out_len = (len_in as f64 * dst as f64 / src as f64).round() as usize;
    let cutoff = ROLLOFF * (dst as f64 / src as f64).min(1.0);
    let i0_beta = bessel_i0(KAISER_BETA);

    let mut out = Vec::with_capacity(out_len);
    let mut weights = [0.0f64; TAPS];
    for n in 0..out_len as u64 {
        let num = n * down;
        let base = (num / up) as i64;
        let frac = (num % up) as f64 / up as f64;

        let mut wsum = 0.0;
        for (j, w) in weights.iter_mut().enumerate() {
            let k = base - HALF + 1 + j as i64;
            let dist = (base - k) as f64 + frac;
            let u = dist / HALF as f64;
            let win = if u.abs() >= 1.0 {
                0.0
            } else {
                bessel_i0(KAISER_BETA * (1.0 - u * u).sqrt()) / i0_beta
            };
            *w = cutoff * sinc(cutoff * dist) * win;
            wsum += *w;
        }

        let mut acc = 0.0;
        for (j, w) in weights.iter().enumerate() {
            let k = base - HALF + 1 + j as i64;
            if k >= 0 && (k as usize) < len_in {
                acc += w * input[k as usize];
            }
        }
        out.push(acc / wsum);
    }

    AudioBuffer {
        samples: out,
        sample_rate: target_rate,
        source_path: buffer.source_path.clone(),
    }
}
