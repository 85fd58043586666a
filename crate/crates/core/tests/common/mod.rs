//! Reference implementations written from the defining formulas, kept
//! apart from the library code paths they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use emd_ser::harness::Emotion;

/// `|X_k|` for `k = 0..=n/2` of `frame` zero-padded to `n`, by direct sum.
pub fn dft_magnitudes(frame: &[f64], n: usize) -> Vec<f64> {
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &x) in frame.iter().enumerate() {
                let a = -2.0 * PI * (k * t % n) as f64 / n as f64;
                re += x * a.cos();
                im += x * a.sin();
            }
            (re * re + im * im).sqrt()
        })
        .collect()
}

fn dct2_ortho(v: &[f64], keep: usize) -> Vec<f64> {
    let n = v.len() as f64;
    (0..keep)
        .map(|k| {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(i, x)| x * (PI / n * (i as f64 + 0.5) * k as f64).cos())
                .sum();
            s * if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() }
        })
        .collect()
}

fn log_band_energies(mags: &[f64], freqs: &[f64], weight: impl Fn(usize, f64) -> f64, bands: usize) -> Vec<f64> {
    (0..bands)
        .map(|b| {
            let e: f64 = mags
                .iter()
                .zip(freqs)
                .map(|(m, &f)| weight(b, f) * m * m)
                .sum();
            (e + 1e-10).ln()
        })
        .collect()
}

/// 26 mel triangles on 0..8000 Hz, log energies, 13 DCT-II coefficients.
pub fn mfcc_oracle(mags: &[f64], sample_rate: f64) -> Vec<f64> {
    let n_fft = 2 * (mags.len() - 1);
    let freqs: Vec<f64> = (0..mags.len()).map(|k| k as f64 * sample_rate / n_fft as f64).collect();
    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let inv = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let top = mel(8000.0f64.min(sample_rate / 2.0));
    let edge = |i: usize| inv(top * i as f64 / 27.0);
    let w = |b: usize, f: f64| {
        let (lo, c, hi) = (edge(b), edge(b + 1), edge(b + 2));
        ((f - lo) / (c - lo)).min((hi - f) / (hi - c)).max(0.0)
    };
    dct2_ortho(&log_band_energies(mags, &freqs, w, 26), 13)
}

/// 32 gammatone magnitude responses, centres even on ERB-rate 50..8000 Hz.
pub fn gtcc_oracle(mags: &[f64], sample_rate: f64) -> Vec<f64> {
    let n_fft = 2 * (mags.len() - 1);
    let freqs: Vec<f64> = (0..mags.len()).map(|k| k as f64 * sample_rate / n_fft as f64).collect();
    let rate = |f: f64| 21.4 * (1.0 + 0.00437 * f).log10();
    let inv = |e: f64| (10f64.powf(e / 21.4) - 1.0) / 0.00437;
    let (lo, hi) = (rate(50.0), rate(8000.0f64.min(sample_rate / 2.0)));
    let centre = |b: usize| inv(lo + (hi - lo) * b as f64 / 31.0);
    let w = |b: usize, f: f64| {
        let fc = centre(b);
        let bw = 1.019 * 24.7 * (1.0 + 4.37 * fc / 1000.0);
        1.0 / (1.0 + ((f - fc) / bw).powi(2)).powi(2)
    };
    dct2_ortho(&log_band_energies(mags, &freqs, w, 32), 13)
}

/// Full sort of every training point, then 1/d voting over the first `k`.
pub fn knn_oracle(points: &[Vec<f64>], labels: &[Emotion], k: usize, q: &[f64]) -> Emotion {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let near = &d[..k];
    let zero: Vec<usize> = near.iter().filter(|(dist, _)| *dist == 0.0).map(|(_, i)| *i).collect();
    let mut score = [0.0; 7];
    if zero.is_empty() {
        for &(dist, i) in near {
            score[labels[i].index()] += 1.0 / dist;
        }
    } else {
        for i in zero {
            score[labels[i].index()] += 1.0;
        }
    }
    let mut best = 0;
    for c in 1..7 {
        if score[c] > score[best] {
            best = c;
        }
    }
    Emotion::ALL[best]
}

/// Soft-margin SVM dual solved by accelerated projected gradient ascent.
pub struct DualOracle {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective `sum(alpha) - 0.5 * alpha' Q alpha`.
    pub objective: f64,
}

/// Projection onto `{0 <= a <= c, y . a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let g = |nu: f64| -> f64 {
        v.iter().zip(y).map(|(vi, yi)| yi * (vi - nu * yi).clamp(0.0, c)).sum()
    };
    let (mut lo, mut hi) = (-1e6, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    v.iter().zip(y).map(|(vi, yi)| (vi - nu * yi).clamp(0.0, c)).collect()
}

pub fn svm_dual_oracle(x: &[Vec<f64>], y: &[f64], kernel: impl Fn(&[f64], &[f64]) -> f64, c: f64, iters: usize) -> DualOracle {
    let n = x.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * kernel(&x[i], &x[j])).collect())
        .collect();
    let qv = |a: &[f64]| -> Vec<f64> { q.iter().map(|r| r.iter().zip(a).map(|(u, v)| u * v).sum()).collect() };

    // largest eigenvalue of Q by power iteration sets the step
    let mut v = vec![1.0; n];
    let mut lambda = 1.0;
    for _ in 0..500 {
        let w = qv(&v);
        lambda = w.iter().map(|t| t * t).sum::<f64>().sqrt();
        if lambda == 0.0 {
            break;
        }
        v = w.iter().map(|t| t / lambda).collect();
    }
    let step = 1.0 / lambda.max(1e-12);

    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let g = qv(&z);
        let cand: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi + step * (1.0 - gi)).collect();
        let next = project(&cand, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next.iter().zip(&a).map(|(nx, ax)| nx + (t - 1.0) / t_next * (nx - ax)).collect();
        a = next;
        t = t_next;
    }

    let qa = qv(&a);
    let objective = a.iter().sum::<f64>() - 0.5 * a.iter().zip(&qa).map(|(u, v)| u * v).sum::<f64>();
    // f(x_i) without bias
    let f: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| a[j] * y[j] * kernel(&x[j], &x[i])).sum())
        .collect();
    let eps = 1e-6 * c;
    let free: Vec<usize> = (0..n).filter(|&i| a[i] > eps && a[i] < c - eps).collect();
    let bias = if free.is_empty() {
        let sv: Vec<usize> = (0..n).filter(|&i| a[i] > eps).collect();
        sv.iter().map(|&i| y[i] - f[i]).sum::<f64>() / sv.len().max(1) as f64
    } else {
        free.iter().map(|&i| y[i] - f[i]).sum::<f64>() / free.len() as f64
    };
    DualOracle { alpha: a, bias, objective }
}

impl DualOracle {
    pub fn decision(&self, x: &[Vec<f64>], y: &[f64], kernel: impl Fn(&[f64], &[f64]) -> f64, q: &[f64]) -> f64 {
        self.alpha
            .iter()
            .zip(x.iter().zip(y))
            .map(|(a, (xi, yi))| a * yi * kernel(xi, q))
            .sum::<f64>()
            + self.bias
    }
}

/// Two Gaussian clouds in 2-D separated by the line `x0 + x1 = 0` with a
/// clear margin; labels are +1 above, -1 below.
pub fn separable_2d(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    while x.len() < n {
        let p: Vec<f64> = vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
        let s = p[0] + p[1];
        if s.abs() < 1.0 {
            continue;
        }
        y.push(if s > 0.0 { 1.0 } else { -1.0 });
        x.push(p);
    }
    (x, y)
}

/// Seven descriptors by direct summation over `(f_k, s_k)`, in the order
/// centroid, spread, entropy, flux, rolloff, flatness, skewness.
pub fn descriptors_oracle(s: &[f64], f: &[f64], prev: Option<&[f64]>, frac: f64) -> [f64; 7] {
    let n = s.len();
    let flux = prev.map_or(0.0, |p| (0..n).map(|k| (s[k] - p[k]).powi(2)).sum::<f64>().sqrt());
    let sum_s: f64 = s.iter().sum();
    if sum_s == 0.0 {
        return [0.0, 0.0, 0.0, flux, 0.0, 0.0, 0.0];
    }
    let mu = (0..n).map(|k| f[k] * s[k]).sum::<f64>() / sum_s;
    let spread = ((0..n).map(|k| (f[k] - mu).powi(2) * s[k]).sum::<f64>() / sum_s).sqrt();
    let skew = if spread > 0.0 {
        (0..n).map(|k| (f[k] - mu).powi(3) * s[k]).sum::<f64>() / (spread.powi(3) * sum_s)
    } else {
        0.0
    };
    let pow: Vec<f64> = s.iter().map(|v| v * v).collect();
    let total: f64 = pow.iter().sum();
    let entropy = -pow
        .iter()
        .map(|p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
        / (n as f64).ln();
    let mut rolloff = f[n - 1];
    for r in 0..n {
        if pow[..=r].iter().sum::<f64>() >= frac * total {
            rolloff = f[r];
            break;
        }
    }
    let geo = (pow.iter().map(|p| (p + 1e-10).ln()).sum::<f64>() / n as f64).exp();
    let flatness = (geo / (total / n as f64)).min(1.0);
    [mu, spread, entropy, flux, rolloff, flatness, skew]
}
