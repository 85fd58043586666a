/// Least-squares slope of each column over `window` frames centred on
/// each row, with the first and last rows replicated past the edges:
/// `d_t = sum_m m * c_{t+m} / sum_m m^2`, `m = -M..=M`, `M = (window-1)/2`.
///
/// # Panics
/// If `window` is even or below 3.
pub fn delta(track: &[Vec<f64>], window: usize) -> Vec<Vec<f64>> {
    assert!(window >= 3 && window % 2 == 1, "window must be odd and >= 3");
    let n = track.len();
    if n == 0 {
        return Vec::new();
    }
    let half = (window - 1) / 2;
    let denom: f64 = (1..=half).map(|m| 2.0 * (m * m) as f64).sum();
    let dims = track[0].len();
    let at = |t: isize| &track[t.clamp(0, n as isize - 1) as usize];
    (0..n as isize)
        .map(|t| {
            let mut d = vec![0.0; dims];
            for m in 1..=half as isize {
                let (fwd, back) = (at(t + m), at(t - m));
                for j in 0..dims {
                    d[j] += m as f64 * (fwd[j] - back[j]);
                }
            }
            d.iter_mut().for_each(|v| *v /= denom);
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_track_has_zero_delta() {
        let track = vec![vec![2.0, -1.0]; 12];
        assert!(delta(&track, 9).iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_track_interior_slope() {
        let a = 0.75;
        let track: Vec<Vec<f64>> = (0..20).map(|t| vec![a * t as f64]).collect();
        let d = delta(&track, 9);
        for row in &d[4..16] {
            assert!((row[0] - a).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_track() {
        assert!(delta(&[], 5).is_empty());
    }

    /// Ordinary least-squares slope of (m, y_m) pairs, solved from the
    /// normal equations rather than the closed-form symmetric sum.
    fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn matches_regression_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let track: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let d = delta(&track, 9);
        for t in 0..10i64 {
            for j in 0..3 {
                let xs: Vec<f64> = (-4..=4).map(|m| m as f64).collect();
                let ys: Vec<f64> = (-4..=4)
                    .map(|m| track[(t + m).clamp(0, 9) as usize][j])
                    .collect();
                assert!((d[t as usize][j] - ols_slope(&xs, &ys)).abs() < 1e-12);
            }
        }
    }
}
