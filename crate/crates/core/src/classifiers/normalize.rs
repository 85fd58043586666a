use crate::{Error, Result};

/// Per-dimension z-score fitted on training rows. Dimensions with zero
/// spread keep a unit divisor, so they are only centred.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyTrainingSet)?;
        let dim = first.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::SchemaMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            mean.iter_mut().zip(r).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for j in 0..dim {
                let d = r[j] - mean[j];
                var[j] += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn moments(rows: &[Vec<f64>], j: usize) -> (f64, f64) {
        let n = rows.len() as f64;
        let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let v = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
        (m, v.sqrt())
    }

    #[test]
    fn constant_column_goes_to_zero() {
        let rows = vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![3.0, 6.0]];
        let n = Normalizer::fit(&rows).unwrap();
        assert_eq!(n.std[0], 1.0);
        assert!(rows.iter().all(|r| n.apply(r)[0] == 0.0));
    }

    #[test]
    fn random_matrix_is_standardised() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..132).map(|j| rng.random_range(-1.0..1.0) * (j + 1) as f64 + j as f64).collect())
            .collect();
        let n = Normalizer::fit(&rows).unwrap();
        let out: Vec<Vec<f64>> = rows.iter().map(|r| n.apply(r)).collect();
        for j in 0..132 {
            let (m, s) = moments(&out, j);
            assert!(m.abs() < 1e-9 && (s - 1.0).abs() < 1e-9);
        }
        // already standardised data stays put
        let again = Normalizer::fit(&out).unwrap();
        for j in 0..132 {
            assert!(again.mean[j].abs() < 1e-9 && (again.std[j] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(Normalizer::fit(&[]), Err(Error::EmptyTrainingSet)));
    }
}
