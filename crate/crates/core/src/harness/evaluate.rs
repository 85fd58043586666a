use std::fmt::Write as _;
use std::path::Path;

use super::Emotion;
use crate::classifiers::TrainedModel;
use crate::features::UtteranceFeatures;
use crate::{Error, Result};

/// Rows are true classes, columns predicted classes, both in label order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[u64; Emotion::COUNT]; Emotion::COUNT],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Emotion, Emotion)>) -> Self {
        let mut m = Self::default();
        for (t, p) in pairs {
            m.record(t, p);
        }
        m
    }

    pub fn record(&mut self, truth: Emotion, predicted: Emotion) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..Emotion::COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Zero for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.trace() as f64 / n as f64,
        }
    }

    pub fn row_sums(&self) -> [u64; Emotion::COUNT] {
        self.counts.map(|r| r.iter().sum())
    }

    /// Aligned text grid with a recall column.
    pub fn to_text(&self) -> String {
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1)
            .max(4);
        let mut s = String::new();
        let _ = write!(s, "{:>10}", "true\\pred");
        for e in Emotion::ALL {
            let _ = write!(s, " {:>width$}", e.code());
        }
        let _ = writeln!(s, " {:>7}", "recall");
        let sums = self.row_sums();
        for (i, e) in Emotion::ALL.iter().enumerate() {
            let _ = write!(s, "{:>10}", e.code());
            for c in self.counts[i] {
                let _ = write!(s, " {c:>width$}");
            }
            if sums[i] == 0 {
                let _ = writeln!(s, " {:>7}", "-");
            } else {
                let r = 100.0 * self.counts[i][i] as f64 / sums[i] as f64;
                let _ = writeln!(s, " {:>6.1}%", r);
            }
        }
        let _ = writeln!(s, "accuracy {:.4} ({}/{})", self.accuracy(), self.trace(), self.total());
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("true\\pred");
        for e in Emotion::ALL {
            s.push(',');
            s.push_str(e.code());
        }
        s.push('\n');
        for (i, e) in Emotion::ALL.iter().enumerate() {
            s.push_str(e.code());
            for c in self.counts[i] {
                let _ = write!(s, ",{c}");
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Scores labelled rows; the model applies its own normaliser.
pub fn evaluate(model: &TrainedModel, rows: &[UtteranceFeatures]) -> Result<ConfusionMatrix> {
    let truth = rows
        .iter()
        .map(|r| {
            r.label
                .ok_or_else(|| Error::InvalidParameter(format!("row `{}` has no label", r.source_path)))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone()).collect();
    let preds = model.predict_batch(&values)?;
    Ok(ConfusionMatrix::from_pairs(truth.into_iter().zip(preds)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train_model, ClassifierConfig, Dataset, ModelKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_predictor_is_diagonal() {
        let pairs: Vec<_> = (0..35).map(|i| (Emotion::ALL[i % 7], Emotion::ALL[i % 7])).collect();
        let m = ConfusionMatrix::from_pairs(pairs);
        assert_eq!(m.accuracy(), 1.0);
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(m.counts[i][j], if i == j { 5 } else { 0 });
            }
        }
    }

    #[test]
    fn constant_predictor_on_balanced_data() {
        let m = ConfusionMatrix::from_pairs((0..70).map(|i| (Emotion::ALL[i % 7], Emotion::Anger)));
        assert!((m.accuracy() - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.row_sums(), [10; 7]);
        assert_eq!(m.total(), 70);
    }

    #[test]
    fn text_and_csv_shapes() {
        let m = ConfusionMatrix::from_pairs([(Emotion::Fear, Emotion::Sadness), (Emotion::Fear, Emotion::Fear)]);
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 8);
        assert_eq!(csv.lines().nth(3).unwrap(), "FEA,0,0,1,0,0,0,1");
        let text = m.to_text();
        assert!(text.contains("50.0%"));
        assert!(text.contains("accuracy 0.5000 (1/2)"));
        assert_eq!(ConfusionMatrix::default().accuracy(), 0.0);
    }

    #[test]
    fn svm_row_sums_match_test_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rows = Vec::new();
        let mut test = Vec::new();
        let mut expected = [0u64; 7];
        for (c, e) in Emotion::ALL.into_iter().enumerate() {
            let centre: Vec<f64> = (0..6).map(|d| if d == c % 6 { 8.0 } else { 0.0 } + c as f64).collect();
            for k in 0..(8 + c) {
                let x: Vec<f64> = centre.iter().map(|m| m + rng.random_range(-1.0..1.0)).collect();
                if k % 3 == 0 {
                    expected[c] += 1;
                    test.push(UtteranceFeatures { values: x, label: Some(e), source_path: String::new() });
                } else {
                    rows.push((x, e));
                }
            }
        }
        let data = Dataset::new(rows.iter().map(|r| r.0.clone()).collect(), rows.iter().map(|r| r.1).collect());
        let model = train_model(ModelKind::Svm, &data, &ClassifierConfig::default(), 1).unwrap();
        let m = evaluate(&model, &test).unwrap();
        assert_eq!(m.row_sums(), expected);
        assert_eq!(m.total() as usize, test.len());

        let wide = UtteranceFeatures { values: vec![0.0; 7], label: Some(Emotion::Anger), source_path: String::new() };
        assert!(matches!(evaluate(&model, &[wide]), Err(Error::SchemaMismatch { .. })));
    }
}
