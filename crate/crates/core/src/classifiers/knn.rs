use super::Dataset;
use crate::harness::Emotion;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnnWeighting {
    /// Each neighbour votes with weight `1/d`.
    #[default]
    InverseDistance,
    /// Plain majority vote.
    Uniform,
}

/// Stored training points.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Emotion>,
    pub k: usize,
    pub weighting: KnnWeighting,
}

impl KnnModel {
    /// `k` is clamped to the number of points.
    pub fn new(data: Dataset, k: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let k = k.min(data.len());
        Ok(Self {
            points: data.rows,
            labels: data.labels,
            k,
            weighting: KnnWeighting::InverseDistance,
        })
    }
}

/// Nearest `k` by Euclidean distance, ties broken by lower row index.
/// An exact match short-circuits to a vote among the zero-distance
/// neighbours; otherwise each class scores the sum of its neighbours'
/// weights. Remaining ties go to label order.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Emotion {
    let mut dist: Vec<(f64, usize)> = model
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), i)
        })
        .collect();
    let k = model.k.min(dist.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, cmp);
        dist.truncate(k);
    }
    dist.sort_by(cmp);

    let mut scores = [0.0f64; Emotion::COUNT];
    if dist[0].0 == 0.0 {
        for &(d, i) in &dist {
            if d == 0.0 {
                scores[model.labels[i].index()] += 1.0;
            }
        }
        return Emotion::argmax(&scores);
    }
    for &(d, i) in &dist {
        scores[model.labels[i].index()] += match model.weighting {
            KnnWeighting::InverseDistance => 1.0 / d,
            KnnWeighting::Uniform => 1.0,
        };
    }
    Emotion::argmax(&scores)
}
