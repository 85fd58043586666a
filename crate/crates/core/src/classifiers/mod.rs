//! Feature standardisation and the four learners: one-vs-one kernel SVM
//! trained by SMO, a one-hidden-layer MLP on summed cross-entropy,
//! inverse-distance KNN, and a bagged random-subspace tree ensemble.
//! [`persist`] reads and writes the `EMVX` model container.

pub mod forest;
pub mod knn;
pub mod mlp;
mod normalize;
pub mod persist;
pub mod svm;

use serde::{Deserialize, Serialize};

pub use forest::{forest_predict, forest_train, ForestConfig, ForestModel};
pub use knn::{knn_predict, KnnModel, KnnWeighting};
pub use mlp::{mlp_loss_and_grad, mlp_train, MlpConfig, MlpGradients, MlpModel};
pub use normalize::Normalizer;
pub use svm::{
    median_pairwise_distance, svm_predict, svm_train_binary, svm_train_multiclass, BinarySvm,
    Kernel, MulticlassSvm, SvmConfig,
};

use crate::harness::Emotion;
use crate::{Error, Result};

/// Labelled rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Emotion>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Emotion>) -> Self {
        assert_eq!(rows.len(), labels.len(), "rows and labels differ in length");
        Self { rows, labels }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn class_counts(&self) -> [usize; Emotion::COUNT] {
        let mut c = [0; Emotion::COUNT];
        for l in &self.labels {
            c[l.index()] += 1;
        }
        c
    }

    pub fn classes_present(&self) -> Vec<Emotion> {
        let c = self.class_counts();
        Emotion::ALL.into_iter().filter(|e| c[e.index()] > 0).collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Which learner to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Svm,
    Mlp,
    Knn,
    Forest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Svm, ModelKind::Mlp, ModelKind::Knn, ModelKind::Forest];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Mlp => "mlp",
            ModelKind::Knn => "knn",
            ModelKind::Forest => "forest",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(ModelKind::Svm),
            "mlp" | "nn" => Ok(ModelKind::Mlp),
            "knn" => Ok(ModelKind::Knn),
            "forest" | "ensemble" => Ok(ModelKind::Forest),
            _ => Err(Error::InvalidParameter(format!("unknown model kind `{s}`"))),
        }
    }
}

/// Hyperparameters for every learner.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub svm: SvmConfig,
    pub mlp: MlpConfig,
    pub knn: KnnConfig,
    pub forest: ForestConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 10 }
    }
}

/// A fitted learner of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Svm(MulticlassSvm),
    Mlp(MlpModel),
    Knn(KnnModel),
    Forest(ForestModel),
}

impl Classifier {
    pub fn kind(&self) -> ModelKind {
        match self {
            Classifier::Svm(_) => ModelKind::Svm,
            Classifier::Mlp(_) => ModelKind::Mlp,
            Classifier::Knn(_) => ModelKind::Knn,
            Classifier::Forest(_) => ModelKind::Forest,
        }
    }

    /// Predicts one already-normalised row.
    pub fn predict(&self, row: &[f64]) -> Emotion {
        match self {
            Classifier::Svm(m) => svm_predict(m, row),
            Classifier::Mlp(m) => m.predict(row),
            Classifier::Knn(m) => knn_predict(m, row),
            Classifier::Forest(m) => forest_predict(m, row),
        }
    }
}

/// Normaliser plus classifier; accepts raw feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub normalizer: Normalizer,
    pub classifier: Classifier,
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        self.normalizer.dim()
    }

    pub fn predict(&self, row: &[f64]) -> Result<Emotion> {
        if row.len() != self.dim() {
            return Err(Error::SchemaMismatch {
                expected: self.dim(),
                found: row.len(),
            });
        }
        Ok(self.classifier.predict(&self.normalizer.apply(row)))
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Emotion>> {
        if let Some(bad) = rows.iter().find(|r| r.len() != self.dim()) {
            return Err(Error::SchemaMismatch {
                expected: self.dim(),
                found: bad.len(),
            });
        }
        Ok(crate::par::map(rows, |r| {
            self.classifier.predict(&self.normalizer.apply(r))
        }))
    }
}

/// Fits the normaliser on `train` and trains the requested learner on the
/// normalised rows.
pub fn train_model(
    kind: ModelKind,
    train: &Dataset,
    cfg: &ClassifierConfig,
    seed: u64,
) -> Result<TrainedModel> {
    let normalizer = Normalizer::fit(&train.rows)?;
    let normed = Dataset::new(
        train.rows.iter().map(|r| normalizer.apply(r)).collect(),
        train.labels.clone(),
    );
    let classifier = match kind {
        ModelKind::Svm => Classifier::Svm(svm_train_multiclass(&normed, &cfg.svm, seed)?),
        ModelKind::Mlp => Classifier::Mlp(mlp_train(&normed, &cfg.mlp, seed)?),
        ModelKind::Knn => Classifier::Knn(KnnModel::new(normed, cfg.knn.k)?),
        ModelKind::Forest => Classifier::Forest(forest_train(&normed, &cfg.forest, seed)?),
    };
    Ok(TrainedModel {
        normalizer,
        classifier,
    })
}
