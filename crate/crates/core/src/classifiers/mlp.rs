//! One-hidden-layer perceptron: ReLU hidden units, softmax over the seven
//! labels, trained by mini-batch gradient descent on the summed
//! cross-entropy `E = sum_i sum_j -t_ij ln y_ij` with early stopping on a
//! stratified validation hold-out.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::harness::Emotion;
use crate::{Error, Result};

const OUT: usize = Emotion::COUNT;
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    pub validation_fraction: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            learning_rate: 0.05,
            max_epochs: 200,
            patience: 10,
            batch_size: 32,
            validation_fraction: 0.1,
        }
    }
}

/// Weights are row-major: `w1[i * hidden + h]`, `w2[h * 7 + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Gradients with the same shapes as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpGradients {
    pub fn to_flat(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }
}

fn xavier(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize, n: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n).map(|_| rng.random_range(-limit..=limit)).collect()
}

impl MlpModel {
    /// Uniform Glorot initialisation; biases start at zero.
    pub fn init(input_dim: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            input_dim,
            hidden,
            w1: xavier(rng, input_dim, hidden, input_dim * hidden),
            b1: vec![0.0; hidden],
            w2: xavier(rng, hidden, OUT, hidden * OUT),
            b2: vec![0.0; OUT],
        }
    }

    pub fn num_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params());
        let (a, rest) = flat.split_at(self.w1.len());
        let (b, rest) = rest.split_at(self.b1.len());
        let (c, d) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(a);
        self.b1.copy_from_slice(b);
        self.w2.copy_from_slice(c);
        self.b2.copy_from_slice(d);
    }

    fn hidden_pre(&self, x: &[f64]) -> Vec<f64> {
        let h = self.hidden;
        let mut z = self.b1.clone();
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            let row = &self.w1[i * h..(i + 1) * h];
            z.iter_mut().zip(row).for_each(|(zj, w)| *zj += xi * w);
        }
        z
    }

    fn logits(&self, act: &[f64]) -> [f64; OUT] {
        let mut z = [0.0; OUT];
        z.copy_from_slice(&self.b2);
        for (hh, a) in act.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let row = &self.w2[hh * OUT..(hh + 1) * OUT];
            z.iter_mut().zip(row).for_each(|(zk, w)| *zk += a * w);
        }
        z
    }

    /// Softmax class probabilities.
    pub fn forward(&self, x: &[f64]) -> [f64; OUT] {
        let act: Vec<f64> = self.hidden_pre(x).into_iter().map(|v| v.max(0.0)).collect();
        softmax(&self.logits(&act))
    }

    pub fn predict(&self, x: &[f64]) -> Emotion {
        Emotion::argmax(&self.forward(x))
    }
}

fn softmax(z: &[f64; OUT]) -> [f64; OUT] {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p = [0.0; OUT];
    let mut s = 0.0;
    for k in 0..OUT {
        p[k] = (z[k] - m).exp();
        s += p[k];
    }
    p.iter_mut().for_each(|v| *v /= s);
    p
}

/// Summed cross-entropy over the batch and its exact gradient.
pub fn mlp_loss_and_grad(
    model: &MlpModel,
    rows: &[&[f64]],
    targets: &[Emotion],
) -> (f64, MlpGradients) {
    let h = model.hidden;
    let mut g = MlpGradients {
        w1: vec![0.0; model.w1.len()],
        b1: vec![0.0; h],
        w2: vec![0.0; model.w2.len()],
        b2: vec![0.0; OUT],
    };
    let mut loss = 0.0;
    for (x, t) in rows.iter().zip(targets) {
        let pre = model.hidden_pre(x);
        let act: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
        let y = softmax(&model.logits(&act));
        loss -= y[t.index()].max(PROB_FLOOR).ln();

        let mut dz2 = y;
        dz2[t.index()] -= 1.0;
        g.b2.iter_mut().zip(&dz2).for_each(|(b, d)| *b += d);
        let mut dz1 = vec![0.0; h];
        for hh in 0..h {
            let mut da = 0.0;
            for (k, d) in dz2.iter().enumerate() {
                g.w2[hh * OUT + k] += act[hh] * d;
                da += model.w2[hh * OUT + k] * d;
            }
            if pre[hh] > 0.0 {
                dz1[hh] = da;
            }
        }
        for (gb, d) in g.b1.iter_mut().zip(&dz1) {
            *gb += d;
        }
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            let row = &mut g.w1[i * h..(i + 1) * h];
            row.iter_mut().zip(&dz1).for_each(|(gw, d)| *gw += xi * d);
        }
    }
    (loss, g)
}

fn mean_loss(model: &MlpModel, data: &Dataset, idx: &[usize]) -> f64 {
    let loss: f64 = idx
        .iter()
        .map(|&i| -model.forward(&data.rows[i])[data.labels[i].index()].max(PROB_FLOOR).ln())
        .sum();
    loss / idx.len() as f64
}

/// Stratified hold-out: about `fraction` of each class with at least two rows.
fn validation_split(data: &Dataset, fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for e in Emotion::ALL {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == e).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            warn!("class {e} has a single row; kept out of the validation split");
            train.extend(idx);
            continue;
        }
        idx.shuffle(rng);
        let n_val = ((idx.len() as f64 * fraction).round() as usize).clamp(1, idx.len() - 1);
        val.extend_from_slice(&idx[..n_val]);
        train.extend_from_slice(&idx[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

/// Trains with early stopping and returns the best-validation snapshot.
pub fn mlp_train(data: &Dataset, cfg: &MlpConfig, seed: u64) -> Result<MlpModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if data.classes_present().len() < 2 {
        return Err(Error::SingleClass);
    }
    if cfg.learning_rate.is_nan() || cfg.learning_rate < 0.0 || cfg.hidden == 0 || cfg.batch_size == 0 {
        return Err(Error::InvalidParameter(
            "mlp needs learning_rate >= 0, hidden > 0, batch_size > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MlpModel::init(data.dim(), cfg.hidden, &mut rng);
    let (mut train_idx, val_idx) = validation_split(data, cfg.validation_fraction, &mut rng);
    let monitor = if val_idx.is_empty() {
        train_idx.clone()
    } else {
        val_idx
    };

    let mut best = model.clone();
    let mut best_loss = mean_loss(&model, data, &monitor);
    let mut stale = 0;
    for _ in 0..cfg.max_epochs {
        train_idx.shuffle(&mut rng);
        for batch in train_idx.chunks(cfg.batch_size) {
            let rows: Vec<&[f64]> = batch.iter().map(|&i| data.rows[i].as_slice()).collect();
            let labels: Vec<Emotion> = batch.iter().map(|&i| data.labels[i]).collect();
            let (_, g) = mlp_loss_and_grad(&model, &rows, &labels);
            let step = cfg.learning_rate / batch.len() as f64;
            let update = |p: &mut [f64], d: &[f64]| {
                p.iter_mut().zip(d).for_each(|(w, gw)| *w -= step * gw);
            };
            update(&mut model.w1, &g.w1);
            update(&mut model.b1, &g.b1);
            update(&mut model.w2, &g.w2);
            update(&mut model.b2, &g.b2);
        }
        let loss = mean_loss(&model, data, &monitor);
        if loss < best_loss {
            best_loss = loss;
            best = model.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    Ok(best)
}
