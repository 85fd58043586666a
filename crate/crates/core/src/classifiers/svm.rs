//! Soft-margin kernel SVM.
//!
//! The dual `min 1/2 a'Qa - e'a` s.t. `0 <= a_i <= C`, `y'a = 0`, with
//! `Q_ij = y_i y_j K(x_i, x_j)`, is solved by sequential minimal
//! optimisation using maximal-violating-pair selection with second-order
//! gain for the second index. The decision function is
//! `f(x) = sum_i a_i y_i K(x_i, x) + b`.
//!
//! Multiclass prediction is one-vs-one over the classes present in training.

use std::collections::VecDeque;

use log::warn;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::harness::Emotion;
use crate::{Error, Result};

/// Numerical floor on the pair curvature `K_ii + K_jj - 2 K_ij`.
const TAU: f64 = 1e-12;
/// Memory budget for cached kernel rows, per solver.
const CACHE_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { sigma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { sigma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// `"rbf"` or `"linear"`.
    pub kernel: String,
    /// RBF width; `None` selects the median pairwise training distance.
    pub sigma: Option<f64>,
    pub c: f64,
    /// KKT violation tolerance.
    pub tolerance: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            kernel: "rbf".into(),
            sigma: None,
            c: 1.0,
            tolerance: 1e-3,
        }
    }
}

/// One binary machine in support-vector form.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    pub support_vectors: Vec<Vec<f64>>,
    /// `a_i * y_i` per support vector; `|coef| <= C`.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub c: f64,
}

impl BinarySvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Primal normal vector; only meaningful for the linear kernel.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != Kernel::Linear {
            return None;
        }
        let dim = self.support_vectors.first().map_or(0, Vec::len);
        let mut w = vec![0.0; dim];
        for (sv, c) in self.support_vectors.iter().zip(&self.dual_coef) {
            w.iter_mut().zip(sv).for_each(|(wi, x)| *wi += c * x);
        }
        Some(w)
    }
}

/// Full dual solution, kept for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// `0.5 a'Qa - sum(a)`, the negated dual.
    pub objective: f64,
    pub iterations: usize,
}

struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    kernel: Kernel,
    rows: Vec<Option<Vec<f64>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], kernel: Kernel) -> Self {
        let n = x.len();
        let capacity = (CACHE_BYTES / (8 * n.max(1))).max(2);
        Self {
            x,
            kernel,
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> &[f64] {
        if self.rows[i].is_none() {
            if self.order.len() >= self.capacity {
                if let Some(old) = self.order.pop_front() {
                    self.rows[old] = None;
                }
            }
            let xi = &self.x[i];
            let r = self.x.iter().map(|xj| self.kernel.eval(xi, xj)).collect();
            self.rows[i] = Some(r);
            self.order.push_back(i);
        }
        self.rows[i].as_deref().unwrap()
    }
}

/// Solves the binary dual. `y` holds +1 / -1.
pub fn smo_solve(x: &[Vec<f64>], y: &[f64], kernel: Kernel, c: f64, tol: f64) -> SmoSolution {
    let n = x.len();
    let diag: Vec<f64> = x.iter().map(|xi| kernel.eval(xi, xi)).collect();
    let mut cache = KernelCache::new(x, kernel);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = (10 * n).max(10_000);

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        if i == usize::MAX {
            break;
        }

        let ki = cache.row(i).to_vec();
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best_gain = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            gmin = gmin.min(v);
            let b = gmax - v;
            if b > 0.0 {
                let a = (diag[i] + diag[t] - 2.0 * ki[t]).max(TAU);
                let gain = -(b * b) / a;
                if gain < best_gain {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        if gmax - gmin < tol || j == usize::MAX {
            break;
        }
        iterations += 1;

        let kj = cache.row(j).to_vec();
        let quad = (diag[i] + diag[j] - 2.0 * ki[j]).max(TAU);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    // b = -rho, rho from free vectors or the midpoint of the feasible range
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    let objective = 0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();

    SmoSolution {
        alpha,
        bias: -rho,
        objective,
        iterations,
    }
}

/// Trains one binary machine; `y` must contain both +1 and -1.
pub fn svm_train_binary(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: Kernel,
    c: f64,
    tol: f64,
) -> Result<BinarySvm> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter("C must be positive".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("rows and labels differ in length".into()));
    }
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    let sol = smo_solve(x, y, kernel, c, tol);
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x[t].clone());
            dual_coef.push(a * y[t]);
        }
    }
    Ok(BinarySvm {
        support_vectors,
        dual_coef,
        bias: sol.bias,
        kernel,
        c,
    })
}

/// Median Euclidean distance over all pairs of a seeded subsample of at most
/// 1000 rows. Falls back to 1 when the median is zero.
pub fn median_pairwise_distance(rows: &[Vec<f64>], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = if rows.len() > 1000 {
        let mut v = sample(&mut rng, rows.len(), 1000).into_vec();
        v.sort_unstable();
        v
    } else {
        (0..rows.len()).collect()
    };
    let mut d = Vec::with_capacity(idx.len() * idx.len().saturating_sub(1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let s: f64 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            d.push(s.sqrt());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(|a, b| a.total_cmp(b));
    let m = d.len();
    let med = if m % 2 == 1 {
        d[m / 2]
    } else {
        0.5 * (d[m / 2 - 1] + d[m / 2])
    };
    if med > 0.0 {
        med
    } else {
        1.0
    }
}

/// One machine per unordered pair of classes present in training.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassSvm {
    /// `(positive class, negative class, machine)` in label order.
    pub machines: Vec<(Emotion, Emotion, BinarySvm)>,
    /// Used when only one class was present.
    pub fallback: Emotion,
}

fn resolve_kernel(cfg: &SvmConfig, data: &Dataset, seed: u64) -> Result<Kernel> {
    match cfg.kernel.to_ascii_lowercase().as_str() {
        "linear" => Ok(Kernel::Linear),
        "rbf" => {
            let sigma = cfg
                .sigma
                .unwrap_or_else(|| median_pairwise_distance(&data.rows, seed));
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Error::InvalidParameter("rbf sigma must be positive".into()));
            }
            Ok(Kernel::Rbf { sigma })
        }
        other => Err(Error::InvalidParameter(format!("unknown kernel `{other}`"))),
    }
}

pub fn svm_train_multiclass(data: &Dataset, cfg: &SvmConfig, seed: u64) -> Result<MulticlassSvm> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let classes = data.classes_present();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    for e in Emotion::ALL.iter().filter(|e| !classes.contains(e)) {
        warn!("class {e} absent from SVM training data; it can never be predicted");
    }
    let kernel = resolve_kernel(cfg, data, seed)?;

    let mut pairs = Vec::new();
    for (a, &pos) in classes.iter().enumerate() {
        for &neg in &classes[a + 1..] {
            pairs.push((pos, neg));
        }
    }
    let trained = crate::par::map(&pairs, |&(pos, neg)| {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row, &l) in data.rows.iter().zip(&data.labels) {
            if l == pos || l == neg {
                x.push(row.clone());
                y.push(if l == pos { 1.0 } else { -1.0 });
            }
        }
        svm_train_binary(&x, &y, kernel, cfg.c, cfg.tolerance).map(|m| (pos, neg, m))
    });
    Ok(MulticlassSvm {
        machines: trained.into_iter().collect::<Result<_>>()?,
        fallback: classes[0],
    })
}

/// Majority vote over the pairwise machines; ties go to the larger summed
/// |decision| among the tied classes, then to label order.
pub fn svm_predict(model: &MulticlassSvm, x: &[f64]) -> Emotion {
    if model.machines.is_empty() {
        return model.fallback;
    }
    let mut votes = [0usize; Emotion::COUNT];
    let mut strength = [0.0f64; Emotion::COUNT];
    for (pos, neg, m) in &model.machines {
        let f = m.decision(x);
        let winner = if f > 0.0 { *pos } else { *neg };
        votes[winner.index()] += 1;
        strength[winner.index()] += f.abs();
    }
    let top = *votes.iter().max().unwrap();
    let mut best: Option<usize> = None;
    for i in (0..Emotion::COUNT).filter(|&i| votes[i] == top) {
        match best {
            Some(b) if strength[i] <= strength[b] => {}
            _ => best = Some(i),
        }
    }
    Emotion::ALL[best.unwrap()]
}
