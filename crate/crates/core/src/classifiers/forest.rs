//! Bagged random-subspace decision trees with Gini splits.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::harness::Emotion;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    /// Candidate dimensions per node; `None` means `ceil(sqrt(dim))`.
    pub features_per_split: Option<usize>,
    /// Draw a bootstrap sample per tree; off only as a test hook.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            features_per_split: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        counts: [u64; Emotion::COUNT],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in an arena; index 0 is the root. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> Emotion {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => {
                    let scores = counts.map(|c| c as f64);
                    return Emotion::argmax(&scores);
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, at: usize) -> usize {
            match &t.nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

fn gini(counts: &[u64; Emotion::COUNT], n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn class_counts(data: &Dataset, idx: &[usize]) -> [u64; Emotion::COUNT] {
    let mut c = [0u64; Emotion::COUNT];
    for &i in idx {
        c[data.labels[i].index()] += 1;
    }
    c
}

struct Builder<'a> {
    data: &'a Dataset,
    max_depth: Option<usize>,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    /// Best (gain, threshold) over `features`, or `None` if every feature
    /// is constant on `idx`.
    fn best_split(&self, idx: &[usize], features: &[usize], parent: f64) -> Option<(f64, usize, f64)> {
        let n = idx.len() as u64;
        let total = class_counts(self.data, idx);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted: Vec<(f64, Emotion)> = Vec::with_capacity(idx.len());
        for &f in features {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.data.rows[i][f], self.data.labels[i])));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0u64; Emotion::COUNT];
            for s in 0..sorted.len() - 1 {
                left[sorted[s].1.index()] += 1;
                let (lo, hi) = (sorted[s].0, sorted[s + 1].0);
                if lo == hi {
                    continue;
                }
                let nl = s as u64 + 1;
                let nr = n - nl;
                let mut right = total;
                for k in 0..Emotion::COUNT {
                    right[k] -= left[k];
                }
                let child = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                let gain = parent - child;
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, 0.5 * (lo + hi)));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = class_counts(self.data, &idx);
        let n = idx.len() as u64;
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let at_depth = self.max_depth.is_some_and(|d| depth >= d);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        if pure || at_depth || idx.len() < 2 {
            return slot;
        }

        let dim = self.data.dim();
        let mut candidates = sample(&mut self.rng, dim, self.mtry.min(dim)).into_vec();
        candidates.sort_unstable();
        let parent = gini(&counts, n);
        let mut split = self.best_split(&idx, &candidates, parent);
        if split.is_none() {
            // every sampled dimension is constant here; widen to the rest
            let rest: Vec<usize> = (0..dim).filter(|f| !candidates.contains(f)).collect();
            split = self.best_split(&idx, &rest, parent);
        }
        let Some((_, feature, threshold)) = split else {
            return slot;
        };

        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.data.rows[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[slot] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }
}

fn train_tree(data: &Dataset, cfg: &ForestConfig, seed: u64, tree: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree);
    let n = data.len();
    let idx: Vec<usize> = if cfg.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let dim = data.dim();
    let mtry = cfg
        .features_per_split
        .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize)
        .clamp(1, dim.max(1));
    let mut b = Builder {
        data,
        max_depth: cfg.max_depth,
        mtry,
        rng,
        nodes: Vec::new(),
    };
    b.grow(idx, 0);
    Tree { nodes: b.nodes }
}

/// Each tree draws from its own ChaCha stream of `seed`, so the result does
/// not depend on the order trees are built in.
pub fn forest_train(data: &Dataset, cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if cfg.n_trees == 0 {
        return Err(Error::InvalidParameter("n_trees must be at least 1".into()));
    }
    let trees = crate::par::map_range(cfg.n_trees, |t| train_tree(data, cfg, seed, t as u64));
    Ok(ForestModel {
        trees,
        max_depth: cfg.max_depth,
        seed,
    })
}

/// Majority over tree votes; ties by label order.
pub fn forest_predict(model: &ForestModel, x: &[f64]) -> Emotion {
    let mut votes = [0.0f64; Emotion::COUNT];
    for t in &model.trees {
        votes[t.predict(x).index()] += 1.0;
    }
    Emotion::argmax(&votes)
}
