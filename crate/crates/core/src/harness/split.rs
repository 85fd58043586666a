use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::LabeledCorpus;
use super::Emotion;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// `ceil(fraction * n)`, robust to representation error in the product.
    pub fn train_count(&self, n: usize) -> usize {
        ((self.train_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize
    }
}

/// Partitions items keyed by `(path, label)` into train and test indices.
///
/// Items are ordered by path first, so the result does not depend on input
/// order. Each class is shuffled on its own ChaCha stream. Both index lists
/// come back in path order.
pub fn split_indices(items: &[(&str, Emotion)], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    spec.validate()?;
    if items.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].0.cmp(items[b].0).then(items[a].1.cmp(&items[b].1)));

    let groups: Vec<Vec<usize>> = if spec.stratified {
        Emotion::ALL
            .iter()
            .map(|&e| order.iter().copied().filter(|&i| items[i].1 == e).collect())
            .collect()
    } else {
        vec![order]
    };

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (g, mut members) in groups.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() == 1 {
            log::warn!(
                "class {} has a single entry; it goes to the training set",
                items[members[0]].1
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(g as u64);
        members.shuffle(&mut rng);
        let k = spec.train_count(members.len());
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    let by_path = |a: &usize, b: &usize| items[*a].0.cmp(items[*b].0).then(a.cmp(b));
    train.sort_by(by_path);
    test.sort_by(by_path);
    Ok((train, test))
}

/// Merges corpora and splits the union; both halves keep path order.
pub fn merge_and_split(
    corpora: &[LabeledCorpus],
    spec: &SplitSpec,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    let mut all = LabeledCorpus::default();
    for c in corpora {
        all.entries.extend(c.entries.iter().cloned());
        all.skipped.extend(c.skipped.iter().cloned());
    }
    all.entries.sort_by(|a, b| a.path.cmp(&b.path));
    let before = all.entries.len();
    all.entries.dedup_by(|a, b| a.path == b.path);
    if all.entries.len() != before {
        log::warn!("dropped {} duplicate paths", before - all.entries.len());
    }
    let keys: Vec<String> = all.entries.iter().map(|e| e.path.to_string_lossy().into_owned()).collect();
    let items: Vec<(&str, Emotion)> = keys
        .iter()
        .zip(&all.entries)
        .map(|(k, e)| (k.as_str(), e.label))
        .collect();
    let (tr, te) = split_indices(&items, spec)?;
    let pick = |idx: &[usize]| LabeledCorpus {
        entries: idx.iter().map(|&i| all.entries[i].clone()).collect(),
        skipped: Vec::new(),
    };
    let mut train = pick(&tr);
    train.skipped = all.skipped;
    Ok((train, pick(&te)))
}
