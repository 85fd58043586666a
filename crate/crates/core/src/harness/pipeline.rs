use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::config::PipelineConfig;
use super::corpus::{ingest_crema, ingest_tess, LabeledCorpus};
use super::evaluate::{evaluate, ConfusionMatrix};
use super::split::{merge_and_split, split_indices};
use super::table::{extract_corpus, write_feature_csv};
use super::Emotion;
use crate::classifiers::{persist, train_model, Dataset, ModelKind, TrainedModel};
use crate::features::{UtteranceFeatures, UTTERANCE_DIM};
use crate::{Error, Result};

/// Labelled rows as a classifier dataset.
pub fn rows_to_dataset(rows: &[UtteranceFeatures]) -> Result<Dataset> {
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for r in rows {
        if r.values.len() != UTTERANCE_DIM {
            return Err(Error::SchemaMismatch {
                expected: UTTERANCE_DIM,
                found: r.values.len(),
            });
        }
        let label = r
            .label
            .ok_or_else(|| Error::InvalidParameter(format!("row `{}` has no label", r.source_path)))?;
        xs.push(r.values.clone());
        ys.push(label);
    }
    Ok(Dataset::new(xs, ys))
}

/// `train<TAB>path` lines followed by `test<TAB>path` lines.
pub fn manifest_text(train: &[UtteranceFeatures], test: &[UtteranceFeatures]) -> String {
    let mut s = String::new();
    for (tag, rows) in [("train", train), ("test", test)] {
        for r in rows {
            s.push_str(tag);
            s.push('\t');
            s.push_str(&r.source_path);
            s.push('\n');
        }
    }
    s
}

/// Paths marked `test` in a manifest.
pub fn read_manifest_test_paths(path: &Path) -> Result<HashSet<String>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        match line.split_once('\t') {
            Some(("test", p)) => {
                out.insert(p.to_string());
            }
            Some(("train", _)) => {}
            _ => {
                return Err(Error::MalformedCsv {
                    path: path.to_path_buf(),
                    line: i as u64 + 1,
                    reason: "expected `train<TAB>path` or `test<TAB>path`".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Splits a feature table by path and label.
pub fn split_rows(
    rows: &[UtteranceFeatures],
    cfg: &PipelineConfig,
) -> Result<(Vec<UtteranceFeatures>, Vec<UtteranceFeatures>)> {
    let items = rows
        .iter()
        .map(|r| {
            r.label
                .map(|l| (r.source_path.as_str(), l))
                .ok_or_else(|| Error::InvalidParameter(format!("row `{}` has no label", r.source_path)))
        })
        .collect::<Result<Vec<(&str, Emotion)>>>()?;
    let (tr, te) = split_indices(&items, &cfg.split)?;
    Ok((
        tr.iter().map(|&i| rows[i].clone()).collect(),
        te.iter().map(|&i| rows[i].clone()).collect(),
    ))
}

pub fn train_on_rows(
    kind: ModelKind,
    rows: &[UtteranceFeatures],
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<TrainedModel> {
    train_model(kind, &rows_to_dataset(rows)?, &cfg.classifiers, seed)
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub crema: Option<PathBuf>,
    pub tess: Option<PathBuf>,
    pub models: Vec<ModelKind>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone)]
pub struct ModelReport {
    pub kind: ModelKind,
    pub train: ConfusionMatrix,
    pub test: ConfusionMatrix,
    pub model_path: PathBuf,
    pub confusion_path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub n_train: usize,
    pub n_test: usize,
    pub skipped_names: Vec<PathBuf>,
    pub failed_files: Vec<(PathBuf, String)>,
    pub features_path: PathBuf,
    pub manifest_path: PathBuf,
    pub models: Vec<ModelReport>,
}

/// Ingest, split, extract, then train and score each requested learner.
///
/// Writes into `out_dir`: `features.csv`, `split_manifest.tsv`, and per
/// learner `<kind>.emvx` and `<kind>_confusion.csv` (test partition).
pub fn run_pipeline(opts: &PipelineOptions) -> Result<PipelineReport> {
    let mut cfg = opts.config.clone();
    cfg.split.seed = opts.seed;
    cfg.validate()?;
    if opts.models.is_empty() {
        return Err(Error::InvalidParameter("no model kinds requested".into()));
    }

    let mut corpora: Vec<LabeledCorpus> = Vec::new();
    if let Some(d) = &opts.crema {
        corpora.push(ingest_crema(d)?);
    }
    if let Some(d) = &opts.tess {
        corpora.push(ingest_tess(d)?);
    }
    if corpora.is_empty() {
        return Err(Error::InvalidParameter("no corpus directory given".into()));
    }
    let (train_c, test_c) = merge_and_split(&corpora, &cfg.split)?;
    log::info!("split: {} train / {} test files", train_c.len(), test_c.len());

    let train_x = extract_corpus(&train_c, &cfg.features, &cfg.sift)?;
    let test_x = extract_corpus(&test_c, &cfg.features, &cfg.sift)?;
    if train_x.rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }

    std::fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;
    let features_path = opts.out_dir.join("features.csv");
    let mut all_rows: Vec<UtteranceFeatures> = train_x.rows.iter().chain(&test_x.rows).cloned().collect();
    all_rows.sort_by(|a, b| a.source_path.cmp(&b.source_path));
    write_feature_csv(&features_path, &all_rows)?;
    let manifest_path = opts.out_dir.join("split_manifest.tsv");
    std::fs::write(&manifest_path, manifest_text(&train_x.rows, &test_x.rows))
        .map_err(|e| Error::io(&manifest_path, e))?;

    let mut models = Vec::new();
    for &kind in &opts.models {
        let model = train_on_rows(kind, &train_x.rows, &cfg, opts.seed)?;
        let model_path = opts.out_dir.join(format!("{}.emvx", kind.name()));
        persist::write_model(&model_path, &model)?;
        let train = evaluate(&model, &train_x.rows)?;
        let test = evaluate(&model, &test_x.rows)?;
        let confusion_path = opts.out_dir.join(format!("{}_confusion.csv", kind.name()));
        test.write_csv(&confusion_path)?;
        models.push(ModelReport {
            kind,
            train,
            test,
            model_path,
            confusion_path,
        });
    }

    let mut skipped_names = train_c.skipped;
    skipped_names.extend(test_c.skipped);
    let mut failed_files = train_x.failed;
    failed_files.extend(test_x.failed);
    Ok(PipelineReport {
        n_train: train_x.rows.len(),
        n_test: test_x.rows.len(),
        skipped_names,
        failed_files,
        features_path,
        manifest_path,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(path: &str, label: Emotion, v: f64) -> UtteranceFeatures {
        UtteranceFeatures {
            values: vec![v; UTTERANCE_DIM],
            label: Some(label),
            source_path: path.into(),
        }
    }

    #[test]
    fn manifest_round_trip() {
        let tr = vec![row("a.wav", Emotion::Anger, 0.0)];
        let te = vec![row("b.wav", Emotion::Sadness, 1.0), row("c d.wav", Emotion::Fear, 1.0)];
        let text = manifest_text(&tr, &te);
        assert_eq!(text, "train\ta.wav\ntest\tb.wav\ntest\tc d.wav\n");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.tsv");
        std::fs::write(&p, &text).unwrap();
        let set = read_manifest_test_paths(&p).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.contains("c d.wav"));
        std::fs::write(&p, "val\tx\n").unwrap();
        assert!(read_manifest_test_paths(&p).is_err());
    }

    #[test]
    fn normaliser_sees_train_rows_only() {
        let mut rows = Vec::new();
        for (c, e) in Emotion::ALL.into_iter().enumerate() {
            for j in 0..10 {
                rows.push(row(&format!("{c}_{j}.wav"), e, c as f64 + j as f64 * 0.01));
            }
        }
        let cfg = PipelineConfig::default();
        let (tr, te) = split_rows(&rows, &cfg).unwrap();
        assert_eq!((tr.len(), te.len()), (56, 14));
        let model = train_on_rows(ModelKind::Knn, &tr, &cfg, 0).unwrap();
        let mean0 = tr.iter().map(|r| r.values[0]).sum::<f64>() / tr.len() as f64;
        let mean_all = rows.iter().map(|r| r.values[0]).sum::<f64>() / rows.len() as f64;
        assert_eq!(model.normalizer.mean[0], mean0);
        assert_ne!(model.normalizer.mean[0], mean_all);
    }

    #[test]
    fn unlabelled_rows_rejected() {
        let mut r = row("a.wav", Emotion::Anger, 0.0);
        r.label = None;
        assert!(rows_to_dataset(&[r]).is_err());
    }
}
