//! Feature CSV: `path,label,f000..f131`, one row per utterance, floats in
//! shortest round-trip decimal form.

use std::path::{Path, PathBuf};

use super::corpus::LabeledCorpus;
use super::Emotion;
use crate::emd::SiftConfig;
use crate::features::{extract_utterance, FeatureConfig, UtteranceFeatures, UTTERANCE_DIM};
use crate::signal_io::{load_wav, resample};
use crate::{Error, Result, CANONICAL_RATE};

pub fn header() -> Vec<String> {
    let mut h = vec!["path".to_string(), "label".to_string()];
    h.extend((0..UTTERANCE_DIM).map(|i| format!("f{i:03}")));
    h
}

fn csv_err(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedCsv {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Serialises rows into CSV bytes. Rows without a label get an empty label
/// field.
pub fn feature_csv_bytes(rows: &[UtteranceFeatures]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Config(format!("CSV encoding failed: {e}"));
    w.write_record(header()).map_err(to_err)?;
    for r in rows {
        if r.values.len() != UTTERANCE_DIM {
            return Err(Error::SchemaMismatch {
                expected: UTTERANCE_DIM,
                found: r.values.len(),
            });
        }
        let mut rec = Vec::with_capacity(UTTERANCE_DIM + 2);
        rec.push(r.source_path.clone());
        rec.push(r.label.map(|l| l.code().to_string()).unwrap_or_default());
        rec.extend(r.values.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))
}

pub fn write_feature_csv(path: &Path, rows: &[UtteranceFeatures]) -> Result<()> {
    std::fs::write(path, feature_csv_bytes(rows)?).map_err(|e| Error::io(path, e))
}

pub fn read_feature_csv(path: &Path) -> Result<Vec<UtteranceFeatures>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, 1, e.to_string()))?;
    let head = rdr
        .headers()
        .map_err(|e| csv_err(path, 1, e.to_string()))?
        .clone();
    if head.iter().ne(header().iter().map(String::as_str)) {
        if head.len() != UTTERANCE_DIM + 2 {
            return Err(Error::SchemaMismatch {
                expected: UTTERANCE_DIM,
                found: head.len().saturating_sub(2),
            });
        }
        return Err(csv_err(path, 1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != UTTERANCE_DIM + 2 {
            return Err(csv_err(
                path,
                line,
                format!("expected {} fields, found {}", UTTERANCE_DIM + 2, rec.len()),
            ));
        }
        let label = match &rec[1] {
            "" => None,
            s => Some(
                s.parse::<Emotion>()
                    .map_err(|_| csv_err(path, line, format!("unknown label `{s}`")))?,
            ),
        };
        let values = rec
            .iter()
            .skip(2)
            .enumerate()
            .map(|(i, s)| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| csv_err(path, line, format!("column f{i:03}: `{s}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(UtteranceFeatures {
            values,
            label,
            source_path: rec[0].to_string(),
        });
    }
    Ok(rows)
}

/// Feature rows and the files that failed to decode.
#[derive(Debug, Clone, Default)]
pub struct ExtractionReport {
    pub rows: Vec<UtteranceFeatures>,
    pub failed: Vec<(PathBuf, String)>,
}

/// Loads, resamples to the canonical rate, and summarises one file.
pub fn extract_file(path: &Path, features: &FeatureConfig, sift: &SiftConfig) -> Result<UtteranceFeatures> {
    let audio = load_wav(path)?;
    let audio = resample(&audio, CANONICAL_RATE);
    extract_utterance(&audio, features, sift)
}

/// Extracts every entry on the worker pool; rows come back sorted by path.
pub fn extract_corpus(
    corpus: &LabeledCorpus,
    features: &FeatureConfig,
    sift: &SiftConfig,
) -> Result<ExtractionReport> {
    features.validate()?;
    sift.validate()?;
    let results = crate::par::map(&corpus.entries, |e| {
        extract_file(&e.path, features, sift).map(|mut u| {
            u.label = Some(e.label);
            u.source_path = e.path.to_string_lossy().into_owned();
            u
        })
    });
    let mut report = ExtractionReport::default();
    for (entry, r) in corpus.entries.iter().zip(results) {
        match r {
            Ok(u) => report.rows.push(u),
            Err(e) => {
                log::warn!("skipped {}: {e}", entry.path.display());
                report.failed.push((entry.path.clone(), e.to_string()));
            }
        }
    }
    report.rows.sort_by(|a, b| a.source_path.cmp(&b.source_path));
    Ok(report)
}
