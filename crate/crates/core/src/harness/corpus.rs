use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::Emotion;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusTag {
    Crema,
    Tess,
}

impl fmt::Display for CorpusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusTag::Crema => "crema",
            CorpusTag::Tess => "tess",
        })
    }
}

impl std::str::FromStr for CorpusTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "crema" | "crema-d" => Ok(CorpusTag::Crema),
            "tess" => Ok(CorpusTag::Tess),
            _ => Err(Error::InvalidParameter(format!("unknown corpus format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub path: PathBuf,
    pub label: Emotion,
    pub tag: CorpusTag,
}

/// Labelled files, sorted by path, plus the WAV files whose names did not
/// parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub entries: Vec<CorpusEntry>,
    pub skipped: Vec<PathBuf>,
}

impl LabeledCorpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn counts(&self) -> [usize; Emotion::COUNT] {
        let mut c = [0; Emotion::COUNT];
        for e in &self.entries {
            c[e.label.index()] += 1;
        }
        c
    }
}

/// `ActorID_SentenceID_EmotionCode_Level` (the level is ignored).
pub fn parse_crema_name(stem: &str) -> Option<Emotion> {
    let parts: Vec<&str> = stem.split('_').collect();
    if parts.len() != 4 {
        return None;
    }
    Emotion::from_crema_code(parts[2])
}

/// `Speaker_Word_emotion`; the emotion word may itself contain underscores.
pub fn parse_tess_name(stem: &str) -> Option<Emotion> {
    let mut parts = stem.splitn(3, '_');
    let (_, _, word) = (parts.next()?, parts.next()?, parts.next()?);
    Emotion::from_tess_word(word)
}

pub fn ingest(dir: &Path, tag: CorpusTag) -> Result<LabeledCorpus> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let parse = match tag {
        CorpusTag::Crema => parse_crema_name,
        CorpusTag::Tess => parse_tess_name,
    };
    let mut corpus = LabeledCorpus::default();
    let mut seen_wav = false;
    for item in WalkDir::new(dir).sort_by_file_name() {
        let item = item.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(&path, e.into())
        })?;
        let path = item.path();
        let is_wav = item.file_type().is_file()
            && path
                .extension()
                .is_some_and(|x| x.eq_ignore_ascii_case("wav"));
        if !is_wav {
            continue;
        }
        seen_wav = true;
        match path.file_stem().and_then(|s| s.to_str()).and_then(parse) {
            Some(label) => corpus.entries.push(CorpusEntry {
                path: path.to_path_buf(),
                label,
                tag,
            }),
            None => corpus.skipped.push(path.to_path_buf()),
        }
    }
    if !seen_wav {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    if corpus.entries.is_empty() {
        return Err(Error::NoParseableFiles(dir.to_path_buf()));
    }
    corpus.entries.sort_by(|a, b| a.path.cmp(&b.path));
    for p in &corpus.skipped {
        log::warn!("skipped unlabelled file {}", p.display());
    }
    Ok(corpus)
}

pub fn ingest_crema(dir: &Path) -> Result<LabeledCorpus> {
    ingest(dir, CorpusTag::Crema)
}

pub fn ingest_tess(dir: &Path) -> Result<LabeledCorpus> {
    ingest(dir, CorpusTag::Tess)
}
