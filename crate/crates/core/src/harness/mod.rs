//! Corpus ingestion, splitting, feature tables, evaluation and the
//! end-to-end pipeline behind the command-line tool.

pub mod config;
pub mod corpus;
mod emotion;
pub mod evaluate;
pub mod pipeline;
pub mod split;
pub mod synth;
pub mod table;

pub use config::PipelineConfig;
pub use corpus::{ingest, ingest_crema, ingest_tess, CorpusEntry, CorpusTag, LabeledCorpus};
pub use emotion::Emotion;
pub use evaluate::{evaluate, ConfusionMatrix};
pub use pipeline::{run_pipeline, PipelineOptions, PipelineReport};
pub use split::{merge_and_split, SplitSpec};
pub use table::{extract_corpus, read_feature_csv, write_feature_csv};
