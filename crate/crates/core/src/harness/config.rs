use std::path::Path;

use serde::{Deserialize, Serialize};

use super::split::SplitSpec;
use crate::classifiers::ClassifierConfig;
use crate::emd::SiftConfig;
use crate::features::FeatureConfig;
use crate::{Error, Result};

/// Every tunable in one JSON document; omitted keys take their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub features: FeatureConfig,
    pub sift: SiftConfig,
    pub classifiers: ClassifierConfig,
    pub split: SplitSpec,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.sift.validate()?;
        self.split.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::SourceMode;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(PipelineConfig::from_json("{}").unwrap(), cfg);
    }

    #[test]
    fn partial_override() {
        let cfg = PipelineConfig::from_json(
            r#"{"features": {"source_mode": "imf-sum:3"}, "classifiers": {"knn": {"k": 3}}, "split": {"seed": 5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.features.source_mode, SourceMode::ImfSum(3));
        assert_eq!(cfg.classifiers.knn.k, 3);
        assert_eq!(cfg.split.seed, 5);
        assert_eq!(cfg.split.train_fraction, 0.8);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(PipelineConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"split": {"train_fraction": 1.5}}"#).is_err());
    }
}
