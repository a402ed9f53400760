//! The single JSON configuration document. Every section is optional and
//! unknown keys are rejected with the path of the offending field.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::edms::{EdmsConfig, FeatureEngine};
use crate::error::{Error, Result};
use crate::ingest::{ActionVocabulary, IngestConfig};
use crate::pitch::{KinematicsOptions, PitchConfig};
use crate::reward::{EpvGrid, DEFAULT_EPV_MAX};
use crate::rlearn::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpvFormat {
    /// Dimension header followed by rows of values.
    #[default]
    Native,
    /// Headerless matrix, one line per row of cells.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrigin {
    /// First stored row is at `y = -width / 2`.
    #[default]
    YMin,
    YMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// External EPV grid; relative paths resolve against the config file.
    pub epv_grid: Option<PathBuf>,
    pub epv_format: EpvFormat,
    pub epv_first_row: RowOrigin,
    /// Peak value of the built-in grid.
    pub default_epv_max: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            epv_grid: None,
            epv_format: EpvFormat::Native,
            epv_first_row: RowOrigin::YMin,
            default_epv_max: DEFAULT_EPV_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub pitch: PitchConfig,
    pub kinematics: KinematicsOptions,
    pub edms: EdmsConfig,
    pub ingest: IngestConfig,
    /// Extra provider action strings mapped to on-ball action names.
    pub action_map: BTreeMap<String, String>,
    pub reward: RewardConfig,
    pub train: TrainConfig,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl Config {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json_str(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.pitch.validate()?;
        if self.kinematics.smoothing_window == 0 || self.kinematics.smoothing_window % 2 == 0 {
            return Err(Error::config("kinematics.smoothing_window", "must be odd"));
        }
        self.edms.validate()?;
        self.ingest.validate()?;
        self.vocabulary()?;
        if !(self.reward.default_epv_max > 0.0 && self.reward.default_epv_max <= 1.0) {
            return Err(Error::config("reward.default_epv_max", "must lie in (0, 1]"));
        }
        self.train.validate()
    }

    pub fn vocabulary(&self) -> Result<ActionVocabulary> {
        ActionVocabulary::default().with_entries(&self.action_map)
    }

    pub fn feature_engine(&self) -> FeatureEngine {
        FeatureEngine::new(self.pitch, self.edms.clone())
    }

    pub fn epv_grid(&self) -> Result<EpvGrid> {
        let Some(rel) = &self.reward.epv_grid else {
            return EpvGrid::from_surface(&self.pitch, &self.edms.surface, self.reward.default_epv_max);
        };
        let path = match &self.base_dir {
            Some(dir) if rel.is_relative() => dir.join(rel),
            _ => rel.clone(),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let grid = match self.reward.epv_format {
            EpvFormat::Native => EpvGrid::from_csv_str(&text),
            EpvFormat::Matrix => {
                let mut lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                if self.reward.epv_first_row == RowOrigin::YMax {
                    lines.reverse();
                }
                EpvGrid::from_matrix_csv_str(&lines.join("\n"), self.pitch.length, self.pitch.width)
            }
        }?;
        Ok(grid)
    }
}
