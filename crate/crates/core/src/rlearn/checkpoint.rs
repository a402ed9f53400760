//! Checkpoint file: a JSON document with the network shape, the feature
//! scaling it was trained with, the training config, and the flat parameter
//! vector as base64 of little-endian f64 values.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::net::{NetShape, QNet};
use super::train::TrainConfig;
use crate::error::{Error, Result};
use crate::ingest::{SarScaling, StateKind};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub layout_version: u32,
    pub state_kind: StateKind,
    pub shape: NetShape,
    pub n_actions: usize,
    pub scaling: SarScaling,
    pub config: TrainConfig,
    pub n_params: usize,
    pub params: String,
}

impl Checkpoint {
    pub fn new(net: &QNet, state_kind: StateKind, scaling: SarScaling, config: TrainConfig) -> Self {
        let bytes: Vec<u8> = net.params.iter().flat_map(|p| p.to_le_bytes()).collect();
        Self {
            layout_version: CHECKPOINT_VERSION,
            state_kind,
            shape: net.shape,
            n_actions: crate::ingest::N_ACTIONS,
            scaling,
            config,
            n_params: net.params.len(),
            params: STANDARD.encode(bytes),
        }
    }

    pub fn net(&self) -> Result<QNet> {
        if self.layout_version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", self.layout_version)));
        }
        if self.n_actions != crate::ingest::N_ACTIONS {
            return Err(Error::Checkpoint(format!("expected 16 actions, found {}", self.n_actions)));
        }
        let bytes = STANDARD
            .decode(&self.params)
            .map_err(|e| Error::Checkpoint(format!("parameter payload: {e}")))?;
        if bytes.len() != self.n_params * 8 {
            return Err(Error::Checkpoint(format!(
                "payload holds {} bytes, expected {}",
                bytes.len(),
                self.n_params * 8
            )));
        }
        let params = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        QNet::from_params(self.shape, params)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(text))
            .map_err(|e| Error::Checkpoint(format!("at `{}`: {}", e.path(), e.inner())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
