use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invalid frame {frame_index}: {message}")]
    Frame { frame_index: u64, message: String },

    #[error("kinematics: {0}")]
    Kinematics(String),

    #[error("possession team is unknown for frame {0}")]
    UnknownPossession(u64),

    #[error("offside line needs at least 2 tracked defenders, found {0}")]
    TooFewDefenders(usize),

    #[error("no visible players to build a dominant region")]
    NoVisiblePlayers,

    #[error("no visible opponents")]
    NoOpponents,

    #[error("player {0} is not in the frame")]
    UnknownPlayer(u32),

    #[error("player {0} is off the pitch")]
    OffPitch(u32),

    #[error("non-finite input `{0}`")]
    NonFinite(&'static str),

    #[error("player heights missing for: {0:?}")]
    MissingHeights(Vec<u32>),

    #[error("intra-possession context needs an on-ball player from the attacking team (frame {0})")]
    UnresolvedCarrier(u64),

    #[error("unknown provider action `{0}`")]
    UnknownAction(String),

    #[error("unknown scenario `{0}` (expected random_walk, counterattack or buildup)")]
    UnknownScenario(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("sequence {0} has no resolved outcome")]
    UnresolvedOutcome(u64),

    #[error("malformed EPV grid: {0}")]
    EpvGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("label {action} is invalid under the action mask at step {step}")]
    InvalidLabel { action: usize, step: usize },

    #[error("non-finite gradient at parameter {0}")]
    NonFiniteGradient(usize),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("player {player} is the ball carrier at frame {frame}; use on-ball extraction")]
    CarrierRequested { player: u32, frame: u64 },

    #[error("no sample for player {player} at frame {frame}")]
    SampleNotFound { player: u32, frame: u64 },

    #[error("{0}")]
    Input(String),

    #[error("SAR format: {0}")]
    Sar(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("{}: {err}", path.display())]
    Io { path: PathBuf, err: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            err: source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
