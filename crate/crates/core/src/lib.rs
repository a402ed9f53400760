//! Soccer decision-making states and masked SARSA recurrent Q-learning.
//!
//! - [`pitch`]: geometry, kinematics, attack-direction normalization, offside.
//! - [`edms`]: per-player decision-making state features and the
//!   position/velocity baseline.
//! - [`ingest`]: tracking/event loading, synchronization, possession
//!   segmentation, action labels, the SAR file format and synthetic matches.
//! - [`reward`]: expected-possession-value grids and reward assignment.
//! - [`rlearn`]: the GRU Q-network, action masking, losses, BPTT, Adam, training.
//! - [`eval`]: directional Q extraction, team aggregation and SVG field plots.

pub mod config;
pub mod edms;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod io;
pub mod pitch;
pub mod reward;
pub mod rlearn;

pub use error::{Error, Result};
