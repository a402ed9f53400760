//! State-action-reward samples and their line-delimited JSON file format.
//!
//! The first line is a header record; every following line is one sample.
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ActionLabel, ActionMask};
use crate::edms::{FrameEdms, PassScaling};
use crate::error::{Error, Result};
use crate::pitch::Team;

pub const SAR_LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Edms,
    Pvs,
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edms" => Ok(StateKind::Edms),
            "pvs" => Ok(StateKind::Pvs),
            other => Err(Error::Input(format!("unknown state kind `{other}` (expected edms or pvs)"))),
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateKind::Edms => "edms",
            StateKind::Pvs => "pvs",
        })
    }
}

/// Per-channel standardization `(x - mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Channel statistics over `rows`; channels with (near) zero spread get
    /// a unit scale.
    pub fn fit<'a>(dim: usize, rows: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut n = 0usize;
        let mut mean = vec![0.0; dim];
        let mut m2 = vec![0.0; dim];
        for row in rows {
            n += 1;
            for (k, &x) in row.iter().enumerate() {
                let d = x - mean[k];
                mean[k] += d / n as f64;
                m2[k] += d * (x - mean[k]);
            }
        }
        let std = m2
            .iter()
            .map(|&s| {
                let sd = if n > 1 { (s / n as f64).sqrt() } else { 0.0 };
                if sd > 1e-9 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    pub fn apply(&self, state: &[f64]) -> Vec<f64> {
        state
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarScaling {
    /// Min-max ranges used for pass scores (EDMS only).
    pub pass: Option<PassScaling>,
    pub features: Standardizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarHeader {
    pub layout_version: u32,
    pub state_kind: StateKind,
    pub scaling: SarScaling,
    pub frame_rate: f64,
    pub state_dim: usize,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarSample {
    pub episode: u64,
    pub team: Team,
    pub player_id: u32,
    pub t: usize,
    pub frame_index: u64,
    pub action: ActionLabel,
    pub reward: f64,
    pub mask: ActionMask,
    pub state: Vec<f64>,
}

/// One player's samples through one episode, in step order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub episode: u64,
    pub team: Team,
    pub player_id: u32,
    pub frame_indices: Vec<u64>,
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub on_ball: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarDataset {
    pub header: SarHeader,
    pub samples: Vec<SarSample>,
}

impl SarDataset {
    pub fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.layout_version != SAR_LAYOUT_VERSION {
            return Err(Error::Sar(format!("unsupported layout version {}", h.layout_version)));
        }
        if h.columns.len() != h.state_dim
            || h.scaling.features.mean.len() != h.state_dim
            || h.scaling.features.std.len() != h.state_dim
        {
            return Err(Error::Sar("header widths disagree with state_dim".into()));
        }
        for (line, s) in self.samples.iter().enumerate() {
            if s.state.len() != h.state_dim {
                return Err(Error::Dimension {
                    expected: h.state_dim,
                    got: s.state.len(),
                });
            }
            if !s.state.iter().all(|v| v.is_finite()) || !s.reward.is_finite() {
                return Err(Error::Sar(format!("sample {line} has non-finite values")));
            }
            if s.mask != ActionMask::ON_BALL && s.mask != ActionMask::OFF_BALL {
                return Err(Error::Sar(format!("sample {line} has mask {:#06x}", s.mask.0)));
            }
            if !s.mask.allows(s.action.index()) {
                return Err(Error::InvalidLabel {
                    action: s.action.index(),
                    step: s.t,
                });
            }
        }
        Ok(())
    }

    /// Samples grouped by (episode, player) in order of first appearance.
    pub fn trajectories(&self) -> Result<Vec<Trajectory>> {
        let mut index: BTreeMap<(u64, u32), usize> = BTreeMap::new();
        let mut out: Vec<Trajectory> = Vec::new();
        let mut grouped: Vec<Vec<&SarSample>> = Vec::new();
        for s in &self.samples {
            let k = *index.entry((s.episode, s.player_id)).or_insert_with(|| {
                grouped.push(Vec::new());
                grouped.len() - 1
            });
            grouped[k].push(s);
        }
        for mut group in grouped {
            group.sort_by_key(|s| s.t);
            if group.iter().enumerate().any(|(i, s)| s.t != i) {
                return Err(Error::Sar(format!(
                    "episode {} player {} has missing or repeated steps",
                    group[0].episode, group[0].player_id
                )));
            }
            out.push(Trajectory {
                episode: group[0].episode,
                team: group[0].team,
                player_id: group[0].player_id,
                frame_indices: group.iter().map(|s| s.frame_index).collect(),
                states: group.iter().map(|s| s.state.clone()).collect(),
                actions: group.iter().map(|s| s.action.index()).collect(),
                rewards: group.iter().map(|s| s.reward).collect(),
                on_ball: group.iter().map(|s| s.mask.is_on_ball()).collect(),
            });
        }
        Ok(out)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<sar stream>", e);
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n").map_err(io)?;
        for s in &self.samples {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let parse_err = |line: usize, e: serde_path_to_error::Error<serde_json::Error>| {
            Error::Sar(format!("line {} at `{}`: {}", line + 1, e.path(), e.inner()))
        };
        let (n, first) = lines.next().ok_or_else(|| Error::Sar("missing header line".into()))?;
        let first = first.map_err(|e| Error::io("<sar stream>", e))?;
        let header: SarHeader = serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(&first))
            .map_err(|e| parse_err(n, e))?;
        let mut samples = Vec::new();
        for (n, line) in lines {
            let line = line.map_err(|e| Error::io("<sar stream>", e))?;
            samples.push(
                serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(&line))
                    .map_err(|e| parse_err(n, e))?,
            );
        }
        let ds = Self { header, samples };
        ds.validate()?;
        Ok(ds)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(f))
    }
}

/// Per-step inputs for one episode's samples.
pub struct EpisodeSamples<'a> {
    pub episode: u64,
    pub team: Team,
    pub frame_indices: &'a [u64],
    /// Carrier at each step, if any.
    pub carriers: &'a [Option<u32>],
    pub attackers: &'a [u32],
    /// `labels[step][k]` for attacker `k`.
    pub labels: &'a [Vec<ActionLabel>],
    pub rewards: &'a [f64],
}

/// One trajectory per attacker, sharing the team reward stream. `state`
/// returns the raw state of attacker `player` at `step`.
pub fn build_sar(
    input: &EpisodeSamples<'_>,
    mut state: impl FnMut(usize, u32) -> Result<Vec<f64>>,
) -> Result<Vec<SarSample>> {
    let n = input.frame_indices.len();
    for (what, len) in [
        ("rewards vs frames", input.rewards.len()),
        ("labels vs frames", input.labels.len()),
        ("carriers vs frames", input.carriers.len()),
    ] {
        if len != n {
            return Err(Error::LengthMismatch { what, left: len, right: n });
        }
    }
    let mut out = Vec::with_capacity(n * input.attackers.len());
    for (k, &pid) in input.attackers.iter().enumerate() {
        for t in 0..n {
            let action = *input.labels[t].get(k).ok_or(Error::LengthMismatch {
                what: "labels vs attackers",
                left: input.labels[t].len(),
                right: input.attackers.len(),
            })?;
            let mask = ActionMask::for_player(input.carriers[t] == Some(pid));
            if !mask.allows(action.index()) {
                return Err(Error::InvalidLabel { action: action.index(), step: t });
            }
            out.push(SarSample {
                episode: input.episode,
                team: input.team,
                player_id: pid,
                t,
                frame_index: input.frame_indices[t],
                action,
                reward: input.rewards[t],
                mask,
                state: state(t, pid)?,
            });
        }
    }
    Ok(out)
}

/// State vector of `player` from precomputed frame features.
pub fn edms_state(features: &FrameEdms, player: u32) -> Result<Vec<f64>> {
    Ok(features.state_for(player)?.to_vector())
}
