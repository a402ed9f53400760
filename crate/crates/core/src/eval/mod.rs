//! Off-ball directional Q extraction, team aggregation and SVG field plots.

mod plot;

pub use plot::{render_field_plot, PlotMode, PlotOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Standardizer, Trajectory, N_OFF_BALL, N_ON_BALL};
use crate::pitch::Team;
use crate::rlearn::{apply_mask_with, QNet, TrainConfig};

pub const DIRECTION_LABELS: [&str; N_OFF_BALL] = ["0", "45", "90", "135", "180", "225", "270", "315", "stay"];

/// Masked Q-values of the nine off-ball actions for one player at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalQ {
    pub episode: u64,
    pub player_id: u32,
    pub frame_index: u64,
    /// Eight moves counterclockwise from the attacked goal, then stay.
    pub q: [f64; N_OFF_BALL],
    /// Indices into `q`, best first.
    pub top_k: Vec<usize>,
}

impl DirectionalQ {
    pub fn mean_directional(&self) -> f64 {
        self.q[..8].iter().sum::<f64>() / 8.0
    }

    /// The `k` best of the eight moves, best first (ties by index).
    pub fn top_moves(&self, k: usize) -> Vec<usize> {
        rank(&self.q[..8]).into_iter().take(k).collect()
    }
}

fn rank(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Replays `player`'s trajectory up to `frame_index` from a zero hidden state
/// and returns the masked off-ball Q-values at that step. `episode`
/// disambiguates frame indices shared by several files.
#[allow(clippy::too_many_arguments)]
pub fn extract_offball_q(
    net: &QNet,
    scaler: &Standardizer,
    config: &TrainConfig,
    trajectories: &[Trajectory],
    frame_index: u64,
    player: u32,
    episode: Option<u64>,
    top_k: usize,
) -> Result<DirectionalQ> {
    let (traj, step) = trajectories
        .iter()
        .filter(|t| t.player_id == player && episode.is_none_or(|e| e == t.episode))
        .find_map(|t| t.frame_indices.iter().position(|f| *f == frame_index).map(|s| (t, s)))
        .ok_or(Error::SampleNotFound { player, frame: frame_index })?;
    if traj.on_ball[step] {
        return Err(Error::CarrierRequested { player, frame: frame_index });
    }
    let prefix: Vec<Vec<f64>> = traj.states[..=step].iter().map(|s| scaler.apply(s)).collect();
    let q_row = net.forward(&prefix)?.q[step];
    let masked = if config.mask { apply_mask_with(&q_row, false, config.mask_value) } else { q_row };
    let mut q = [0.0; N_OFF_BALL];
    q.copy_from_slice(&masked[N_ON_BALL..]);
    if !q.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("directional q"));
    }
    Ok(DirectionalQ {
        episode: traj.episode,
        player_id: player,
        frame_index,
        q,
        top_k: rank(&q).into_iter().take(top_k).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamQSummary {
    pub team: Team,
    pub mean_q: f64,
    pub sequences: usize,
}

/// Description written next to team summaries.
pub const TEAM_Q_STATISTIC: &str = "chosen-action Q at each sequence's last step, averaged over the team's players, then over sequences";

/// Per-team mean of the chosen-action Q at sequence-terminal steps. Teams
/// without sequences are left out.
pub fn team_aggregate(
    net: &QNet,
    scaler: &Standardizer,
    trajectories: &[Trajectory],
) -> Result<Vec<TeamQSummary>> {
    use rayon::prelude::*;
    let terminal: Vec<(u64, Team, f64)> = trajectories
        .par_iter()
        .filter(|t| !t.is_empty())
        .map(|t| {
            let states: Vec<Vec<f64>> = t.states.iter().map(|s| scaler.apply(s)).collect();
            let q = net.forward(&states)?.q;
            let last = t.len() - 1;
            Ok((t.episode, t.team, q[last][t.actions[last]]))
        })
        .collect::<Result<_>>()?;
    let mut per_episode: std::collections::BTreeMap<(u64, Team), (f64, usize)> = Default::default();
    for (e, team, q) in terminal {
        let slot = per_episode.entry((e, team)).or_insert((0.0, 0));
        slot.0 += q;
        slot.1 += 1;
    }
    let mut out = Vec::new();
    for team in [Team::Home, Team::Away] {
        let means: Vec<f64> = per_episode
            .iter()
            .filter(|((_, t), _)| *t == team)
            .map(|(_, (sum, n))| sum / *n as f64)
            .collect();
        if !means.is_empty() {
            out.push(TeamQSummary {
                team,
                mean_q: means.iter().sum::<f64>() / means.len() as f64,
                sequences: means.len(),
            });
        }
    }
    Ok(out)
}

pub fn team_summary_csv(rows: &[TeamQSummary]) -> String {
    let mut out = format!("# statistic: {TEAM_Q_STATISTIC}\nteam,mean_q,sequences\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.team.as_str(), r.mean_q, r.sequences));
    }
    out
}
