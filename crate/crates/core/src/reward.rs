//! Expected-possession-value grids and reward assignment.
//!
//! Rewards are indexed by step: `rewards[t]` is the reward received after the
//! action at step `t`. Intermediate steps earn 0 except shots, which earn the
//! EPV at the ball position; the final step earns +1 for a goal, -1 when the
//! opponent scores in the following possession, and the EPV of the final ball
//! position otherwise.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::edms::ImportanceSurface;
use crate::error::{Error, Result};
use crate::pitch::{PitchConfig, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Goal,
    ConcededNext,
    Other,
}

/// Outcome of a possession given whether it scored and, if the following
/// possession belongs to the opponent, whether that one scored.
pub fn resolve_outcome(scored: bool, next_opponent_scored: Option<bool>) -> Outcome {
    if scored {
        Outcome::Goal
    } else if next_opponent_scored == Some(true) {
        Outcome::ConcededNext
    } else {
        Outcome::Other
    }
}

/// EPV surface on an `n_x` by `n_y` grid of cells covering the pitch, stored
/// row-major with rows running along y (row 0 at `y = -width / 2`). Values
/// are for a team attacking `+x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpvGrid {
    n_x: usize,
    n_y: usize,
    pitch_length: f64,
    pitch_width: f64,
    values: Vec<f64>,
}

pub const DEFAULT_EPV_MAX: f64 = 0.35;

impl EpvGrid {
    pub fn new(n_x: usize, n_y: usize, pitch_length: f64, pitch_width: f64, values: Vec<f64>) -> Result<Self> {
        if n_x < 2 || n_y < 2 {
            return Err(Error::EpvGrid(format!("grid must be at least 2x2, got {n_x}x{n_y}")));
        }
        if !(pitch_length > 0.0 && pitch_width > 0.0) {
            return Err(Error::EpvGrid("pitch dimensions must be positive".into()));
        }
        if values.len() != n_x * n_y {
            return Err(Error::EpvGrid(format!(
                "expected {} values, found {}",
                n_x * n_y,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::EpvGrid(format!("value {} at index {k} is outside [0, 1]", values[k])));
        }
        let grid = Self {
            n_x,
            n_y,
            pitch_length,
            pitch_width,
            values,
        };
        let means = grid.column_means();
        if let Some(i) = means.windows(2).position(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::EpvGrid(format!(
                "column means must not decrease toward the attacked goal (column {})",
                i + 1
            )));
        }
        Ok(grid)
    }

    /// Importance surface min-max rescaled to `[0, max_value]` on a 50 x 32 grid.
    pub fn from_surface(pitch: &PitchConfig, surface: &ImportanceSurface, max_value: f64) -> Result<Self> {
        let (n_x, n_y) = (50, 32);
        let dx = pitch.length / n_x as f64;
        let dy = pitch.width / n_y as f64;
        let raw: Vec<f64> = (0..n_x * n_y)
            .map(|k| {
                let (i, j) = (k % n_x, k / n_x);
                surface.importance(Vec2::new(
                    -pitch.half_length() + (i as f64 + 0.5) * dx,
                    -pitch.half_width() + (j as f64 + 0.5) * dy,
                ))
            })
            .collect();
        let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let values = raw.iter().map(|v| max_value * (v - lo) / (hi - lo)).collect();
        Self::new(n_x, n_y, pitch.length, pitch.width, values)
    }

    pub fn default_for(pitch: &PitchConfig) -> Self {
        Self::from_surface(pitch, &ImportanceSurface::default(), DEFAULT_EPV_MAX)
            .expect("default surface yields a valid grid")
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n_x + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            -self.pitch_length / 2.0 + (i as f64 + 0.5) * self.pitch_length / self.n_x as f64,
            -self.pitch_width / 2.0 + (j as f64 + 0.5) * self.pitch_width / self.n_y as f64,
        )
    }

    pub fn column_means(&self) -> Vec<f64> {
        (0..self.n_x)
            .map(|i| (0..self.n_y).map(|j| self.value(i, j)).sum::<f64>() / self.n_y as f64)
            .collect()
    }

    /// Bilinear interpolation between cell centers; positions outside the
    /// center lattice take the edge values.
    pub fn lookup(&self, p: Vec2) -> f64 {
        let fx = ((p.x + self.pitch_length / 2.0) / (self.pitch_length / self.n_x as f64) - 0.5)
            .clamp(0.0, (self.n_x - 1) as f64);
        let fy = ((p.y + self.pitch_width / 2.0) / (self.pitch_width / self.n_y as f64) - 0.5)
            .clamp(0.0, (self.n_y - 1) as f64);
        let (i0, j0) = (fx.floor() as usize, fy.floor() as usize);
        let (i1, j1) = ((i0 + 1).min(self.n_x - 1), (j0 + 1).min(self.n_y - 1));
        let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
        let bottom = self.value(i0, j0) * (1.0 - tx) + self.value(i1, j0) * tx;
        let top = self.value(i0, j1) * (1.0 - tx) + self.value(i1, j1) * tx;
        bottom * (1.0 - ty) + top * ty
    }

    /// Reads the native CSV: a `n_x,n_y,pitch_length,pitch_width` header
    /// line, one line with those four numbers, then `n_y` rows of `n_x` values.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut first = lines.next().ok_or_else(|| Error::EpvGrid("empty file".into()))?;
        if first.starts_with("n_x") {
            first = lines.next().ok_or_else(|| Error::EpvGrid("missing dimensions line".into()))?;
        }
        let dims = parse_row(first)?;
        if dims.len() != 4 {
            return Err(Error::EpvGrid("dimensions line needs 4 fields".into()));
        }
        let (n_x, n_y) = (dims[0] as usize, dims[1] as usize);
        let mut values = Vec::with_capacity(n_x * n_y);
        for line in lines {
            values.extend(parse_row(line)?);
        }
        Self::new(n_x, n_y, dims[2], dims[3], values)
    }

    /// Reads a headerless matrix (rows along y, first row at `y = -width/2`).
    pub fn from_matrix_csv_str(text: &str, pitch_length: f64, pitch_width: f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(parse_row)
            .collect::<Result<_>>()?;
        let n_y = rows.len();
        let n_x = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_x) {
            return Err(Error::EpvGrid("ragged rows".into()));
        }
        Self::new(n_x, n_y, pitch_length, pitch_width, rows.concat())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = format!(
            "n_x,n_y,pitch_length,pitch_width\n{},{},{},{}\n",
            self.n_x, self.n_y, self.pitch_length, self.pitch_width
        );
        for row in self.values.chunks(self.n_x) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::EpvGrid(format!("bad number `{s}`: {e}")))
        })
        .collect()
}

/// What reward assignment needs from a possession.
#[derive(Debug, Clone, Copy)]
pub struct RewardInputs<'a> {
    pub sequence_id: u64,
    pub outcome: Option<Outcome>,
    /// Steps at which a shot was taken.
    pub shot_steps: &'a [usize],
    /// Ball position per step, normalized to the attacking direction.
    pub ball_positions: &'a [Vec2],
}

pub fn assign_rewards(inputs: &RewardInputs<'_>, grid: &EpvGrid) -> Result<Vec<f64>> {
    let outcome = inputs
        .outcome
        .ok_or(Error::UnresolvedOutcome(inputs.sequence_id))?;
    let n = inputs.ball_positions.len();
    if n == 0 {
        return Err(Error::LengthMismatch {
            what: "reward steps",
            left: 0,
            right: 1,
        });
    }
    let mut rewards = vec![0.0; n];
    for &k in inputs.shot_steps {
        if k >= n {
            return Err(Error::LengthMismatch {
                what: "shot step beyond sequence",
                left: k,
                right: n,
            });
        }
        rewards[k] = grid.lookup(inputs.ball_positions[k]);
    }
    rewards[n - 1] = match outcome {
        Outcome::Goal => 1.0,
        Outcome::ConcededNext => -1.0,
        Outcome::Other => grid.lookup(inputs.ball_positions[n - 1]),
    };
    Ok(rewards)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> EpvGrid {
        // Row 0 (bottom): 0.2 0.4, row 1 (top): 0.2 0.4.
        EpvGrid::new(2, 2, 100.0, 60.0, vec![0.2, 0.4, 0.2, 0.4]).unwrap()
    }

    #[test]
    fn lookup_at_centers_and_midpoint() {
        let g = two_by_two();
        assert_eq!(g.lookup(g.cell_center(0, 0)), 0.2);
        assert_eq!(g.lookup(g.cell_center(1, 1)), 0.4);
        let mid = (g.cell_center(0, 0) + g.cell_center(1, 0)) * 0.5;
        assert!((g.lookup(mid) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn lookup_clips_beyond_goal_line() {
        let g = two_by_two();
        assert_eq!(g.lookup(Vec2::new(80.0, -15.0)), 0.4);
        assert_eq!(g.lookup(Vec2::new(-80.0, 15.0)), 0.2);
    }

    #[test]
    fn default_grid_is_valid() {
        let g = EpvGrid::default_for(&PitchConfig::default());
        assert_eq!((g.n_x(), g.n_y()), (50, 32));
        let means = g.column_means();
        assert!(means.windows(2).all(|w| w[1] >= w[0]));
        let max = (0..50).flat_map(|i| (0..32).map(move |j| (i, j))).map(|(i, j)| g.value(i, j)).fold(0.0, f64::max);
        assert!((max - DEFAULT_EPV_MAX).abs() < 1e-15);
        let round = EpvGrid::from_csv_str(&g.to_csv_string()).unwrap();
        assert_eq!(round, g);
    }

    #[test]
    fn malformed_grids_rejected() {
        assert!(EpvGrid::new(2, 2, 100.0, 60.0, vec![0.2, 0.4, 0.2]).is_err());
        assert!(EpvGrid::new(2, 2, 100.0, 60.0, vec![0.2, 1.4, 0.2, 0.4]).is_err());
        assert!(EpvGrid::new(2, 2, 100.0, 60.0, vec![0.4, 0.2, 0.4, 0.2]).is_err());
        assert!(EpvGrid::from_csv_str("n_x,n_y,pitch_length,pitch_width\n2,2,100,60\n0.1,x\n").is_err());
    }

    #[test]
    fn matrix_layout_loader() {
        let g = EpvGrid::from_matrix_csv_str("0.1,0.2,0.3\n0.1,0.25,0.3\n", 105.0, 68.0).unwrap();
        assert_eq!((g.n_x(), g.n_y()), (3, 2));
        assert_eq!(g.value(1, 1), 0.25);
    }

    #[test]
    fn reward_rules() {
        let g = EpvGrid::default_for(&PitchConfig::default());
        let balls = vec![Vec2::new(10.0, 0.0); 30];

        let goal = assign_rewards(
            &RewardInputs { sequence_id: 1, outcome: Some(Outcome::Goal), shot_steps: &[], ball_positions: &balls },
            &g,
        )
        .unwrap();
        assert!(goal[..29].iter().all(|r| *r == 0.0));
        assert_eq!(goal[29], 1.0);

        let end = g.cell_center(40, 16);
        let mut balls_other = balls.clone();
        balls_other[29] = end;
        let other = assign_rewards(
            &RewardInputs { sequence_id: 2, outcome: Some(Outcome::Other), shot_steps: &[], ball_positions: &balls_other },
            &g,
        )
        .unwrap();
        assert_eq!(other[29], g.value(40, 16));
        assert_eq!(other.iter().sum::<f64>(), g.value(40, 16));

        let shot_at = g.cell_center(45, 10);
        let mut balls_shot = balls.clone();
        balls_shot[12] = shot_at;
        let conceded = assign_rewards(
            &RewardInputs { sequence_id: 3, outcome: Some(Outcome::ConcededNext), shot_steps: &[12], ball_positions: &balls_shot },
            &g,
        )
        .unwrap();
        assert_eq!(conceded[12], g.value(45, 10));
        assert_eq!(conceded[29], -1.0);
        assert_eq!(conceded.iter().filter(|r| **r != 0.0).count(), 2);

        assert!(matches!(
            assign_rewards(&RewardInputs { sequence_id: 4, outcome: None, shot_steps: &[], ball_positions: &balls }, &g),
            Err(Error::UnresolvedOutcome(4))
        ));
    }

    #[test]
    fn outcome_resolution() {
        assert_eq!(resolve_outcome(true, Some(true)), Outcome::Goal);
        assert_eq!(resolve_outcome(false, Some(true)), Outcome::ConcededNext);
        assert_eq!(resolve_outcome(false, Some(false)), Outcome::Other);
        assert_eq!(resolve_outcome(false, None), Outcome::Other);
    }
}
