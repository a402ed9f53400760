//! Space scores: importance-weighted area of a player's dominant region,
//! normalized by the pitch area, and its change under 1 m displacements.

use crate::error::Result;
use crate::pitch::{is_offside, FrameSnapshot, PitchConfig, Vec2};

use super::voronoi::{beats, dominant_region, sites, DominantRegion, Site};
use super::ImportanceField;

/// Unit vectors for the eight movement directions: 0 degrees toward the
/// opponent goal, counter-clockwise in 45 degree steps.
pub fn direction_vectors() -> [Vec2; 8] {
    std::array::from_fn(|k| Vec2::from_angle(k as f64 * std::f64::consts::FRAC_PI_4))
}

/// Sum of `weights` over the cells each player owns, indexed like `frame.players`.
pub fn owned_importance(region: &DominantRegion, field: &ImportanceField, n_players: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_players];
    for (cell, &o) in region.owner.iter().enumerate() {
        out[o] += field.weights[cell];
    }
    out
}

/// Space-score evaluator for one frame: the dominant region is computed once
/// and displaced variants are scored incrementally against it.
pub struct SpaceScorer<'a> {
    frame: &'a FrameSnapshot,
    field: &'a ImportanceField,
    pitch: &'a PitchConfig,
    horizon: f64,
    region: DominantRegion,
    sites: Vec<Site>,
    by_index: Vec<Option<Site>>,
    owned: Vec<f64>,
}

impl<'a> SpaceScorer<'a> {
    pub fn new(
        frame: &'a FrameSnapshot,
        field: &'a ImportanceField,
        pitch: &'a PitchConfig,
        horizon: f64,
    ) -> Result<Self> {
        let region = dominant_region(frame, &field.grid, horizon)?;
        let owned = owned_importance(&region, field, frame.players.len());
        let sites = sites(frame, horizon);
        let mut by_index = vec![None; frame.players.len()];
        for s in &sites {
            by_index[s.index] = Some(*s);
        }
        Ok(Self {
            frame,
            field,
            pitch,
            horizon,
            region,
            sites,
            by_index,
            owned,
        })
    }

    pub fn region(&self) -> &DominantRegion {
        &self.region
    }

    /// Unnormalized owned importance per player.
    pub fn owned(&self) -> &[f64] {
        &self.owned
    }

    /// Space score of `player_index`; exactly 0 in an offside position.
    pub fn score(&self, player_index: usize) -> Result<f64> {
        if is_offside(self.frame, player_index)? {
            return Ok(0.0);
        }
        Ok(self.owned[player_index] / self.field.pitch_area)
    }

    /// Space score after moving the player to `to` (clipped to the pitch),
    /// keeping everyone else fixed.
    pub fn displaced_score(&self, player_index: usize, to: Vec2) -> Result<f64> {
        let to = self.pitch.clip(to);
        let mut moved = self.frame.clone();
        moved.players[player_index].position = to;
        if is_offside(&moved, player_index)? {
            return Ok(0.0);
        }
        let player = &self.frame.players[player_index];
        if !player.visible {
            return Ok(0.0);
        }
        let projected = Site {
            index: player_index,
            id: player.player_id,
            at: to + player.velocity * self.horizon,
        };
        let others: Vec<Site> = self
            .sites
            .iter()
            .copied()
            .filter(|s| s.index != player_index)
            .collect();
        let grid = &self.field.grid;
        let mut total = 0.0;
        for (cell, &owner) in self.region.owner.iter().enumerate() {
            let c = grid.center(cell);
            let rival = if owner != player_index {
                self.by_index[owner]
            } else {
                nearest(&others, c)
            };
            let wins = match rival {
                None => true,
                Some(r) => beats(projected.dist_sq(c), projected.id, r.dist_sq(c), r.id),
            };
            if wins {
                total += self.field.weights[cell];
            }
        }
        Ok(total / self.field.pitch_area)
    }

    /// Change in space score for a 1 m step in each of the eight directions.
    pub fn deltas(&self, player_index: usize) -> Result<[f64; 8]> {
        let base = self.score(player_index)?;
        let from = self.frame.players[player_index].position;
        let mut out = [0.0; 8];
        for (slot, dir) in out.iter_mut().zip(direction_vectors()) {
            *slot = self.displaced_score(player_index, from + dir)? - base;
        }
        Ok(out)
    }
}

fn nearest(sites: &[Site], c: Vec2) -> Option<Site> {
    let mut it = sites.iter();
    let mut best = *it.next()?;
    let mut best_d = best.dist_sq(c);
    for s in it {
        let d = s.dist_sq(c);
        if beats(d, s.id, best_d, best.id) {
            best = *s;
            best_d = d;
        }
    }
    Some(best)
}

/// One-shot space score.
pub fn space_score(
    frame: &FrameSnapshot,
    player_index: usize,
    field: &ImportanceField,
    pitch: &PitchConfig,
    horizon: f64,
) -> Result<f64> {
    SpaceScorer::new(frame, field, pitch, horizon)?.score(player_index)
}

/// One-shot eight-direction space-score deltas.
pub fn delta_space_score_8dir(
    frame: &FrameSnapshot,
    player_index: usize,
    field: &ImportanceField,
    pitch: &PitchConfig,
    horizon: f64,
) -> Result<[f64; 8]> {
    SpaceScorer::new(frame, field, pitch, horizon)?.deltas(player_index)
}
