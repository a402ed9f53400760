//! Velocity-aware dominant regions: each cell belongs to the visible player
//! whose position projected `horizon` seconds ahead is nearest, ties going to
//! the lower player id.

use crate::error::{Error, Result};
use crate::pitch::{FrameSnapshot, Vec2};

use super::PitchGrid;

/// Side length (cells) of the tiles used to cull candidate owners.
const TILE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DominantRegion {
    pub grid: PitchGrid,
    /// Index into `frame.players` owning each cell.
    pub owner: Vec<usize>,
}

impl DominantRegion {
    pub fn cells_of(&self, player_index: usize) -> impl Iterator<Item = usize> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == player_index)
            .map(|(c, _)| c)
    }
}

/// A projected point competing for cells.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Site {
    pub index: usize,
    pub id: u32,
    pub at: Vec2,
}

impl Site {
    #[inline]
    pub fn dist_sq(&self, c: Vec2) -> f64 {
        let dx = c.x - self.at.x;
        let dy = c.y - self.at.y;
        dx * dx + dy * dy
    }
}

/// Strict "is nearer" in the ownership order: squared distance, then id.
#[inline]
pub(crate) fn beats(d_a: f64, id_a: u32, d_b: f64, id_b: u32) -> bool {
    d_a < d_b || (d_a == d_b && id_a < id_b)
}

pub(crate) fn sites(frame: &FrameSnapshot, horizon: f64) -> Vec<Site> {
    frame
        .players
        .iter()
        .enumerate()
        .filter(|(_, p)| p.visible)
        .map(|(index, p)| Site {
            index,
            id: p.player_id,
            at: p.position + p.velocity * horizon,
        })
        .collect()
}

/// Owner of every grid cell.
///
/// Cells are processed in tiles; a player whose nearest possible distance to
/// the tile exceeds some other player's farthest distance to it cannot own any
/// cell there and is skipped. Surviving candidates are compared exactly.
pub fn dominant_region(frame: &FrameSnapshot, grid: &PitchGrid, horizon: f64) -> Result<DominantRegion> {
    let sites = sites(frame, horizon);
    if sites.is_empty() {
        return Err(Error::NoVisiblePlayers);
    }
    let mut owner = vec![0usize; grid.len()];
    let mut candidates: Vec<Site> = Vec::with_capacity(sites.len());

    for tj in (0..grid.ny).step_by(TILE) {
        let j_end = (tj + TILE).min(grid.ny);
        let (y_lo, y_hi) = (grid.center_y(tj), grid.center_y(j_end - 1));
        for ti in (0..grid.nx).step_by(TILE) {
            let i_end = (ti + TILE).min(grid.nx);
            let (x_lo, x_hi) = (grid.center_x(ti), grid.center_x(i_end - 1));

            let bound = sites
                .iter()
                .map(|s| far_sq(s.at, x_lo, x_hi, y_lo, y_hi))
                .fold(f64::INFINITY, f64::min);
            // Slack absorbs rounding in the bound arithmetic.
            let cutoff = bound * (1.0 + 1e-9) + 1e-9;
            candidates.clear();
            candidates.extend(
                sites
                    .iter()
                    .filter(|s| near_sq(s.at, x_lo, x_hi, y_lo, y_hi) <= cutoff),
            );

            for j in tj..j_end {
                let cy = grid.center_y(j);
                for i in ti..i_end {
                    let c = Vec2::new(grid.center_x(i), cy);
                    let mut best = candidates[0];
                    let mut best_d = best.dist_sq(c);
                    for s in &candidates[1..] {
                        let d = s.dist_sq(c);
                        if beats(d, s.id, best_d, best.id) {
                            best = *s;
                            best_d = d;
                        }
                    }
                    owner[j * grid.nx + i] = best.index;
                }
            }
        }
    }
    Ok(DominantRegion { grid: *grid, owner })
}

fn near_sq(p: Vec2, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> f64 {
    let dx = (x_lo - p.x).max(0.0).max(p.x - x_hi);
    let dy = (y_lo - p.y).max(0.0).max(p.y - y_hi);
    dx * dx + dy * dy
}

fn far_sq(p: Vec2, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> f64 {
    let dx = (p.x - x_lo).abs().max((p.x - x_hi).abs());
    let dy = (p.y - y_lo).abs().max((p.y - y_hi).abs());
    dx * dx + dy * dy
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Every cell against every visible player.
    pub fn brute_force(frame: &FrameSnapshot, grid: &PitchGrid, horizon: f64) -> Vec<usize> {
        let mut out = Vec::with_capacity(grid.len());
        for c in 0..grid.len() {
            let center = grid.center(c);
            let mut best: Option<(f64, u32, usize)> = None;
            for (k, p) in frame.players.iter().enumerate() {
                if !p.visible {
                    continue;
                }
                let q = p.position + p.velocity * horizon;
                let (dx, dy) = (center.x - q.x, center.y - q.y);
                let d = dx * dx + dy * dy;
                let better = match best {
                    None => true,
                    Some((bd, bid, _)) => d < bd || (d == bd && p.player_id < bid),
                };
                if better {
                    best = Some((d, p.player_id, k));
                }
            }
            out.push(best.unwrap().2);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::brute_force;
    use super::*;
    use crate::pitch::testing::base_frame;
    use crate::pitch::PitchConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force_on_random_frames() {
        let pitch = PitchConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut f = base_frame();
            for p in &mut f.players {
                p.position = Vec2::new(rng.gen_range(-52.0..52.0), rng.gen_range(-33.0..33.0));
                p.velocity = Vec2::new(rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0));
            }
            for res in [1.0, 0.5, 2.3] {
                let grid = PitchGrid::new(&pitch, res);
                let fast = dominant_region(&f, &grid, 0.5).unwrap();
                assert_eq!(fast.owner, brute_force(&f, &grid, 0.5));
            }
        }
    }

    #[test]
    fn exact_ties_go_to_lower_id() {
        let pitch = PitchConfig::default();
        let grid = PitchGrid::new(&pitch, 1.0);
        let mut f = base_frame();
        // Two players placed symmetrically about the cell-center row y = 0.5.
        f.players.iter_mut().for_each(|p| p.visible = false);
        f.players[4].visible = true;
        f.players[4].position = Vec2::new(0.5, -2.5);
        f.players[2].visible = true;
        f.players[2].position = Vec2::new(0.5, 3.5);
        let region = dominant_region(&f, &grid, 0.5).unwrap();
        assert_eq!(region.owner, brute_force(&f, &grid, 0.5));
        let tie_cell = grid.nx * 34 + 52;
        assert_eq!(grid.center(tie_cell), Vec2::new(0.0, 0.5));
        assert_eq!(region.owner[tie_cell], 2);
    }

    #[test]
    fn moving_player_wins_equidistant_cell() {
        let pitch = PitchConfig::default();
        let grid = PitchGrid::new(&pitch, 1.0);
        let mut f = base_frame();
        f.players.iter_mut().for_each(|p| p.visible = false);
        let target = Vec2::new(0.0, 0.5);
        f.players[0].visible = true;
        f.players[0].position = target + Vec2::new(-6.0, 0.0);
        f.players[12].visible = true;
        f.players[12].position = target + Vec2::new(6.0, 0.0);
        f.players[12].velocity = Vec2::new(-5.0, 0.0);
        let region = dominant_region(&f, &grid, 0.5).unwrap();
        let cell = grid.nx * 34 + 52;
        assert_eq!(grid.center(cell), target);
        assert_eq!(region.owner[cell], 12);
    }

    #[test]
    fn no_visible_players_is_an_error() {
        let mut f = base_frame();
        f.players.iter_mut().for_each(|p| p.visible = false);
        let grid = PitchGrid::new(&PitchConfig::default(), 1.0);
        assert!(matches!(dominant_region(&f, &grid, 0.5), Err(Error::NoVisiblePlayers)));
    }
}
