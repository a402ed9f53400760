use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::{FrameSnapshot, PitchConfig, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShotConfig {
    /// A defender blocks a ray with probability `1 - d / block_half_width`
    /// at lateral distance `d` (meters), zero beyond.
    pub block_half_width: f64,
    /// Trapezoid samples across the goalmouth angle.
    pub n_angles: usize,
    /// The score is only defined within this distance (meters) of goal.
    pub max_range: f64,
}

impl Default for ShotConfig {
    fn default() -> Self {
        Self {
            block_half_width: 1.0,
            n_angles: 101,
            max_range: 30.0,
        }
    }
}

impl ShotConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.block_half_width > 0.0) {
            return Err(Error::config("shot.block_half_width", "must be > 0"));
        }
        if self.n_angles < 2 {
            return Err(Error::config("shot.n_angles", "must be >= 2"));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::config("shot.max_range", "must be > 0"));
        }
        Ok(())
    }
}

/// Unblocked share of the goalmouth as seen from the shooter, in [0, 1].
///
/// Only outfield defenders inside the shooter/posts triangle count. Each
/// defender blocks a ray with a probability that falls off linearly with
/// lateral distance; blocks combine as `1 - prod(1 - p)` and the mean block
/// over the goalmouth angle is integrated with the trapezoid rule. `None`
/// beyond `max_range` from the goal center.
pub fn shot_score(
    frame: &FrameSnapshot,
    shooter_index: usize,
    pitch: &PitchConfig,
    config: &ShotConfig,
) -> Result<Option<f64>> {
    let shooter = &frame.players[shooter_index];
    if !pitch.contains(shooter.position) {
        return Err(Error::OffPitch(shooter.player_id));
    }
    let blockers: Vec<Vec2> = frame
        .team_players(shooter.team.opponent())
        .filter(|p| p.visible && !p.goalkeeper)
        .map(|p| p.position)
        .collect();
    Ok(shot_score_from(shooter.position, &blockers, pitch, config))
}

/// Geometry-only form of [`shot_score`]; `defenders` must already exclude
/// the goalkeeper.
pub fn shot_score_from(shooter: Vec2, defenders: &[Vec2], pitch: &PitchConfig, config: &ShotConfig) -> Option<f64> {
    if shooter.distance(pitch.opponent_goal()) > config.max_range {
        return None;
    }
    let (right, left) = pitch.opponent_posts();
    let inside: Vec<Vec2> = defenders
        .iter()
        .copied()
        .filter(|&d| in_triangle(d, shooter, right, left))
        .collect();
    if inside.is_empty() {
        return Some(1.0);
    }

    let a0 = angle_to(shooter, right);
    let a1 = angle_to(shooter, left);
    let span = a1 - a0;
    let block = |theta: f64| {
        let dir = Vec2::from_angle(theta);
        let unblocked: f64 = inside
            .iter()
            .map(|&d| {
                let rel = d - shooter;
                let along = rel.dot(dir);
                let lateral = if along > 0.0 {
                    (rel.x * dir.y - rel.y * dir.x).abs()
                } else {
                    rel.norm()
                };
                1.0 - (1.0 - lateral / config.block_half_width).max(0.0)
            })
            .product();
        1.0 - unblocked
    };
    if span.abs() < 1e-12 {
        return Some((1.0 - block(a0)).clamp(0.0, 1.0));
    }
    let n = config.n_angles.max(2);
    let h = span / (n - 1) as f64;
    let mut integral = 0.0;
    for k in 0..n {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        integral += w * block(a0 + h * k as f64);
    }
    let mean_block = integral * h / span;
    Some((1.0 - mean_block).clamp(0.0, 1.0))
}

fn angle_to(from: Vec2, to: Vec2) -> f64 {
    (to.y - from.y).atan2(to.x - from.x)
}

fn cross(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn in_triangle(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> bool {
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}
