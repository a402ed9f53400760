use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::{FrameSnapshot, PlayerState, Team, Vec2};

/// Straight-line arrival model: after `reaction_time` seconds spent carrying
/// the current velocity, the player runs at `max_speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionModel {
    /// m/s.
    pub max_speed: f64,
    /// s.
    pub reaction_time: f64,
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            max_speed: 8.0,
            reaction_time: 0.0,
        }
    }
}

impl MotionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_speed > 0.0 && self.max_speed.is_finite()) {
            return Err(Error::config("motion.max_speed", "must be > 0"));
        }
        if !(self.reaction_time >= 0.0 && self.reaction_time.is_finite()) {
            return Err(Error::config("motion.reaction_time", "must be >= 0"));
        }
        Ok(())
    }
}

/// Seconds for `player` to reach `target`.
pub fn time_to_reach_point(player: &PlayerState, target: Vec2, model: &MotionModel) -> f64 {
    let offset = target - player.position;
    let dist = offset.norm();
    if dist == 0.0 {
        return 0.0;
    }
    let along = player.velocity.dot(offset) / dist;
    ((dist - along * model.reaction_time) / model.max_speed).max(0.0)
}

/// Fastest visible member of `team` to `target`.
pub fn team_time_to_point(frame: &FrameSnapshot, team: Team, target: Vec2, model: &MotionModel) -> Result<f64> {
    frame
        .team_players(team)
        .filter(|p| p.visible)
        .map(|p| time_to_reach_point(p, target, model))
        .min_by(f64::total_cmp)
        .ok_or(Error::NoOpponents)
}

/// Points every `spacing` meters from `from` to `to`, both ends included.
pub fn lane_samples(from: Vec2, to: Vec2, spacing: f64) -> Vec<Vec2> {
    let len = from.distance(to);
    let n = ((len / spacing).ceil() as usize).max(1);
    (0..=n)
        .map(|i| from + (to - from) * (i as f64 / n as f64))
        .collect()
}

/// Fastest opponent to any sampled point of the ball-to-receiver lane.
pub fn time_to_reach_passline(
    frame: &FrameSnapshot,
    receiver_index: usize,
    model: &MotionModel,
    spacing: f64,
) -> Result<f64> {
    let receiver = &frame.players[receiver_index];
    let lane = lane_samples(frame.ball.position, receiver.position, spacing);
    frame
        .team_players(receiver.team.opponent())
        .filter(|p| p.visible)
        .flat_map(|p| lane.iter().map(move |&q| time_to_reach_point(p, q, model)))
        .min_by(f64::total_cmp)
        .ok_or(Error::NoOpponents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::testing::base_frame;
    use proptest::prelude::*;

    fn player_at(x: f64, y: f64) -> PlayerState {
        PlayerState::new(1, Team::Away, 1, Vec2::new(x, y))
    }

    #[test]
    fn zero_distance_is_zero_time() {
        let p = player_at(3.0, 4.0);
        assert_eq!(time_to_reach_point(&p, p.position, &MotionModel::default()), 0.0);
    }

    #[test]
    fn stationary_eight_metres() {
        let p = player_at(0.0, 0.0);
        assert_eq!(time_to_reach_point(&p, Vec2::new(8.0, 0.0), &MotionModel::default()), 1.0);
    }

    #[test]
    fn running_toward_target_is_never_slower() {
        let model = MotionModel {
            max_speed: 8.0,
            reaction_time: 0.3,
        };
        let still = player_at(0.0, 0.0);
        let mut running = still.clone();
        running.velocity = Vec2::new(5.0, 0.0);
        let target = Vec2::new(12.0, 0.0);
        assert!(time_to_reach_point(&running, target, &model) <= time_to_reach_point(&still, target, &model));
    }

    fn lane_frame(opponent: Vec2) -> FrameSnapshot {
        let mut f = base_frame();
        f.players.iter_mut().filter(|p| p.team == Team::Away).for_each(|p| p.visible = false);
        f.players[13].visible = true;
        f.players[13].position = opponent;
        f.ball.position = Vec2::new(0.0, 0.0);
        f.players[5].position = Vec2::new(10.0, 0.0);
        f
    }

    #[test]
    fn passline_opponent_on_midpoint() {
        let f = lane_frame(Vec2::new(5.0, 0.0));
        assert_eq!(time_to_reach_passline(&f, 5, &MotionModel::default(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn passline_perpendicular_opponent() {
        let f = lane_frame(Vec2::new(5.0, 8.0));
        assert_eq!(time_to_reach_passline(&f, 5, &MotionModel::default(), 1.0).unwrap(), 1.0);
    }

    #[test]
    fn passline_without_opponents() {
        let mut f = lane_frame(Vec2::new(5.0, 8.0));
        f.players[13].visible = false;
        assert!(matches!(
            time_to_reach_passline(&f, 5, &MotionModel::default(), 1.0),
            Err(Error::NoOpponents)
        ));
    }

    proptest! {
        #[test]
        fn passline_never_slower_than_receiver_point(
            ox in -50.0f64..50.0, oy in -30.0f64..30.0,
            rx in -50.0f64..50.0, ry in -30.0f64..30.0,
        ) {
            let mut f = lane_frame(Vec2::new(ox, oy));
            f.players[5].position = Vec2::new(rx, ry);
            let model = MotionModel::default();
            let lane = time_to_reach_passline(&f, 5, &model, 1.0).unwrap();
            let direct = time_to_reach_point(&f.players[13], f.players[5].position, &model);
            prop_assert!(lane <= direct);
        }

        #[test]
        fn reach_time_is_lipschitz(
            px in -50.0f64..50.0, py in -30.0f64..30.0,
            vx in -6.0f64..6.0, vy in -6.0f64..6.0,
            ax in -50.0f64..50.0, ay in -30.0f64..30.0,
            bx in -50.0f64..50.0, by in -30.0f64..30.0,
        ) {
            let model = MotionModel::default();
            let mut p = player_at(px, py);
            p.velocity = Vec2::new(vx, vy);
            let (a, b) = (Vec2::new(ax, ay), Vec2::new(bx, by));
            let ta = time_to_reach_point(&p, a, &model);
            let tb = time_to_reach_point(&p, b, &model);
            prop_assert!((ta - tb).abs() <= a.distance(b) / model.max_speed + 1e-12);
            prop_assert_eq!(ta == 0.0, a == p.position);
        }
    }
}
