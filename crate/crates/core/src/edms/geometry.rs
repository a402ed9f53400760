use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::{FrameSnapshot, PitchConfig, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Own,
    Opponent,
}

/// Distance to the goal center and the absolute angle between the
/// point-to-goal ray and the pitch axis pointing at that goal.
pub fn goal_geometry(point: Vec2, goal: Goal, pitch: &PitchConfig) -> (f64, f64) {
    let center = match goal {
        Goal::Own => pitch.own_goal(),
        Goal::Opponent => pitch.opponent_goal(),
    };
    let offset = center - point;
    let toward = match goal {
        Goal::Own => -offset.x,
        Goal::Opponent => offset.x,
    };
    (offset.norm(), offset.y.abs().atan2(toward))
}

/// One-hot over (left, central, right) thirds of the pitch width, facing
/// `+x`, marking the tallest attacker other than the ball carrier. Equal
/// heights go to the lower jersey number.
pub fn long_ball_score(frame: &FrameSnapshot, pitch: &PitchConfig) -> Result<[f64; 3]> {
    let attacking = frame.attacking_team()?;
    let targets: Vec<_> = frame
        .team_players(attacking)
        .filter(|p| p.visible && Some(p.player_id) != frame.on_ball_player)
        .collect();
    let missing: Vec<u32> = targets
        .iter()
        .filter(|p| p.height.is_none())
        .map(|p| p.player_id)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingHeights(missing));
    }
    let mut out = [0.0; 3];
    let tallest = targets.iter().min_by(|a, b| {
        b.height
            .unwrap()
            .total_cmp(&a.height.unwrap())
            .then(a.jersey.cmp(&b.jersey))
    });
    if let Some(p) = tallest {
        let third = pitch.width / 6.0;
        let zone = if p.position.y > third {
            0
        } else if p.position.y < -third {
            2
        } else {
            1
        };
        out[zone] = 1.0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::testing::base_frame;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn goal_geometry_examples() {
        let p = PitchConfig::default();
        assert_eq!(goal_geometry(Vec2::new(52.5, 0.0), Goal::Opponent, &p), (0.0, 0.0));
        assert_eq!(goal_geometry(Vec2::new(32.5, 0.0), Goal::Opponent, &p), (20.0, 0.0));
        let (d, a) = goal_geometry(Vec2::new(42.5, 10.0), Goal::Opponent, &p);
        assert!((a - FRAC_PI_4).abs() < 1e-15);
        assert_eq!((d, a), goal_geometry(Vec2::new(42.5, -10.0), Goal::Opponent, &p));
        let (d, a) = goal_geometry(Vec2::new(-32.5, 0.0), Goal::Own, &p);
        assert_eq!((d, a), (20.0, 0.0));
    }

    fn heights(frame: &mut FrameSnapshot, h: f64) {
        for p in frame.players.iter_mut() {
            p.height = Some(h);
        }
    }

    #[test]
    fn tallest_in_centre() {
        let mut f = base_frame();
        heights(&mut f, 170.0);
        f.players[4].height = Some(195.0);
        f.players[4].position.y = 0.0;
        assert_eq!(long_ball_score(&f, &PitchConfig::default()).unwrap(), [0.0, 1.0, 0.0]);
        f.players[4].position.y = 20.0;
        assert_eq!(long_ball_score(&f, &PitchConfig::default()).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn equal_heights_lower_jersey_wins() {
        let mut f = base_frame();
        heights(&mut f, 170.0);
        f.players[2].height = Some(190.0);
        f.players[2].position.y = -25.0;
        f.players[6].height = Some(190.0);
        f.players[6].position.y = 25.0;
        assert_eq!(long_ball_score(&f, &PitchConfig::default()).unwrap(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn permuting_others_changes_nothing() {
        let mut f = base_frame();
        f.players[4].height = Some(199.0);
        let before = long_ball_score(&f, &PitchConfig::default()).unwrap();
        f.players[1..4].reverse();
        f.players.swap(6, 8);
        assert_eq!(long_ball_score(&f, &PitchConfig::default()).unwrap(), before);
    }

    #[test]
    fn missing_height_is_an_error() {
        let mut f = base_frame();
        f.players[3].height = None;
        assert!(matches!(
            long_ball_score(&f, &PitchConfig::default()),
            Err(Error::MissingHeights(ids)) if ids == vec![4]
        ));
    }
}
