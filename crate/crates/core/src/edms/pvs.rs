use crate::error::{Error, Result};
use crate::pitch::{FrameSnapshot, Team};

/// Objects in the position/velocity baseline state.
pub const PVS_OBJECTS: usize = 23;
pub const PVS_LEN: usize = PVS_OBJECTS * 4;

/// Position/velocity baseline: `(x, y, vx, vy)` for home players by jersey,
/// away players by jersey, then the ball.
pub fn assemble_pvs(frame: &FrameSnapshot) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(PVS_LEN);
    for team in [Team::Home, Team::Away] {
        let mut players: Vec<_> = frame.team_players(team).collect();
        if players.len() != 11 {
            return Err(Error::Frame {
                frame_index: frame.frame_index,
                message: format!("expected 11 {} players, found {}", team.as_str(), players.len()),
            });
        }
        players.sort_by_key(|p| (p.jersey, p.player_id));
        for p in players {
            out.extend([p.position.x, p.position.y, p.velocity.x, p.velocity.y]);
        }
    }
    let b = &frame.ball;
    out.extend([b.position.x, b.position.y, b.velocity.x, b.velocity.y]);
    Ok(out)
}

pub fn pvs_column_names() -> Vec<String> {
    let mut names = Vec::with_capacity(PVS_LEN);
    for team in ["home", "away"] {
        for slot in 1..=11 {
            for ch in ["x", "y", "vx", "vy"] {
                names.push(format!("{team}{slot}_{ch}"));
            }
        }
    }
    for ch in ["x", "y", "vx", "vy"] {
        names.push(format!("ball_{ch}"));
    }
    names
}
