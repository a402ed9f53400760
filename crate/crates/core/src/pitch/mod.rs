//! Pitch geometry, frame snapshots, attack-direction normalization and the
//! offside line.
//!
//! Coordinates are meters with the origin at the center spot. After
//! normalization the team in possession attacks toward `+x`, so the opponent
//! goal sits at `(length / 2, 0)`.

mod kinematics;

pub use kinematics::{compute_kinematics, Kinematics, KinematicsOptions};

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positions may stray this far past the touchlines before a frame is rejected.
pub const BOUNDS_SLACK: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(radians: f64) -> Self {
        Self::new(radians.cos(), radians.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn mirror_x(self) -> Self {
        Self::new(-self.x, self.y)
    }

    pub fn mirror_y(self) -> Self {
        Self::new(self.x, -self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Home,
    Away,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Home => Team::Away,
            Team::Away => Team::Home,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Team::Home => "home",
            Team::Away => "away",
        }
    }
}

impl std::str::FromStr for Team {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "home" | "h" => Ok(Team::Home),
            "away" | "a" => Ok(Team::Away),
            other => Err(format!("unknown team `{other}`")),
        }
    }
}

/// Direction the team in possession attacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AttackDirection {
    #[default]
    #[serde(rename = "+x")]
    PositiveX,
    #[serde(rename = "-x")]
    NegativeX,
}

impl AttackDirection {
    pub fn sign(self) -> f64 {
        match self {
            AttackDirection::PositiveX => 1.0,
            AttackDirection::NegativeX => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            AttackDirection::PositiveX => AttackDirection::NegativeX,
            AttackDirection::NegativeX => AttackDirection::PositiveX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchConfig {
    pub length: f64,
    pub width: f64,
    pub goal_width: f64,
    pub frame_rate: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            length: 105.0,
            width: 68.0,
            goal_width: 7.32,
            frame_rate: 25.0,
        }
    }
}

impl PitchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.length) {
            return Err(Error::config("pitch.length", "must be > 0"));
        }
        if !positive(self.width) {
            return Err(Error::config("pitch.width", "must be > 0"));
        }
        if !positive(self.goal_width) || self.goal_width >= self.width {
            return Err(Error::config("pitch.goal_width", "must lie in (0, width)"));
        }
        if !positive(self.frame_rate) {
            return Err(Error::config("pitch.frame_rate", "must be > 0"));
        }
        Ok(())
    }

    pub fn half_length(&self) -> f64 {
        self.length / 2.0
    }

    pub fn half_width(&self) -> f64 {
        self.width / 2.0
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// Center of the goal attacked after normalization.
    pub fn opponent_goal(&self) -> Vec2 {
        Vec2::new(self.half_length(), 0.0)
    }

    pub fn own_goal(&self) -> Vec2 {
        Vec2::new(-self.half_length(), 0.0)
    }

    /// Opponent goalposts, `(right, left)` when facing `+x`.
    pub fn opponent_posts(&self) -> (Vec2, Vec2) {
        let half = self.goal_width / 2.0;
        (
            Vec2::new(self.half_length(), -half),
            Vec2::new(self.half_length(), half),
        )
    }

    pub fn clip(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(-self.half_length(), self.half_length()),
            p.y.clamp(-self.half_width(), self.half_width()),
        )
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x.abs() <= self.half_length() && p.y.abs() <= self.half_width()
    }

    pub fn contains_with_slack(&self, p: Vec2) -> bool {
        p.x.abs() <= self.half_length() + BOUNDS_SLACK && p.y.abs() <= self.half_width() + BOUNDS_SLACK
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerState {
    pub player_id: u32,
    pub team: Team,
    pub jersey: u32,
    pub position: Vec2,
    #[serde(default)]
    pub velocity: Vec2,
    #[serde(default)]
    pub acceleration: Vec2,
    /// Centimeters.
    #[serde(default)]
    pub height: Option<f64>,
    #[serde(default)]
    pub goalkeeper: bool,
    #[serde(default = "default_true")]
    pub visible: bool,
}

fn default_true() -> bool {
    true
}

impl PlayerState {
    pub fn new(player_id: u32, team: Team, jersey: u32, position: Vec2) -> Self {
        Self {
            player_id,
            team,
            jersey,
            position,
            velocity: Vec2::ZERO,
            acceleration: Vec2::ZERO,
            height: None,
            goalkeeper: false,
            visible: true,
        }
    }

    fn mirror_x(&mut self) {
        self.position = self.position.mirror_x();
        self.velocity = self.velocity.mirror_x();
        self.acceleration = self.acceleration.mirror_x();
    }

    fn mirror_y(&mut self) {
        self.position = self.position.mirror_y();
        self.velocity = self.velocity.mirror_y();
        self.acceleration = self.acceleration.mirror_y();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BallState {
    pub position: Vec2,
    #[serde(default)]
    pub velocity: Vec2,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Formations {
    pub home: Option<String>,
    pub away: Option<String>,
}

impl Formations {
    pub fn of(&self, team: Team) -> Option<&str> {
        match team {
            Team::Home => self.home.as_deref(),
            Team::Away => self.away.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSnapshot {
    pub frame_index: u64,
    pub timestamp: f64,
    pub players: Vec<PlayerState>,
    pub ball: BallState,
    pub possession_team: Option<Team>,
    pub on_ball_player: Option<u32>,
    #[serde(default)]
    pub attack_direction: AttackDirection,
    #[serde(default)]
    pub formations: Formations,
}

impl FrameSnapshot {
    pub fn player(&self, player_id: u32) -> Option<&PlayerState> {
        self.players.iter().find(|p| p.player_id == player_id)
    }

    pub fn player_index(&self, player_id: u32) -> Option<usize> {
        self.players.iter().position(|p| p.player_id == player_id)
    }

    pub fn team_players(&self, team: Team) -> impl Iterator<Item = &PlayerState> {
        self.players.iter().filter(move |p| p.team == team)
    }

    pub fn carrier(&self) -> Option<&PlayerState> {
        self.on_ball_player.and_then(|id| self.player(id))
    }

    pub fn attacking_team(&self) -> Result<Team> {
        self.possession_team
            .ok_or(Error::UnknownPossession(self.frame_index))
    }

    /// Checks the structural invariants: 11 players per team, unique ids, a
    /// known carrier and positions on (or just beside) the pitch.
    pub fn validate(&self, pitch: &PitchConfig) -> Result<()> {
        let fail = |message: String| Error::Frame {
            frame_index: self.frame_index,
            message,
        };
        if self.players.len() != 22 {
            return Err(fail(format!("expected 22 players, found {}", self.players.len())));
        }
        for team in [Team::Home, Team::Away] {
            let n = self.team_players(team).count();
            if n != 11 {
                return Err(fail(format!("expected 11 {} players, found {n}", team.as_str())));
            }
        }
        let mut ids: Vec<u32> = self.players.iter().map(|p| p.player_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(fail("duplicate player id".into()));
        }
        if let Some(id) = self.on_ball_player {
            if self.player(id).is_none() {
                return Err(fail(format!("on-ball player {id} is not in the frame")));
            }
        }
        for p in &self.players {
            if !p.position.is_finite() || !p.velocity.is_finite() {
                return Err(fail(format!("player {} has non-finite kinematics", p.player_id)));
            }
            if p.visible && !pitch.contains_with_slack(p.position) {
                return Err(fail(format!("player {} is outside the pitch", p.player_id)));
            }
            if matches!(p.height, Some(h) if !(h > 0.0)) {
                return Err(fail(format!("player {} has a non-positive height", p.player_id)));
            }
        }
        if !self.ball.position.is_finite() {
            return Err(fail("ball position is not finite".into()));
        }
        Ok(())
    }

    /// Reflects the frame about `x = 0` and flips the attack direction.
    pub fn mirrored_x(&self) -> FrameSnapshot {
        let mut out = self.clone();
        out.players.iter_mut().for_each(PlayerState::mirror_x);
        out.ball.position = out.ball.position.mirror_x();
        out.ball.velocity = out.ball.velocity.mirror_x();
        out.attack_direction = out.attack_direction.flipped();
        out
    }

    /// Reflects the frame about `y = 0` (swaps the flanks).
    pub fn mirrored_y(&self) -> FrameSnapshot {
        let mut out = self.clone();
        out.players.iter_mut().for_each(PlayerState::mirror_y);
        out.ball.position = out.ball.position.mirror_y();
        out.ball.velocity = out.ball.velocity.mirror_y();
        out
    }
}

/// Rotates the frame so the team in possession attacks toward `+x`.
pub fn normalize_attack_direction(frame: &FrameSnapshot) -> Result<FrameSnapshot> {
    frame.attacking_team()?;
    Ok(match frame.attack_direction {
        AttackDirection::PositiveX => frame.clone(),
        AttackDirection::NegativeX => frame.mirrored_x(),
    })
}

/// Offside line for `attacking_team` in a normalized frame, as an x coordinate.
///
/// The halfway line when every attacker is in their own half, otherwise the
/// deeper of the second-to-last defender and the ball.
pub fn offside_line(frame: &FrameSnapshot, attacking_team: Team) -> Result<f64> {
    offside_line_toward(frame, attacking_team, 1.0)
}

/// Same rule for a team attacking toward `sign * x`. The defending team of a
/// normalized frame attacks `-x`, so its line uses `sign = -1`.
pub fn offside_line_toward(frame: &FrameSnapshot, attacking_team: Team, sign: f64) -> Result<f64> {
    let mut defenders: Vec<f64> = frame
        .team_players(attacking_team.opponent())
        .filter(|p| p.visible)
        .map(|p| sign * p.position.x)
        .collect();
    if defenders.len() < 2 {
        return Err(Error::TooFewDefenders(defenders.len()));
    }
    let all_home = frame
        .team_players(attacking_team)
        .filter(|p| p.visible)
        .all(|p| sign * p.position.x < 0.0);
    if all_home {
        return Ok(0.0);
    }
    defenders.sort_by(|a, b| b.total_cmp(a));
    let line = defenders[1].max(sign * frame.ball.position.x);
    Ok(sign * line)
}

/// Whether the player stands in an offside position in a normalized frame.
/// Only off-ball players of the team in possession can be offside.
pub fn is_offside(frame: &FrameSnapshot, player_index: usize) -> Result<bool> {
    let attacking = frame.attacking_team()?;
    let p = &frame.players[player_index];
    if p.team != attacking || Some(p.player_id) == frame.on_ball_player || !p.visible {
        return Ok(false);
    }
    let line = offside_line(frame, attacking)?;
    Ok(p.position.x > line && p.position.x > 0.0)
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// A full 22-player frame: home attacks `+x` from a flat 4-4-2 shape, away
    /// defends in a mirrored one. Ids are 1..=11 home, 12..=22 away.
    pub fn base_frame() -> FrameSnapshot {
        let shape = [
            (-45.0, 0.0),
            (-25.0, -20.0),
            (-25.0, -7.0),
            (-25.0, 7.0),
            (-25.0, 20.0),
            (-8.0, -20.0),
            (-8.0, -7.0),
            (-8.0, 7.0),
            (-8.0, 20.0),
            (-2.0, -5.0),
            (-2.0, 5.0),
        ];
        let mut players = Vec::new();
        for (i, &(x, y)) in shape.iter().enumerate() {
            let mut p = PlayerState::new(i as u32 + 1, Team::Home, i as u32 + 1, Vec2::new(x, y));
            p.height = Some(175.0 + i as f64);
            p.goalkeeper = i == 0;
            players.push(p);
        }
        for (i, &(x, y)) in shape.iter().enumerate() {
            let mut p = PlayerState::new(i as u32 + 12, Team::Away, i as u32 + 1, Vec2::new(-x, -y));
            p.height = Some(176.0 + i as f64);
            p.goalkeeper = i == 0;
            players.push(p);
        }
        FrameSnapshot {
            frame_index: 0,
            timestamp: 0.0,
            players,
            ball: BallState {
                position: Vec2::new(-2.0, -5.0),
                velocity: Vec2::ZERO,
            },
            possession_team: Some(Team::Home),
            on_ball_player: Some(10),
            attack_direction: AttackDirection::PositiveX,
            formations: Formations {
                home: Some("4-4-2".into()),
                away: Some("4-4-2".into()),
            },
        }
    }
}
