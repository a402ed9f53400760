//! Per-player state assembly.
//!
//! A state vector is laid out as:
//!
//! | block      | width            | content                                              |
//! |------------|------------------|------------------------------------------------------|
//! | absolute   | 2 + formations   | ball-to-offside-line distance (attack, defence), formation one-hot |
//! | subject    | 1 + 13           | on-ball flag, the subject's own off-ball row         |
//! | off-ball   | 10 x 13          | attacking off-ball players ordered by jersey         |
//! | intra      | 16               | on-ball block while possession stays with the team   |
//! | inter      | 8                | on-ball block while possession changes hands         |
//! | context    | 2                | intra / inter indicators                             |
//!
//! Inactive context blocks are zero-filled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::{
    normalize_attack_direction, offside_line_toward, FrameSnapshot, PitchConfig, Team,
};

use super::{
    goal_geometry, long_ball_score, shot_score, team_time_to_point, time_to_reach_passline,
    EdmsConfig, Goal, ImportanceField, PassInputs, PassScaling, SpaceScorer,
};

pub const OFF_BALL_ROWS: usize = 10;
pub const OFF_BALL_WIDTH: usize = 13;
pub const INTRA_WIDTH: usize = 16;
pub const INTER_WIDTH: usize = 8;
pub const STATE_LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PossessionContext {
    Intra,
    Inter,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OffBallFeatures {
    pub inputs: PassInputs,
    pub delta_space_score: [f64; 8],
    pub pass_score: f64,
}

impl OffBallFeatures {
    pub const NAMES: [&'static str; OFF_BALL_WIDTH] = [
        "dist_ball",
        "time_to_reach_player",
        "time_to_reach_passline",
        "space_score",
        "dspace_000",
        "dspace_045",
        "dspace_090",
        "dspace_135",
        "dspace_180",
        "dspace_225",
        "dspace_270",
        "dspace_315",
        "pass_score",
    ];

    fn extend_into(&self, out: &mut Vec<f64>) {
        let i = &self.inputs;
        out.extend([i.dist_ball, i.time_to_reach_player, i.time_to_reach_passline, i.space_score]);
        out.extend(self.delta_space_score);
        out.push(self.pass_score);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntraFeatures {
    pub opponent_time_to_ball: f64,
    pub goal_distance: f64,
    pub goal_angle: f64,
    pub dribble_score: [f64; 8],
    /// 0 when undefined (out of range); see `shot_valid`.
    pub shot_score: f64,
    pub shot_valid: bool,
    pub long_ball_score: [f64; 3],
}

impl IntraFeatures {
    pub const NAMES: [&'static str; INTRA_WIDTH] = [
        "opponent_time_to_ball",
        "goal_distance",
        "goal_angle",
        "dribble_000",
        "dribble_045",
        "dribble_090",
        "dribble_135",
        "dribble_180",
        "dribble_225",
        "dribble_270",
        "dribble_315",
        "shot_score",
        "shot_valid",
        "long_ball_left",
        "long_ball_center",
        "long_ball_right",
    ];

    fn extend_into(&self, out: &mut Vec<f64>) {
        out.extend([self.opponent_time_to_ball, self.goal_distance, self.goal_angle]);
        out.extend(self.dribble_score);
        out.push(self.shot_score);
        out.push(f64::from(u8::from(self.shot_valid)));
        out.extend(self.long_ball_score);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InterFeatures {
    /// Fastest player to the ball, `[attacking, defending]` team.
    pub time_to_ball: [f64; 2],
    /// Ball to `[opponent goal, own goal]`.
    pub goal_distance: [f64; 2],
    pub goal_angle: [f64; 2],
    pub ball_speed: f64,
    /// 1 while the attacking team is losing the ball, 0 while it is gaining it.
    pub transition: f64,
}

impl InterFeatures {
    pub const NAMES: [&'static str; INTER_WIDTH] = [
        "time_to_ball_attack",
        "time_to_ball_defence",
        "ball_goal_distance_opponent",
        "ball_goal_distance_own",
        "ball_goal_angle_opponent",
        "ball_goal_angle_own",
        "ball_speed",
        "transition",
    ];

    fn extend_into(&self, out: &mut Vec<f64>) {
        out.extend(self.time_to_ball);
        out.extend(self.goal_distance);
        out.extend(self.goal_angle);
        out.push(self.ball_speed);
        out.push(self.transition);
    }
}

/// Features shared by every attacker at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEdms {
    pub frame_index: u64,
    pub context: PossessionContext,
    pub attacking_team: Team,
    pub carrier: Option<u32>,
    pub offside_distance: [f64; 2],
    pub formation: Vec<f64>,
    /// Off-ball features of every attacking non-carrier, keyed by player id.
    pub rows: Vec<(u32, OffBallFeatures)>,
    /// Player ids filling the off-ball block, in order.
    pub block_ids: Vec<u32>,
    pub intra: Option<IntraFeatures>,
    pub inter: Option<InterFeatures>,
}

/// One attacker's state.
#[derive(Debug, Clone, PartialEq)]
pub struct EdmsState {
    pub subject: u32,
    pub on_ball: bool,
    pub offside_distance: [f64; 2],
    pub formation: Vec<f64>,
    pub own: OffBallFeatures,
    pub off_ball: Vec<OffBallFeatures>,
    pub intra: IntraFeatures,
    pub inter: InterFeatures,
    pub context: PossessionContext,
}

impl EdmsState {
    pub fn to_vector(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(state_dim(self.formation.len()));
        out.extend(self.offside_distance);
        out.extend(&self.formation);
        out.push(f64::from(u8::from(self.on_ball)));
        self.own.extend_into(&mut out);
        for row in &self.off_ball {
            row.extend_into(&mut out);
        }
        self.intra.extend_into(&mut out);
        self.inter.extend_into(&mut out);
        out.push(f64::from(u8::from(self.context == PossessionContext::Intra)));
        out.push(f64::from(u8::from(self.context == PossessionContext::Inter)));
        out
    }
}

pub fn state_dim(n_formations: usize) -> usize {
    2 + n_formations + 1 + OFF_BALL_WIDTH * (1 + OFF_BALL_ROWS) + INTRA_WIDTH + INTER_WIDTH + 2
}

pub fn edms_column_names(formations: &[String]) -> Vec<String> {
    let mut names = vec!["offside_dist_attack".to_string(), "offside_dist_defence".to_string()];
    names.extend(formations.iter().map(|f| format!("formation_{f}")));
    names.push("subject_on_ball".into());
    names.extend(OffBallFeatures::NAMES.iter().map(|n| format!("subject_{n}")));
    for row in 0..OFF_BALL_ROWS {
        names.extend(OffBallFeatures::NAMES.iter().map(|n| format!("ob{row}_{n}")));
    }
    names.extend(IntraFeatures::NAMES.iter().map(|n| format!("intra_{n}")));
    names.extend(InterFeatures::NAMES.iter().map(|n| format!("inter_{n}")));
    names.push("ctx_intra".into());
    names.push("ctx_inter".into());
    names
}

impl FrameEdms {
    pub fn row(&self, player_id: u32) -> Option<&OffBallFeatures> {
        self.rows.iter().find(|(id, _)| *id == player_id).map(|(_, r)| r)
    }

    /// Recomputes every pass score from the stored raw inputs.
    pub fn rescore(&mut self, scaling: &PassScaling) -> Result<()> {
        for (_, row) in &mut self.rows {
            row.pass_score = scaling.score(&row.inputs)?;
        }
        Ok(())
    }

    pub fn state_for(&self, subject: u32) -> Result<EdmsState> {
        let on_ball = self.carrier == Some(subject);
        let own = if on_ball {
            OffBallFeatures::default()
        } else {
            *self.row(subject).ok_or(Error::UnknownPlayer(subject))?
        };
        let mut off_ball: Vec<OffBallFeatures> = self
            .block_ids
            .iter()
            .map(|id| *self.row(*id).expect("block ids come from rows"))
            .collect();
        off_ball.resize(OFF_BALL_ROWS, OffBallFeatures::default());
        Ok(EdmsState {
            subject,
            on_ball,
            offside_distance: self.offside_distance,
            formation: self.formation.clone(),
            own,
            off_ball,
            intra: self.intra.unwrap_or_default(),
            inter: self.inter.unwrap_or_default(),
            context: self.context,
        })
    }
}

/// Immutable feature evaluator; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct FeatureEngine {
    pub pitch: PitchConfig,
    pub config: EdmsConfig,
    pub field: ImportanceField,
    pub pass_scaling: PassScaling,
}

impl FeatureEngine {
    pub fn new(pitch: PitchConfig, config: EdmsConfig) -> Self {
        let field = ImportanceField::new(&pitch, &config.surface, config.grid_resolution);
        Self {
            pitch,
            config,
            field,
            pass_scaling: PassScaling::default(),
        }
    }

    pub fn with_pass_scaling(mut self, scaling: PassScaling) -> Self {
        self.pass_scaling = scaling;
        self
    }

    pub fn state_dim(&self) -> usize {
        state_dim(self.config.formations.len())
    }

    /// Features of every attacker at one frame.
    pub fn frame_features(&self, frame: &FrameSnapshot, context: PossessionContext) -> Result<FrameEdms> {
        let frame = normalize_attack_direction(frame)?;
        let frame = &frame;
        let attacking = frame.attacking_team()?;
        let carrier = frame.carrier();
        if context == PossessionContext::Intra && carrier.is_none_or(|c| c.team != attacking) {
            return Err(Error::UnresolvedCarrier(frame.frame_index));
        }
        let cfg = &self.config;
        let pitch = &self.pitch;
        let ball = frame.ball.position;

        let attack_line = offside_line_toward(frame, attacking, 1.0)?;
        let defence_line = offside_line_toward(frame, attacking.opponent(), -1.0)?;
        let offside_distance = [attack_line - ball.x, ball.x - defence_line];

        let formation = {
            let name = frame.formations.of(attacking);
            cfg.formations
                .iter()
                .map(|f| f64::from(u8::from(Some(f.as_str()) == name)))
                .collect()
        };

        let scorer = SpaceScorer::new(frame, &self.field, pitch, cfg.projection_horizon)?;
        let mut rows = Vec::with_capacity(11);
        for (idx, p) in frame.players.iter().enumerate() {
            if p.team != attacking || Some(p.player_id) == frame.on_ball_player {
                continue;
            }
            let time_to_reach_player = team_time_to_point(frame, attacking.opponent(), p.position, &cfg.motion)?;
            let inputs = PassInputs {
                dist_ball: p.position.distance(ball),
                space_score: scorer.score(idx)?,
                time_to_reach_player,
                time_to_reach_passline: time_to_reach_passline(frame, idx, &cfg.motion, cfg.lane_spacing)?,
            };
            rows.push((
                p.player_id,
                OffBallFeatures {
                    inputs,
                    delta_space_score: scorer.deltas(idx)?,
                    pass_score: self.pass_scaling.score(&inputs)?,
                },
            ));
        }
        let block_ids = block_order(frame, attacking);

        let intra = match context {
            PossessionContext::Intra => {
                let c = carrier.expect("checked above");
                let idx = frame.player_index(c.player_id).expect("carrier is in frame");
                let (goal_distance, goal_angle) = goal_geometry(c.position, Goal::Opponent, pitch);
                let shot = shot_score(frame, idx, pitch, &cfg.shot)?;
                Some(IntraFeatures {
                    opponent_time_to_ball: team_time_to_point(frame, attacking.opponent(), ball, &cfg.motion)?,
                    goal_distance,
                    goal_angle,
                    dribble_score: scorer.deltas(idx)?,
                    shot_score: shot.unwrap_or(0.0),
                    shot_valid: shot.is_some(),
                    long_ball_score: long_ball_score(frame, pitch)?,
                })
            }
            PossessionContext::Inter => None,
        };
        let inter = match context {
            PossessionContext::Inter => {
                let (d_opp, a_opp) = goal_geometry(ball, Goal::Opponent, pitch);
                let (d_own, a_own) = goal_geometry(ball, Goal::Own, pitch);
                let losing = carrier.is_some_and(|c| c.team == attacking);
                Some(InterFeatures {
                    time_to_ball: [
                        team_time_to_point(frame, attacking, ball, &cfg.motion)?,
                        team_time_to_point(frame, attacking.opponent(), ball, &cfg.motion)?,
                    ],
                    goal_distance: [d_opp, d_own],
                    goal_angle: [a_opp, a_own],
                    ball_speed: frame.ball.velocity.norm(),
                    transition: f64::from(u8::from(losing)),
                })
            }
            PossessionContext::Intra => None,
        };

        Ok(FrameEdms {
            frame_index: frame.frame_index,
            context,
            attacking_team: attacking,
            carrier: frame.on_ball_player,
            offside_distance,
            formation,
            rows,
            block_ids,
            intra,
            inter,
        })
    }

    /// State of one attacker.
    pub fn assemble_state(&self, frame: &FrameSnapshot, context: PossessionContext, subject: u32) -> Result<EdmsState> {
        self.frame_features(frame, context)?.state_for(subject)
    }
}

/// Attacking non-carriers by jersey, at most ten. With eleven candidates the
/// goalkeeper (or else the deepest player) is left out.
fn block_order(frame: &FrameSnapshot, attacking: Team) -> Vec<u32> {
    let mut candidates: Vec<_> = frame
        .team_players(attacking)
        .filter(|p| Some(p.player_id) != frame.on_ball_player)
        .collect();
    if candidates.len() > OFF_BALL_ROWS {
        let drop = candidates
            .iter()
            .position(|p| p.goalkeeper)
            .unwrap_or_else(|| {
                candidates
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.position.x.total_cmp(&b.1.position.x))
                    .map(|(i, _)| i)
                    .unwrap()
            });
        candidates.remove(drop);
        candidates.truncate(OFF_BALL_ROWS);
    }
    candidates.sort_by_key(|p| (p.jersey, p.player_id));
    candidates.into_iter().map(|p| p.player_id).collect()
}

/// Context of a frame from the teams of the current and the next on-ball
/// actor: possession changes hands between two actions by different teams.
pub fn resolve_context(current_actor: Option<Team>, next_actor: Option<Team>, attacking: Team) -> PossessionContext {
    match (current_actor, next_actor) {
        (Some(cur), Some(next)) if cur == attacking && next == attacking => PossessionContext::Intra,
        (Some(cur), None) if cur == attacking => PossessionContext::Intra,
        _ => PossessionContext::Inter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::testing::base_frame;
    use crate::pitch::{AttackDirection, Vec2};

    fn engine() -> FeatureEngine {
        FeatureEngine::new(PitchConfig::default(), EdmsConfig::default())
    }

    #[test]
    fn deterministic_and_sized() {
        let e = engine();
        let f = base_frame();
        let a = e.assemble_state(&f, PossessionContext::Intra, 3).unwrap().to_vector();
        let b = e.assemble_state(&f, PossessionContext::Intra, 3).unwrap().to_vector();
        assert_eq!(a, b);
        assert_eq!(a.len(), e.state_dim());
        assert_eq!(edms_column_names(&e.config.formations).len(), e.state_dim());
    }

    #[test]
    fn intra_context_zeroes_inter_block() {
        let e = engine();
        let s = e.assemble_state(&base_frame(), PossessionContext::Intra, 3).unwrap();
        assert_eq!(s.off_ball.len(), OFF_BALL_ROWS);
        let v = s.to_vector();
        let names = edms_column_names(&e.config.formations);
        for (n, x) in names.iter().zip(&v) {
            if n.starts_with("inter_") || n == "ctx_inter" {
                assert_eq!(*x, 0.0, "{n}");
            }
        }
        assert_eq!(v[names.iter().position(|n| n == "ctx_intra").unwrap()], 1.0);
    }

    #[test]
    fn carrier_state_has_empty_own_row() {
        let e = engine();
        let s = e.assemble_state(&base_frame(), PossessionContext::Intra, 10).unwrap();
        assert!(s.on_ball);
        assert_eq!(s.own, OffBallFeatures::default());
        assert!(s.intra.goal_distance > 0.0);
    }

    #[test]
    fn intra_needs_attacking_carrier() {
        let e = engine();
        let mut f = base_frame();
        f.on_ball_player = Some(15);
        assert!(matches!(
            e.frame_features(&f, PossessionContext::Intra),
            Err(Error::UnresolvedCarrier(0))
        ));
        let inter = e.frame_features(&f, PossessionContext::Inter).unwrap();
        assert_eq!(inter.inter.unwrap().transition, 0.0);
        // Eleven off-ball attackers: the goalkeeper leaves the block.
        assert_eq!(inter.block_ids.len(), 10);
        assert!(!inter.block_ids.contains(&1));
        f.on_ball_player = Some(10);
        let losing = e.frame_features(&f, PossessionContext::Inter).unwrap();
        assert_eq!(losing.inter.unwrap().transition, 1.0);
    }

    #[test]
    fn offside_attacker_row_has_zero_space() {
        let e = engine();
        let mut f = base_frame();
        f.players[10].position = Vec2::new(38.0, 2.0);
        let fe = e.frame_features(&f, PossessionContext::Intra).unwrap();
        assert_eq!(fe.row(11).unwrap().inputs.space_score, 0.0);
    }

    #[test]
    fn column_names_follow_values() {
        let e = engine();
        let f = base_frame();
        let fe = e.frame_features(&f, PossessionContext::Intra).unwrap();
        let row = *fe.row(11).unwrap();
        let v = fe.state_for(11).unwrap().to_vector();
        let names = edms_column_names(&e.config.formations);
        let at = |name: &str| v[names.iter().position(|n| n == name).unwrap()];
        assert_eq!(at("subject_dist_ball"), row.inputs.dist_ball);
        assert_eq!(at("subject_space_score"), row.inputs.space_score);
        assert_eq!(at("subject_time_to_reach_player"), row.inputs.time_to_reach_player);
        assert_eq!(at("subject_time_to_reach_passline"), row.inputs.time_to_reach_passline);
        assert_eq!(at("subject_dspace_090"), row.delta_space_score[2]);
        assert_eq!(at("subject_pass_score"), row.pass_score);
    }

    #[test]
    fn normalization_is_applied() {
        let e = engine();
        let f = base_frame();
        let mut flipped = f.mirrored_x();
        assert_eq!(flipped.attack_direction, AttackDirection::NegativeX);
        let a = e.assemble_state(&f, PossessionContext::Intra, 6).unwrap().to_vector();
        let b = e.assemble_state(&flipped, PossessionContext::Intra, 6).unwrap().to_vector();
        assert_eq!(a, b);
        flipped.possession_team = None;
        assert!(e.assemble_state(&flipped, PossessionContext::Intra, 6).is_err());
    }

    #[test]
    fn context_resolution() {
        use PossessionContext::*;
        let h = Team::Home;
        let a = Team::Away;
        assert_eq!(resolve_context(Some(h), Some(h), h), Intra);
        assert_eq!(resolve_context(Some(h), None, h), Intra);
        assert_eq!(resolve_context(Some(h), Some(a), h), Inter);
        assert_eq!(resolve_context(Some(a), Some(h), h), Inter);
        assert_eq!(resolve_context(None, Some(h), h), Inter);
    }
}
