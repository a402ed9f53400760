//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Grids handed to JavaScript are row-major with row 0 at the top of the
//! pitch (largest y), which is what a canvas wants.

use wasm_bindgen::prelude::*;

use pitchrl::edms::{shot_score_from, EdmsConfig, ImportanceField, SpaceScorer};
use pitchrl::ingest::{scene_frames, synth_generate, IngestConfig, MatchInput, Scenario, SynthOptions};
use pitchrl::pitch::{normalize_attack_direction, FrameSnapshot, KinematicsOptions, PitchConfig, Team, Vec2};

fn js(e: pitchrl::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    pitch: PitchConfig,
    edms: EdmsConfig,
    frame: FrameSnapshot,
}

#[wasm_bindgen]
impl Demo {
    /// A frame from the middle of a seeded synthetic counterattack, rotated so
    /// the team in possession attacks to the right.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64) -> Result<Demo, JsError> {
        let pitch = PitchConfig::default();
        let synth = synth_generate(&SynthOptions::new(seed, 1, Scenario::Counterattack)).map_err(js)?;
        let input = MatchInput {
            tracking: synth.tracking,
            events: synth.events,
            roster: synth.roster,
        };
        let scenes = scene_frames(&input, &pitch, &KinematicsOptions::default(), &IngestConfig::default()).map_err(js)?;
        let with_ball: Vec<_> = scenes.iter().filter(|s| s.frame.possession_team.is_some()).collect();
        let scene = with_ball
            .get(with_ball.len() * 3 / 5)
            .ok_or_else(|| JsError::new("synthetic match has no possession frames"))?;
        let frame = normalize_attack_direction(&scene.frame).map_err(js)?;
        Ok(Demo {
            pitch,
            edms: EdmsConfig::default(),
            frame,
        })
    }

    pub fn pitch_length(&self) -> f64 {
        self.pitch.length
    }

    pub fn pitch_width(&self) -> f64 {
        self.pitch.width
    }

    /// Seven numbers per player: id, team (0 attacking, 1 defending), x, y,
    /// vx, vy, on-ball flag.
    pub fn players(&self) -> Vec<f64> {
        let attacking = self.frame.possession_team;
        self.frame
            .players
            .iter()
            .flat_map(|p| {
                [
                    p.player_id as f64,
                    if Some(p.team) == attacking { 0.0 } else { 1.0 },
                    p.position.x,
                    p.position.y,
                    p.velocity.x,
                    p.velocity.y,
                    if self.frame.on_ball_player == Some(p.player_id) { 1.0 } else { 0.0 },
                ]
            })
            .collect()
    }

    pub fn ball(&self) -> Vec<f64> {
        vec![self.frame.ball.position.x, self.frame.ball.position.y]
    }

    /// Cells across and down for a grid at `resolution` meters.
    pub fn grid_dims(&self, resolution: f64) -> Vec<u32> {
        let g = pitchrl::edms::PitchGrid::new(&self.pitch, resolution);
        vec![g.nx as u32, g.ny as u32]
    }

    /// Importance of each cell centre.
    pub fn importance(&self, resolution: f64) -> Vec<f64> {
        let g = pitchrl::edms::PitchGrid::new(&self.pitch, resolution);
        flip_rows(g.nx, g.ny, (0..g.len()).map(|c| self.edms.surface.importance(g.center(c))).collect())
    }

    /// Player id owning each cell.
    pub fn regions(&self, resolution: f64) -> Result<Vec<u32>, JsError> {
        let field = ImportanceField::new(&self.pitch, &self.edms.surface, resolution);
        let scorer = SpaceScorer::new(&self.frame, &field, &self.pitch, self.edms.projection_horizon).map_err(js)?;
        let region = scorer.region();
        let ids = region.owner.iter().map(|&o| self.frame.players[o].player_id).collect();
        Ok(flip_rows(region.grid.nx, region.grid.ny, ids))
    }

    /// Space score per player, in `players()` order.
    pub fn space_scores(&self) -> Result<Vec<f64>, JsError> {
        let field = ImportanceField::new(&self.pitch, &self.edms.surface, self.edms.grid_resolution);
        let scorer = SpaceScorer::new(&self.frame, &field, &self.pitch, self.edms.projection_horizon).map_err(js)?;
        (0..self.frame.players.len()).map(|i| scorer.score(i).map_err(js)).collect()
    }

    /// Moves a player, clipped to the pitch. Velocity is kept.
    pub fn move_player(&mut self, player_id: u32, x: f64, y: f64) -> Result<(), JsError> {
        let to = self.pitch.clip(Vec2::new(x, y));
        let p = self
            .frame
            .players
            .iter_mut()
            .find(|p| p.player_id == player_id)
            .ok_or_else(|| JsError::new(&format!("no player {player_id}")))?;
        p.position = to;
        if self.frame.on_ball_player == Some(player_id) {
            self.frame.ball.position = to;
        }
        Ok(())
    }

    /// Shot score from `(x, y)` toward the right-hand goal against the
    /// defending outfield players; NaN out of range.
    pub fn shot(&self, x: f64, y: f64) -> f64 {
        let defending = self.frame.possession_team.map(Team::opponent).unwrap_or(Team::Away);
        let defenders: Vec<Vec2> = self
            .frame
            .team_players(defending)
            .filter(|p| p.visible && !p.goalkeeper)
            .map(|p| p.position)
            .collect();
        shot_score_from(Vec2::new(x, y), &defenders, &self.pitch, &self.edms.shot).unwrap_or(f64::NAN)
    }
}

fn flip_rows<T: Copy>(nx: usize, ny: usize, values: Vec<T>) -> Vec<T> {
    (0..ny).rev().flat_map(|j| values[j * nx..(j + 1) * nx].iter().copied()).collect()
}
