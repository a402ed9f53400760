//! Decision-making state features: space, pass, shot, dribble and long-ball
//! scores, reach times, goal geometry, and the position/velocity baseline.

mod geometry;
mod grid;
mod pass;
mod pvs;
mod reach;
mod shot;
mod space;
mod state;
mod surface;
mod voronoi;

pub use geometry::{goal_geometry, long_ball_score, Goal};
pub use grid::{ImportanceField, PitchGrid};
pub use pass::{pass_score, PassInputs, PassScaling, PASS_WEIGHTS};
pub use pvs::{assemble_pvs, pvs_column_names, PVS_LEN, PVS_OBJECTS};
pub use reach::{
    lane_samples, team_time_to_point, time_to_reach_passline, time_to_reach_point, MotionModel,
};
pub use shot::{shot_score, shot_score_from, ShotConfig};
pub use space::{
    delta_space_score_8dir, direction_vectors, owned_importance, space_score, SpaceScorer,
};
pub use state::{
    edms_column_names, resolve_context, state_dim, EdmsState, FeatureEngine, FrameEdms,
    InterFeatures, IntraFeatures, OffBallFeatures, PossessionContext, INTER_WIDTH, INTRA_WIDTH,
    OFF_BALL_ROWS, OFF_BALL_WIDTH, STATE_LAYOUT_VERSION,
};
pub use surface::ImportanceSurface;
pub use voronoi::{dominant_region, DominantRegion};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn default_formations() -> Vec<String> {
    ["4-4-2", "4-3-3", "4-2-3-1", "3-5-2", "3-4-3", "5-3-2", "4-1-4-1", "4-5-1"]
        .into_iter()
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdmsConfig {
    pub surface: ImportanceSurface,
    pub motion: MotionModel,
    /// Cell size (meters) for dominant regions and space scores.
    pub grid_resolution: f64,
    /// Seconds a player's velocity is projected ahead for ownership.
    pub projection_horizon: f64,
    /// Pass-lane sample spacing, meters.
    pub lane_spacing: f64,
    pub shot: ShotConfig,
    pub formations: Vec<String>,
}

impl Default for EdmsConfig {
    fn default() -> Self {
        Self {
            surface: ImportanceSurface::default(),
            motion: MotionModel::default(),
            grid_resolution: 1.0,
            projection_horizon: 0.5,
            lane_spacing: 1.0,
            shot: ShotConfig::default(),
            formations: default_formations(),
        }
    }
}

impl EdmsConfig {
    pub fn validate(&self) -> Result<()> {
        self.surface.validate()?;
        self.motion.validate()?;
        self.shot.validate()?;
        if !(self.grid_resolution > 0.0) {
            return Err(Error::config("edms.grid_resolution", "must be > 0"));
        }
        if !(self.projection_horizon >= 0.0) {
            return Err(Error::config("edms.projection_horizon", "must be >= 0"));
        }
        if !(self.lane_spacing > 0.0) {
            return Err(Error::config("edms.lane_spacing", "must be > 0"));
        }
        Ok(())
    }
}
