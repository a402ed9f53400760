use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::Vec2;

/// Importance of a pitch location for the attacking team: a sigmoid in the
/// attacking direction times a Gaussian across the pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportanceSurface {
    /// x (meters) where the longitudinal factor is 0.5.
    pub sigmoid_midpoint: f64,
    /// 1/meters.
    pub sigmoid_steepness: f64,
    /// Lateral spread, meters.
    pub gaussian_sigma: f64,
}

impl Default for ImportanceSurface {
    fn default() -> Self {
        Self {
            sigmoid_midpoint: 17.5,
            sigmoid_steepness: 0.1,
            gaussian_sigma: 20.0,
        }
    }
}

impl ImportanceSurface {
    pub fn validate(&self) -> Result<()> {
        if !self.sigmoid_midpoint.is_finite() {
            return Err(Error::config("surface.sigmoid_midpoint", "must be finite"));
        }
        if !(self.sigmoid_steepness > 0.0 && self.sigmoid_steepness.is_finite()) {
            return Err(Error::config("surface.sigmoid_steepness", "must be > 0"));
        }
        if !(self.gaussian_sigma > 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::config("surface.gaussian_sigma", "must be > 0"));
        }
        Ok(())
    }

    pub fn importance(&self, point: Vec2) -> f64 {
        let longitudinal =
            1.0 / (1.0 + (-self.sigmoid_steepness * (point.x - self.sigmoid_midpoint)).exp());
        let lateral = (-point.y * point.y / (2.0 * self.gaussian_sigma * self.gaussian_sigma)).exp();
        longitudinal * lateral
    }
}
