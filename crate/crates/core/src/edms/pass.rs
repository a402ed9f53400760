use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear pass-score weights for distance to ball, space score, time for
/// the nearest opponent to reach the receiver, and to reach the pass lane.
pub const PASS_WEIGHTS: [f64; 4] = [0.5, 0.3, 0.2, 0.2];

/// Raw pass-score inputs in their natural units (m, score, s, s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PassInputs {
    pub dist_ball: f64,
    pub space_score: f64,
    pub time_to_reach_player: f64,
    pub time_to_reach_passline: f64,
}

impl PassInputs {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.dist_ball,
            self.space_score,
            self.time_to_reach_player,
            self.time_to_reach_passline,
        ]
    }
}

/// Weighted sum of (already scaled) inputs.
pub fn pass_score(dist_ball: f64, space_score: f64, time_to_reach_player: f64, time_to_reach_passline: f64) -> Result<f64> {
    let inputs = [
        ("dist_ball", dist_ball),
        ("space_score", space_score),
        ("time_to_reach_player", time_to_reach_player),
        ("time_to_reach_passline", time_to_reach_passline),
    ];
    let mut total = 0.0;
    for ((name, v), w) in inputs.into_iter().zip(PASS_WEIGHTS) {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
        total += w * v;
    }
    Ok(total)
}

/// Per-input min-max scaling fitted over a dataset. Values outside the fitted
/// range are clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassScaling {
    pub min: [f64; 4],
    pub max: [f64; 4],
}

impl Default for PassScaling {
    /// Identity on [0, 1].
    fn default() -> Self {
        Self {
            min: [0.0; 4],
            max: [1.0; 4],
        }
    }
}

impl PassScaling {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a PassInputs>) -> Self {
        let mut min = [f64::INFINITY; 4];
        let mut max = [f64::NEG_INFINITY; 4];
        for row in rows {
            for (k, v) in row.as_array().into_iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        if min[0].is_infinite() {
            return Self::default();
        }
        Self { min, max }
    }

    pub fn scale(&self, inputs: &PassInputs) -> [f64; 4] {
        let raw = inputs.as_array();
        std::array::from_fn(|k| {
            let span = self.max[k] - self.min[k];
            if span > 0.0 {
                ((raw[k] - self.min[k]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
    }

    pub fn score(&self, inputs: &PassInputs) -> Result<f64> {
        let s = self.scale(inputs);
        pass_score(s[0], s[1], s[2], s[3])
    }
}
