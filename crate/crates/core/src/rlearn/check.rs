//! Central finite-difference check of the analytic gradient.

use super::loss::{apply_mask_with, log_softmax};
use super::net::QRow;
use super::net::QNet;
use super::train::{add_l1_gradient, trajectory_gradient, TrainConfig};
use crate::error::Result;
use crate::ingest::Trajectory;

/// Training objective of one trajectory with the TD targets held fixed.
pub fn frozen_objective(net: &QNet, t: &Trajectory, targets: &[f64], config: &TrainConfig) -> Result<f64> {
    let pass = net.forward(&t.states)?;
    let mut total = config.lambda_l1 * net.l1_norm();
    for (step, q) in pass.q.iter().enumerate() {
        let logits = if config.mask { apply_mask_with(q, t.on_ball[step], config.mask_value) } else { *q };
        let a = t.actions[step];
        total += (targets[step] - logits[a]).powi(2);
        total -= config.lambda_action * log_softmax(&logits)[a];
    }
    Ok(total)
}

/// TD targets `r_t + gamma * Q(s_{t+1}, a_{t+1})` under the current parameters.
pub fn td_targets(net: &QNet, t: &Trajectory, config: &TrainConfig) -> Result<Vec<f64>> {
    let q = net.forward(&t.states)?.q;
    let logits = |s: usize| -> QRow {
        if config.mask {
            apply_mask_with(&q[s], t.on_ball[s], config.mask_value)
        } else {
            q[s]
        }
    };
    Ok((0..t.len())
        .map(|s| {
            let next = if s + 1 < t.len() { logits(s + 1)[t.actions[s + 1]] } else { 0.0 };
            t.rewards[s] + config.gamma * next
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Coordinates whose perturbation crosses a ReLU or L1 kink.
    pub skipped: usize,
}

/// Compares every coordinate of the analytic gradient with a central
/// difference of step `h`. Relative error is `|a - n| / max(|a|, |n|, floor)`.
pub fn check_gradient(net: &QNet, t: &Trajectory, config: &TrainConfig, h: f64, floor: f64) -> Result<GradientCheck> {
    let mut analytic = trajectory_gradient(net, t, config)?;
    add_l1_gradient(&mut analytic, &net.params, config.lambda_l1);
    let targets = td_targets(net, t, config)?;
    let base_pattern = net.relu_pattern(&t.states)?;
    let mut probe = net.clone();
    let mut report = GradientCheck {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for i in 0..net.params.len() {
        let w = net.params[i];
        probe.params[i] = w + h;
        let plus = frozen_objective(&probe, t, &targets, config)?;
        let kink_plus = probe.relu_pattern(&t.states)? != base_pattern;
        probe.params[i] = w - h;
        let minus = frozen_objective(&probe, t, &targets, config)?;
        let kink_minus = probe.relu_pattern(&t.states)? != base_pattern;
        probe.params[i] = w;
        if kink_plus || kink_minus || (config.lambda_l1 > 0.0 && w.abs() <= h) {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(floor);
        report.max_relative_error = report.max_relative_error.max(err);
        report.checked += 1;
    }
    Ok(report)
}
