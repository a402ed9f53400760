//! Training loop, evaluation and the loss log.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::loss::{total_loss, trajectory_losses, MASK_VALUE};
use super::net::{NetShape, QNet};
use crate::error::{Error, Result};
use crate::ingest::{Standardizer, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub lambda_l1: f64,
    pub lambda_action: f64,
    pub gamma: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Apply on-ball/off-ball action masking.
    pub mask: bool,
    pub mask_value: f64,
    pub dense: usize,
    pub hidden: usize,
    /// Trajectories per optimizer step. Gradients inside a batch are
    /// computed in parallel and summed in a fixed order.
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            lambda_l1: 0.001,
            lambda_action: 0.05,
            gamma: 1.0,
            epochs: 20,
            seed: 0,
            mask: true,
            mask_value: MASK_VALUE,
            dense: 64,
            hidden: 64,
            batch_size: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(format!("train.{field}"), msg));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate", "must be > 0");
        }
        if !(self.lambda_l1.is_finite() && self.lambda_l1 >= 0.0) {
            return bad("lambda_l1", "must be >= 0");
        }
        if !(self.lambda_action.is_finite() && self.lambda_action >= 0.0) {
            return bad("lambda_action", "must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma", "must lie in [0, 1]");
        }
        if !(self.mask_value.is_finite() && self.mask_value < -100.0) {
            return bad("mask_value", "must be a large negative number");
        }
        if self.dense == 0 || self.hidden == 0 {
            return bad("hidden", "layer sizes must be > 0");
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be >= 1");
        }
        Ok(())
    }

    fn mask_fill(&self) -> Option<f64> {
        self.mask.then_some(self.mask_value)
    }

    pub fn shape(&self, input: usize) -> NetShape {
        NetShape {
            input,
            dense: self.dense,
            hidden: self.hidden,
        }
    }
}

/// Per-step means over a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub action_loss: f64,
    pub td_loss: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub epoch: usize,
    pub action_loss: f64,
    pub td_loss: f64,
    pub total_loss: f64,
}

pub struct TrainOutcome {
    pub net: QNet,
    pub optimizer: AdamState,
    /// Epoch 0 evaluates the initial network; epoch `k` the network after
    /// `k` passes over the data.
    pub log: Vec<LossRecord>,
}

/// Copies of `trajectories` with standardized states.
pub fn standardize(trajectories: &[Trajectory], scaler: &Standardizer) -> Vec<Trajectory> {
    trajectories
        .iter()
        .map(|t| Trajectory {
            states: t.states.iter().map(|s| scaler.apply(s)).collect(),
            ..t.clone()
        })
        .collect()
}

fn check_dims(net: &QNet, data: &[Trajectory]) -> Result<()> {
    if data.iter().all(Trajectory::is_empty) {
        return Err(Error::EmptyDataset);
    }
    for t in data {
        if let Some(s) = t.states.iter().find(|s| s.len() != net.shape.input) {
            return Err(Error::Dimension {
                expected: net.shape.input,
                got: s.len(),
            });
        }
    }
    Ok(())
}

/// Dataset-mean per-step action and TD losses. Trajectories are scored in
/// parallel and summed in input order.
pub fn evaluate(net: &QNet, data: &[Trajectory], config: &TrainConfig) -> Result<EvalMetrics> {
    check_dims(net, data)?;
    let parts: Vec<(f64, f64, usize)> = data
        .par_iter()
        .map(|t| {
            let pass = net.forward(&t.states)?;
            let g = trajectory_losses(&pass.q, &t.actions, &t.rewards, &t.on_ball, config.gamma, 0.0, config.mask_fill())?;
            Ok((g.action, g.td, t.len()))
        })
        .collect::<Result<_>>()?;
    let (mut action, mut td, mut steps) = (0.0, 0.0, 0);
    for (a, d, n) in parts {
        action += a;
        td += d;
        steps += n;
    }
    Ok(EvalMetrics {
        action_loss: action / steps as f64,
        td_loss: td / steps as f64,
        steps,
    })
}

/// Loss log entry for a network: per-step means plus the weighted L1 term.
pub fn loss_record(epoch: usize, net: &QNet, data: &[Trajectory], config: &TrainConfig) -> Result<LossRecord> {
    let m = evaluate(net, data, config)?;
    Ok(LossRecord {
        epoch,
        action_loss: m.action_loss,
        td_loss: m.td_loss,
        total_loss: total_loss(m.td_loss, m.action_loss, net.l1_norm(), config.lambda_l1, config.lambda_action),
    })
}

/// Gradient of one trajectory's summed TD and weighted action losses.
pub fn trajectory_gradient(net: &QNet, t: &Trajectory, config: &TrainConfig) -> Result<Vec<f64>> {
    let pass = net.forward(&t.states)?;
    let g = trajectory_losses(
        &pass.q,
        &t.actions,
        &t.rewards,
        &t.on_ball,
        config.gamma,
        config.lambda_action,
        config.mask_fill(),
    )?;
    Ok(net.backward(&t.states, &pass, &g.dq))
}

/// Adds the L1 subgradient `lambda * sign(w)` (0 at w = 0).
pub fn add_l1_gradient(grad: &mut [f64], params: &[f64], lambda: f64) {
    if lambda == 0.0 {
        return;
    }
    for (g, p) in grad.iter_mut().zip(params) {
        if *p > 0.0 {
            *g += lambda;
        } else if *p < 0.0 {
            *g -= lambda;
        }
    }
}

/// Trains one network shared by every player trajectory. Each epoch visits
/// the trajectories in an order drawn from the seeded generator; each batch
/// of trajectories yields one Adam step. The hidden state starts from zero
/// for every trajectory.
pub fn train(data: &[Trajectory], config: &TrainConfig, init: Option<QNet>) -> Result<TrainOutcome> {
    config.validate()?;
    let input = data
        .iter()
        .find_map(|t| t.states.first().map(Vec::len))
        .ok_or(Error::EmptyDataset)?;
    let mut net = match init {
        Some(net) => net,
        None => QNet::init(config.shape(input), config.seed),
    };
    check_dims(&net, data)?;
    let mut optimizer = AdamState::new(net.params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0f_0a11);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = vec![loss_record(0, &net, data, config)?];
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let mut grad = if batch.len() == 1 {
                trajectory_gradient(&net, &data[batch[0]], config)?
            } else {
                let parts: Vec<Vec<f64>> = batch
                    .par_iter()
                    .map(|&i| trajectory_gradient(&net, &data[i], config))
                    .collect::<Result<_>>()?;
                let mut sum = vec![0.0; net.params.len()];
                for part in parts {
                    sum.iter_mut().zip(part).for_each(|(s, g)| *s += g);
                }
                sum
            };
            add_l1_gradient(&mut grad, &net.params, config.lambda_l1);
            adam_step(&mut net.params, &grad, &mut optimizer, config.learning_rate)?;
        }
        log.push(loss_record(epoch, &net, data, config)?);
    }
    Ok(TrainOutcome { net, optimizer, log })
}

pub fn loss_log_csv(log: &[LossRecord]) -> String {
    let mut out = String::from("epoch,action_loss,td_loss,total_loss\n");
    for r in log {
        out.push_str(&format!("{},{},{},{}\n", r.epoch, r.action_loss, r.td_loss, r.total_loss));
    }
    out
}
