//! Action masking and the TD, action and total losses.

use super::net::QRow;
use crate::error::{Error, Result};
use crate::ingest::{ActionMask, N_ACTIONS};

pub const MASK_VALUE: f64 = -9999.0;

/// Replaces the entries outside the player's valid subset with `MASK_VALUE`.
pub fn apply_mask(q: &QRow, on_ball: bool) -> QRow {
    apply_mask_with(q, on_ball, MASK_VALUE)
}

pub fn apply_mask_with(q: &QRow, on_ball: bool, value: f64) -> QRow {
    let mask = ActionMask::for_player(on_ball);
    std::array::from_fn(|a| if mask.allows(a) { q[a] } else { value })
}

/// `sum_t (r_t + gamma * q_next_t - q_cur_t)^2`, where `q_next` is the value
/// of the action actually taken at the next step and 0 after the last one.
pub fn td_loss(q_cur: &[f64], rewards: &[f64], q_next: &[f64], gamma: f64) -> Result<f64> {
    if q_cur.len() != rewards.len() || q_cur.len() != q_next.len() {
        return Err(Error::LengthMismatch {
            what: "td loss inputs",
            left: q_cur.len(),
            right: rewards.len().min(q_next.len()),
        });
    }
    Ok(q_cur
        .iter()
        .zip(rewards)
        .zip(q_next)
        .map(|((q, r), n)| (r + gamma * n - q).powi(2))
        .sum())
}

/// Log-softmax over all 16 entries.
pub fn log_softmax(q: &QRow) -> QRow {
    let m = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + q.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    std::array::from_fn(|a| q[a] - lse)
}

pub fn softmax(q: &QRow) -> QRow {
    let ls = log_softmax(q);
    std::array::from_fn(|a| ls[a].exp())
}

/// `-sum_t log softmax(q_t)[a_t]`. With `masks`, each label must be valid
/// for its step.
pub fn action_loss(q: &[QRow], actions: &[usize], masks: Option<&[ActionMask]>) -> Result<f64> {
    if q.len() != actions.len() {
        return Err(Error::LengthMismatch {
            what: "action loss inputs",
            left: q.len(),
            right: actions.len(),
        });
    }
    let mut total = 0.0;
    for (t, (row, &a)) in q.iter().zip(actions).enumerate() {
        if a >= N_ACTIONS || masks.is_some_and(|m| !m[t].allows(a)) {
            return Err(Error::InvalidLabel { action: a, step: t });
        }
        total -= log_softmax(row)[a];
    }
    Ok(total)
}

pub fn total_loss(td: f64, action: f64, l1: f64, lambda_l1: f64, lambda_action: f64) -> f64 {
    td + lambda_l1 * l1 + lambda_action * action
}

/// Summed losses of one trajectory and their gradient with respect to each
/// step's raw Q row. The TD target is treated as a constant. `mask` is the
/// fill value for invalid actions, or `None` to train without masking.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGradients {
    pub td: f64,
    pub action: f64,
    pub dq: Vec<QRow>,
}

pub fn trajectory_losses(
    q: &[QRow],
    actions: &[usize],
    rewards: &[f64],
    on_ball: &[bool],
    gamma: f64,
    lambda_action: f64,
    mask: Option<f64>,
) -> Result<StepGradients> {
    let masked = mask.is_some();
    let fill = |row: &QRow, on: bool| match mask {
        Some(v) => apply_mask_with(row, on, v),
        None => *row,
    };
    let n = q.len();
    for (what, len) in [("actions", actions.len()), ("rewards", rewards.len()), ("masks", on_ball.len())] {
        if len != n {
            return Err(Error::LengthMismatch { what, left: len, right: n });
        }
    }
    let mut dq = vec![[0.0; N_ACTIONS]; n];
    let (mut td, mut action) = (0.0, 0.0);
    for t in 0..n {
        let a = actions[t];
        let mask = ActionMask::for_player(on_ball[t]);
        if a >= N_ACTIONS || (masked && !mask.allows(a)) {
            return Err(Error::InvalidLabel { action: a, step: t });
        }
        let logits = fill(&q[t], on_ball[t]);
        let q_next = if t + 1 < n {
            fill(&q[t + 1], on_ball[t + 1])[actions[t + 1]]
        } else {
            0.0
        };
        let residual = rewards[t] + gamma * q_next - logits[a];
        td += residual * residual;
        dq[t][a] -= 2.0 * residual;

        let ls = log_softmax(&logits);
        action -= ls[a];
        if lambda_action != 0.0 {
            for k in 0..N_ACTIONS {
                if masked && !mask.allows(k) {
                    continue;
                }
                let target = if k == a { 1.0 } else { 0.0 };
                dq[t][k] += lambda_action * (ls[k].exp() - target);
            }
        }
    }
    Ok(StepGradients { td, action, dq })
}
