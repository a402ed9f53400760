//! Masked SARSA Q-learning with a recurrent network shared across players.

mod adam;
mod check;
mod checkpoint;
mod loss;
mod net;
mod train;

pub use adam::{adam_step, AdamState};
pub use check::{check_gradient, frozen_objective, td_targets, GradientCheck};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use loss::{
    action_loss, apply_mask, apply_mask_with, log_softmax, softmax, td_loss, total_loss, trajectory_losses,
    StepGradients, MASK_VALUE,
};
pub use net::{ForwardPass, NetShape, QNet, QRow};
pub use train::{
    add_l1_gradient, evaluate, loss_log_csv, loss_record, standardize, train, trajectory_gradient, EvalMetrics,
    LossRecord, TrainConfig, TrainOutcome,
};
