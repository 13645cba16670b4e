//! Losses, the Adam optimizer and the training loop.

mod adam;
mod config;
mod history;
mod loss;
mod trainer;

pub use adam::{adam_step, adam_update, AdamState};
pub use config::{LossKind, TrainConfig};
pub use history::{EpochRecord, TrainHistory, HISTORY_HEADER};
pub use loss::{berhu_loss, berhu_loss_fixed, mse_loss, BerhuOutput, BERHU_C_FLOOR, BERHU_C_RATIO};
pub use trainer::{evaluate_mse, predict, train};
