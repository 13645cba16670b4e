//! The odometry network: conv(5x5) -> ReLU -> maxpool(2) -> conv(5x5) -> ReLU
//! -> FC -> ReLU -> FC -> ReLU -> linear scalar.

mod checkpoint;
mod config;
mod network;
mod params;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{param_count, CnnConfig, FRAME_HEIGHT, FRAME_WIDTH};
pub use network::{backward, build_model, forward, ForwardCache};
pub use params::{ModelParams, PARAM_NAMES};
