//! Rotational odometry for ultra-low-resolution (24x32) thermal cameras.
//!
//! The crate bundles everything needed to go from raw thermal frames to a
//! trained speed regressor and a cross-validated ablation report:
//!
//! - [`tensor`]: a small dense tensor type with the conv / pool / dense / ReLU
//!   kernels (forward and backward) and a seeded portable PRNG.
//! - [`model`]: the two-conv, two-FC network, its initialization, full
//!   backward pass and the `THOD` checkpoint format.
//! - [`train`]: berHu and MSE losses, Adam, and the deterministic training loop.
//! - [`dataset`]: the canonical on-disk dataset, CSV import, subsampling,
//!   frame windowing, Garden fold splitting and a synthetic rotating camera.
//! - [`eval`]: the leave-one-Garden-acquisition-out protocol, N_f / N_r
//!   ablations and box-plot statistics.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::{Real, Rng, Tensor};
