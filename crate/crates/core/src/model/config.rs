use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::pooled_len;

/// Sensor frame height in pixels.
pub const FRAME_HEIGHT: usize = 24;
/// Sensor frame width in pixels.
pub const FRAME_WIDTH: usize = 32;

/// Structural knobs of the network. Every parameter shape follows from these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnnConfig {
    /// Consecutive frames stacked as input channels (N_f).
    pub n_frames: usize,
    /// Resolution subsampling factor (N_r), one of 1, 2, 3.
    pub subsample: usize,
    pub conv1_filters: usize,
    pub conv2_filters: usize,
    pub fc1: usize,
    pub fc2: usize,
    /// Square, odd convolution kernel size.
    pub kernel: usize,
}

impl Default for CnnConfig {
    fn default() -> Self {
        Self {
            n_frames: 3,
            subsample: 1,
            conv1_filters: 6,
            conv2_filters: 16,
            fc1: 120,
            fc2: 80,
            kernel: 5,
        }
    }
}

impl CnnConfig {
    /// The standard layer sizes with the given N_f and N_r.
    pub fn new(n_frames: usize, subsample: usize) -> Result<Self> {
        let cfg = Self {
            n_frames,
            subsample,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_frames < 1 {
            return Err(Error::Config("nf must be ≥ 1".into()));
        }
        if !(1..=3).contains(&self.subsample) {
            return Err(Error::Config(format!(
                "nr must be 1, 2 or 3, got {}",
                self.subsample
            )));
        }
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(Error::Config(format!(
                "kernel size must be odd, got {}",
                self.kernel
            )));
        }
        for (name, v) in [
            ("conv1_filters", self.conv1_filters),
            ("conv2_filters", self.conv2_filters),
            ("fc1", self.fc1),
            ("fc2", self.fc2),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.flatten_size() == 0 {
            return Err(Error::Config("flatten size is zero".into()));
        }
        Ok(())
    }

    pub fn input_height(&self) -> usize {
        FRAME_HEIGHT / self.subsample
    }

    pub fn input_width(&self) -> usize {
        FRAME_WIDTH / self.subsample
    }

    pub fn pooled_height(&self) -> usize {
        pooled_len(self.input_height())
    }

    pub fn pooled_width(&self) -> usize {
        pooled_len(self.input_width())
    }

    pub fn flatten_size(&self) -> usize {
        self.conv2_filters * self.pooled_height() * self.pooled_width()
    }

    /// `[N_f, H, W]` of one sample.
    pub fn sample_shape(&self) -> [usize; 3] {
        [self.n_frames, self.input_height(), self.input_width()]
    }

    pub fn sample_len(&self) -> usize {
        self.sample_shape().iter().product()
    }

    /// Shapes of all trainable tensors in checkpoint order.
    pub fn param_shapes(&self) -> [Vec<usize>; 10] {
        let k = self.kernel;
        [
            vec![self.conv1_filters, self.n_frames, k, k],
            vec![self.conv1_filters],
            vec![self.conv2_filters, self.conv1_filters, k, k],
            vec![self.conv2_filters],
            vec![self.fc1, self.flatten_size()],
            vec![self.fc1],
            vec![self.fc2, self.fc1],
            vec![self.fc2],
            vec![1, self.fc2],
            vec![1],
        ]
    }
}

/// Number of trainable parameters.
pub fn param_count(cfg: &CnnConfig) -> usize {
    let k2 = cfg.kernel * cfg.kernel;
    let conv1 = cfg.conv1_filters * cfg.n_frames * k2 + cfg.conv1_filters;
    let conv2 = cfg.conv2_filters * cfg.conv1_filters * k2 + cfg.conv2_filters;
    let fc1 = cfg.fc1 * cfg.flatten_size() + cfg.fc1;
    let fc2 = cfg.fc2 * cfg.fc1 + cfg.fc2;
    let out = cfg.fc2 + 1;
    conv1 + conv2 + fc1 + fc2 + out
}
