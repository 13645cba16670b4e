use super::config::CnnConfig;
use crate::error::{Error, Result};
use crate::tensor::{Real, Tensor};

/// Parameter tensor names in their fixed (checkpoint) order.
pub const PARAM_NAMES: [&str; 10] = [
    "conv1.weight",
    "conv1.bias",
    "conv2.weight",
    "conv2.bias",
    "fc1.weight",
    "fc1.bias",
    "fc2.weight",
    "fc2.bias",
    "out.weight",
    "out.bias",
];

/// All weights and biases of the network. Also used to hold gradients and
/// optimizer moments, which share the same shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T = f32> {
    pub cfg: CnnConfig,
    pub conv1_w: Tensor<T>,
    pub conv1_b: Tensor<T>,
    pub conv2_w: Tensor<T>,
    pub conv2_b: Tensor<T>,
    pub fc1_w: Tensor<T>,
    pub fc1_b: Tensor<T>,
    pub fc2_w: Tensor<T>,
    pub fc2_b: Tensor<T>,
    pub out_w: Tensor<T>,
    pub out_b: Tensor<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn zeros(cfg: CnnConfig) -> Self {
        let [a, b, c, d, e, f, g, h, i, j] = cfg.param_shapes().map(Tensor::zeros);
        Self {
            cfg,
            conv1_w: a,
            conv1_b: b,
            conv2_w: c,
            conv2_b: d,
            fc1_w: e,
            fc1_b: f,
            fc2_w: g,
            fc2_b: h,
            out_w: i,
            out_b: j,
        }
    }

    /// Builds parameters from tensors given in [`PARAM_NAMES`] order.
    pub fn from_tensors(cfg: CnnConfig, tensors: Vec<Tensor<T>>) -> Result<Self> {
        let shapes = cfg.param_shapes();
        if tensors.len() != shapes.len() {
            return Err(Error::Shape(format!(
                "expected {} parameter tensors, got {}",
                shapes.len(),
                tensors.len()
            )));
        }
        for ((t, s), name) in tensors.iter().zip(&shapes).zip(PARAM_NAMES) {
            if t.shape() != s.as_slice() {
                return Err(Error::Shape(format!(
                    "{name}: expected {s:?}, got {:?}",
                    t.shape()
                )));
            }
        }
        let mut m = Self::zeros(cfg);
        for (dst, src) in m.tensors_mut().into_iter().zip(tensors) {
            *dst = src;
        }
        Ok(m)
    }

    pub fn tensors(&self) -> [&Tensor<T>; 10] {
        [
            &self.conv1_w,
            &self.conv1_b,
            &self.conv2_w,
            &self.conv2_b,
            &self.fc1_w,
            &self.fc1_b,
            &self.fc2_w,
            &self.fc2_b,
            &self.out_w,
            &self.out_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor<T>; 10] {
        [
            &mut self.conv1_w,
            &mut self.conv1_b,
            &mut self.conv2_w,
            &mut self.conv2_b,
            &mut self.fc1_w,
            &mut self.fc1_b,
            &mut self.fc2_w,
            &mut self.fc2_b,
            &mut self.out_w,
            &mut self.out_b,
        ]
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    pub fn cast<U: Real>(&self) -> ModelParams<U> {
        let tensors = self.tensors().iter().map(|t| t.cast()).collect();
        ModelParams::from_tensors(self.cfg, tensors).expect("same shapes")
    }

    /// True if every tensor has the shape `cfg` prescribes.
    pub fn shapes_match(&self, other: &Self) -> bool {
        self.cfg == other.cfg
            && self
                .tensors()
                .iter()
                .zip(other.tensors())
                .all(|(a, b)| a.shape() == b.shape())
    }
}
