//! 2x2 / stride-2 max pooling with ceil semantics.

use super::Tensor;
use super::{image_dims, Real};
use crate::error::{Error, Result};

/// Pooled length of a dimension: trailing odd rows/columns form partial windows.
pub fn pooled_len(n: usize) -> usize {
    n.div_ceil(2)
}

#[derive(Clone, Debug)]
pub struct PoolOutput<T> {
    pub output: Tensor<T>,
    /// Flat index into the input of the element selected for each output.
    pub argmax: Vec<usize>,
}

/// Max over each 2x2 window of every plane. Ties resolve to the first
/// element in row-major order within the window.
pub fn maxpool2_forward<T: Real>(input: &Tensor<T>) -> Result<PoolOutput<T>> {
    let (batch, c, h, w) = image_dims(input.shape(), "maxpool2 input")?;
    input.ensure_finite("maxpool2 input")?;
    let (oh, ow) = (pooled_len(h), pooled_len(w));
    let planes = batch * c;
    let mut out = Vec::with_capacity(planes * oh * ow);
    let mut argmax = Vec::with_capacity(planes * oh * ow);
    let x = input.data();
    for plane in 0..planes {
        let base = plane * h * w;
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = base + 2 * oy * w + 2 * ox;
                for y in 2 * oy..(2 * oy + 2).min(h) {
                    for xx in 2 * ox..(2 * ox + 2).min(w) {
                        let i = base + y * w + xx;
                        if x[i] > x[best] {
                            best = i;
                        }
                    }
                }
                out.push(x[best]);
                argmax.push(best);
            }
        }
    }
    let mut shape = input.shape().to_vec();
    let r = shape.len();
    shape[r - 2] = oh;
    shape[r - 1] = ow;
    Ok(PoolOutput {
        output: Tensor::new(shape, out)?,
        argmax,
    })
}

/// Routes each upstream gradient to the input position recorded in `argmax`.
pub fn maxpool2_backward<T: Real>(
    input_shape: &[usize],
    argmax: &[usize],
    grad_out: &Tensor<T>,
) -> Result<Tensor<T>> {
    if argmax.len() != grad_out.len() {
        return Err(Error::Shape(format!(
            "maxpool2 backward: {} argmax entries for {} gradients",
            argmax.len(),
            grad_out.len()
        )));
    }
    let mut dx = Tensor::zeros(input_shape.to_vec());
    let n = dx.len();
    let d = dx.data_mut();
    for (&i, &g) in argmax.iter().zip(grad_out.data()) {
        if i >= n {
            return Err(Error::Shape(format!(
                "maxpool2 backward: argmax {i} outside input of {n} elements"
            )));
        }
        d[i] = d[i] + g;
    }
    dx.ensure_finite("maxpool2 input gradient")?;
    Ok(dx)
}
