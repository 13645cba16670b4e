use super::{Real, Tensor};
use crate::error::{Error, Result};

pub fn relu_forward<T: Real>(x: &Tensor<T>) -> Result<Tensor<T>> {
    x.ensure_finite("relu input")?;
    let data = x.data().iter().map(|&v| v.max(T::zero())).collect();
    Tensor::new(x.shape().to_vec(), data)
}

/// Passes the gradient where `x > 0`. The subgradient at exactly zero is 0.
pub fn relu_backward<T: Real>(x: &Tensor<T>, grad_out: &Tensor<T>) -> Result<Tensor<T>> {
    if x.shape() != grad_out.shape() {
        return Err(Error::Shape(format!(
            "relu gradient shape {:?} does not match input {:?}",
            grad_out.shape(),
            x.shape()
        )));
    }
    let data = x
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&v, &g)| if v > T::zero() { g } else { T::zero() })
        .collect();
    let dx = Tensor::new(x.shape().to_vec(), data)?;
    dx.ensure_finite("relu input gradient")?;
    Ok(dx)
}
