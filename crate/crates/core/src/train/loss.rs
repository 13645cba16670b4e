//! Batch-mean regression losses returning the loss value and dL/dpred.

use crate::error::{Error, Result};
use crate::tensor::{Real, Tensor};

/// Adaptive threshold ratio: `c = BERHU_C_RATIO * max_i |pred_i - label_i|`.
pub const BERHU_C_RATIO: f64 = 0.2;
/// At or below this threshold the berHu loss is evaluated as plain L1.
pub const BERHU_C_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BerhuOutput<T> {
    pub loss: f64,
    pub grad: Tensor<T>,
    /// Threshold used for this batch.
    pub c: f64,
}

fn residuals<T: Real>(preds: &Tensor<T>, labels: &Tensor<T>) -> Result<Vec<f64>> {
    if preds.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::Shape("empty batch".into()));
    }
    Ok(preds
        .data()
        .iter()
        .zip(labels.data())
        .map(|(p, y)| p.as_f64() - y.as_f64())
        .collect())
}

fn grad_tensor<T: Real>(shape: &[usize], g: impl Iterator<Item = f64>) -> Result<Tensor<T>> {
    Tensor::new(shape.to_vec(), g.map(T::of).collect())
}

/// berHu with an adaptive threshold `c = 0.2 * max|r|` computed from this
/// batch. `c` is treated as a constant when differentiating.
pub fn berhu_loss<T: Real>(preds: &Tensor<T>, labels: &Tensor<T>) -> Result<BerhuOutput<T>> {
    let r = residuals(preds, labels)?;
    let c = BERHU_C_RATIO * r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (loss, grad) = berhu_from_residuals(&r, c, preds.shape())?;
    Ok(BerhuOutput { loss, grad, c })
}

/// berHu with a caller-supplied threshold.
pub fn berhu_loss_fixed<T: Real>(
    preds: &Tensor<T>,
    labels: &Tensor<T>,
    c: f64,
) -> Result<(f64, Tensor<T>)> {
    let r = residuals(preds, labels)?;
    berhu_from_residuals(&r, c, preds.shape())
}

fn berhu_from_residuals<T: Real>(r: &[f64], c: f64, shape: &[usize]) -> Result<(f64, Tensor<T>)> {
    let n = r.len() as f64;
    let l1 = c <= BERHU_C_FLOOR;
    let mut total = 0.0;
    let mut grads = Vec::with_capacity(r.len());
    for &ri in r {
        let a = ri.abs();
        if l1 || a <= c {
            total += a;
            grads.push(sign(ri) / n);
        } else {
            total += (ri * ri + c * c) / (2.0 * c);
            grads.push(ri / (c * n));
        }
    }
    let loss = total / n;
    if !loss.is_finite() {
        return Err(Error::NonFinite("berhu loss".into()));
    }
    Ok((loss, grad_tensor(shape, grads.into_iter())?))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean squared error; gradient `2 r / B`.
pub fn mse_loss<T: Real>(preds: &Tensor<T>, labels: &Tensor<T>) -> Result<(f64, Tensor<T>)> {
    let r = residuals(preds, labels)?;
    let n = r.len() as f64;
    let loss = r.iter().map(|v| v * v).sum::<f64>() / n;
    if !loss.is_finite() {
        return Err(Error::NonFinite("mse loss".into()));
    }
    Ok((loss, grad_tensor(preds.shape(), r.iter().map(|v| 2.0 * v / n))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[f64]) -> Tensor<f64> {
        Tensor::from_vec(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_residuals() {
        let out = berhu_loss(&t(&[0.3, -0.2]), &t(&[0.3, -0.2])).unwrap();
        assert_eq!(out.loss, 0.0);
        assert_eq!(out.c, 0.0);
        assert!(out.grad.data().iter().all(|&g| g == 0.0));
        assert_eq!(mse_loss(&t(&[1.0]), &t(&[1.0])).unwrap().0, 0.0);
    }

    #[test]
    fn hand_evaluated_batch() {
        let out = berhu_loss(&t(&[0.1, 0.5, 1.0]), &t(&[0.0, 0.0, 0.0])).unwrap();
        assert!((out.c - 0.2).abs() < 1e-15);
        assert!((out.loss - (0.1 + 0.725 + 2.6) / 3.0).abs() < 1e-12);
        let g = out.grad.data();
        assert!((g[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((g[1] - 0.5 / 0.2 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn continuous_at_threshold() {
        let (at, _) = berhu_loss_fixed(&t(&[0.4]), &t(&[0.0]), 0.4).unwrap();
        let (above, _) = berhu_loss_fixed(&t(&[0.4 + 1e-9]), &t(&[0.0]), 0.4).unwrap();
        assert!((at - 0.4).abs() < 1e-15);
        assert!((above - at).abs() < 1e-8);
    }

    #[test]
    fn degenerate_threshold_is_l1() {
        let (l, g) = berhu_loss_fixed(&t(&[1.0, -2.0]), &t(&[0.0, 0.0]), 0.0).unwrap();
        assert_eq!(l, 1.5);
        assert_eq!(g.data(), &[0.5, -0.5]);
    }

    #[test]
    fn mse_values() {
        let (l, g) = mse_loss(&t(&[1.0, -1.0]), &t(&[0.0, 0.0])).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(g.data(), &[1.0, -1.0]);
    }

    #[test]
    fn empty_or_mismatched() {
        assert!(mse_loss(&t(&[1.0]), &t(&[1.0, 2.0])).is_err());
        assert!(berhu_loss(&t(&[1.0]), &t(&[1.0, 2.0])).is_err());
    }
}
