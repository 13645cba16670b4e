use super::gemm::{gemm, MatRef};
use super::{Real, Tensor};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DenseGrads<T> {
    pub input: Tensor<T>,
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

fn dims<T: Real>(x: &Tensor<T>, weight: &Tensor<T>) -> Result<(usize, usize, usize)> {
    let &[m, n] = weight.shape() else {
        return Err(Error::Shape(format!(
            "dense weight must be m x n, got {:?}",
            weight.shape()
        )));
    };
    let (batch, xn) = match *x.shape() {
        [xn] => (1, xn),
        [b, xn] => (b, xn),
        _ => {
            return Err(Error::Shape(format!(
                "dense input must be n or B x n, got {:?}",
                x.shape()
            )))
        }
    };
    if xn != n {
        return Err(Error::Shape(format!(
            "dense weight expects {n} inputs, got {xn}"
        )));
    }
    Ok((batch, m, n))
}

fn out_shape(x_shape: &[usize], m: usize) -> Vec<usize> {
    let mut s = x_shape.to_vec();
    *s.last_mut().unwrap() = m;
    s
}

/// `y = W x + b` for a vector `x` of length n or each row of a `B x n` batch.
pub fn dense_forward<T: Real>(x: &Tensor<T>, weight: &Tensor<T>, bias: &Tensor<T>) -> Result<Tensor<T>> {
    let (batch, m, n) = dims(x, weight)?;
    if bias.shape() != [m] {
        return Err(Error::Shape(format!(
            "dense bias must have {m} elements, got {:?}",
            bias.shape()
        )));
    }
    let mut y = Vec::with_capacity(batch * m);
    for _ in 0..batch {
        y.extend_from_slice(bias.data());
    }
    gemm(
        T::one(),
        MatRef::row_major(x.data(), batch, n),
        MatRef::row_major(weight.data(), m, n).t(),
        T::one(),
        &mut y,
    );
    let y = Tensor::new(out_shape(x.shape(), m), y)?;
    y.ensure_finite("dense output")?;
    Ok(y)
}

/// Returns dL/dx, dL/dW and dL/db; weight and bias gradients are summed over the batch.
pub fn dense_backward<T: Real>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    grad_out: &Tensor<T>,
) -> Result<DenseGrads<T>> {
    let (batch, m, n) = dims(x, weight)?;
    if grad_out.shape() != out_shape(x.shape(), m).as_slice() {
        return Err(Error::Shape(format!(
            "dense upstream gradient must be {:?}, got {:?}",
            out_shape(x.shape(), m),
            grad_out.shape()
        )));
    }
    let gy = MatRef::row_major(grad_out.data(), batch, m);
    let xm = MatRef::row_major(x.data(), batch, n);

    let mut dx = vec![T::zero(); batch * n];
    gemm(T::one(), gy, MatRef::row_major(weight.data(), m, n), T::zero(), &mut dx);
    let mut dw = vec![T::zero(); m * n];
    gemm(T::one(), gy.t(), xm, T::zero(), &mut dw);
    let mut db = vec![T::zero(); m];
    for row in grad_out.data().chunks_exact(m) {
        for (d, g) in db.iter_mut().zip(row) {
            *d = *d + *g;
        }
    }
    let grads = DenseGrads {
        input: Tensor::new(x.shape().to_vec(), dx)?,
        weight: Tensor::new(vec![m, n], dw)?,
        bias: Tensor::new(vec![m], db)?,
    };
    grads.input.ensure_finite("dense input gradient")?;
    grads.weight.ensure_finite("dense weight gradient")?;
    Ok(grads)
}
