//! Stride-1 "same" convolution via im2col + GEMM.

use super::gemm::{gemm, MatRef};
use super::{image_dims, Real, Tensor};
use crate::error::{Error, Result};

/// Gradients of a convolution. `input` is `None` when it was not requested.
#[derive(Clone, Debug)]
pub struct Conv2dGrads<T> {
    pub input: Option<Tensor<T>>,
    pub kernels: Tensor<T>,
    pub bias: Tensor<T>,
}

struct Geometry {
    batch: usize,
    c_in: usize,
    h: usize,
    w: usize,
    c_out: usize,
    k: usize,
}

impl Geometry {
    fn patch(&self) -> usize {
        self.c_in * self.k * self.k
    }
    fn pixels(&self) -> usize {
        self.h * self.w
    }
}

fn geometry<T: Real>(input: &Tensor<T>, kernels: &Tensor<T>) -> Result<Geometry> {
    let (batch, c_in, h, w) = image_dims(input.shape(), "conv2d input")?;
    let &[c_out, kc, kh, kw] = kernels.shape() else {
        return Err(Error::Shape(format!(
            "conv2d kernels must be C_out x C_in x K x K, got {:?}",
            kernels.shape()
        )));
    };
    if kh != kw || kh % 2 == 0 {
        return Err(Error::Shape(format!(
            "conv2d kernels must be square with odd size, got {kh}x{kw}"
        )));
    }
    if kc != c_in {
        return Err(Error::Shape(format!(
            "conv2d kernels expect {kc} input channels, input has {c_in}"
        )));
    }
    Ok(Geometry {
        batch,
        c_in,
        h,
        w,
        c_out,
        k: kh,
    })
}

/// Column range `[lo, hi)` of output positions whose tap `kx` lands inside a
/// row of width `w` when padding by `p`.
fn valid_span(w: usize, kx: usize, p: usize) -> (usize, usize) {
    let lo = p.saturating_sub(kx).min(w);
    let hi = if kx > p { w.saturating_sub(kx - p) } else { w };
    (lo, hi.max(lo))
}

/// Unfolds one `C x H x W` image into a `(C*K*K) x (H*W)` patch matrix.
fn im2col<T: Real>(x: &[T], g: &Geometry, cols: &mut [T]) {
    let (h, w, k) = (g.h, g.w, g.k);
    let p = k / 2;
    for ci in 0..g.c_in {
        let plane = &x[ci * h * w..(ci + 1) * h * w];
        for ky in 0..k {
            for kx in 0..k {
                let row = (ci * k + ky) * k + kx;
                let dst = &mut cols[row * h * w..(row + 1) * h * w];
                let (lo, hi) = valid_span(w, kx, p);
                for y in 0..h {
                    let drow = &mut dst[y * w..(y + 1) * w];
                    let sy = (y + ky).wrapping_sub(p);
                    if sy >= h {
                        drow.fill(T::zero());
                        continue;
                    }
                    let src = &plane[sy * w..(sy + 1) * w];
                    drow[..lo].fill(T::zero());
                    drow[hi..].fill(T::zero());
                    if hi > lo {
                        let off = lo + kx - p;
                        drow[lo..hi].copy_from_slice(&src[off..off + (hi - lo)]);
                    }
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: accumulates patch-matrix gradients back into the image.
fn col2im<T: Real>(cols: &[T], g: &Geometry, dx: &mut [T]) {
    let (h, w, k) = (g.h, g.w, g.k);
    let p = k / 2;
    for ci in 0..g.c_in {
        let plane = &mut dx[ci * h * w..(ci + 1) * h * w];
        for ky in 0..k {
            for kx in 0..k {
                let row = (ci * k + ky) * k + kx;
                let src = &cols[row * h * w..(row + 1) * h * w];
                let (lo, hi) = valid_span(w, kx, p);
                for y in 0..h {
                    let sy = (y + ky).wrapping_sub(p);
                    if sy >= h || hi == lo {
                        continue;
                    }
                    let off = lo + kx - p;
                    let dst = &mut plane[sy * w + off..sy * w + off + (hi - lo)];
                    for (d, s) in dst.iter_mut().zip(&src[y * w + lo..y * w + hi]) {
                        *d = *d + *s;
                    }
                }
            }
        }
    }
}

/// Zero-padded ("same") stride-1 convolution. Accepts `C_in x H x W` or
/// `B x C_in x H x W`; the output keeps the spatial size and the rank of
/// the input.
pub fn conv2d_forward<T: Real>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<Tensor<T>> {
    let g = geometry(input, kernels)?;
    if bias.shape() != [g.c_out] {
        return Err(Error::Shape(format!(
            "conv2d bias must have {} elements, got {:?}",
            g.c_out,
            bias.shape()
        )));
    }
    let (patch, pixels) = (g.patch(), g.pixels());
    let mut cols = vec![T::zero(); patch * pixels];
    let mut out = vec![T::zero(); g.batch * g.c_out * pixels];
    let kmat = MatRef::row_major(kernels.data(), g.c_out, patch);
    let in_len = g.c_in * pixels;
    for (x, y) in input
        .data()
        .chunks_exact(in_len)
        .zip(out.chunks_exact_mut(g.c_out * pixels))
    {
        for (co, plane) in y.chunks_exact_mut(pixels).enumerate() {
            plane.fill(bias.data()[co]);
        }
        im2col(x, &g, &mut cols);
        gemm(T::one(), kmat, MatRef::row_major(&cols, patch, pixels), T::one(), y);
    }
    let mut shape = input.shape().to_vec();
    let rank = shape.len();
    shape[rank - 3] = g.c_out;
    let out = Tensor::new(shape, out)?;
    out.ensure_finite("conv2d output")?;
    Ok(out)
}

/// Reverse-mode gradients of [`conv2d_forward`] given the upstream
/// gradient `grad_out` (same shape as the forward output). Kernel and bias
/// gradients are summed over the batch.
pub fn conv2d_backward<T: Real>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    grad_out: &Tensor<T>,
    want_input_grad: bool,
) -> Result<Conv2dGrads<T>> {
    let g = geometry(input, kernels)?;
    let mut expected = input.shape().to_vec();
    let rank = expected.len();
    expected[rank - 3] = g.c_out;
    if grad_out.shape() != expected.as_slice() {
        return Err(Error::Shape(format!(
            "conv2d upstream gradient must be {:?}, got {:?}",
            expected,
            grad_out.shape()
        )));
    }
    let (patch, pixels) = (g.patch(), g.pixels());
    let in_len = g.c_in * pixels;
    let out_len = g.c_out * pixels;
    let kmat = MatRef::row_major(kernels.data(), g.c_out, patch);

    let mut cols = vec![T::zero(); patch * pixels];
    let mut dcols = vec![T::zero(); patch * pixels];
    let mut dk = vec![T::zero(); g.c_out * patch];
    let mut db = vec![T::zero(); g.c_out];
    let mut dx = if want_input_grad {
        vec![T::zero(); input.len()]
    } else {
        Vec::new()
    };

    for b in 0..g.batch {
        let x = &input.data()[b * in_len..(b + 1) * in_len];
        let gy = &grad_out.data()[b * out_len..(b + 1) * out_len];
        let gmat = MatRef::row_major(gy, g.c_out, pixels);
        for (co, plane) in gy.chunks_exact(pixels).enumerate() {
            db[co] = db[co] + plane.iter().copied().sum();
        }
        im2col(x, &g, &mut cols);
        // dK += dY * cols^T
        gemm(T::one(), gmat, MatRef::row_major(&cols, patch, pixels).t(), T::one(), &mut dk);
        if want_input_grad {
            // dcols = K^T * dY
            gemm(T::one(), kmat.t(), gmat, T::zero(), &mut dcols);
            col2im(&dcols, &g, &mut dx[b * in_len..(b + 1) * in_len]);
        }
    }

    let input_grad = if want_input_grad {
        let t = Tensor::new(input.shape().to_vec(), dx)?;
        t.ensure_finite("conv2d input gradient")?;
        Some(t)
    } else {
        None
    };
    let kernels_grad = Tensor::new(kernels.shape().to_vec(), dk)?;
    kernels_grad.ensure_finite("conv2d kernel gradient")?;
    Ok(Conv2dGrads {
        input: input_grad,
        kernels: kernels_grad,
        bias: Tensor::new(vec![g.c_out], db)?,
    })
}
