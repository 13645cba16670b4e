use super::config::CnnConfig;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::tensor::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool2_backward,
    maxpool2_forward, relu_backward, relu_forward, PoolOutput, Real, Rng, Tensor,
};

/// Intermediate values of one forward pass, kept for the backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    pub cfg: CnnConfig,
    pub batch: usize,
    pub input: Tensor<T>,
    pub conv1_pre: Tensor<T>,
    pub pool1: PoolOutput<T>,
    pub conv2_pre: Tensor<T>,
    /// ReLU(conv2) flattened to `B x flatten_size`.
    pub flat: Tensor<T>,
    pub fc1_pre: Tensor<T>,
    pub fc1_act: Tensor<T>,
    pub fc2_pre: Tensor<T>,
    pub fc2_act: Tensor<T>,
}

/// He-uniform weights (bound `sqrt(6 / fan_in)`), zero biases.
pub fn build_model<T: Real>(cfg: CnnConfig, rng: &mut Rng) -> Result<ModelParams<T>> {
    cfg.validate()?;
    let mut params = ModelParams::<T>::zeros(cfg);
    for t in params.tensors_mut() {
        if t.rank() == 1 {
            continue;
        }
        let fan_in: usize = t.shape()[1..].iter().product();
        let bound = (6.0 / fan_in as f64).sqrt();
        for v in t.data_mut() {
            *v = T::of(rng.uniform_range(-bound, bound));
        }
    }
    Ok(params)
}

/// Runs a `B x N_f x H x W` batch through the network, returning one
/// prediction per sample and the cache needed by [`backward`].
pub fn forward<T: Real>(
    params: &ModelParams<T>,
    batch: &Tensor<T>,
) -> Result<(Tensor<T>, ForwardCache<T>)> {
    let cfg = params.cfg;
    let [nf, h, w] = cfg.sample_shape();
    let b = match *batch.shape() {
        [b, c, bh, bw] if (c, bh, bw) == (nf, h, w) => b,
        _ => {
            return Err(Error::Shape(format!(
                "batch must be B x {nf} x {h} x {w}, got {:?}",
                batch.shape()
            )))
        }
    };
    batch.ensure_finite("network input")?;

    let conv1_pre = conv2d_forward(batch, &params.conv1_w, &params.conv1_b)?;
    let relu1 = relu_forward(&conv1_pre)?;
    let pool1 = maxpool2_forward(&relu1)?;
    let conv2_pre = conv2d_forward(&pool1.output, &params.conv2_w, &params.conv2_b)?;
    let flat = relu_forward(&conv2_pre)?.reshape(vec![b, cfg.flatten_size()])?;
    let fc1_pre = dense_forward(&flat, &params.fc1_w, &params.fc1_b)?;
    let fc1_act = relu_forward(&fc1_pre)?;
    let fc2_pre = dense_forward(&fc1_act, &params.fc2_w, &params.fc2_b)?;
    let fc2_act = relu_forward(&fc2_pre)?;
    let out = dense_forward(&fc2_act, &params.out_w, &params.out_b)?;
    let preds = out.reshape(vec![b])?;

    Ok((
        preds,
        ForwardCache {
            cfg,
            batch: b,
            input: batch.clone(),
            conv1_pre,
            pool1,
            conv2_pre,
            flat,
            fc1_pre,
            fc1_act,
            fc2_pre,
            fc2_act,
        },
    ))
}

/// Exact reverse-mode gradients of the network output with respect to every
/// parameter, given `dL/dpred`. Any batch-mean scaling is expected to be
/// already folded into `grad_pred` by the loss.
pub fn backward<T: Real>(
    params: &ModelParams<T>,
    cache: &ForwardCache<T>,
    grad_pred: &Tensor<T>,
) -> Result<ModelParams<T>> {
    if cache.cfg != params.cfg {
        return Err(Error::Shape(
            "forward cache was produced for a different config".into(),
        ));
    }
    if grad_pred.shape() != [cache.batch] {
        return Err(Error::Shape(format!(
            "dL/dpred must have {} elements, got {:?}",
            cache.batch,
            grad_pred.shape()
        )));
    }
    let b = cache.batch;
    let cfg = params.cfg;

    let g_out = dense_backward(
        &cache.fc2_act,
        &params.out_w,
        &grad_pred.clone().reshape(vec![b, 1])?,
    )?;
    let d_fc2 = relu_backward(&cache.fc2_pre, &g_out.input)?;
    let g_fc2 = dense_backward(&cache.fc1_act, &params.fc2_w, &d_fc2)?;
    let d_fc1 = relu_backward(&cache.fc1_pre, &g_fc2.input)?;
    let g_fc1 = dense_backward(&cache.flat, &params.fc1_w, &d_fc1)?;

    let d_relu2 = g_fc1.input.reshape(cache.conv2_pre.shape().to_vec())?;
    let d_conv2 = relu_backward(&cache.conv2_pre, &d_relu2)?;
    let g_conv2 = conv2d_backward(&cache.pool1.output, &params.conv2_w, &d_conv2, true)?;
    let d_pool = g_conv2.input.expect("input gradient requested");
    let d_relu1 = maxpool2_backward(cache.conv1_pre.shape(), &cache.pool1.argmax, &d_pool)?;
    let d_conv1 = relu_backward(&cache.conv1_pre, &d_relu1)?;
    let g_conv1 = conv2d_backward(&cache.input, &params.conv1_w, &d_conv1, false)?;

    ModelParams::from_tensors(
        cfg,
        vec![
            g_conv1.kernels,
            g_conv1.bias,
            g_conv2.kernels,
            g_conv2.bias,
            g_fc1.weight,
            g_fc1.bias,
            g_fc2.weight,
            g_fc2.bias,
            g_out.weight,
            g_out.bias,
        ],
    )
}
