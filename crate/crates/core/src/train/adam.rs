use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::tensor::{Real, Tensor};

/// First/second moment estimates (one pair per parameter tensor) and the step count.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub m: Vec<Tensor<T>>,
    pub v: Vec<Tensor<T>>,
    pub t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new<'a>(params: impl IntoIterator<Item = &'a Tensor<T>>) -> Self {
        let m: Vec<Tensor<T>> = params
            .into_iter()
            .map(|p| Tensor::zeros(p.shape().to_vec()))
            .collect();
        Self {
            v: m.clone(),
            m,
            t: 0,
        }
    }

    pub fn for_model(params: &ModelParams<T>) -> Self {
        Self::new(params.tensors())
    }
}

/// One bias-corrected Adam step over an arbitrary list of tensors.
pub fn adam_update<T: Real>(
    params: &mut [&mut Tensor<T>],
    grads: &[&Tensor<T>],
    state: &mut AdamState<T>,
    cfg: &TrainConfig,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "adam: {} params, {} grads, {} moment slots",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.m) {
        if p.shape() != g.shape() || p.shape() != m.shape() {
            return Err(Error::Shape(format!(
                "adam: param {:?} vs grad {:?} vs moment {:?}",
                p.shape(),
                g.shape(),
                m.shape()
            )));
        }
    }

    state.t += 1;
    let t = i32::try_from(state.t).unwrap_or(i32::MAX);
    let bc1 = T::of(1.0 - cfg.beta1.powi(t));
    let bc2 = T::of(1.0 - cfg.beta2.powi(t));
    let (b1, b2) = (T::of(cfg.beta1), T::of(cfg.beta2));
    let (one_b1, one_b2) = (T::of(1.0 - cfg.beta1), T::of(1.0 - cfg.beta2));
    let (lr, eps) = (T::of(cfg.lr), T::of(cfg.eps));

    for (i, p) in params.iter_mut().enumerate() {
        let g = grads[i].data();
        let m = state.m[i].data_mut();
        let v = state.v[i].data_mut();
        for (((pj, &gj), mj), vj) in p.data_mut().iter_mut().zip(g).zip(m).zip(v) {
            *mj = b1 * *mj + one_b1 * gj;
            *vj = b2 * *vj + one_b2 * gj * gj;
            let m_hat = *mj / bc1;
            let v_hat = *vj / bc2;
            *pj = *pj - lr * m_hat / (v_hat.sqrt() + eps);
        }
        if !p.is_finite() {
            return Err(Error::NonFinite("parameters after Adam step".into()));
        }
    }
    Ok(())
}

/// Adam step on a whole model.
pub fn adam_step<T: Real>(
    params: &mut ModelParams<T>,
    grads: &ModelParams<T>,
    state: &mut AdamState<T>,
    cfg: &TrainConfig,
) -> Result<()> {
    if !params.shapes_match(grads) {
        return Err(Error::Shape("gradient shapes differ from parameters".into()));
    }
    let g = grads.tensors();
    let mut p = params.tensors_mut();
    adam_update(&mut p, &g, state, cfg)
}
