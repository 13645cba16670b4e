use super::adam::{adam_step, AdamState};
use super::config::{LossKind, TrainConfig};
use super::history::{EpochRecord, TrainHistory};
use super::loss::{berhu_loss, mse_loss};
use crate::dataset::SampleSet;
use crate::error::{Error, Result};
use crate::model::{backward, forward, ModelParams};
use crate::tensor::Rng;

/// ChaCha stream used for mini-batch shuffling (stream 0 initializes weights).
const SHUFFLE_STREAM: u64 = 1;
const EVAL_BATCH: usize = 256;

fn check_set(params: &ModelParams<f32>, set: &SampleSet, what: &str) -> Result<()> {
    if !set.matches(&params.cfg) {
        return Err(Error::Shape(format!(
            "{what} samples are {}x{}x{}, model expects {:?}",
            set.n_frames,
            set.height,
            set.width,
            params.cfg.sample_shape()
        )));
    }
    Ok(())
}

/// Model outputs for every sample of `set`, in order.
pub fn predict(params: &ModelParams<f32>, set: &SampleSet) -> Result<Vec<f32>> {
    check_set(params, set, "evaluation")?;
    let mut out = Vec::with_capacity(set.len());
    let idx: Vec<usize> = (0..set.len()).collect();
    for chunk in idx.chunks(EVAL_BATCH) {
        let (x, _) = set.batch(chunk)?;
        let (p, _) = forward(params, &x)?;
        out.extend_from_slice(p.data());
    }
    Ok(out)
}

/// Mean squared error of the model on `set`, in normalized label units.
pub fn evaluate_mse(params: &ModelParams<f32>, set: &SampleSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Data("cannot evaluate on an empty sample set".into()));
    }
    let preds = predict(params, set)?;
    Ok(preds
        .iter()
        .zip(set.labels())
        .map(|(&p, &y)| (p as f64 - y as f64).powi(2))
        .sum::<f64>()
        / set.len() as f64)
}

/// Mini-batch Adam training for `tcfg.epochs` epochs. Each epoch reshuffles
/// the sample order with a Fisher-Yates pass seeded from `tcfg.seed`, and
/// the trailing partial batch is trained on. The final-epoch parameters are
/// returned together with per-epoch metrics.
pub fn train(
    mut params: ModelParams<f32>,
    data: &SampleSet,
    test: Option<&SampleSet>,
    tcfg: &TrainConfig,
) -> Result<(ModelParams<f32>, TrainHistory)> {
    tcfg.validate()?;
    let mut history = TrainHistory::default();
    if tcfg.epochs == 0 {
        return Ok((params, history));
    }
    if data.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    check_set(&params, data, "training")?;
    if let Some(t) = test {
        check_set(&params, t, "test")?;
    }

    let mut rng = Rng::with_stream(tcfg.seed, SHUFFLE_STREAM);
    let mut state = AdamState::for_model(&params);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=tcfg.epochs {
        rng.shuffle(&mut order);
        let mut total = 0.0;
        for (bi, chunk) in order.chunks(tcfg.batch_size).enumerate() {
            let (x, y) = data.batch(chunk)?;
            let (pred, cache) = forward(&params, &x).map_err(|e| at(e, epoch, bi))?;
            let (loss, grad) = match tcfg.loss {
                LossKind::Berhu => {
                    let o = berhu_loss(&pred, &y)?;
                    (o.loss, o.grad)
                }
                LossKind::Mse => mse_loss(&pred, &y)?,
            };
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss at epoch {epoch}, batch {bi}"
                )));
            }
            let grads = backward(&params, &cache, &grad).map_err(|e| at(e, epoch, bi))?;
            adam_step(&mut params, &grads, &mut state, tcfg).map_err(|e| at(e, epoch, bi))?;
            total += loss * chunk.len() as f64;
        }
        let test_mse_norm = match test {
            Some(t) if !t.is_empty() => Some(evaluate_mse(&params, t)?),
            _ => None,
        };
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: total / data.len() as f64,
            test_mse_norm,
        });
    }
    Ok((params, history))
}

fn at(e: Error, epoch: usize, batch: usize) -> Error {
    match e {
        Error::NonFinite(what) => {
            Error::NonFinite(format!("{what} (epoch {epoch}, batch {batch})"))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, CnnConfig};

    fn tiny_set(n: usize, cfg: &CnnConfig, seed: u64) -> SampleSet {
        let [f, h, w] = cfg.sample_shape();
        let mut rng = Rng::new(seed);
        let mut set = SampleSet::empty(f, h, w);
        for i in 0..n {
            let x: Vec<f32> = (0..cfg.sample_len()).map(|_| rng.normal() as f32).collect();
            set.push(&x, (i as f32 / n as f32) - 0.5, "t", i).unwrap();
        }
        set
    }

    #[test]
    fn zero_epochs_is_identity() {
        let cfg = CnnConfig::new(2, 3).unwrap();
        let p = build_model(cfg, &mut Rng::new(1)).unwrap();
        let tcfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let (q, h) = train(p.clone(), &SampleSet::default(), None, &tcfg).unwrap();
        assert_eq!(p, q);
        assert!(h.is_empty());
    }

    #[test]
    fn history_and_determinism() {
        let cfg = CnnConfig::new(2, 3).unwrap();
        let data = tiny_set(20, &cfg, 2);
        let test = tiny_set(5, &cfg, 3);
        let tcfg = TrainConfig {
            epochs: 3,
            batch_size: 8,
            seed: 5,
            ..TrainConfig::default()
        };
        let run = || {
            let p = build_model(cfg, &mut Rng::new(tcfg.seed)).unwrap();
            train(p, &data, Some(&test), &tcfg).unwrap()
        };
        let (pa, ha) = run();
        let (pb, hb) = run();
        assert_eq!(pa, pb);
        assert_eq!(ha, hb);
        assert_eq!(ha.len(), 3);
        assert!(ha.epochs.iter().all(|r| r.test_mse_norm.is_some()));
    }

    #[test]
    fn shape_mismatch() {
        let cfg = CnnConfig::new(2, 3).unwrap();
        let data = tiny_set(4, &CnnConfig::new(3, 3).unwrap(), 1);
        let p = build_model(cfg, &mut Rng::new(1)).unwrap();
        assert!(train(p, &data, None, &TrainConfig::default()).is_err());
    }
}
