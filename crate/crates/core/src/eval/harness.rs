use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::boxplot::{box_stats, BoxStats};
use super::DEGPS_PER_UNIT;
use crate::dataset::{split_folds, Acquisition, FoldSplit, SampleSet};
use crate::error::{Error, Result};
use crate::model::{build_model, CnnConfig, ModelParams};
use crate::tensor::{mix64, Rng};
use crate::train::{evaluate_mse, train, TrainConfig, TrainHistory};

/// Held-out metrics of one trained fold.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub seed: u64,
    /// Test MSE in normalized label units (speed / 200).
    pub mse_norm: f64,
    /// `mse_norm * 200^2`, (deg/s)^2.
    pub mse_degps: f64,
    /// `sqrt(mse_degps)`, deg/s.
    pub rmse_degps: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub cnn: CnnConfig,
    pub train: TrainConfig,
}

impl FoldResult {
    pub fn from_mse(fold: usize, mse_norm: f64, cnn: CnnConfig, train: TrainConfig) -> Self {
        let mse_degps = mse_norm * DEGPS_PER_UNIT * DEGPS_PER_UNIT;
        Self {
            fold,
            seed: train.seed,
            mse_norm,
            mse_degps,
            rmse_degps: mse_degps.sqrt(),
            n_train: 0,
            n_test: 0,
            cnn,
            train,
        }
    }
}

/// A fold result together with the trained model and its history.
#[derive(Clone, Debug)]
pub struct FoldRun {
    pub result: FoldResult,
    pub params: ModelParams<f32>,
    pub history: TrainHistory,
}

/// Trains on the fold's training acquisitions and reports the final-epoch
/// MSE on the held-out acquisition. Weights are initialized from
/// `tcfg.seed`.
pub fn run_fold_detailed(split: &FoldSplit<'_>, ccfg: CnnConfig, tcfg: &TrainConfig) -> Result<FoldRun> {
    ccfg.validate()?;
    let train_set = SampleSet::from_acquisitions(split.train.iter().copied(), &ccfg)?;
    let test_set = SampleSet::from_acquisitions([split.test], &ccfg)?;
    if test_set.is_empty() {
        return Err(Error::Data(format!(
            "held-out acquisition {} yields no windows of {} frames",
            split.test.id, ccfg.n_frames
        )));
    }
    let init = build_model(ccfg, &mut Rng::new(tcfg.seed))?;
    let (params, history) = train(init, &train_set, Some(&test_set), tcfg)?;
    let mse = match history.last().and_then(|r| r.test_mse_norm) {
        Some(m) => m,
        None => evaluate_mse(&params, &test_set)?,
    };
    let mut result = FoldResult::from_mse(split.fold, mse, ccfg, *tcfg);
    result.n_train = train_set.len();
    result.n_test = test_set.len();
    Ok(FoldRun {
        result,
        params,
        history,
    })
}

pub fn run_fold(split: &FoldSplit<'_>, ccfg: CnnConfig, tcfg: &TrainConfig) -> Result<FoldResult> {
    run_fold_detailed(split, ccfg, tcfg).map(|r| r.result)
}

/// Which input dimension an ablation sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AblationParam {
    /// Number of stacked frames N_f.
    Nf,
    /// Resolution subsampling factor N_r.
    Nr,
}

impl AblationParam {
    /// The sweep used in the original study: N_f = 2..7, N_r = 1..3.
    pub fn default_values(self) -> Vec<usize> {
        match self {
            AblationParam::Nf => (2..=7).collect(),
            AblationParam::Nr => vec![1, 2, 3],
        }
    }

    /// Network config for one sweep value; the other knob stays at `fixed`.
    pub fn config(self, value: usize, fixed: &AblationConfig) -> Result<CnnConfig> {
        match self {
            AblationParam::Nf => CnnConfig::new(value, fixed.fixed_nr),
            AblationParam::Nr => CnnConfig::new(fixed.fixed_nf, value),
        }
    }

    pub fn validate_values(self, values: &[usize]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::Config(format!("no {self} values given")));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::Config(format!("duplicate {self} value {v}")));
            }
            match self {
                AblationParam::Nf if *v < 1 => {
                    return Err(Error::Config("nf must be ≥ 1".into()))
                }
                AblationParam::Nr if !(1..=3).contains(v) => {
                    return Err(Error::Config(format!("nr must be 1, 2 or 3, got {v}")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for AblationParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AblationParam::Nf => "nf",
            AblationParam::Nr => "nr",
        })
    }
}

impl FromStr for AblationParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nf" => Ok(AblationParam::Nf),
            "nr" => Ok(AblationParam::Nr),
            other => Err(Error::Config(format!(
                "unknown ablation parameter {other:?} (expected nf or nr)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationConfig {
    /// N_f held fixed during an N_r sweep.
    pub fixed_nf: usize,
    /// N_r held fixed during an N_f sweep.
    pub fixed_nr: usize,
    /// Training recipe; its `seed` is the master seed fold seeds derive from.
    pub train: TrainConfig,
    /// Worker threads for concurrent fold runs.
    pub jobs: usize,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            fixed_nf: 3,
            fixed_nr: 1,
            train: TrainConfig::default(),
            jobs: 1,
        }
    }
}

/// All folds for one sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationPoint {
    pub value: usize,
    pub folds: Vec<FoldResult>,
    /// Box stats of `mse_norm` over the folds.
    pub stats: BoxStats,
}

impl AblationPoint {
    pub fn from_folds(value: usize, folds: Vec<FoldResult>) -> Result<Self> {
        let mse: Vec<f64> = folds.iter().map(|f| f.mse_norm).collect();
        Ok(Self {
            value,
            stats: box_stats(&mse)?,
            folds,
        })
    }

    /// Box stats of the fold MSEs in (deg/s)^2.
    pub fn stats_degps(&self) -> BoxStats {
        let mse: Vec<f64> = self.folds.iter().map(|f| f.mse_degps).collect();
        box_stats(&mse).expect("folds are nonempty and finite")
    }
}

/// Seed of one (value, fold) training run: SplitMix64 chained over
/// `master`, `value` and `fold`.
pub fn fold_seed(master: u64, value: usize, fold: usize) -> u64 {
    mix64(mix64(mix64(master) ^ value as u64) ^ fold as u64)
}

/// Runs `runner(value, fold, seed)` for every value and fold, on up to
/// `jobs` threads, and groups the results by value in the given order.
pub fn ablate_with<F>(
    values: &[usize],
    n_folds: usize,
    jobs: usize,
    master_seed: u64,
    runner: F,
) -> Result<Vec<AblationPoint>>
where
    F: Fn(usize, usize, u64) -> Result<FoldResult> + Sync,
{
    let tasks: Vec<(usize, usize)> = values
        .iter()
        .flat_map(|&v| (0..n_folds).map(move |k| (v, k)))
        .collect();
    let run = |&(v, k): &(usize, usize)| runner(v, k, fold_seed(master_seed, v, k));
    let results: Vec<Result<FoldResult>> = if jobs <= 1 {
        tasks.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    let mut results = results.into_iter();
    values
        .iter()
        .map(|&v| {
            let folds = results.by_ref().take(n_folds).collect::<Result<Vec<_>>>()?;
            AblationPoint::from_folds(v, folds)
        })
        .collect()
}

/// Full leave-one-Garden-out protocol for every value of the swept parameter.
/// `progress` is called after each finished run.
pub fn ablate(
    param: AblationParam,
    values: &[usize],
    acqs: &[Acquisition],
    cfg: &AblationConfig,
    progress: &(dyn Fn(usize, &FoldResult) + Sync),
) -> Result<Vec<AblationPoint>> {
    param.validate_values(values)?;
    cfg.train.validate()?;
    let splits = split_folds(acqs)?;
    ablate_with(values, splits.len(), cfg.jobs, cfg.train.seed, |value, fold, seed| {
        let ccfg = param.config(value, cfg)?;
        let tcfg = TrainConfig { seed, ..cfg.train };
        let r = run_fold(&splits[fold], ccfg, &tcfg)?;
        progress(value, &r);
        Ok(r)
    })
}
