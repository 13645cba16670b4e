use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::eval::DEGPS_PER_UNIT;
use crate::io::write_atomic;

pub const HISTORY_HEADER: &str = "epoch,train_loss,test_mse_norm,test_mse_degps";

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Sample-weighted mean of the mini-batch losses.
    pub train_loss: f64,
    /// Test MSE in normalized label units, if a test set was supplied.
    pub test_mse_norm: Option<f64>,
}

impl EpochRecord {
    pub fn test_mse_degps(&self) -> Option<f64> {
        self.test_mse_norm.map(|m| m * DEGPS_PER_UNIT * DEGPS_PER_UNIT)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    /// Writes `epoch,train_loss,test_mse_norm,test_mse_degps`; test columns
    /// are empty when no test set was used.
    pub fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "{HISTORY_HEADER}")?;
        for r in &self.epochs {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{}",
                r.epoch,
                r.train_loss,
                opt(r.test_mse_norm),
                opt(r.test_mse_degps())
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_csv(w))
    }
}
