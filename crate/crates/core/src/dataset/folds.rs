use super::acquisition::{Acquisition, Environment};
use crate::error::{Error, Result};

/// Number of held-out Garden acquisitions, hence folds.
pub const N_FOLDS: usize = 6;

/// Fold `fold` tests on one Garden acquisition and trains on everything else.
#[derive(Clone, Debug)]
pub struct FoldSplit<'a> {
    pub fold: usize,
    pub test: &'a Acquisition,
    pub train: Vec<&'a Acquisition>,
}

/// Leave-one-Garden-acquisition-out splits, in dataset order of the Garden
/// acquisitions.
pub fn split_folds(acqs: &[Acquisition]) -> Result<Vec<FoldSplit<'_>>> {
    let garden: Vec<usize> = acqs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.env == Environment::Garden)
        .map(|(i, _)| i)
        .collect();
    if garden.len() != N_FOLDS {
        return Err(Error::Data(format!(
            "expected {N_FOLDS} Garden acquisitions, found {}",
            garden.len()
        )));
    }
    Ok(garden
        .iter()
        .enumerate()
        .map(|(fold, &ti)| FoldSplit {
            fold,
            test: &acqs[ti],
            train: acqs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ti)
                .map(|(_, a)| a)
                .collect(),
        })
        .collect())
}
