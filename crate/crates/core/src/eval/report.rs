//! Plot-ready CSV outputs of the ablation harness.

use std::io::Write;
use std::path::Path;

use super::boxplot::{box_stats, BoxStats};
use super::harness::AblationPoint;
use crate::error::{Error, Result};

pub const RESULTS_HEADER: &str = "param_name,param_value,fold,seed,mse_norm,mse_degps,rmse_degps";
pub const STATS_HEADER: &str = "param_value,median,q1,q3,whisker_lo,whisker_hi,n_outliers";

/// One line of a results CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub param_name: String,
    pub param_value: usize,
    pub fold: usize,
    pub seed: u64,
    pub mse_norm: f64,
    pub mse_degps: f64,
    pub rmse_degps: f64,
}

pub fn write_results_csv(w: &mut dyn Write, param_name: &str, points: &[AblationPoint]) -> Result<()> {
    writeln!(w, "{RESULTS_HEADER}")?;
    for p in points {
        for f in &p.folds {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                param_name, p.value, f.fold, f.seed, f.mse_norm, f.mse_degps, f.rmse_degps
            )?;
        }
    }
    Ok(())
}

pub fn write_stats_csv<'a>(
    w: &mut dyn Write,
    rows: impl IntoIterator<Item = (usize, &'a BoxStats)>,
) -> Result<()> {
    writeln!(w, "{STATS_HEADER}")?;
    for (value, s) in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            value,
            s.median,
            s.q1,
            s.q3,
            s.whisker_lo,
            s.whisker_hi,
            s.outliers.len()
        )?;
    }
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let f = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RESULTS_HEADER {
        return Err(Error::Data(format!(
            "{}: expected header {RESULTS_HEADER:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let bad = |col: &str| Error::Data(format!("{}: row {}: bad {col}", path.display(), i + 2));
        rows.push(ResultRow {
            param_name: rec[0].to_string(),
            param_value: rec[1].parse().map_err(|_| bad("param_value"))?,
            fold: rec[2].parse().map_err(|_| bad("fold"))?,
            seed: rec[3].parse().map_err(|_| bad("seed"))?,
            mse_norm: rec[4].parse().map_err(|_| bad("mse_norm"))?,
            mse_degps: rec[5].parse().map_err(|_| bad("mse_degps"))?,
            rmse_degps: rec[6].parse().map_err(|_| bad("rmse_degps"))?,
        });
    }
    Ok(rows)
}

/// Box stats per `param_value` (ascending) of `mse_norm`, or of
/// `mse_degps` when `degps` is set.
pub fn stats_from_results(rows: &[ResultRow], degps: bool) -> Result<Vec<(usize, BoxStats)>> {
    let mut values: Vec<usize> = rows.iter().map(|r| r.param_value).collect();
    values.sort_unstable();
    values.dedup();
    values
        .into_iter()
        .map(|v| {
            let mse: Vec<f64> = rows
                .iter()
                .filter(|r| r.param_value == v)
                .map(|r| if degps { r.mse_degps } else { r.mse_norm })
                .collect();
            Ok((v, box_stats(&mse)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::FoldResult;
    use crate::model::CnnConfig;
    use crate::train::TrainConfig;

    #[test]
    fn results_roundtrip_through_csv() {
        let folds: Vec<_> = (0..6)
            .map(|k| FoldResult::from_mse(k, 0.01 * (k + 1) as f64, CnnConfig::default(), TrainConfig::default()))
            .collect();
        let point = AblationPoint::from_folds(3, folds).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut buf = Vec::new();
        write_results_csv(&mut buf, "nf", std::slice::from_ref(&point)).unwrap();
        std::fs::write(&path, &buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(RESULTS_HEADER));
        assert!(text.contains("\nnf,3,0,0,0.01,400,20\n"));

        let rows = read_results_csv(&path).unwrap();
        assert_eq!(rows.len(), 6);
        let stats = stats_from_results(&rows, false).unwrap();
        assert_eq!(stats.len(), 1);
        assert_eq!(stats[0].1, point.stats);

        let mut out = Vec::new();
        write_stats_csv(&mut out, stats.iter().map(|(v, s)| (*v, s))).unwrap();
        let out = String::from_utf8(out).unwrap();
        assert!(out.starts_with(STATS_HEADER));
        assert_eq!(out.lines().count(), 2);
    }
}
