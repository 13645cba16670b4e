//! Leave-one-Garden-acquisition-out evaluation, ablation sweeps and
//! box-plot summaries.

mod boxplot;
mod harness;
mod report;

pub use boxplot::{box_stats, quantile, BoxStats};
pub use harness::{
    ablate, ablate_with, fold_seed, run_fold, run_fold_detailed, AblationConfig, AblationParam,
    AblationPoint, FoldResult, FoldRun,
};
pub use report::{
    read_results_csv, stats_from_results, write_results_csv, write_stats_csv, ResultRow,
    RESULTS_HEADER, STATS_HEADER,
};

/// Normalized label units to deg/s.
pub const DEGPS_PER_UNIT: f64 = 200.0;
