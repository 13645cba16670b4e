//! Thermal recordings: storage, import, preprocessing, fold splitting and a
//! synthetic rotating-camera generator.

mod acquisition;
mod csv_import;
mod folds;
mod store;
mod subsample;
mod synth;
mod windows;

pub use acquisition::{Acquisition, Environment, MAX_SPEED_DEGPS};
pub use csv_import::{import_csv, import_csv_reader, CSV_COLUMNS};
pub use folds::{split_folds, FoldSplit, N_FOLDS};
pub use store::{load_dataset, save_dataset, Manifest, ManifestEntry, MANIFEST_FILE};
pub use subsample::subsample;
pub use synth::{
    sweep_schedule, synth_acquisition, synth_dataset, DatasetSynthConfig, SpeedSegment,
    SynthConfig, DEFAULT_FOV_DEG,
};
pub use windows::{make_windows, Sample, SampleSet, STANDARDIZE_EPS};

/// Nominal sensor frame rate in frames per second.
pub const DEFAULT_FPS: f32 = 8.0;
