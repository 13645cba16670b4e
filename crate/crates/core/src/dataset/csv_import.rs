use std::io::Read;
use std::path::Path;

use super::acquisition::{Acquisition, Environment};
use crate::error::{Error, Result};
use crate::model::{FRAME_HEIGHT, FRAME_WIDTH};

/// Pixel columns (row-major 24x32) followed by the speed label.
pub const CSV_COLUMNS: usize = FRAME_HEIGHT * FRAME_WIDTH + 1;

/// Reads one acquisition from a header-less CSV with one frame per row.
pub fn import_csv(path: &Path, env: Environment, fps: f32, id: &str) -> Result<Acquisition> {
    let f = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    import_csv_reader(f, env, fps, id)
}

pub fn import_csv_reader(r: impl Read, env: Environment, fps: f32, id: &str) -> Result<Acquisition> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut frames = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != CSV_COLUMNS {
            return Err(Error::Data(format!(
                "bad column count on row {}: {} (expected {CSV_COLUMNS})",
                row + 1,
                rec.len()
            )));
        }
        for (col, cell) in rec.iter().enumerate() {
            let v: f32 = cell.parse().map_err(|_| {
                Error::Data(format!(
                    "non-numeric cell {cell:?} at row {}, column {}",
                    row + 1,
                    col + 1
                ))
            })?;
            if col + 1 == CSV_COLUMNS {
                labels.push(v);
            } else {
                frames.push(v);
            }
        }
    }
    Acquisition::new(env, id, fps, frames, labels)
}
