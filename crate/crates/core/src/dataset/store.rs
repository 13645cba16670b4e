//! Canonical dataset layout.
//!
//! A directory holds `manifest.json` plus two raw little-endian `f32` files
//! per acquisition: frames (frame-major, then row-major, °C) and labels (one
//! signed deg/s value per frame). File paths in the manifest are relative to
//! the manifest's directory.
//!
//! ```json
//! {"acquisitions": [{"env": "Garden", "id": "garden-1", "fps": 8.0,
//!   "width": 32, "height": 24, "frame_count": 600,
//!   "frames_file": "garden-1.frames.f32", "labels_file": "garden-1.labels.f32"}]}
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::acquisition::{Acquisition, Environment};
use crate::error::{Error, Result};
use crate::io::{decode_f32_le, write_atomic, write_f32_le};
use crate::model::{FRAME_HEIGHT, FRAME_WIDTH};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub env: Environment,
    pub id: String,
    pub fps: f32,
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub frames_file: String,
    pub labels_file: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub acquisitions: Vec<ManifestEntry>,
}

fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Loads every acquisition listed in the manifest. `path` may be the
/// dataset directory or the manifest file itself.
pub fn load_dataset(path: &Path) -> Result<Vec<Acquisition>> {
    let mpath = manifest_path(path);
    let text = std::fs::read_to_string(&mpath).map_err(|e| Error::file(&mpath, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Data(format!("{}: corrupt manifest: {e}", mpath.display())))?;
    let root = mpath.parent().unwrap_or(Path::new("."));
    manifest
        .acquisitions
        .into_iter()
        .map(|e| load_entry(root, e))
        .collect()
}

fn read_floats(path: &Path, expected: usize, what: &str, id: &str) -> Result<Vec<f32>> {
    let bytes = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    if bytes.len() != expected * 4 {
        return Err(Error::Data(format!(
            "{id}: {what} file {} has {} bytes, manifest implies {}",
            path.display(),
            bytes.len(),
            expected * 4
        )));
    }
    decode_f32_le(&bytes)
}

fn load_entry(root: &Path, e: ManifestEntry) -> Result<Acquisition> {
    if (e.height, e.width) != (FRAME_HEIGHT, FRAME_WIDTH) {
        return Err(Error::Data(format!(
            "{}: frames are {}x{}, only {FRAME_HEIGHT}x{FRAME_WIDTH} is supported",
            e.id, e.height, e.width
        )));
    }
    let frames = read_floats(
        &root.join(&e.frames_file),
        e.frame_count * e.height * e.width,
        "frames",
        &e.id,
    )?;
    let labels = read_floats(&root.join(&e.labels_file), e.frame_count, "labels", &e.id)?;
    Acquisition::new(e.env, e.id, e.fps, frames, labels)
}

fn check_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !id.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(Error::Data(format!(
            "acquisition id {id:?} must be non-empty ASCII letters, digits, '-', '_' or '.'"
        )))
    }
}

/// Writes `acqs` into `dir` in the canonical layout, replacing any manifest there.
pub fn save_dataset(dir: &Path, acqs: &[Acquisition]) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let mut manifest = Manifest::default();
    for a in acqs {
        check_id(&a.id)?;
        if manifest.acquisitions.iter().any(|e| e.id == a.id) {
            return Err(Error::Data(format!("duplicate acquisition id {:?}", a.id)));
        }
        let entry = ManifestEntry {
            env: a.env.clone(),
            id: a.id.clone(),
            fps: a.fps,
            width: FRAME_WIDTH,
            height: FRAME_HEIGHT,
            frame_count: a.len(),
            frames_file: format!("{}.frames.f32", a.id),
            labels_file: format!("{}.labels.f32", a.id),
        };
        write_atomic(&dir.join(&entry.frames_file), |w| write_f32_le(w, a.frames()))?;
        write_atomic(&dir.join(&entry.labels_file), |w| write_f32_le(w, a.labels()))?;
        manifest.acquisitions.push(entry);
    }
    write_atomic(&dir.join(MANIFEST_FILE), |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(manifest)
}
