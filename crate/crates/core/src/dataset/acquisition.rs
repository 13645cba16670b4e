use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FRAME_HEIGHT, FRAME_WIDTH};

/// Largest rotation speed magnitude in the recordings, deg/s.
pub const MAX_SPEED_DEGPS: f32 = 200.0;

/// Recording environment. Synthetic scenes carry a free-form suffix and
/// serialize as `Synthetic-<suffix>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Environment {
    Laboratory,
    DiningPlace,
    Kitchen,
    Garden,
    Synthetic(String),
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Environment::Laboratory => f.write_str("Laboratory"),
            Environment::DiningPlace => f.write_str("DiningPlace"),
            Environment::Kitchen => f.write_str("Kitchen"),
            Environment::Garden => f.write_str("Garden"),
            Environment::Synthetic(s) => write!(f, "Synthetic-{s}"),
        }
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Laboratory" => Ok(Environment::Laboratory),
            "DiningPlace" => Ok(Environment::DiningPlace),
            "Kitchen" => Ok(Environment::Kitchen),
            "Garden" => Ok(Environment::Garden),
            _ => match s.strip_prefix("Synthetic-") {
                Some(rest) if !rest.is_empty() => Ok(Environment::Synthetic(rest.to_string())),
                _ => Err(Error::Data(format!(
                    "unknown environment {s:?} (expected Laboratory, DiningPlace, Kitchen, Garden or Synthetic-<name>)"
                ))),
            },
        }
    }
}

impl TryFrom<String> for Environment {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Environment> for String {
    fn from(e: Environment) -> String {
        e.to_string()
    }
}

/// One recording session: frames in °C plus a signed speed label per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Acquisition {
    pub env: Environment,
    pub id: String,
    pub fps: f32,
    frames: Vec<f32>,
    labels: Vec<f32>,
    boundaries: Vec<usize>,
}

impl Acquisition {
    /// `frames` holds `labels.len()` row-major 24x32 frames back to back.
    /// Segment boundaries are inferred from label changes.
    pub fn new(
        env: Environment,
        id: impl Into<String>,
        fps: f32,
        frames: Vec<f32>,
        labels: Vec<f32>,
    ) -> Result<Self> {
        let id = id.into();
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::Data(format!("{id}: fps must be positive")));
        }
        let frame_len = FRAME_HEIGHT * FRAME_WIDTH;
        if frames.len() != labels.len() * frame_len {
            return Err(Error::Data(format!(
                "{id}: {} pixel values do not make {} frames of {}x{}",
                frames.len(),
                labels.len(),
                FRAME_HEIGHT,
                FRAME_WIDTH
            )));
        }
        if let Some(i) = frames.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "{id}: non-finite pixel in frame {}",
                i / frame_len
            )));
        }
        if let Some(i) = labels
            .iter()
            .position(|v| !v.is_finite() || v.abs() > MAX_SPEED_DEGPS)
        {
            return Err(Error::Data(format!(
                "{id}: label {} at frame {i} outside ±{MAX_SPEED_DEGPS} deg/s",
                labels[i]
            )));
        }
        let boundaries = (1..labels.len())
            .filter(|&i| labels[i] != labels[i - 1])
            .collect();
        Ok(Self {
            env,
            id,
            fps,
            frames,
            labels,
            boundaries,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn frame(&self, i: usize) -> &[f32] {
        let n = FRAME_HEIGHT * FRAME_WIDTH;
        &self.frames[i * n..(i + 1) * n]
    }

    pub fn frames(&self) -> &[f32] {
        &self.frames
    }

    pub fn labels(&self) -> &[f32] {
        &self.labels
    }

    /// Frame indices where the commanded speed changes.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Maximal constant-label runs of frames.
    pub fn segments(&self) -> Vec<Range<usize>> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut starts = vec![0];
        starts.extend_from_slice(&self.boundaries);
        let mut ends = self.boundaries.clone();
        ends.push(self.len());
        starts.into_iter().zip(ends).map(|(s, e)| s..e).collect()
    }
}
