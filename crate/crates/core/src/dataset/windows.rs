use super::acquisition::{Acquisition, MAX_SPEED_DEGPS};
use super::subsample::subsample;
use crate::error::{Error, Result};
use crate::model::{CnnConfig, FRAME_HEIGHT, FRAME_WIDTH};
use crate::tensor::Tensor;

/// Added to the window variance before taking the square root.
pub const STANDARDIZE_EPS: f64 = 1e-6;

/// One training example: `n_frames` consecutive frames (oldest first) from a
/// single constant-speed segment, subsampled and standardized.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// `n_frames x h x w`, row-major.
    pub x: Vec<f32>,
    /// Speed label divided by 200, in [-1, 1].
    pub y_norm: f32,
    pub acquisition: String,
    pub start: usize,
}

/// Samples of one shape packed contiguously, ready for batching.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    pub n_frames: usize,
    pub height: usize,
    pub width: usize,
    x: Vec<f32>,
    y: Vec<f32>,
    origin: Vec<(String, usize)>,
}

/// Visits every window of `acq`, handing the standardized pixels, the
/// normalized label and the start frame to `f`.
fn for_each_window(
    acq: &Acquisition,
    n_frames: usize,
    nr: usize,
    mut f: impl FnMut(&[f32], f32, usize),
) -> Result<()> {
    if n_frames < 1 {
        return Err(Error::Config("nf must be ≥ 1".into()));
    }
    let small: Vec<Vec<f32>> = (0..acq.len())
        .map(|i| subsample(acq.frame(i), FRAME_HEIGHT, FRAME_WIDTH, nr))
        .collect::<Result<_>>()?;
    let mut buf = Vec::new();
    for seg in acq.segments() {
        if seg.len() < n_frames {
            continue;
        }
        for start in seg.start..=seg.end - n_frames {
            buf.clear();
            for frame in &small[start..start + n_frames] {
                buf.extend_from_slice(frame);
            }
            standardize(&mut buf);
            f(&buf, acq.labels()[start] / MAX_SPEED_DEGPS, start);
        }
    }
    Ok(())
}

fn standardize(x: &mut [f32]) {
    let n = x.len() as f64;
    let mean = x.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = x.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
    let inv = 1.0 / (var + STANDARDIZE_EPS).sqrt();
    for v in x {
        *v = ((*v as f64 - mean) * inv) as f32;
    }
}

/// Sliding windows (stride 1) of `n_frames` frames that never cross a
/// segment boundary.
pub fn make_windows(acq: &Acquisition, n_frames: usize, nr: usize) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for_each_window(acq, n_frames, nr, |x, y, start| {
        out.push(Sample {
            x: x.to_vec(),
            y_norm: y,
            acquisition: acq.id.clone(),
            start,
        })
    })?;
    Ok(out)
}

impl SampleSet {
    pub fn empty(n_frames: usize, height: usize, width: usize) -> Self {
        Self {
            n_frames,
            height,
            width,
            ..Self::default()
        }
    }

    /// Windows of every acquisition, shaped for `cfg`.
    pub fn from_acquisitions<'a>(
        acqs: impl IntoIterator<Item = &'a Acquisition>,
        cfg: &CnnConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut set = Self::empty(cfg.n_frames, cfg.input_height(), cfg.input_width());
        for acq in acqs {
            for_each_window(acq, cfg.n_frames, cfg.subsample, |x, y, start| {
                set.x.extend_from_slice(x);
                set.y.push(y);
                set.origin.push((acq.id.clone(), start));
            })?;
        }
        Ok(set)
    }

    pub fn from_samples(n_frames: usize, height: usize, width: usize, samples: &[Sample]) -> Result<Self> {
        let mut set = Self::empty(n_frames, height, width);
        for s in samples {
            set.push(&s.x, s.y_norm, &s.acquisition, s.start)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, x: &[f32], y_norm: f32, acquisition: &str, start: usize) -> Result<()> {
        if x.len() != self.sample_len() {
            return Err(Error::Shape(format!(
                "sample has {} values, set expects {}",
                x.len(),
                self.sample_len()
            )));
        }
        self.x.extend_from_slice(x);
        self.y.push(y_norm);
        self.origin.push((acquisition.to_string(), start));
        Ok(())
    }

    pub fn sample_len(&self) -> usize {
        self.n_frames * self.height * self.width
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f32] {
        let n = self.sample_len();
        &self.x[i * n..(i + 1) * n]
    }

    pub fn labels(&self) -> &[f32] {
        &self.y
    }

    /// `(acquisition id, start frame)` of sample `i`.
    pub fn origin(&self, i: usize) -> (&str, usize) {
        let (id, s) = &self.origin[i];
        (id, *s)
    }

    pub fn matches(&self, cfg: &CnnConfig) -> bool {
        [self.n_frames, self.height, self.width] == cfg.sample_shape()
    }

    /// Gathers the given samples into a `B x N_f x H x W` tensor and a label tensor.
    pub fn batch(&self, indices: &[usize]) -> Result<(Tensor<f32>, Tensor<f32>)> {
        if indices.is_empty() {
            return Err(Error::Shape("empty batch".into()));
        }
        let mut x = Vec::with_capacity(indices.len() * self.sample_len());
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(self.x(i));
            y.push(self.y[i]);
        }
        Ok((
            Tensor::new(
                vec![indices.len(), self.n_frames, self.height, self.width],
                x,
            )?,
            Tensor::from_vec(y)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Environment;
    use crate::tensor::Rng;

    fn noisy(labels: Vec<f32>, seed: u64) -> Acquisition {
        let mut rng = Rng::new(seed);
        let frames = (0..labels.len() * 768)
            .map(|_| 20.0 + 3.0 * rng.normal() as f32)
            .collect();
        Acquisition::new(Environment::Laboratory, "lab", 8.0, frames, labels).unwrap()
    }

    #[test]
    fn window_counts() {
        let a = noisy(vec![100.0; 10], 1);
        assert_eq!(make_windows(&a, 3, 1).unwrap().len(), 8);

        let mut labels = vec![50.0; 5];
        labels.extend(vec![-50.0; 5]);
        let b = noisy(labels, 2);
        let w = make_windows(&b, 3, 1).unwrap();
        assert_eq!(w.len(), 6);
        assert!(w.iter().all(|s| s.start + 3 <= 5 || s.start >= 5));
        assert_eq!(make_windows(&b, 6, 1).unwrap().len(), 0);
    }

    #[test]
    fn standardized_and_scaled() {
        let a = noisy(vec![-150.0; 6], 3);
        for s in make_windows(&a, 3, 2).unwrap() {
            assert_eq!(s.x.len(), 3 * 12 * 16);
            let n = s.x.len() as f64;
            let mean = s.x.iter().map(|&v| v as f64).sum::<f64>() / n;
            let var = s.x.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-3 && (var - 1.0).abs() < 1e-3);
            assert_eq!(s.y_norm, -0.75);
        }
    }

    #[test]
    fn channels_are_oldest_first() {
        let mut frames = Vec::new();
        for i in 0..3 {
            frames.extend((0..768).map(|p| (i * 1000 + p) as f32));
        }
        let a = Acquisition::new(Environment::Kitchen, "k", 8.0, frames, vec![10.0; 3]).unwrap();
        let s = &make_windows(&a, 3, 1).unwrap()[0];
        assert!(s.x[0] < s.x[768] && s.x[768] < s.x[1536]);
    }

    #[test]
    fn set_batches() {
        let a = noisy(vec![40.0; 7], 4);
        let cfg = CnnConfig::new(3, 3).unwrap();
        let set = SampleSet::from_acquisitions([&a], &cfg).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set.matches(&cfg));
        let (x, y) = set.batch(&[4, 0]).unwrap();
        assert_eq!(x.shape(), &[2, 3, 8, 10]);
        assert_eq!(y.data(), &[0.2, 0.2]);
        assert_eq!(set.origin(4), ("lab", 4));
        let samples = make_windows(&a, 3, 3).unwrap();
        assert_eq!(SampleSet::from_samples(3, 8, 10, &samples).unwrap(), set);
    }
}
