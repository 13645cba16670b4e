//! Synthetic recordings from a virtual 24x32 thermal camera panning over a
//! seeded 360° thermal panorama.
//!
//! The panorama is a grid of [`PANO_COLS`] azimuth columns (0.25° each) by
//! 24 rows. Its temperature is ambient + a coarse and a fine smoothed
//! Gaussian random field + soft-edged warm/cool objects + a vertical
//! gradient. Higher `clutter` means finer structure, more contrast and more
//! objects. Camera column `j` covers azimuths `yaw + (j - 16) * fov / 32`
//! to one pixel pitch further; the pixel value is the average of the
//! (linearly interpolated) panorama over that footprint and over the
//! exposure, during which yaw advances by the full `speed / fps` step. So
//! fast rotation smears the image along the rows, and positive speeds move
//! scene content toward lower column indices.

use super::acquisition::{Acquisition, Environment, MAX_SPEED_DEGPS};
use crate::error::{Error, Result};
use crate::model::{FRAME_HEIGHT, FRAME_WIDTH};
use crate::tensor::{mix64, Rng};

/// Horizontal field of view of the virtual camera, degrees.
pub const DEFAULT_FOV_DEG: f64 = 110.0;
/// Azimuth resolution of the panorama grid.
pub const PANO_COLS: usize = 1440;
const DEG_PER_COL: f64 = 360.0 / PANO_COLS as f64;
/// Azimuth samples averaged per camera pixel.
const PIXEL_SUBSAMPLES: usize = 8;
/// Yaw samples averaged over one frame's exposure.
const EXPOSURE_SUBSAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedSegment {
    /// Signed rotation speed, deg/s.
    pub speed: f32,
    pub frames: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub env: Environment,
    pub id: String,
    pub scene_seed: u64,
    pub noise_seed: u64,
    pub schedule: Vec<SpeedSegment>,
    /// Per-pixel Gaussian sensor noise, °C.
    pub noise_std: f64,
    pub fov_deg: f64,
    pub fps: f64,
    /// Scene clutter in [0, 1].
    pub clutter: f64,
}

impl SynthConfig {
    pub fn new(env: Environment, id: impl Into<String>, scene_seed: u64, schedule: Vec<SpeedSegment>) -> Self {
        Self {
            env,
            id: id.into(),
            scene_seed,
            noise_seed: mix64(scene_seed ^ 0x6e6f_6973_65),
            schedule,
            noise_std: 0.2,
            fov_deg: DEFAULT_FOV_DEG,
            fps: super::DEFAULT_FPS as f64,
            clutter: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::Config("speed schedule is empty".into()));
        }
        for s in &self.schedule {
            if !(s.speed.abs() <= MAX_SPEED_DEGPS) {
                return Err(Error::Config(format!(
                    "speed {} outside ±{MAX_SPEED_DEGPS} deg/s",
                    s.speed
                )));
            }
            if s.frames == 0 {
                return Err(Error::Config("schedule segment with 0 frames".into()));
            }
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 360.0) {
            return Err(Error::Config(format!("fov {} outside (0, 360]", self.fov_deg)));
        }
        if !(self.fps > 0.0) || !(self.noise_std >= 0.0) || !(0.0..=1.0).contains(&self.clutter) {
            return Err(Error::Config("fps must be > 0, noise ≥ 0, clutter in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Row-major `FRAME_HEIGHT x PANO_COLS` temperature grid.
struct Panorama {
    grid: Vec<f64>,
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let k: Vec<f64> = (-r..=r)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

/// Signed smallest angular difference, degrees.
fn wrap_deg(d: f64) -> f64 {
    (d + 180.0).rem_euclid(360.0) - 180.0
}

/// Zero-mean Gaussian noise on the panorama grid, blurred with `sigma_col`
/// (periodic, along azimuth) and `sigma_row` (clamped), scaled to std `amp`.
fn smoothed_noise(rng: &mut Rng, sigma_col: f64, sigma_row: f64, amp: f64) -> Vec<f64> {
    let (rows, cols) = (FRAME_HEIGHT, PANO_COLS);
    let noise: Vec<f64> = (0..rows * cols).map(|_| rng.normal()).collect();
    let kc = gaussian_kernel(sigma_col);
    let rc = (kc.len() / 2) as isize;
    let mut tmp = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut s = 0.0;
            for (i, w) in kc.iter().enumerate() {
                let cc = (c as isize + i as isize - rc).rem_euclid(cols as isize) as usize;
                s += w * noise[r * cols + cc];
            }
            tmp[r * cols + c] = s;
        }
    }
    let kr = gaussian_kernel(sigma_row);
    let rr = (kr.len() / 2) as isize;
    let mut field = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut s = 0.0;
            for (i, w) in kr.iter().enumerate() {
                let src = (r as isize + i as isize - rr).clamp(0, rows as isize - 1) as usize;
                s += w * tmp[src * cols + c];
            }
            field[r * cols + c] = s;
        }
    }
    let mean = field.iter().sum::<f64>() / field.len() as f64;
    let std = (field.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / field.len() as f64).sqrt();
    let scale = amp / std.max(1e-12);
    field.into_iter().map(|v| (v - mean) * scale).collect()
}

impl Panorama {
    fn generate(seed: u64, clutter: f64) -> Self {
        let (rows, cols) = (FRAME_HEIGHT, PANO_COLS);
        let mut rng = Rng::new(seed);
        let ambient = rng.uniform_range(16.0, 26.0);

        // coarse structure (walls, sky, large surfaces) ...
        let coarse = smoothed_noise(
            &mut rng,
            lerp(10.0, 3.0, clutter) / DEG_PER_COL,
            lerp(3.0, 1.5, clutter),
            lerp(1.0, 3.0, clutter),
        );
        // ... plus fine texture (foliage, edges, small objects) that block
        // averaging at low resolution washes out
        let fine = smoothed_noise(&mut rng, 1.0 / DEG_PER_COL, 0.6, lerp(0.2, 1.5, clutter));

        let gradient = rng.uniform_range(-2.0, 2.0);
        let mut grid: Vec<f64> = coarse
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = (i / cols) as f64 / (rows - 1) as f64;
                ambient + v + fine[i] + gradient * (r - 0.5)
            })
            .collect();

        let n_objects = 2 + (10.0 * clutter).round() as usize;
        for _ in 0..n_objects {
            let az = rng.uniform_range(0.0, 360.0);
            let row = rng.uniform_range(0.0, rows as f64);
            let half_az = rng.uniform_range(4.0, 20.0);
            let half_row = rng.uniform_range(2.0, 10.0);
            let sign = if rng.uniform() < 0.75 { 1.0 } else { -1.0 };
            let amp = sign * rng.uniform_range(2.0, 10.0);
            for r in 0..rows {
                let dr = (r as f64 + 0.5 - row).abs();
                let fr = 1.0 / (1.0 + ((dr - half_row) / 0.7).exp());
                if fr < 1e-6 {
                    continue;
                }
                for c in 0..cols {
                    let da = wrap_deg((c as f64 + 0.5) * DEG_PER_COL - az).abs();
                    let fa = 1.0 / (1.0 + ((da - half_az) / 1.5).exp());
                    grid[r * cols + c] += amp * fr * fa;
                }
            }
        }
        Self { grid }
    }

    /// Temperature at panorama row `r` and azimuth `az` (degrees, any range).
    fn sample(&self, r: usize, az: f64) -> f64 {
        let u = az.rem_euclid(360.0) / DEG_PER_COL;
        let c0 = (u.floor() as usize) % PANO_COLS;
        let c1 = (c0 + 1) % PANO_COLS;
        let t = u - u.floor();
        let row = &self.grid[r * PANO_COLS..(r + 1) * PANO_COLS];
        (1.0 - t) * row[c0] + t * row[c1]
    }
}

/// Renders one acquisition. Identical configs give bit-identical output.
pub fn synth_acquisition(cfg: &SynthConfig) -> Result<Acquisition> {
    cfg.validate()?;
    let pano = Panorama::generate(cfg.scene_seed, cfg.clutter);
    let mut yaw = Rng::with_stream(cfg.scene_seed, 1).uniform_range(0.0, 360.0);
    let mut noise = Rng::new(cfg.noise_seed);
    let pitch = cfg.fov_deg / FRAME_WIDTH as f64;

    let total: usize = cfg.schedule.iter().map(|s| s.frames).sum();
    let mut frames = Vec::with_capacity(total * FRAME_HEIGHT * FRAME_WIDTH);
    let mut labels = Vec::with_capacity(total);
    for seg in &cfg.schedule {
        let step = seg.speed as f64 / cfg.fps;
        for _ in 0..seg.frames {
            for r in 0..FRAME_HEIGHT {
                for j in 0..FRAME_WIDTH {
                    // each pixel integrates the scene over its azimuth footprint
                    // and over the exposure, during which the camera keeps turning
                    let left = yaw + (j as f64 - FRAME_WIDTH as f64 / 2.0) * pitch;
                    let mut v = 0.0;
                    for t in 0..EXPOSURE_SUBSAMPLES {
                        let start = left + (t as f64 + 0.5) / EXPOSURE_SUBSAMPLES as f64 * step;
                        for s in 0..PIXEL_SUBSAMPLES {
                            v += pano.sample(r, start + (s as f64 + 0.5) / PIXEL_SUBSAMPLES as f64 * pitch);
                        }
                    }
                    v /= (EXPOSURE_SUBSAMPLES * PIXEL_SUBSAMPLES) as f64;
                    if cfg.noise_std > 0.0 {
                        v += cfg.noise_std * noise.normal();
                    }
                    frames.push(v as f32);
                }
            }
            labels.push(seg.speed);
            yaw = (yaw + step).rem_euclid(360.0);
        }
    }
    Acquisition::new(cfg.env.clone(), cfg.id.clone(), cfg.fps as f32, frames, labels)
}

/// Speed sweep 20, 40, ..., 200 deg/s, each magnitude once per direction
/// (+20, -20, +40, -40, ...), splitting `total_frames` as evenly as possible.
pub fn sweep_schedule(total_frames: usize) -> Result<Vec<SpeedSegment>> {
    let speeds: Vec<f32> = (1..=10)
        .flat_map(|k| {
            let s = 20.0 * k as f32;
            [s, -s]
        })
        .collect();
    if total_frames < speeds.len() {
        return Err(Error::Config(format!(
            "need at least {} frames for a full speed sweep, got {total_frames}",
            speeds.len()
        )));
    }
    let base = total_frames / speeds.len();
    let extra = total_frames % speeds.len();
    Ok(speeds
        .into_iter()
        .enumerate()
        .map(|(i, speed)| SpeedSegment {
            speed,
            frames: base + usize::from(i < extra),
        })
        .collect())
}

/// Parameters for a whole synthetic dataset mirroring the recorded one:
/// 4 Laboratory, 4 DiningPlace, 4 Kitchen and 6 Garden acquisitions.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSynthConfig {
    pub seed: u64,
    pub frames_per_acquisition: usize,
    pub fov_deg: f64,
    pub fps: f64,
    /// Multiplies each environment's default sensor noise.
    pub noise_scale: f64,
}

impl Default for DatasetSynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            frames_per_acquisition: 600,
            fov_deg: DEFAULT_FOV_DEG,
            fps: super::DEFAULT_FPS as f64,
            noise_scale: 1.0,
        }
    }
}

/// `(environment, id prefix, count, clutter, noise std °C)`
const LAYOUT: [(Environment, &str, usize, f64, f64); 4] = [
    (Environment::Laboratory, "lab", 4, 0.2, 0.15),
    (Environment::DiningPlace, "dining", 4, 0.5, 0.2),
    (Environment::Kitchen, "kitchen", 4, 0.55, 0.2),
    (Environment::Garden, "garden", 6, 0.85, 0.3),
];

pub fn synth_dataset(cfg: &DatasetSynthConfig) -> Result<Vec<Acquisition>> {
    let schedule = sweep_schedule(cfg.frames_per_acquisition)?;
    let mut out = Vec::new();
    let mut index = 0u64;
    for (env, prefix, count, clutter, noise) in LAYOUT {
        for k in 1..=count {
            index += 1;
            let scene_seed = mix64(mix64(cfg.seed) ^ index);
            let sc = SynthConfig {
                env: env.clone(),
                id: format!("{prefix}-{k}"),
                scene_seed,
                noise_seed: mix64(scene_seed ^ 0x6e6f_6973_65),
                schedule: schedule.clone(),
                noise_std: noise * cfg.noise_scale,
                fov_deg: cfg.fov_deg,
                fps: cfg.fps,
                clutter,
            };
            out.push(synth_acquisition(&sc)?);
        }
    }
    Ok(out)
}
