#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use thermal_odometry::dataset::{synth_acquisition, Acquisition, Environment, SpeedSegment, SynthConfig};
use thermal_odometry::{Real, Rng, Tensor};

pub fn random_tensor<T: Real>(rng: &mut Rng, shape: Vec<usize>, scale: f64) -> Tensor<T> {
    let n = shape.iter().product();
    let data = (0..n).map(|_| T::of(rng.uniform_range(-scale, scale))).collect();
    Tensor::new(shape, data).unwrap()
}

/// Zero-padded "same" convolution, one output value at a time, accumulated
/// in `T`.
pub fn naive_conv<T: Real>(x: &Tensor<T>, k: &Tensor<T>, bias: &Tensor<T>) -> Vec<T> {
    let &[b, c_in, h, w] = x.shape() else { panic!("rank 4 input") };
    let &[c_out, _, ks, _] = k.shape() else { panic!("rank 4 kernels") };
    let p = (ks / 2) as isize;
    let mut out = Vec::with_capacity(b * c_out * h * w);
    for n in 0..b {
        for o in 0..c_out {
            for y in 0..h as isize {
                for xx in 0..w as isize {
                    let mut acc = bias.data()[o];
                    for c in 0..c_in {
                        for ky in 0..ks as isize {
                            for kx in 0..ks as isize {
                                let (sy, sx) = (y + ky - p, xx + kx - p);
                                if sy < 0 || sx < 0 || sy >= h as isize || sx >= w as isize {
                                    continue;
                                }
                                let xi = ((n * c_in + c) * h + sy as usize) * w + sx as usize;
                                let ki = ((o * c_in + c) * ks + ky as usize) * ks + kx as usize;
                                acc = acc + x.data()[xi] * k.data()[ki];
                            }
                        }
                    }
                    out.push(acc);
                }
            }
        }
    }
    out
}

pub fn naive_dense<T: Real>(x: &Tensor<T>, w: &Tensor<T>, bias: &Tensor<T>) -> Vec<T> {
    let &[m, n] = w.shape() else { panic!("matrix weight") };
    let mut out = Vec::new();
    for row in x.data().chunks(n) {
        for i in 0..m {
            let mut acc = bias.data()[i];
            for j in 0..n {
                acc = acc + w.data()[i * n + j] * row[j];
            }
            out.push(acc);
        }
    }
    out
}

/// 2x2 ceil-mode max pooling; returns values and flat source indices,
/// preferring the earliest element on ties.
pub fn naive_pool(x: &Tensor<f32>) -> (Vec<f32>, Vec<usize>) {
    let &[b, c, h, w] = x.shape() else { panic!("rank 4 input") };
    let (mut vals, mut idx) = (Vec::new(), Vec::new());
    for plane in 0..b * c {
        for py in 0..h.div_ceil(2) {
            for px in 0..w.div_ceil(2) {
                let mut best: Option<(f32, usize)> = None;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let (y, xx) = (2 * py + dy, 2 * px + dx);
                        if y >= h || xx >= w {
                            continue;
                        }
                        let i = plane * h * w + y * w + xx;
                        let v = x.data()[i];
                        if best.is_none_or(|(bv, _)| v > bv) {
                            best = Some((v, i));
                        }
                    }
                }
                let (v, i) = best.unwrap();
                vals.push(v);
                idx.push(i);
            }
        }
    }
    (vals, idx)
}

/// Small acquisition rotating at the given constant speeds, `frames` frames each.
pub fn constant_speed_acq(env: Environment, id: &str, seed: u64, speeds: &[f32], frames: usize) -> Acquisition {
    let schedule = speeds
        .iter()
        .map(|&speed| SpeedSegment { speed, frames })
        .collect();
    synth_acquisition(&SynthConfig::new(env, id, seed, schedule)).unwrap()
}

pub fn thermod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermod"))
        .args(args)
        .env_remove("THERMOD_DATA")
        .output()
        .expect("spawn thermod")
}

pub fn thermod_ok(args: &[&str]) -> Output {
    let out = thermod(args);
    assert!(
        out.status.success(),
        "thermod {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn join(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
