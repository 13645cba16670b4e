//! `THOD` checkpoint files.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | content                                                        |
//! |-------|----------------------------------------------------------------|
//! | 4     | magic `THOD`                                                   |
//! | 4     | format version (`u32`, currently 1)                            |
//! | 28    | config as 7 `u32`: n_frames, subsample, conv1_filters,         |
//! |       | conv2_filters, fc1, fc2, kernel                                |
//! | 8     | total parameter count (`u64`)                                  |
//! | 4 * n | parameters as `f32`, tensors in [`PARAM_NAMES`] order, each    |
//! |       | row-major                                                      |
//!
//! [`PARAM_NAMES`]: super::PARAM_NAMES

use std::io::{Read, Write};
use std::path::Path;

use super::config::{param_count, CnnConfig};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::io::{decode_f32_le, write_atomic, write_f32_le};
use crate::tensor::Tensor;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"THOD";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint(w: &mut dyn Write, params: &ModelParams<f32>) -> Result<()> {
    let c = &params.cfg;
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    for v in [
        c.n_frames,
        c.subsample,
        c.conv1_filters,
        c.conv2_filters,
        c.fc1,
        c.fc2,
        c.kernel,
    ] {
        let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{v} does not fit u32")))?;
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&(params.num_params() as u64).to_le_bytes())?;
    for t in params.tensors() {
        write_f32_le(w, t.data())?;
    }
    Ok(())
}

pub fn read_checkpoint(r: &mut dyn Read) -> Result<ModelParams<f32>> {
    let mut header = [0u8; 4 + 4 + 28 + 8];
    r.read_exact(&mut header)
        .map_err(|_| Error::Checkpoint("truncated header".into()))?;
    if &header[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("missing THOD magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let version = word(0);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let cfg = CnnConfig {
        n_frames: word(1) as usize,
        subsample: word(2) as usize,
        conv1_filters: word(3) as usize,
        conv2_filters: word(4) as usize,
        fc1: word(5) as usize,
        fc2: word(6) as usize,
        kernel: word(7) as usize,
    };
    cfg.validate()
        .map_err(|e| Error::Checkpoint(format!("bad config: {e}")))?;
    let stored = u64::from_le_bytes(header[36..44].try_into().unwrap());
    let expected = param_count(&cfg);
    if stored != expected as u64 {
        return Err(Error::Checkpoint(format!(
            "parameter count {stored} does not match config ({expected})"
        )));
    }
    let mut body = Vec::with_capacity(expected * 4);
    r.read_to_end(&mut body)?;
    if body.len() != expected * 4 {
        return Err(Error::Checkpoint(format!(
            "expected {} parameter bytes, found {}",
            expected * 4,
            body.len()
        )));
    }
    let values = decode_f32_le(&body)?;
    let mut tensors = Vec::with_capacity(10);
    let mut offset = 0;
    for shape in cfg.param_shapes() {
        let n: usize = shape.iter().product();
        tensors.push(Tensor::new(shape, values[offset..offset + n].to_vec())?);
        offset += n;
    }
    let params = ModelParams::from_tensors(cfg, tensors)?;
    if !params.is_finite() {
        return Err(Error::Checkpoint("non-finite parameter".into()));
    }
    Ok(params)
}

pub fn save_checkpoint(path: &Path, params: &ModelParams<f32>) -> Result<()> {
    write_atomic(path, |w| write_checkpoint(w, params))
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams<f32>> {
    let mut f = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    read_checkpoint(&mut f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use crate::tensor::Rng;

    fn sample() -> ModelParams<f32> {
        build_model(CnnConfig::new(2, 3).unwrap(), &mut Rng::new(11)).unwrap()
    }

    #[test]
    fn roundtrip_and_header() {
        let p = sample();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &p).unwrap();
        assert_eq!(&buf[..4], b"THOD");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(buf.len(), 44 + 4 * param_count(&p.cfg));
        let back = read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn corrupt_inputs() {
        let p = sample();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &p).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_checkpoint(&mut bad.as_slice()).is_err());

        let truncated = &buf[..buf.len() - 4];
        assert!(read_checkpoint(&mut &truncated[..]).is_err());

        let mut bad_version = buf.clone();
        bad_version[4] = 9;
        assert!(read_checkpoint(&mut bad_version.as_slice()).is_err());

        assert!(read_checkpoint(&mut &buf[..10]).is_err());
    }
}
