use crate::error::{Error, Result};

/// Reduces an `h x w` frame by averaging non-overlapping `nr x nr` blocks.
/// Rows and columns that do not fill a whole block are dropped, so the
/// result is `floor(h/nr) x floor(w/nr)`.
pub fn subsample(frame: &[f32], h: usize, w: usize, nr: usize) -> Result<Vec<f32>> {
    if !(1..=3).contains(&nr) {
        return Err(Error::Config(format!("nr must be 1, 2 or 3, got {nr}")));
    }
    if frame.len() != h * w {
        return Err(Error::Shape(format!(
            "frame has {} values, expected {h}x{w}",
            frame.len()
        )));
    }
    if nr == 1 {
        return Ok(frame.to_vec());
    }
    let (oh, ow) = (h / nr, w / nr);
    let scale = 1.0 / (nr * nr) as f64;
    let mut out = Vec::with_capacity(oh * ow);
    for by in 0..oh {
        for bx in 0..ow {
            let mut s = 0.0f64;
            for y in by * nr..(by + 1) * nr {
                for x in bx * nr..(bx + 1) * nr {
                    s += frame[y * w + x] as f64;
                }
            }
            out.push((s * scale) as f32);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_block_mean() {
        let f: Vec<f32> = (0..24 * 32).map(|i| i as f32).collect();
        assert_eq!(subsample(&f, 24, 32, 1).unwrap(), f);

        let s = subsample(&[1.0, 2.0, 3.0, 4.0], 2, 2, 2).unwrap();
        assert_eq!(s, vec![2.5]);
        assert_eq!(subsample(&f, 24, 32, 2).unwrap().len(), 12 * 16);
    }

    #[test]
    fn floor_drops_trailing_columns() {
        // value = column index; with nr = 3 the last block covers columns 27..30
        let f: Vec<f32> = (0..24 * 32).map(|i| (i % 32) as f32).collect();
        let s = subsample(&f, 24, 32, 3).unwrap();
        assert_eq!(s.len(), 8 * 10);
        assert_eq!(s[9], 28.0);
    }

    #[test]
    fn rejects_bad_factor() {
        assert!(subsample(&[0.0; 4], 2, 2, 4).is_err());
        assert!(subsample(&[0.0; 4], 2, 2, 0).is_err());
        assert!(subsample(&[0.0; 3], 2, 2, 1).is_err());
    }
}
