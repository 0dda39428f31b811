//! Debug dump of RF frames: a 32-byte header followed by little-endian `f32`
//! samples in row-major `(line, sample)` order.
//!
//! Header layout: magic `RFv1` (4 bytes), `n_lines: u32`, `n_samples: u32`,
//! `fs: f64`, `c: f64`, 4 reserved zero bytes.

use std::io::{Read, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::RfFrame;

pub const RF_MAGIC: &[u8; 4] = b"RFv1";
pub const RF_HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfDumpHeader {
    pub n_lines: u32,
    pub n_samples: u32,
    pub sampling_frequency: f64,
    pub sound_speed: f64,
}

pub fn write_rf_dump<T: Real, W: Write>(frame: &RfFrame<T>, mut w: W) -> std::io::Result<()> {
    let mut header = [0u8; RF_HEADER_LEN];
    header[0..4].copy_from_slice(RF_MAGIC);
    header[4..8].copy_from_slice(&(frame.n_lines() as u32).to_le_bytes());
    header[8..12].copy_from_slice(&(frame.n_samples() as u32).to_le_bytes());
    header[12..20].copy_from_slice(&frame.config.sampling_frequency.to_le_bytes());
    header[20..28].copy_from_slice(&frame.config.sound_speed.to_le_bytes());
    w.write_all(&header)?;
    let mut body = Vec::with_capacity(frame.samples.len() * 4);
    for &v in frame.samples.iter() {
        body.extend_from_slice(&(v.to_f32().unwrap_or(f32::NAN)).to_le_bytes());
    }
    w.write_all(&body)
}

pub fn read_rf_dump<R: Read>(mut r: R) -> Result<(RfDumpHeader, Array2<f32>)> {
    let mut header = [0u8; RF_HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| Error::RfDump(format!("short header: {e}")))?;
    if &header[0..4] != RF_MAGIC {
        return Err(Error::RfDump("bad magic".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let f64_at = |i: usize| f64::from_le_bytes(header[i..i + 8].try_into().unwrap());
    let h = RfDumpHeader {
        n_lines: u32_at(4),
        n_samples: u32_at(8),
        sampling_frequency: f64_at(12),
        sound_speed: f64_at(20),
    };
    let n = h.n_lines as usize * h.n_samples as usize;
    let mut body = vec![0u8; n * 4];
    r.read_exact(&mut body)
        .map_err(|e| Error::RfDump(format!("short body: {e}")))?;
    let data: Vec<f32> = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let samples = Array2::from_shape_vec((h.n_lines as usize, h.n_samples as usize), data)
        .map_err(|e| Error::RfDump(e.to_string()))?;
    Ok((h, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamsim::AcousticConfig;

    #[test]
    fn header_layout_and_roundtrip() {
        let frame = RfFrame {
            samples: Array2::from_shape_fn((3, 5), |(l, s)| (l * 10 + s) as f64 * 0.5 - 3.0),
            config: AcousticConfig::default(),
            first_line_x: -20.0,
            line_pitch: 1.0,
            t0: 0.0,
        };
        let mut buf = Vec::new();
        write_rf_dump(&frame, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 15 * 4);
        assert_eq!(&buf[0..4], b"RFv1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(buf[12..20].try_into().unwrap()), 100e6);
        assert_eq!(&buf[28..32], &[0, 0, 0, 0]);
        let (h, data) = read_rf_dump(buf.as_slice()).unwrap();
        assert_eq!(h.n_samples, 5);
        assert_eq!(h.sound_speed, 1540.0);
        assert_eq!(data, frame.samples.mapv(|v| v as f32));
    }

    #[test]
    fn bad_magic_rejected() {
        let buf = [0u8; 40];
        assert!(matches!(read_rf_dump(&buf[..]), Err(Error::RfDump(_))));
    }
}
