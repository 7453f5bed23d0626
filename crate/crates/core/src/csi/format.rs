//! Binary CSI capture format, version 1. All fields little-endian.
//!
//! ```text
//! offset  size  field
//!      0     8  magic "A2GCSI\0\0"
//!      8     2  version (u16) = 1
//!     10     2  scale exponent e (i16); real value = integer · 2^-e
//!     12     4  T snapshots (u32)
//!     16     4  M antennas (u32)
//!     20     4  F frequency bins (u32)
//!     24     4  array rows (u32)
//!     28     4  array cols (u32)
//!     32    80  f64: center_frequency, bandwidth, csi_interval, gps_interval,
//!               speed, element_spacing, bs_x, bs_y, bs_z, bs_height
//!    112   8·T  timestamps (f64 seconds)
//!      …  4·TMF samples in (t, m, f) order, each re (i16) then im (i16)
//! ```

use std::io::{Read, Write};

use super::fixed::{auto_exponent, pow2};
use super::{CsiError, CsiTensor, FixedPointSample, MeasurementConfig, Scale};
use crate::C64;

pub const MAGIC: [u8; 8] = *b"A2GCSI\0\0";
pub const FORMAT_VERSION: u16 = 1;
/// Bytes before the timestamp block.
pub const HEADER_LEN: usize = 112;

/// Writes `tensor` with an automatically chosen scale. Returns bytes written.
pub fn store_csi<W: Write>(tensor: &CsiTensor, sink: W) -> Result<usize, CsiError> {
    store_csi_with_scale(tensor, sink, Scale::Auto)
}

pub fn store_csi_with_scale<W: Write>(tensor: &CsiTensor, mut sink: W, scale: Scale) -> Result<usize, CsiError> {
    let cfg = tensor.config();
    let exponent = match scale {
        Scale::Exponent(e) => e,
        Scale::Auto => {
            let peak = tensor
                .data()
                .iter()
                .flat_map(|z| [z.re.abs(), z.im.abs()])
                .fold(0.0, f64::max);
            auto_exponent(peak)?
        }
    };

    let (t, m, f) = (tensor.snapshots(), tensor.antennas(), tensor.bins());
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * t + 4 * t * m * f);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&exponent.to_le_bytes());
    for n in [t, m, f, cfg.array_rows, cfg.array_cols] {
        let n = u32::try_from(n).map_err(|_| CsiError::Dimension(format!("{n} does not fit in u32")))?;
        buf.extend_from_slice(&n.to_le_bytes());
    }
    for v in config_floats(cfg) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for ts in tensor.timestamps() {
        buf.extend_from_slice(&ts.to_le_bytes());
    }
    for (i, z) in tensor.data().iter().enumerate() {
        let index = (i / (m * f), (i / f) % m, i % f);
        for (component, v) in [("re", z.re), ("im", z.im)] {
            let q = FixedPointSample::quantize_component(v, exponent).ok_or(CsiError::OutOfRange {
                index,
                component,
                value: v,
                exponent,
            })?;
            buf.extend_from_slice(&q.to_le_bytes());
        }
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(buf.len())
}

pub fn load_csi<R: Read>(mut source: R) -> Result<CsiTensor, CsiError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let need = |expected: usize| -> Result<(), CsiError> {
        if bytes.len() < expected {
            Err(CsiError::Truncated {
                missing: expected - bytes.len(),
                expected,
                available: bytes.len(),
            })
        } else {
            Ok(())
        }
    };

    need(MAGIC.len())?;
    if bytes[..8] != MAGIC {
        return Err(CsiError::BadMagic);
    }
    need(HEADER_LEN)?;
    let mut rd = Cursor { bytes: &bytes, pos: 8 };
    let version = u16::from_le_bytes(rd.take());
    if version != FORMAT_VERSION {
        return Err(CsiError::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let exponent = i16::from_le_bytes(rd.take());
    let mut dims = [0usize; 5];
    for d in &mut dims {
        *d = u32::from_le_bytes(rd.take()) as usize;
    }
    let [t, m, f, rows, cols] = dims;
    let mut floats = [0f64; 10];
    for v in &mut floats {
        *v = f64::from_le_bytes(rd.take());
    }
    if rows * cols != m {
        return Err(CsiError::Dimension(format!("header has M = {m} but array {rows}x{cols}")));
    }
    if t == 0 || m == 0 || f == 0 {
        return Err(CsiError::Dimension(format!("empty dimension in header: {t}x{m}x{f}")));
    }

    let samples = t
        .checked_mul(m)
        .and_then(|n| n.checked_mul(f))
        .ok_or_else(|| CsiError::Dimension("header dimensions overflow".into()))?;
    let total = HEADER_LEN + 8 * t + 4 * samples;
    need(total)?;
    if bytes.len() > total {
        return Err(CsiError::Dimension(format!(
            "{} trailing bytes after {t}x{m}x{f} payload",
            bytes.len() - total
        )));
    }

    let config = MeasurementConfig {
        center_frequency: floats[0],
        bandwidth: floats[1],
        csi_interval: floats[2],
        gps_interval: floats[3],
        speed: floats[4],
        element_spacing: floats[5],
        bs_position: [floats[6], floats[7], floats[8]],
        bs_height: floats[9],
        num_antennas: m,
        num_freq_bins: f,
        array_rows: rows,
        array_cols: cols,
    };
    let timestamps: Vec<f64> = (0..t).map(|_| f64::from_le_bytes(rd.take())).collect();
    let s = pow2(-exponent);
    let data: Vec<C64> = (0..samples)
        .map(|_| {
            let re = i16::from_le_bytes(rd.take());
            let im = i16::from_le_bytes(rd.take());
            C64::new(re as f64 * s, im as f64 * s)
        })
        .collect();
    CsiTensor::new(config, timestamps, data)
}

fn config_floats(c: &MeasurementConfig) -> [f64; 10] {
    [
        c.center_frequency,
        c.bandwidth,
        c.csi_interval,
        c.gps_interval,
        c.speed,
        c.element_spacing,
        c.bs_position[0],
        c.bs_position[1],
        c.bs_position[2],
        c.bs_height,
    ]
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out: [u8; N] = self.bytes[self.pos..self.pos + N].try_into().unwrap();
        self.pos += N;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m_rows: usize, m_cols: usize, f: usize) -> MeasurementConfig {
        MeasurementConfig {
            num_antennas: m_rows * m_cols,
            array_rows: m_rows,
            array_cols: m_cols,
            num_freq_bins: f,
            ..Default::default()
        }
    }

    #[test]
    fn single_sample_round_trip() {
        let cfg = MeasurementConfig { num_freq_bins: 2, ..cfg(1, 1, 2) };
        let t = CsiTensor::new(cfg, vec![0.0], vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let mut buf = Vec::new();
        store_csi(&t, &mut buf).unwrap();
        assert_eq!(load_csi(&buf[..]).unwrap(), t);
    }

    #[test]
    fn payload_size_matches_layout() {
        let t = CsiTensor::from_fn(cfg(8, 8, 100), 2, |_, _, _| C64::new(0.5, -0.25)).unwrap();
        let mut buf = Vec::new();
        let n = store_csi(&t, &mut buf).unwrap();
        assert_eq!(n, buf.len());
        assert_eq!(n, HEADER_LEN + 2 * 8 + 2 * 64 * 100 * 4);
    }

    #[test]
    fn out_of_range_reports_index() {
        let t = CsiTensor::from_fn(cfg(1, 2, 3), 2, |t, m, f| {
            if (t, m, f) == (1, 0, 2) {
                C64::new(32768.0, 0.0)
            } else {
                C64::new(1.0, 1.0)
            }
        })
        .unwrap();
        let err = store_csi_with_scale(&t, Vec::new(), Scale::Exponent(0)).unwrap_err();
        match err {
            CsiError::OutOfRange { index, component, .. } => {
                assert_eq!(index, (1, 0, 2));
                assert_eq!(component, "re");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn truncation_names_missing_bytes() {
        let t = CsiTensor::from_fn(cfg(1, 2, 3), 2, |_, _, _| C64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        store_csi(&t, &mut buf).unwrap();
        let cut = &buf[..buf.len() - 7];
        match load_csi(cut).unwrap_err() {
            CsiError::Truncated { missing, .. } => assert_eq!(missing, 7),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(load_csi(&buf[..50]).unwrap_err(), CsiError::Truncated { missing: 62, .. }));
    }

    #[test]
    fn bumped_version_is_rejected() {
        let t = CsiTensor::from_fn(cfg(1, 1, 2), 1, |_, _, _| C64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        store_csi(&t, &mut buf).unwrap();
        buf[8..10].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
        assert!(matches!(
            load_csi(&buf[..]).unwrap_err(),
            CsiError::UnsupportedVersion { found: 2, supported: 1 }
        ));
        buf[0] = b'X';
        assert!(matches!(load_csi(&buf[..]).unwrap_err(), CsiError::BadMagic));
    }

    #[test]
    fn inconsistent_dimensions_are_rejected() {
        let t = CsiTensor::from_fn(cfg(1, 2, 2), 1, |_, _, _| C64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        store_csi(&t, &mut buf).unwrap();
        buf[24..28].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(load_csi(&buf[..]).unwrap_err(), CsiError::Dimension(_)));
    }

    #[test]
    fn store_is_deterministic_and_idempotent() {
        let t = CsiTensor::from_fn(cfg(2, 2, 4), 3, |t, m, f| {
            C64::from_polar(1.0 / (1 + t + m) as f64, 0.7 * f as f64)
        })
        .unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        store_csi(&t, &mut a).unwrap();
        store_csi(&t, &mut b).unwrap();
        assert_eq!(a, b);
        let q = load_csi(&a[..]).unwrap();
        let mut c = Vec::new();
        store_csi(&q, &mut c).unwrap();
        assert_eq!(a, c);
        assert_eq!(load_csi(&c[..]).unwrap(), q);
    }
}
