use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{CsiError, CsiTensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    #[serde(rename = "timestamp_s")]
    pub timestamp: f64,
    #[serde(rename = "x_m")]
    pub x: f64,
    #[serde(rename = "y_m")]
    pub y: f64,
    #[serde(rename = "z_m")]
    pub z: f64,
}

impl TrajectorySample {
    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// GPS fixes of the drone, strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    samples: Vec<TrajectorySample>,
}

impl TrajectoryLog {
    pub fn new(samples: Vec<TrajectorySample>) -> Result<Self, CsiError> {
        if let Some(i) = samples.windows(2).position(|w| w[1].timestamp <= w[0].timestamp) {
            return Err(CsiError::Trajectory(format!(
                "timestamps not strictly increasing at row {}",
                i + 1
            )));
        }
        if samples
            .iter()
            .any(|s| ![s.timestamp, s.x, s.y, s.z].iter().all(|v| v.is_finite()))
        {
            return Err(CsiError::Trajectory("non-finite value in log".into()));
        }
        Ok(TrajectoryLog { samples })
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Reads `timestamp_s,x_m,y_m,z_m` CSV with a header row.
    pub fn read_csv<R: Read>(source: R) -> Result<Self, CsiError> {
        let mut rdr = csv::Reader::from_reader(source);
        let samples = rdr
            .deserialize()
            .collect::<Result<Vec<TrajectorySample>, _>>()?;
        Self::new(samples)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), CsiError> {
        let mut w = csv::Writer::from_writer(sink);
        for s in &self.samples {
            w.serialize(s)?;
        }
        if self.samples.is_empty() {
            w.write_record(["timestamp_s", "x_m", "y_m", "z_m"])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Position at time `t`: linear between fixes, clamped outside the log.
    pub fn position_at(&self, t: f64) -> Result<[f64; 3], CsiError> {
        let s = &self.samples;
        let (first, last) = match (s.first(), s.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(CsiError::EmptyLog),
        };
        if t <= first.timestamp {
            return Ok(first.position());
        }
        if t >= last.timestamp {
            return Ok(last.position());
        }
        // First fix strictly after t; guaranteed in 1..len by the clamps above.
        let hi = s.partition_point(|p| p.timestamp <= t);
        let (a, b) = (&s[hi - 1], &s[hi]);
        let w = (t - a.timestamp) / (b.timestamp - a.timestamp);
        let (pa, pb) = (a.position(), b.position());
        Ok([0, 1, 2].map(|i| pa[i] + w * (pb[i] - pa[i])))
    }

    /// True when `[t0, t1]` lies inside the logged time span.
    pub fn covers(&self, t0: f64, t1: f64) -> bool {
        match (self.samples.first(), self.samples.last()) {
            (Some(f), Some(l)) => f.timestamp <= t0 && t1 <= l.timestamp,
            _ => false,
        }
    }
}

/// One interpolated position per CSI snapshot.
///
/// Snapshots outside the logged span are clamped to the nearest end fix;
/// callers that care can check [`TrajectoryLog::covers`] first.
pub fn align_trajectory(log: &TrajectoryLog, tensor: &CsiTensor) -> Result<Vec<[f64; 3]>, CsiError> {
    if log.is_empty() {
        return Err(CsiError::EmptyLog);
    }
    tensor.timestamps().iter().map(|&t| log.position_at(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::MeasurementConfig;
    use crate::C64;
    use proptest::prelude::*;

    fn fix(t: f64, x: f64) -> TrajectorySample {
        TrajectorySample { timestamp: t, x, y: 0.0, z: 0.0 }
    }

    fn tensor_at(times: &[f64]) -> CsiTensor {
        let cfg = MeasurementConfig {
            num_antennas: 1,
            array_rows: 1,
            array_cols: 1,
            num_freq_bins: 2,
            ..Default::default()
        };
        CsiTensor::new(cfg, times.to_vec(), vec![C64::new(1.0, 0.0); 2 * times.len()]).unwrap()
    }

    #[test]
    fn midpoint_interpolation() {
        let log = TrajectoryLog::new(vec![fix(0.0, 0.0), fix(0.010, 0.015)]).unwrap();
        let pos = align_trajectory(&log, &tensor_at(&[0.005])).unwrap();
        assert!((pos[0][0] - 0.0075).abs() < 1e-15);
    }

    #[test]
    fn clamps_before_first_fix() {
        let log = TrajectoryLog::new(vec![fix(1.0, 2.0), fix(2.0, 3.0)]).unwrap();
        let pos = align_trajectory(&log, &tensor_at(&[0.0, 5.0])).unwrap();
        assert_eq!(pos[0][0], 2.0);
        assert_eq!(pos[1][0], 3.0);
        assert!(!log.covers(0.0, 5.0));
    }

    #[test]
    fn constant_log() {
        let log = TrajectoryLog::new(vec![fix(0.0, 4.0), fix(1.0, 4.0), fix(2.0, 4.0)]).unwrap();
        let pos = align_trajectory(&log, &tensor_at(&[0.1, 0.7, 1.9])).unwrap();
        assert!(pos.iter().all(|p| p[0] == 4.0));
    }

    #[test]
    fn empty_log_errors() {
        let log = TrajectoryLog::default();
        assert!(matches!(align_trajectory(&log, &tensor_at(&[0.0])), Err(CsiError::EmptyLog)));
    }

    #[test]
    fn rejects_non_monotone_log() {
        assert!(TrajectoryLog::new(vec![fix(1.0, 0.0), fix(1.0, 1.0)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let log = TrajectoryLog::new(vec![fix(0.0, 1.5), fix(0.01, 1.515)]).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("timestamp_s,x_m,y_m,z_m\n"));
        assert_eq!(TrajectoryLog::read_csv(&buf[..]).unwrap(), log);
    }

    proptest! {
        #[test]
        fn monotone_trajectory_gives_monotone_positions(
            steps in proptest::collection::vec(0.0f64..2.0, 2..20),
            probes in proptest::collection::vec(-1.0f64..30.0, 1..40),
        ) {
            let mut x = 0.0;
            let fixes: Vec<_> = steps.iter().enumerate().map(|(i, d)| { x += d; fix(i as f64, x) }).collect();
            let log = TrajectoryLog::new(fixes).unwrap();
            let mut times = probes.clone();
            times.sort_by(f64::total_cmp);
            times.dedup();
            let pos = align_trajectory(&log, &tensor_at(&times)).unwrap();
            for w in pos.windows(2) {
                prop_assert!(w[1][0] >= w[0][0]);
            }
        }
    }
}
