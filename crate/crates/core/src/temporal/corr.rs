use std::ops::Range;

use super::TemporalError;
use crate::csi::CsiTensor;
use crate::C64;

/// `R_a(t_i)`: mean of `h(t_k, f)·h(t_k, f)ᴴ` over a window of snapshots and
/// a band of frequency bins. Row-major `M × M`, Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaCorrMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
    /// First snapshot of the window.
    pub start: usize,
    pub window: usize,
    pub band: Range<usize>,
}

impl AntennaCorrMatrix {
    /// Wraps an arbitrary square matrix (no window metadata).
    pub fn from_matrix(dim: usize, data: Vec<C64>) -> Result<Self, TemporalError> {
        if data.len() != dim * dim {
            return Err(TemporalError::Dimension(data.len(), dim * dim));
        }
        Ok(AntennaCorrMatrix { dim, data, start: 0, window: 0, band: 0..0 })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Entries as interleaved `re, im` pairs scaled to unit Frobenius norm.
    pub(crate) fn unit_flat(&self) -> Vec<f64> {
        let n = self.frobenius_norm();
        interleaved(&self.data).into_iter().map(|v| v / n).collect()
    }
}

fn interleaved(data: &[C64]) -> Vec<f64> {
    data.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn antenna_corr(
    tensor: &CsiTensor,
    start: usize,
    window: usize,
    band: Range<usize>,
) -> Result<AntennaCorrMatrix, TemporalError> {
    let t = tensor.snapshots();
    if window == 0 || start + window > t {
        return Err(TemporalError::WindowOverrun { start, window, snapshots: t });
    }
    if band.start >= band.end || band.end > tensor.bins() {
        return Err(TemporalError::Band { start: band.start, end: band.end, bins: tensor.bins() });
    }
    let m = tensor.antennas();
    let nb = band.len();
    // Planar copy: antenna `a` owns `re[a*len..]`, `im[a*len..]` over
    // (snapshot, bin), so each entry is a pair of contiguous dot products.
    let len = window * nb;
    let mut re = vec![0.0; m * len];
    let mut im = vec![0.0; m * len];
    for k in 0..window {
        for a in 0..m {
            let src = &tensor.response(start + k, a)[band.clone()];
            let off = a * len + k * nb;
            for (i, z) in src.iter().enumerate() {
                re[off + i] = z.re;
                im[off + i] = z.im;
            }
        }
    }
    // Re = Vr·Vrᵀ + Vi·Viᵀ, Im = Vi·Vrᵀ − Vr·Viᵀ; upper triangle is used.
    let mut gre = vec![0.0; m * m];
    let mut gim = vec![0.0; m * m];
    // x: m × len row-major, yᵀ: len × m, out: m × m row-major. All strides
    // stay inside the buffers allocated above.
    let gemm = |alpha: f64, x: &[f64], y: &[f64], out: &mut [f64]| unsafe {
        matrixmultiply::dgemm(
            m, len, m, alpha,
            x.as_ptr(), len as isize, 1,
            y.as_ptr(), 1, len as isize,
            1.0, out.as_mut_ptr(), m as isize, 1,
        );
    };
    gemm(1.0, &re, &re, &mut gre);
    gemm(1.0, &im, &im, &mut gre);
    gemm(1.0, &im, &re, &mut gim);
    gemm(-1.0, &re, &im, &mut gim);
    let mut acc: Vec<C64> = gre.into_iter().zip(gim).map(|(r, i)| C64::new(r, i)).collect();
    let scale = 1.0 / (band.len() * window) as f64;
    for a in 0..m {
        acc[a * m + a] = C64::new(acc[a * m + a].re * scale, 0.0);
        for b in a + 1..m {
            let z = acc[a * m + b] * scale;
            acc[a * m + b] = z;
            acc[b * m + a] = z.conj();
        }
    }
    Ok(AntennaCorrMatrix { dim: m, data: acc, start, window, band })
}

/// Correlation matrix distance
/// `1 − Re tr{R_i R_j} / (‖R_i‖_F ‖R_j‖_F)`, clamped to `[0, 1]`.
pub fn cmd(a: &AntennaCorrMatrix, b: &AntennaCorrMatrix) -> Result<f64, TemporalError> {
    if a.dim != b.dim {
        return Err(TemporalError::Dimension(a.dim, b.dim));
    }
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    if !(na > 0.0 && nb > 0.0) {
        return Err(TemporalError::ZeroNorm);
    }
    let n = a.dim;
    let mut tr = C64::default();
    for i in 0..n {
        for k in 0..n {
            tr += a.data[i * n + k] * b.data[k * n + i];
        }
    }
    Ok((1.0 - tr.re / (na * nb)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::MeasurementConfig;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(m: usize, f: usize) -> MeasurementConfig {
        MeasurementConfig { num_antennas: m, array_rows: 1, array_cols: m, num_freq_bins: f, ..Default::default() }
    }

    fn random_tensor(seed: u64, t: usize, m: usize, f: usize) -> CsiTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CsiTensor::from_fn(cfg(m, f), t, |_, _, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .unwrap()
    }

    fn diag(values: &[f64]) -> AntennaCorrMatrix {
        let n = values.len();
        let mut d = vec![C64::default(); n * n];
        for (i, v) in values.iter().enumerate() {
            d[i * n + i] = C64::new(*v, 0.0);
        }
        AntennaCorrMatrix::from_matrix(n, d).unwrap()
    }

    #[test]
    fn single_outer_product() {
        let x = CsiTensor::from_fn(cfg(3, 2), 1, |_, m, _| C64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let r = antenna_corr(&x, 0, 1, 0..1).unwrap();
        assert_eq!(r.get(0, 0), C64::new(1.0, 0.0));
        assert!(r.data.iter().enumerate().all(|(i, z)| i == 0 || *z == C64::default()));
    }

    /// Brute-force triple loop over window, band and element pairs.
    fn brute(x: &CsiTensor, start: usize, w: usize, band: Range<usize>) -> Vec<C64> {
        let m = x.antennas();
        let mut out = vec![C64::default(); m * m];
        for a in 0..m {
            for b in 0..m {
                let mut s = C64::default();
                for k in start..start + w {
                    for f in band.clone() {
                        s += x.get(k, a, f) * x.get(k, b, f).conj();
                    }
                }
                out[a * m + b] = s / (w * band.len()) as f64;
            }
        }
        out
    }

    #[test]
    fn matches_brute_force_w4_10_bins() {
        let x = random_tensor(3, 8, 4, 12);
        let r = antenna_corr(&x, 2, 4, 1..11).unwrap();
        let b = brute(&x, 2, 4, 1..11);
        for (u, v) in r.data.iter().zip(&b) {
            assert!((u - v).norm() <= 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn cmd_examples() {
        let r = diag(&[2.0, 1.0, 0.5]);
        assert!(cmd(&r, &r).unwrap().abs() < 1e-12);
        let scaled = AntennaCorrMatrix::from_matrix(3, r.data.iter().map(|z| z * 7.5).collect()).unwrap();
        assert!(cmd(&r, &scaled).unwrap().abs() < 1e-12);
        assert_eq!(cmd(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap(), 1.0);
        assert!(matches!(cmd(&diag(&[0.0, 0.0]), &diag(&[1.0, 0.0])), Err(TemporalError::ZeroNorm)));
        assert!(matches!(cmd(&diag(&[1.0]), &diag(&[1.0, 0.0])), Err(TemporalError::Dimension(..))));
    }

    #[test]
    fn errors() {
        let x = random_tensor(1, 4, 2, 4);
        assert!(matches!(antenna_corr(&x, 2, 3, 0..4), Err(TemporalError::WindowOverrun { .. })));
        assert!(matches!(antenna_corr(&x, 0, 1, 2..2), Err(TemporalError::Band { .. })));
        assert!(matches!(antenna_corr(&x, 0, 1, 0..5), Err(TemporalError::Band { .. })));
    }

    proptest! {
        #[test]
        fn brute_force_small(seed in 0u64..10_000, t in 1usize..=8, m in 1usize..=4, f in 1usize..=6) {
            let cfg_f = f.max(2);
            let x = random_tensor(seed, t, m, cfg_f);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
            let w = rng.gen_range(1..=t);
            let start = rng.gen_range(0..=t - w);
            let lo = rng.gen_range(0..cfg_f);
            let hi = rng.gen_range(lo + 1..=cfg_f);
            let r = antenna_corr(&x, start, w, lo..hi).unwrap();
            let b = brute(&x, start, w, lo..hi);
            for (u, v) in r.data.iter().zip(&b) {
                prop_assert!((u - v).norm() <= 1e-9 * v.norm().max(1e-12));
            }
            prop_assert!(r.max_hermitian_residual() <= 1e-12);
        }

        #[test]
        fn global_phase_leaves_cmd_unchanged(seed in 0u64..5000, phi in 0.0f64..std::f64::consts::TAU) {
            let x = random_tensor(seed, 6, 3, 4);
            let rot = C64::from_polar(1.0, phi);
            let y = CsiTensor::from_fn(x.config().clone(), 6, |t, m, f| x.get(t, m, f) * rot).unwrap();
            let (a, b) = (antenna_corr(&x, 0, 2, 0..4).unwrap(), antenna_corr(&x, 3, 2, 0..4).unwrap());
            let (c, d) = (antenna_corr(&y, 0, 2, 0..4).unwrap(), antenna_corr(&y, 3, 2, 0..4).unwrap());
            prop_assert!((cmd(&a, &b).unwrap() - cmd(&c, &d).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn flat_inner_matches_cmd(seed in 0u64..5000) {
            let x = random_tensor(seed, 4, 3, 5);
            let a = antenna_corr(&x, 0, 2, 0..5).unwrap();
            let b = antenna_corr(&x, 2, 2, 1..4).unwrap();
            let inner: f64 = a.unit_flat().iter().zip(b.unit_flat()).map(|(x, y)| x * y).sum();
            let fast = 1.0 - inner;
            prop_assert!((fast.clamp(0.0, 1.0) - cmd(&a, &b).unwrap()).abs() < 1e-12);
        }
    }
}
