use super::SounderError;
use crate::C64;

/// `Ĥ(m, f) = rx(m, f) / tx(f)` over an antenna-major `M × F` block.
pub fn ls_estimate(rx_pilot: &[C64], tx_pilot: &[C64]) -> Result<Vec<C64>, SounderError> {
    let nf = tx_pilot.len();
    if nf == 0 || !rx_pilot.len().is_multiple_of(nf) {
        return Err(SounderError::Length(format!(
            "{} received samples is not a multiple of {nf} pilot bins",
            rx_pilot.len()
        )));
    }
    if let Some(bin) = tx_pilot.iter().position(|p| p.norm_sqr() == 0.0) {
        return Err(SounderError::ZeroPilot(bin));
    }
    Ok(rx_pilot
        .chunks_exact(nf)
        .flat_map(|row| row.iter().zip(tx_pilot).map(|(r, t)| r / t))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sounder::zadoff_chu;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn noiseless_division_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tx: Vec<C64> = (0..16).map(|_| C64::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0))).collect();
        let h: Vec<C64> = (0..64).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let rx: Vec<C64> = h.iter().enumerate().map(|(i, v)| v * tx[i % 16]).collect();
        let est = ls_estimate(&rx, &tx).unwrap();
        for (a, b) in est.iter().zip(&h) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn zero_bin_is_named() {
        let tx = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let e = ls_estimate(&[C64::new(1.0, 0.0); 3], &tx).unwrap_err();
        assert!(matches!(e, SounderError::ZeroPilot(1)));
        assert!(e.to_string().contains("bin 1"));
    }

    #[test]
    fn nmse_follows_snr() {
        // Monte-Carlo: 1000 bins, unit-modulus pilot, noise variance
        // 10^(-s/10) of the mean received power.
        let z = zadoff_chu(25, 63).unwrap();
        let tx: Vec<C64> = (0..1000).map(|f| z.samples[f % 63]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for snr_db in [0.0, 10.0, 20.0, 30.0] {
            let h: Vec<C64> = (0..1000).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
            let sigma = (10f64.powf(-snr_db / 10.0) / 2.0).sqrt();
            let rx: Vec<C64> = h
                .iter()
                .zip(&tx)
                .map(|(v, t)| {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    v * t + C64::new(a * sigma, b * sigma)
                })
                .collect();
            let est = ls_estimate(&rx, &tx).unwrap();
            let err: f64 = est.iter().zip(&h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 1000.0;
            let expect = 10f64.powf(-snr_db / 10.0);
            assert!(err > expect / 2.0 && err < expect * 2.0, "snr {snr_db}: {err} vs {expect}");
        }
    }
}
