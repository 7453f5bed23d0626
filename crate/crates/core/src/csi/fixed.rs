use super::CsiError;

/// One complex sample in 16-bit two's-complement fixed point.
///
/// The real value is `re · 2^-exponent`; the exponent is shared by every
/// sample of a capture file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixedPointSample {
    pub re: i16,
    pub im: i16,
}

/// How `store_csi` picks the file-wide scale exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// Largest exponent that keeps the peak component in range, so it uses
    /// at least 14 magnitude bits.
    #[default]
    Auto,
    Exponent(i16),
}

/// Exponents outside this range cannot be represented by `f64` powers of two
/// without loss on the way back.
const MIN_EXPONENT: i16 = -1000;
const MAX_EXPONENT: i16 = 1000;

impl FixedPointSample {
    pub fn quantize_component(value: f64, exponent: i16) -> Option<i16> {
        if !value.is_finite() {
            return None;
        }
        let q = (value * pow2(exponent)).round();
        if q < i16::MIN as f64 || q > i16::MAX as f64 {
            None
        } else {
            Some(q as i16)
        }
    }

    pub fn to_real(self, exponent: i16) -> (f64, f64) {
        let s = pow2(-exponent);
        (self.re as f64 * s, self.im as f64 * s)
    }
}

pub(crate) fn pow2(e: i16) -> f64 {
    2f64.powi(e as i32)
}

/// Exponent such that `peak · 2^e ≤ 32767` with `e` maximal.
pub(crate) fn auto_exponent(peak: f64) -> Result<i16, CsiError> {
    if peak == 0.0 {
        return Ok(0);
    }
    if !peak.is_finite() {
        return Err(CsiError::Tensor("non-finite peak sample".into()));
    }
    let mut e = (i16::MAX as f64 / peak).log2().floor() as i32;
    // log2 rounding can be off by one near powers of two.
    while e > MIN_EXPONENT as i32 && (peak * 2f64.powi(e)).round() > i16::MAX as f64 {
        e -= 1;
    }
    while e < MAX_EXPONENT as i32 && (peak * 2f64.powi(e + 1)).round() <= i16::MAX as f64 {
        e += 1;
    }
    if !(MIN_EXPONENT as i32..=MAX_EXPONENT as i32).contains(&e) {
        return Err(CsiError::Tensor(format!("peak {peak} needs scale exponent {e}")));
    }
    Ok(e as i16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_sample_is_exact() {
        let e = auto_exponent(1.0).unwrap();
        assert_eq!(e, 14);
        let q = FixedPointSample::quantize_component(1.0, e).unwrap();
        assert_eq!(q, 16384);
    }

    #[test]
    fn boundary_values() {
        assert_eq!(FixedPointSample::quantize_component(32767.0, 0), Some(32767));
        assert_eq!(FixedPointSample::quantize_component(-32768.0, 0), Some(-32768));
        assert_eq!(FixedPointSample::quantize_component(32768.0, 0), None);
        assert_eq!(FixedPointSample::quantize_component(f64::INFINITY, 0), None);
    }

    proptest! {
        #[test]
        fn auto_scale_uses_at_least_14_bits(peak in 1e-200f64..1e200) {
            let e = auto_exponent(peak).unwrap();
            let q = (peak * pow2(e)).round();
            prop_assert!(q <= 32767.0);
            prop_assert!(q >= 16384.0 - 1.0);
        }

        #[test]
        fn quantization_error_within_one_step(v in -1.0f64..1.0, e in 0i16..15) {
            let q = FixedPointSample::quantize_component(v, e).unwrap();
            let back = FixedPointSample { re: q, im: 0 }.to_real(e).0;
            prop_assert!((back - v).abs() <= pow2(-e));
        }
    }
}
