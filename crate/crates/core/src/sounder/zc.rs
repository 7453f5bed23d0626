use std::f64::consts::PI;

use super::SounderError;
use crate::C64;

/// Constant-amplitude zero-autocorrelation pilot.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSequence {
    pub root: u32,
    pub length: u32,
    pub samples: Vec<C64>,
}

impl PilotSequence {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `x_k = exp(−jπ·u·k(k+1)/N)` for odd `N`, `exp(−jπ·u·k²/N)` for even `N`.
///
/// The phase numerator is reduced modulo `2N` in integer arithmetic, so long
/// sequences keep full precision.
pub fn zadoff_chu(root: u32, length: u32) -> Result<PilotSequence, SounderError> {
    if root == 0 || root >= length || gcd(root as u64, length as u64) != 1 {
        return Err(SounderError::Root { root, length });
    }
    let (u, n) = (root as u64, length as u64);
    let samples = (0..n)
        .map(|k| {
            let quad = if n % 2 == 1 { k * (k + 1) } else { k * k };
            let r = ((u as u128 * quad as u128) % (2 * n) as u128) as f64;
            C64::from_polar(1.0, -PI * r / n as f64)
        })
        .collect();
    Ok(PilotSequence { root, length, samples })
}
