//! Integration by parts for the height function: for a shape `λ` of length
//! `m`,
//!
//! `∫ x^k (H(Lx) − H_∅(Lx)) dx = √π L^{−(k+1)} p_{k+1}(λ) / (k+1)`,
//!
//! where `H(Lx) = √π #{s ≤ m : λ_s − s + 1/2 ≥ Lx}` and `H_∅` is the same
//! count for the empty shape. Both sides are returned as rational
//! coefficients of `√π`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::sampler::HeightSample;
use crate::error::{invalid, Result};
use crate::gt::Signature;
use crate::plancherel::shifted_power_sum;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentIdentity {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl MomentIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integrates the step function `x ↦ x^k (H − H_∅)/√π` exactly between its
/// sorted breakpoints.
fn integrate_height_difference(lam: &Signature, l: i64, k: u32) -> BigRational {
    let m = lam.len();
    let jumps: Vec<BigRational> = lam
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| ratio(2 * (p - i as i64 - 1) + 1, 2 * l))
        .collect();
    let empty: Vec<BigRational> = (0..m).map(|i| ratio(-2 * i as i64 - 1, 2 * l)).collect();
    let mut breaks: Vec<BigRational> = jumps.iter().chain(&empty).cloned().collect();
    breaks.sort();
    breaks.dedup();
    let count = |x: &BigRational, pts: &[BigRational]| pts.iter().filter(|b| x <= *b).count() as i64;
    let two = BigRational::from_integer(2.into());
    let mut total = BigRational::zero();
    for w in breaks.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let diff = count(&mid, &jumps) - count(&mid, &empty);
        if diff != 0 {
            let integral = (num_traits::pow(w[1].clone(), k as usize + 1)
                - num_traits::pow(w[0].clone(), k as usize + 1))
                / BigRational::from_integer(BigInt::from(k + 1));
            total += integral * BigRational::from_integer(BigInt::from(diff));
        }
    }
    total
}

/// Both sides of the identity for one shape at scale `l`.
pub fn moment_identity(lam: &Signature, l: u64, k: u32) -> Result<MomentIdentity> {
    if l == 0 {
        return invalid("L must be positive");
    }
    if !lam.is_nonnegative() {
        return invalid(format!("height functions need a nonnegative shape, got {lam}"));
    }
    let l = i64::try_from(l).map_err(|_| crate::Error::InvalidArgument("L too large".into()))?;
    let lhs = integrate_height_difference(lam, l, k);
    let scale = BigRational::from_integer(BigInt::from(l).pow(k + 1) * BigInt::from(k + 1));
    let rhs = shifted_power_sum(k + 1, lam) / scale;
    Ok(MomentIdentity { lhs, rhs })
}

/// The identity for sequence `i` at level index `level` of a sample.
pub fn moment_identity_check(sample: &HeightSample, i: usize, level: usize, k: u32, l: u64) -> Result<MomentIdentity> {
    let Some(shape) = sample.shapes.get(i).and_then(|r| r.get(level)) else {
        return invalid(format!("no shape for sequence {i}, level {level}"));
    };
    moment_identity(shape, l, k)
}
