//! Covariance kernels of the correlated Gaussian free field on the upper
//! half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `C(z, w) = (1/2π) ln |(α − z w) / (α − z w̄)|` for `z, w` in the upper
/// half-plane. Infinite when `α = z w̄`.
pub fn kernel_cij(alpha: f64, z: Complex64, w: Complex64) -> f64 {
    let num = (alpha - z * w).norm();
    let den = (alpha - z * w.conj()).norm();
    (num / den).ln() / (2.0 * PI)
}

/// Zero-boundary GFF kernel `−(1/2π) ln |(z − w) / (z − w̄)|`.
pub fn gff_kernel(z: Complex64, w: Complex64) -> f64 {
    -((z - w).norm() / (z - w.conj()).norm()).ln() / (2.0 * PI)
}

/// `C` at `z = R_r e^{iθ}`, `w = R_s e^{iφ}` with `p = R_r R_s`, written
/// through `|α − p e^{iψ}|² = (α − p)² + 4αp sin²(ψ/2)`. Takes `θ + φ` and
/// `θ − φ` directly so callers can pass a difference without cancellation.
pub fn contour_kernel(alpha: f64, p: f64, sum: f64, diff: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let d2 = (alpha - p) * (alpha - p);
    let s = 4.0 * alpha * p;
    let num = d2 + s * (0.5 * sum).sin().powi(2);
    let den = d2 + s * (0.5 * diff).sin().powi(2);
    (num.ln() - den.ln()) / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn polar(r: f64, t: f64) -> Complex64 {
        Complex64::from_polar(r, t)
    }

    #[test]
    fn vanishes_without_overlap() {
        let (z, w) = (Complex64::new(0.3, 1.2), Complex64::new(-2.0, 0.4));
        assert!(kernel_cij(0.0, z, w).abs() < 1e-15);
        assert_eq!(contour_kernel(0.0, 1.0, 1.0, 0.5), 0.0);
    }

    #[test]
    fn diagonal_family_reduces_to_gff() {
        let r = 1.7;
        for i in 1..50 {
            for j in 1..50 {
                if i == j {
                    continue;
                }
                let (t, f) = (PI * i as f64 / 50.0, PI * j as f64 / 50.0);
                let (z, w) = (polar(r, t), polar(r, f));
                let a = kernel_cij(r * r, z, w);
                let trig = (((t + f) / 2.0).sin().abs() / ((t - f) / 2.0).sin().abs()).ln() / (2.0 * PI);
                assert!((a - gff_kernel(z, w)).abs() < 1e-12);
                assert!((a - trig).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_on_the_diagonal() {
        let z = polar(1.0, 1.0);
        assert_eq!(kernel_cij(1.0, z, z), f64::INFINITY);
    }

    proptest! {
        #[test]
        fn symmetric_and_stable_form_agrees(
            alpha in 0.01f64..4.0,
            rr in 0.2f64..2.0, rs in 0.2f64..2.0,
            t in 0.01f64..3.13, f in 0.01f64..3.13,
        ) {
            let (z, w) = (polar(rr, t), polar(rs, f));
            let a = kernel_cij(alpha, z, w);
            prop_assert!((a - kernel_cij(alpha, w, z)).abs() <= 1e-12 * (1.0 + a.abs()));
            let b = contour_kernel(alpha, rr * rs, t + f, t - f);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
