//! Gaussian moments through perfect matchings.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Longest multi-index accepted by [`wick_moment`]; the matching count is
/// `(l − 1)!!`, 10395 at `l = 12`.
pub const MAX_WICK_ORDER: usize = 12;

/// Tolerance on the smallest eigenvalue of the covariance.
pub const PSD_TOLERANCE: f64 = 1e-10;

fn matchings_sum(cov: &DMatrix<f64>, idx: &mut Vec<usize>) -> f64 {
    let Some(first) = idx.pop() else {
        return 1.0;
    };
    let mut total = 0.0;
    for p in 0..idx.len() {
        let partner = idx.swap_remove(p);
        total += cov[(first, partner)] * matchings_sum(cov, idx);
        idx.push(partner);
        let last = idx.len() - 1;
        idx.swap(p, last);
    }
    idx.push(first);
    total
}

/// `E[ξ_{i_1} ⋯ ξ_{i_l}]` for a centered Gaussian vector with covariance
/// `cov`: the sum over perfect matchings of products of covariances.
pub fn wick_moment(cov: &DMatrix<f64>, indices: &[usize]) -> Result<f64> {
    if !cov.is_square() {
        return invalid("covariance must be square");
    }
    let n = cov.nrows();
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return invalid(format!("index {bad} out of range for a {n}x{n} covariance"));
    }
    if indices.len() > MAX_WICK_ORDER {
        return Err(Error::ResourceLimit(format!(
            "{} factors exceed the perfect-matching bound {MAX_WICK_ORDER}",
            indices.len()
        )));
    }
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (cov[(i, j)], cov[(j, i)]);
            if (a - b).abs() > PSD_TOLERANCE * (1.0 + a.abs().max(b.abs())) {
                return invalid(format!("covariance is not symmetric at ({i}, {j})"));
            }
        }
    }
    if n > 0 {
        let min = SymmetricEigen::new(cov.clone()).eigenvalues.min();
        if min < -PSD_TOLERANCE {
            return invalid(format!("covariance is not positive semidefinite (eigenvalue {min:e})"));
        }
    }
    if indices.len() % 2 == 1 {
        return Ok(0.0);
    }
    let mut idx = indices.to_vec();
    Ok(matchings_sum(cov, &mut idx))
}
