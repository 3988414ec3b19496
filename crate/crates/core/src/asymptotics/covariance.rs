//! Limiting covariances of the scaled power sums, as contour integrals of
//! the correlated GFF kernel.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::kernel::contour_kernel;
use super::quadrature::{integrate, Rect, DEFAULT_CELL_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::sequence::{eval_alpha, AlphaMode, SequenceRule};
use crate::uea::wick_moment;

/// Relative slack allowed when checking `c_rs ≤ min(η_r, η_s)`.
const OVERLAP_SLACK: f64 = 1e-12;

/// Routes of the moment covariance must agree to this absolute tolerance.
pub const ROUTE_AGREEMENT: f64 = 1e-8;

/// `γ`, `η_r = lim |I_r|/L` and `c_rs = lim |I_r ∩ I_s|/L`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularFamilyLimit {
    pub gamma: f64,
    pub etas: Vec<f64>,
    pub overlaps: DMatrix<f64>,
}

impl RegularFamilyLimit {
    pub fn new(gamma: f64, etas: Vec<f64>, overlaps: DMatrix<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("gamma must be positive, got {gamma}"));
        }
        let n = etas.len();
        if n == 0 || overlaps.shape() != (n, n) {
            return invalid("overlaps must be a square matrix matching etas");
        }
        if let Some(e) = etas.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return invalid(format!("eta must be positive, got {e}"));
        }
        for r in 0..n {
            for s in 0..n {
                let c = overlaps[(r, s)];
                let cap = etas[r].min(etas[s]);
                if c.is_nan() || c < 0.0 || c > cap * (1.0 + OVERLAP_SLACK) || c != overlaps[(s, r)] {
                    return invalid(format!("overlap c[{r},{s}] = {c} violates 0 ≤ c ≤ min(η) or symmetry"));
                }
            }
            if (overlaps[(r, r)] - etas[r]).abs() > OVERLAP_SLACK * etas[r] {
                return invalid(format!("c[{r},{r}] must equal eta[{r}]"));
            }
        }
        Ok(Self { gamma, etas, overlaps })
    }

    /// Members `(A_i, y)` observed through the prefixes `A_{i,[yL]}`, so that
    /// `η = y` and `c = α(i, y; j, y')` in closed form.
    pub fn from_sequences(gamma: f64, members: &[(SequenceRule, f64)]) -> Result<Self> {
        let n = members.len();
        let mut c = DMatrix::zeros(n, n);
        for r in 0..n {
            for s in r..n {
                let (a, y) = &members[r];
                let (b, y2) = &members[s];
                let v = if r == s { *y } else { eval_alpha(a, b, *y, *y2, AlphaMode::ClosedForm)?.value };
                c[(r, s)] = v;
                c[(s, r)] = v;
            }
        }
        Self::new(gamma, members.iter().map(|m| m.1).collect(), c)
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

/// A quadrature value with its error estimate and cell count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub quadrature_cells: usize,
}

/// `∫∫ x(z)^{m_r} x(w)^{m_s} C(z, w) dx(z) dx(w)` over the upper semicircles
/// `|z|² = η_r/γ`, `|w|² = η_s/γ`, with `x(z) = γ(1 − 2ℜz)`.
///
/// On the triangle `φ < θ` the substitution `φ = θ(1 − u)` (and its mirror
/// on `θ < φ`) moves the diagonal, where the kernel is log-singular or
/// sharply peaked, onto the edge `u = 0` of a rectangle.
pub fn contour_integral(
    m_r: u32,
    m_s: u32,
    gamma: f64,
    eta_r: f64,
    eta_s: f64,
    c: f64,
    tol: f64,
) -> Result<CovarianceResult> {
    if tol.is_nan() || tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if c == 0.0 {
        return Ok(CovarianceResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            quadrature_cells: 0,
        });
    }
    let (rr, rs) = ((eta_r / gamma).sqrt(), (eta_s / gamma).sqrt());
    let (alpha, p) = (c / gamma, rr * rs);
    let density = |m: u32, r: f64, t: f64| {
        let x = gamma * (1.0 - 2.0 * r * t.cos());
        x.powi(m as i32) * 2.0 * gamma * r * t.sin()
    };
    let f = |s: f64, u: f64| {
        let inner = s * (1.0 - u);
        let k = contour_kernel(alpha, p, s + inner, s * u);
        let pair = density(m_r, rr, s) * density(m_s, rs, inner) + density(m_r, rr, inner) * density(m_s, rs, s);
        s * pair * k
    };
    let domain = Rect { x0: 0.0, x1: PI, y0: 0.0, y1: 1.0 };
    let r = integrate(f, domain, 4, tol, DEFAULT_CELL_BUDGET)?;
    Ok(CovarianceResult {
        value: r.value,
        abs_error_estimate: r.error_estimate,
        quadrature_cells: r.cells,
    })
}

fn scaled(r: CovarianceResult, factor: f64) -> CovarianceResult {
    CovarianceResult {
        value: r.value * factor,
        abs_error_estimate: r.abs_error_estimate * factor.abs(),
        quadrature_cells: r.quadrature_cells,
    }
}

/// `E ξ_r ξ_s` for the limits `ξ` of `L^{-k}(p_{k,I} − E p_{k,I})`:
/// `(k_r k_s / π) ∫∫ x^{k_r−1} x^{k_s−1} C dx dx`.
pub fn theorem2_covariance(
    k_r: u32,
    k_s: u32,
    limit: &RegularFamilyLimit,
    r: usize,
    s: usize,
    tol: f64,
) -> Result<CovarianceResult> {
    if k_r == 0 || k_s == 0 {
        return invalid("power-sum orders start at 1");
    }
    if r >= limit.len() || s >= limit.len() {
        return invalid(format!("member index out of range for {} members", limit.len()));
    }
    let factor = (k_r * k_s) as f64 / PI;
    let raw = contour_integral(
        k_r - 1,
        k_s - 1,
        limit.gamma,
        limit.etas[r],
        limit.etas[s],
        limit.overlaps[(r, s)],
        tol / factor,
    )?;
    Ok(scaled(raw, factor))
}

/// Covariance of the height-function moments `ℳ_{y,k}` and `ℳ_{y',k'}`,
/// the field integrated against `x^k` on the contours `γ|z|² = y` and
/// `γ|w|² = y'`. `alpha` maps `(y, y')` to the overlap density.
///
/// Computed directly and through `π/((k+1)(k'+1))` times the power-sum
/// covariance of orders `k+1, k'+1`; the two must agree.
pub fn prop1_moment_covariance<A>(
    y: f64,
    k: u32,
    y2: f64,
    k2: u32,
    gamma: f64,
    alpha: A,
    tol: f64,
) -> Result<CovarianceResult>
where
    A: Fn(f64, f64) -> Result<f64>,
{
    let c = alpha(y, y2)?;
    let limit = RegularFamilyLimit::new(
        gamma,
        vec![y, y2],
        DMatrix::from_row_slice(2, 2, &[alpha(y, y)?, c, c, alpha(y2, y2)?]),
    )?;
    let direct = contour_integral(k, k2, gamma, y, y2, c, tol)?;
    let factor = PI / ((k + 1) * (k2 + 1)) as f64;
    let via = scaled(theorem2_covariance(k + 1, k2 + 1, &limit, 0, 1, tol / factor)?, factor);
    if (direct.value - via.value).abs() > ROUTE_AGREEMENT {
        return Err(Error::ComputationFailed(format!(
            "moment covariance routes disagree: {} vs {}",
            direct.value, via.value
        )));
    }
    Ok(direct)
}

/// Gram matrix of [`theorem2_covariance`] over `(member, k)` probes and its
/// smallest eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct PdReport {
    pub gram: DMatrix<f64>,
    pub errors: DMatrix<f64>,
    pub min_eigenvalue: f64,
    /// Largest absolute eigenvalue.
    pub norm: f64,
}

impl PdReport {
    /// `λ_min ≥ −rel · ‖G‖`.
    pub fn is_psd(&self, rel: f64) -> bool {
        self.min_eigenvalue >= -rel * self.norm
    }
}

pub fn pd_check(limit: &RegularFamilyLimit, probes: &[(usize, u32)], tol: f64) -> Result<PdReport> {
    if probes.is_empty() {
        return invalid("pd_check needs at least one probe");
    }
    let n = probes.len();
    let mut gram = DMatrix::zeros(n, n);
    let mut errors = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let (r, kr) = probes[a];
            let (s, ks) = probes[b];
            let v = theorem2_covariance(kr, ks, limit, r, s, tol)?;
            gram[(a, b)] = v.value;
            gram[(b, a)] = v.value;
            errors[(a, b)] = v.abs_error_estimate;
            errors[(b, a)] = v.abs_error_estimate;
        }
    }
    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PdReport {
        gram,
        errors,
        min_eigenvalue,
        norm,
    })
}

/// Limiting joint moment of the Gaussian vector with covariance `cov`.
pub fn gaussian_joint_prediction(cov: &DMatrix<f64>, indices: &[usize]) -> Result<f64> {
    wick_moment(cov, indices)
}

/// One row of a covariance table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub r: usize,
    pub s: usize,
    pub k_r: u32,
    pub k_s: u32,
    pub eta_r: f64,
    pub eta_s: f64,
    pub c_rs: f64,
    pub gamma: f64,
    pub value: f64,
    pub error_estimate: f64,
}

pub const COVARIANCE_CSV_HEADER: &str = "r,s,k_r,k_s,eta_r,eta_s,c_rs,gamma,value,error_estimate";

/// Rows for every `r ≤ s` and every pair of orders.
pub fn covariance_table(limit: &RegularFamilyLimit, orders: &[u32], tol: f64) -> Result<Vec<CovarianceRow>> {
    let mut rows = Vec::new();
    for r in 0..limit.len() {
        for s in r..limit.len() {
            for &k_r in orders {
                for &k_s in orders {
                    let v = theorem2_covariance(k_r, k_s, limit, r, s, tol)?;
                    rows.push(CovarianceRow {
                        r,
                        s,
                        k_r,
                        k_s,
                        eta_r: limit.etas[r],
                        eta_s: limit.etas[s],
                        c_rs: limit.overlaps[(r, s)],
                        gamma: limit.gamma,
                        value: v.value,
                        error_estimate: v.abs_error_estimate,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn covariance_csv(rows: &[CovarianceRow]) -> String {
    let mut out = String::from(COVARIANCE_CSV_HEADER);
    out.push('\n');
    for w in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            w.r, w.s, w.k_r, w.k_s, w.eta_r, w.eta_s, w.c_rs, w.gamma, w.value, w.error_estimate
        ));
    }
    out
}
