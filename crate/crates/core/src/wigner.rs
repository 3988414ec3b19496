//! Traces of powers of principal submatrices of Hermitian Wigner matrices.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rsk::{Estimate, MomentEstimator, Observable, ObservationTable};

/// Cap on `M · max(k)`.
pub const WORK_BUDGET: usize = 1 << 16;

/// Xored into the seed so Wigner streams never coincide with field streams.
const DOMAIN: u64 = 0x5749_474e_4552_0001;

/// Relative size of `ℑ Tr` tolerated before a trace is rejected.
const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    /// Matrix dimension `M`.
    pub size: usize,
    /// Subsets of `{1, …, M}`.
    pub index_sets: Vec<Vec<usize>>,
    pub seed: u64,
    pub replicas: u64,
    pub moment_orders: Vec<u32>,
}

impl WignerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return invalid("matrix size must be positive");
        }
        if self.index_sets.is_empty() || self.moment_orders.is_empty() {
            return invalid("at least one index set and one order are required");
        }
        for (i, b) in self.index_sets.iter().enumerate() {
            if b.is_empty() {
                return invalid(format!("index set {i} is empty"));
            }
            if b.iter().any(|&v| v == 0 || v > self.size) {
                return invalid(format!("index set {i} leaves 1..={}", self.size));
            }
            if b.iter().collect::<BTreeSet<_>>().len() != b.len() {
                return invalid(format!("index set {i} repeats an index"));
            }
        }
        if self.moment_orders.contains(&0) {
            return invalid("moment orders start at 1");
        }
        let k = *self.moment_orders.iter().max().expect("nonempty") as usize;
        if self.size.saturating_mul(k) > WORK_BUDGET {
            return Err(Error::ResourceLimit(format!(
                "M·max(k) = {} exceeds {WORK_BUDGET}",
                self.size.saturating_mul(k)
            )));
        }
        Ok(())
    }
}

/// Hermitian `X` with `x_ii ~ N(0, 1)` and `ℜx_ij, ℑx_ij ~ N(0, 1/2)` for
/// `i < j`, drawn row by row over the upper triangle.
pub fn sample_matrix(size: usize, seed: u64, replica: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ DOMAIN);
    rng.set_stream(replica);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = DMatrix::zeros(size, size);
    for i in 0..size {
        let d: f64 = StandardNormal.sample(&mut rng);
        x[(i, i)] = Complex64::new(d, 0.0);
        for j in i + 1..size {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let v = Complex64::new(re * half, im * half);
            x[(i, j)] = v;
            x[(j, i)] = v.conj();
        }
    }
    x
}

/// `Tr A^k` from `A^{k−1}` by repeated multiplication and the trace of one
/// more product.
fn trace_power(a: &DMatrix<Complex64>, k: u32) -> Result<f64> {
    let n = a.nrows();
    let t = if k == 1 {
        a.trace()
    } else {
        let mut p = a.clone();
        for _ in 2..k {
            p = &p * a;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += p[(i, j)] * a[(j, i)];
            }
        }
        acc
    };
    if t.im.abs() > IMAGINARY_TOLERANCE * t.re.abs().max(1.0) {
        return Err(Error::ComputationFailed(format!("trace {t} is not real")));
    }
    Ok(t.re)
}

/// Traces for one replica.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSample {
    pub replica: u64,
    /// `traces[set][o] = Tr (X_B)^{k_o}`.
    pub traces: Vec<Vec<f64>>,
}

pub fn sample_traces(config: &WignerConfig, replica: u64) -> Result<TraceSample> {
    config.validate()?;
    let x = sample_matrix(config.size, config.seed, replica);
    let traces = config
        .index_sets
        .iter()
        .map(|b| {
            let idx: Vec<usize> = b.iter().map(|v| v - 1).collect();
            let xb = x.select_rows(&idx).select_columns(&idx);
            config.moment_orders.iter().map(|&k| trace_power(&xb, k)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(TraceSample { replica, traces })
}

/// Replicas `0..replicas` in parallel, in replica order.
pub fn sample_trace_batch(config: &WignerConfig) -> Result<Vec<TraceSample>> {
    config.validate()?;
    (0..config.replicas).into_par_iter().map(|r| sample_traces(config, r)).collect()
}

/// `Cov(Tr X_B², Tr X_{B'}²) = 2|B ∩ B'|²`: diagonal entries contribute
/// `Var x_ii² = 2`, each shared off-diagonal pair `Var 2|x_ij|² = 4`.
pub fn exact_low_moment_covariance(b: &[usize], b2: &[usize], k: u32) -> Result<f64> {
    if k != 2 {
        return invalid(format!("closed form covariance only for k = 2, got {k}"));
    }
    let a: BTreeSet<usize> = b.iter().copied().collect();
    let d = b2.iter().filter(|v| a.contains(v)).count() as f64;
    Ok(2.0 * d + 4.0 * d * (d - 1.0) / 2.0)
}

/// Empirical covariance of `Tr X_B^k` and `Tr X_{B'}^{k'}` with a jackknife
/// error, for set/order index pairs `(set, order_index)`.
pub fn trace_covariance(
    config: &WignerConfig,
    samples: &[TraceSample],
    a: (usize, usize),
    b: (usize, usize),
) -> Result<Estimate> {
    let cols = [a, b];
    if cols.iter().any(|&(s, o)| s >= config.index_sets.len() || o >= config.moment_orders.len()) {
        return invalid("set or order index out of range");
    }
    let table = ObservationTable {
        observables: cols
            .iter()
            .map(|&(s, o)| Observable { seq: s, level: 0, k: config.moment_orders[o] })
            .collect(),
        values: samples
            .iter()
            .map(|t| cols.iter().map(|&(s, o)| t.traces[s][o]).collect())
            .collect(),
    };
    MomentEstimator::new(&table, None)?.joint_moment(&[0, 1])
}

/// One overlap level of [`overlap_monotonicity_report`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapRow {
    pub setsize_r: usize,
    pub setsize_s: usize,
    pub overlap: usize,
    pub k: u32,
    pub cov: f64,
    pub stderr: f64,
    /// `2|B ∩ B'|²` when `k = 2`.
    pub exact: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub rows: Vec<OverlapRow>,
    /// Covariance never drops by more than `z` combined standard errors as
    /// the overlap grows.
    pub monotone: bool,
    /// The disjoint level, if present, is within `z` standard errors of 0.
    pub zero_at_disjoint: bool,
    /// Every `k = 2` level is within `z` standard errors of `2|B ∩ B'|²`.
    pub matches_exact: bool,
}

pub const OVERLAP_CSV_HEADER: &str = "setsize_r,setsize_s,overlap,k,cov,stderr,exact";

impl OverlapReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(OVERLAP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let exact = r.exact.map(|e| e.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.setsize_r, r.setsize_s, r.overlap, r.k, r.cov, r.stderr, exact
            ));
        }
        out
    }
}

/// Covariance of `Tr X_{B_0}^k` with `Tr X_{B_j}^k` for every later set
/// `B_j`, ordered by overlap with `B_0`, for every configured order.
pub fn overlap_monotonicity_report(config: &WignerConfig, samples: &[TraceSample], z: f64) -> Result<OverlapReport> {
    if config.index_sets.len() < 4 {
        return invalid("at least three overlap levels besides the reference set are required");
    }
    let base: BTreeSet<usize> = config.index_sets[0].iter().copied().collect();
    let mut rows = Vec::new();
    let (mut monotone, mut zero, mut exact_ok) = (true, true, true);
    for (o, &k) in config.moment_orders.iter().enumerate() {
        let mut level: Vec<(usize, usize)> = (1..config.index_sets.len())
            .map(|j| (config.index_sets[j].iter().filter(|v| base.contains(v)).count(), j))
            .collect();
        level.sort();
        let mut prev: Option<Estimate> = None;
        for (d, j) in level {
            let e = trace_covariance(config, samples, (0, o), (j, o))?;
            let exact = if k == 2 {
                Some(exact_low_moment_covariance(&config.index_sets[0], &config.index_sets[j], 2)?)
            } else {
                None
            };
            if let Some(p) = prev {
                monotone &= e.value >= p.value - z * (e.stderr.powi(2) + p.stderr.powi(2)).sqrt();
            }
            if d == 0 {
                zero &= e.value.abs() <= z * e.stderr;
            }
            if let Some(x) = exact {
                exact_ok &= (e.value - x).abs() <= z * e.stderr;
            }
            rows.push(OverlapRow {
                setsize_r: config.index_sets[0].len(),
                setsize_s: config.index_sets[j].len(),
                overlap: d,
                k,
                cov: e.value,
                stderr: e.stderr,
                exact,
            });
            prev = Some(e);
        }
    }
    Ok(OverlapReport {
        rows,
        monotone,
        zero_at_disjoint: zero,
        matches_exact: exact_ok,
    })
}

/// Sets `B_c = {s − cs + 1, …, 2s − cs}` of size `s` inside `{1, …, 2s}`,
/// overlapping `B_1 = {1, …, s}` in `cs` indices, reference set first.
pub fn shifted_overlap_sets(s: usize, fractions: &[f64]) -> Result<Vec<Vec<usize>>> {
    let mut sets = vec![(1..=s).collect::<Vec<_>>()];
    for &c in fractions {
        let shared = (c * s as f64).round();
        if !(0.0..=1.0).contains(&c) || (shared - c * s as f64).abs() > 1e-9 {
            return invalid(format!("overlap fraction {c} does not give an integer overlap of {s}"));
        }
        let start = s - shared as usize + 1;
        sets.push((start..start + s).collect());
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(size: usize, sets: Vec<Vec<usize>>, replicas: u64, orders: Vec<u32>) -> WignerConfig {
        WignerConfig {
            size,
            index_sets: sets,
            seed: 3,
            replicas,
            moment_orders: orders,
        }
    }

    #[test]
    fn matrices_are_hermitian_and_reproducible() {
        let x = sample_matrix(6, 1, 2);
        assert_eq!(x, x.adjoint());
        assert_eq!(x, sample_matrix(6, 1, 2));
        assert_ne!(x, sample_matrix(6, 1, 3));
    }

    #[test]
    fn traces_match_eigenvalues() {
        let c = config(5, vec![vec![1, 3, 4]], 1, vec![1, 2, 3, 4]);
        let t = sample_traces(&c, 0).unwrap();
        let x = sample_matrix(5, 3, 0);
        let xb = x.select_rows(&[0, 2, 3]).select_columns(&[0, 2, 3]);
        let ev = nalgebra::linalg::SymmetricEigen::new(xb.clone()).eigenvalues;
        for (o, k) in [1, 2, 3, 4].iter().enumerate() {
            let want: f64 = ev.iter().map(|l| l.powi(*k)).sum();
            assert!((t.traces[0][o] - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn validation() {
        assert!(config(4, vec![vec![]], 1, vec![1]).validate().is_err());
        assert!(config(4, vec![vec![5]], 1, vec![1]).validate().is_err());
        assert!(config(4, vec![vec![1, 1]], 1, vec![1]).validate().is_err());
        assert!(matches!(
            config(1 << 15, vec![vec![1]], 1, vec![4]).validate(),
            Err(Error::ResourceLimit(_))
        ));
        assert!(exact_low_moment_covariance(&[1], &[1], 3).is_err());
    }

    #[test]
    fn exact_covariance_values() {
        assert_eq!(exact_low_moment_covariance(&[1, 2, 3], &[1, 2, 3], 2).unwrap(), 18.0);
        assert_eq!(exact_low_moment_covariance(&[1, 2, 3], &[3, 4], 2).unwrap(), 2.0);
        assert_eq!(exact_low_moment_covariance(&[1, 2], &[3, 4], 2).unwrap(), 0.0);
    }

    #[test]
    fn overlap_sets() {
        let s = shifted_overlap_sets(4, &[0.0, 0.25, 1.0]).unwrap();
        assert_eq!(s[1], vec![5, 6, 7, 8]);
        assert_eq!(s[2], vec![4, 5, 6, 7]);
        assert_eq!(s[3], vec![1, 2, 3, 4]);
        assert!(shifted_overlap_sets(4, &[0.3]).is_err());
    }
}
