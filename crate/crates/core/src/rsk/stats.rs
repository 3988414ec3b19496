//! Centered, scaled power sums and their empirical moments with jackknife
//! standard errors.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::sampler::{HeightSample, SamplerConfig};
use crate::error::{invalid, Result};

/// Fewest replicas accepted by the estimators.
pub const MIN_REPLICAS: usize = 100;

/// Number of delete-a-group jackknife blocks (capped by the replica count).
pub const JACKKNIFE_GROUPS: usize = 200;

/// `L^{−k}(p_k − E p_k)` for sequence `seq` at level index `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Observable {
    pub seq: usize,
    pub level: usize,
    pub k: u32,
}

/// Where the mean subtracted from an observable came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    Exact,
    Empirical,
}

/// Replica-by-observable table of `L^{−k} p_k`, uncentered.
#[derive(Clone, Debug)]
pub struct ObservationTable {
    pub observables: Vec<Observable>,
    /// `values[r][a]`.
    pub values: Vec<Vec<f64>>,
}

impl ObservationTable {
    pub fn build(config: &SamplerConfig, samples: &[HeightSample], observables: &[Observable]) -> Result<Self> {
        let mut columns = Vec::with_capacity(observables.len());
        for o in observables {
            if o.seq >= config.sequences.len() || o.level >= config.levels.len() {
                return invalid(format!("observable {o:?} outside the configuration"));
            }
            let Some(idx) = config.orders.iter().position(|&k| k == o.k) else {
                return invalid(format!("order {} was not sampled", o.k));
            };
            columns.push(idx);
        }
        let values = samples
            .iter()
            .map(|s| {
                observables
                    .iter()
                    .zip(&columns)
                    .map(|(o, &idx)| {
                        let exact = s.power_sum(o.seq, o.level, idx, o.k)
                            / BigRational::from_integer(BigInt::from(config.l).pow(o.k));
                        exact.to_f64().unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            observables: observables.to_vec(),
            values,
        })
    }

    pub fn replicas(&self) -> usize {
        self.values.len()
    }
}

/// An estimate with its jackknife standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Contiguous replica blocks for the grouped jackknife.
fn groups(n: usize) -> Vec<std::ops::Range<usize>> {
    let g = n.min(JACKKNIFE_GROUPS);
    (0..g).map(|i| (i * n / g)..((i + 1) * n / g)).collect()
}

fn jackknife_error(partial: &[f64]) -> f64 {
    let g = partial.len() as f64;
    let mean = partial.iter().sum::<f64>() / g;
    let var = partial.iter().map(|p| (p - mean).powi(2)).sum::<f64>() * (g - 1.0) / g;
    var.sqrt()
}

/// Mixed central moment estimator `E Π_a (ξ_a − m_a)` over a subset of rows.
fn central_moment(values: &[Vec<f64>], rows: &dyn Fn(usize) -> bool, cols: &[usize], means: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut count = 0usize;
    for (r, row) in values.iter().enumerate() {
        if rows(r) {
            acc += cols.iter().map(|&c| row[c] - means[c]).product::<f64>();
            count += 1;
        }
    }
    acc / count as f64
}

fn column_means(values: &[Vec<f64>], d: usize, rows: &dyn Fn(usize) -> bool) -> Vec<f64> {
    let mut sums = vec![0.0; d];
    let mut count = 0usize;
    for (r, row) in values.iter().enumerate() {
        if rows(r) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
            count += 1;
        }
    }
    sums.iter().map(|s| s / count as f64).collect()
}

/// Empirical moments of a table with a fixed centering policy.
#[derive(Clone, Debug)]
pub struct MomentEstimator<'a> {
    table: &'a ObservationTable,
    exact_means: Option<Vec<f64>>,
}

impl<'a> MomentEstimator<'a> {
    /// `exact_means`, when given, replaces the empirical centering.
    pub fn new(table: &'a ObservationTable, exact_means: Option<Vec<f64>>) -> Result<Self> {
        if table.replicas() < MIN_REPLICAS {
            return invalid(format!(
                "{} replicas given, at least {MIN_REPLICAS} are required",
                table.replicas()
            ));
        }
        if let Some(m) = &exact_means {
            if m.len() != table.observables.len() {
                return invalid("one exact mean per observable is required");
            }
        }
        Ok(Self { table, exact_means })
    }

    pub fn centering(&self) -> Centering {
        if self.exact_means.is_some() {
            Centering::Exact
        } else {
            Centering::Empirical
        }
    }

    fn means(&self, rows: &dyn Fn(usize) -> bool) -> Vec<f64> {
        match &self.exact_means {
            Some(m) => m.clone(),
            None => column_means(&self.table.values, self.table.observables.len(), rows),
        }
    }

    fn estimate(&self, cols: &[usize]) -> f64 {
        let all = |_| true;
        let means = self.means(&all);
        let m = central_moment(&self.table.values, &all, cols, &means);
        if cols.len() == 2 && self.exact_means.is_none() {
            // unbiased covariance
            let n = self.table.replicas() as f64;
            m * n / (n - 1.0)
        } else {
            m
        }
    }

    /// `E Π_a (ξ_{cols[a]} − m)` with a grouped jackknife error.
    pub fn joint_moment(&self, cols: &[usize]) -> Result<Estimate> {
        let d = self.table.observables.len();
        if let Some(&c) = cols.iter().find(|&&c| c >= d) {
            return invalid(format!("observable index {c} out of range"));
        }
        let full = self.estimate(cols);
        let n = self.table.replicas();
        let partial: Vec<f64> = groups(n)
            .into_iter()
            .map(|g| {
                let removed = g.len();
                let keep = move |r: usize| !g.contains(&r);
                let means = self.means(&keep);
                let m = central_moment(&self.table.values, &keep, cols, &means);
                if cols.len() == 2 && self.exact_means.is_none() {
                    let kept = (n - removed) as f64;
                    m * kept / (kept - 1.0)
                } else {
                    m
                }
            })
            .collect();
        Ok(Estimate {
            value: full,
            stderr: jackknife_error(&partial),
        })
    }

    /// Full covariance matrix with standard errors.
    pub fn covariance(&self) -> Result<CovarianceEstimate> {
        let d = self.table.observables.len();
        let mut cov = DMatrix::zeros(d, d);
        let mut err = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let e = self.joint_moment(&[a, b])?;
                cov[(a, b)] = e.value;
                cov[(b, a)] = e.value;
                err[(a, b)] = e.stderr;
                err[(b, a)] = e.stderr;
            }
        }
        Ok(CovarianceEstimate {
            observables: self.table.observables.clone(),
            cov,
            stderr: err,
            replicas: self.table.replicas(),
            centering: self.centering(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CovarianceEstimate {
    pub observables: Vec<Observable>,
    pub cov: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
    pub replicas: usize,
    pub centering: Centering,
}

impl CovarianceEstimate {
    /// CSV with columns `i,y,k,j,y2,k2,cov,stderr,n_replicas`, upper
    /// triangle, rows sorted by observable labels.
    pub fn to_csv(&self, levels: &[f64]) -> String {
        let mut rows = Vec::new();
        let d = self.observables.len();
        for a in 0..d {
            for b in a..d {
                let (oa, ob) = (self.observables[a], self.observables[b]);
                let (first, second, ia, ib) = if oa <= ob { (oa, ob, a, b) } else { (ob, oa, b, a) };
                rows.push((first, second, self.cov[(ia, ib)], self.stderr[(ia, ib)]));
            }
        }
        rows.sort_by_key(|x| (x.0, x.1));
        let mut out = String::from("i,y,k,j,y2,k2,cov,stderr,n_replicas\n");
        for (p, q, c, e) in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:e},{:e},{}\n",
                p.seq, levels[p.level], p.k, q.seq, levels[q.level], q.k, c, e, self.replicas
            ));
        }
        out
    }
}

/// Sample covariance of the centered scaled power sums for the given
/// observables, with jackknife standard errors.
pub fn empirical_covariance(
    config: &SamplerConfig,
    samples: &[HeightSample],
    observables: &[Observable],
    exact_means: Option<Vec<f64>>,
) -> Result<CovarianceEstimate> {
    let table = ObservationTable::build(config, samples, observables)?;
    MomentEstimator::new(&table, exact_means)?.covariance()
}
