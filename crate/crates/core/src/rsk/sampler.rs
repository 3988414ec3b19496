//! Joint height samples for several index sequences driven by one field.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::PoissonField;
use super::insertion::RskTableau;
use crate::error::{invalid, Error, Result};
use crate::gt::Signature;
use crate::hp::ratio_to_decimal;
use crate::plancherel::scaled_shifted_power_sum;
use crate::sequence::SequenceRule;

/// Largest power-sum order the sampler tracks; `2^k p_k` must fit in `i128`.
pub const MAX_SAMPLED_ORDER: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub gamma: f64,
    pub l: u64,
    pub seed: u64,
    pub replicas: u64,
    pub sequences: Vec<SequenceRule>,
    /// Heights `y`; sequence `i` is observed at level `[yL]`.
    pub levels: Vec<f64>,
    /// Orders `k` of the shifted power sums attached to each shape.
    pub orders: Vec<u32>,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return invalid(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.l == 0 {
            return invalid("L must be positive");
        }
        if self.replicas == 0 {
            return invalid("at least one replica is required");
        }
        if self.sequences.is_empty() || self.levels.is_empty() || self.orders.is_empty() {
            return invalid("sequences, levels and orders must be nonempty");
        }
        for s in &self.sequences {
            s.validate()?;
        }
        for &y in &self.levels {
            if self.level_size(y) == 0 {
                return invalid(format!("level y = {y} gives an empty prefix at L = {}", self.l));
            }
        }
        if let Some(&k) = self.orders.iter().find(|&&k| k == 0 || k > MAX_SAMPLED_ORDER) {
            return invalid(format!("order {k} outside 1..={MAX_SAMPLED_ORDER}"));
        }
        Ok(())
    }

    /// `[yL]`.
    pub fn level_size(&self, y: f64) -> u64 {
        if y > 0.0 {
            (y * self.l as f64).floor() as u64
        } else {
            0
        }
    }

    pub fn rate(&self) -> f64 {
        self.gamma * self.l as f64
    }

    /// `A_{i,[yL]}` for every sequence and level, `[i][level]`.
    pub fn index_sets(&self) -> Result<Vec<Vec<Vec<u64>>>> {
        self.sequences
            .iter()
            .map(|s| {
                self.levels
                    .iter()
                    .map(|&y| s.prefix(self.level_size(y), self.l))
                    .collect()
            })
            .collect()
    }

    /// Every column appearing in some observed prefix.
    pub fn columns(&self) -> Result<BTreeSet<u64>> {
        Ok(self.index_sets()?.into_iter().flatten().flatten().collect())
    }
}

/// Shapes and power sums of one replica.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightSample {
    pub replica: u64,
    /// `shapes[i][level]`.
    pub shapes: Vec<Vec<Signature>>,
    /// `scaled_power_sums[i][level][o] = 2^k p_k` with `k = orders[o]`.
    pub scaled_power_sums: Vec<Vec<Vec<i128>>>,
    /// Pairs of consecutive levels of one sequence whose shapes fail to
    /// interlace in the generalized (multi-step) sense.
    pub interlacing_violations: u32,
    /// Pairs of consecutive levels whose shapes are not nested. Only possible
    /// when the added columns are not all larger than the earlier ones.
    pub containment_violations: u32,
}

impl HeightSample {
    /// Exact `p_k` for sequence `i` at level index `level`.
    pub fn power_sum(&self, i: usize, level: usize, order_index: usize, k: u32) -> BigRational {
        BigRational::new(
            BigInt::from(self.scaled_power_sums[i][level][order_index]),
            BigInt::from(1u8) << k,
        )
    }
}

/// `μ` can be reached from `λ` by `steps` interlacing steps down:
/// `λ_i ≥ μ_i ≥ λ_{i+steps}`.
pub fn is_multistep_interlaced(mu: &Signature, lam: &Signature) -> bool {
    let (m, n) = (mu.len(), lam.len());
    if m > n {
        return false;
    }
    let steps = n - m;
    mu.parts().iter().enumerate().all(|(i, &v)| {
        lam.parts()[i] >= v && lam.parts().get(i + steps).is_none_or(|&w| v >= w)
    })
}

fn contained(mu: &Signature, lam: &Signature) -> bool {
    mu.len() <= lam.len() && mu.parts().iter().zip(lam.parts()).all(|(a, b)| a <= b)
}

/// Shape of the RSK tableau of the word read off the field on columns `set`.
/// Letters are ranks of columns within `set` in natural order.
pub fn shape_for_subset(field: &PoissonField, set: &[u64]) -> Result<Signature> {
    if set.is_empty() {
        return invalid("index set must be nonempty");
    }
    let points = field.points_in_time_order();
    Ok(shape_from_points(&points, set))
}

fn shape_from_points(points: &[super::field::FieldPoint], set: &[u64]) -> Signature {
    let mut sorted: Vec<u64> = set.to_vec();
    sorted.sort_unstable();
    let max = *sorted.last().expect("nonempty") as usize;
    let mut rank = vec![usize::MAX; max + 1];
    for (r, &c) in sorted.iter().enumerate() {
        rank[c as usize] = r;
    }
    let mut t = RskTableau::new(sorted.len());
    for p in points {
        if let Some(&r) = rank.get(p.column as usize) {
            if r != usize::MAX {
                t.insert(r);
            }
        }
    }
    t.shape()
}

/// The field for one replica on the columns the configuration observes.
pub fn sample_field(config: &SamplerConfig, replica: u64) -> Result<PoissonField> {
    config.validate()?;
    PoissonField::sample(config.rate(), config.seed, replica, config.columns()?)
}

fn sample_with_sets(config: &SamplerConfig, sets: &[Vec<Vec<u64>>], columns: &BTreeSet<u64>, replica: u64) -> Result<HeightSample> {
    let field = PoissonField::sample(config.rate(), config.seed, replica, columns.iter().copied())?;
    let points = field.points_in_time_order();
    let mut shapes = Vec::with_capacity(sets.len());
    let mut sums = Vec::with_capacity(sets.len());
    let mut violations = 0u32;
    let mut uncontained = 0u32;
    for (i, levels) in sets.iter().enumerate() {
        let row: Vec<Signature> = levels.iter().map(|set| shape_from_points(&points, set)).collect();
        let mut by_size: Vec<usize> = (0..row.len()).collect();
        by_size.sort_by_key(|&j| row[j].len());
        for w in by_size.windows(2) {
            let (small, large) = (&row[w[0]], &row[w[1]]);
            if !contained(small, large) {
                if adds_only_larger_letters(&levels[w[0]], &levels[w[1]]) {
                    return Err(Error::ComputationFailed(format!(
                        "replica {replica}, sequence {i}: shape {small} is not contained in {large}"
                    )));
                }
                uncontained += 1;
            }
            if !is_multistep_interlaced(small, large) {
                violations += 1;
            }
        }
        sums.push(
            row.iter()
                .map(|s| {
                    config
                        .orders
                        .iter()
                        .map(|&k| scaled_shifted_power_sum(k, s.parts()))
                        .collect()
                })
                .collect(),
        );
        shapes.push(row);
    }
    Ok(HeightSample {
        replica,
        shapes,
        scaled_power_sums: sums,
        interlacing_violations: violations,
        containment_violations: uncontained,
    })
}

/// Every column of the larger prefix missing from the smaller one exceeds
/// all columns of the smaller one, so RSK restriction removes whole rows of
/// the largest letters and the shapes must be nested.
fn adds_only_larger_letters(small: &[u64], large: &[u64]) -> bool {
    let top = small.iter().max().copied().unwrap_or(0);
    large[small.len()..].iter().all(|&c| c > top)
}

/// Shapes for every `(sequence, level)` from one shared field.
pub fn sample_joint(config: &SamplerConfig, replica: u64) -> Result<HeightSample> {
    config.validate()?;
    sample_with_sets(config, &config.index_sets()?, &config.columns()?, replica)
}

/// Replicas `0..config.replicas` in parallel, returned in replica order.
pub fn sample_batch(config: &SamplerConfig) -> Result<Vec<HeightSample>> {
    config.validate()?;
    let sets = config.index_sets()?;
    let columns = config.columns()?;
    (0..config.replicas)
        .into_par_iter()
        .map(|r| sample_with_sets(config, &sets, &columns, r))
        .collect()
}

/// One line of the replica stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica_index: u64,
    pub shapes: Vec<Vec<Vec<i64>>>,
    pub power_sums: Vec<Vec<Vec<String>>>,
    pub interlacing_violations: u32,
    pub containment_violations: u32,
}

impl ReplicaRecord {
    pub fn from_sample(sample: &HeightSample, orders: &[u32]) -> Self {
        Self {
            replica_index: sample.replica,
            shapes: sample
                .shapes
                .iter()
                .map(|row| row.iter().map(|s| s.parts().to_vec()).collect())
                .collect(),
            power_sums: sample
                .scaled_power_sums
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|vals| {
                            vals.iter()
                                .zip(orders)
                                .map(|(&v, &k)| {
                                    let r = BigRational::new(BigInt::from(v), BigInt::from(1u8) << k);
                                    ratio_to_decimal(&r, 60)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            interlacing_violations: sample.interlacing_violations,
            containment_violations: sample.containment_violations,
        }
    }
}

/// Newline-delimited JSON, one record per replica in replica order.
pub fn to_ndjson(samples: &[HeightSample], orders: &[u32]) -> String {
    let mut sorted: Vec<&HeightSample> = samples.iter().collect();
    sorted.sort_by_key(|s| s.replica);
    let mut out = String::new();
    for s in sorted {
        out.push_str(&serde_json::to_string(&ReplicaRecord::from_sample(s, orders)).expect("record serializes"));
        out.push('\n');
    }
    out
}
