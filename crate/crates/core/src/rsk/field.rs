//! Poisson point field over the columns `1, 2, …`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Result};

/// Random words per column are drawn from disjoint windows of this many
/// 32-bit words of the replica's stream.
const COLUMN_STRIDE_LOG2: u32 = 40;

/// Per-column sorted timestamps in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonField {
    rate: f64,
    columns: BTreeMap<u64, Vec<f64>>,
}

/// One point of the field, ordered by `(timestamp, column, occurrence)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    pub timestamp: f64,
    pub column: u64,
    pub occurrence: u32,
}

/// Generator for column `column` of replica `replica`; a pure function of
/// `(seed, replica, column)`.
pub fn column_rng(seed: u64, replica: u64, column: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng.set_word_pos(u128::from(column) << COLUMN_STRIDE_LOG2);
    rng
}

impl PoissonField {
    /// Draws `Poisson(rate)` uniform timestamps in each listed column.
    pub fn sample(rate: f64, seed: u64, replica: u64, columns: impl IntoIterator<Item = u64>) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return invalid(format!("Poisson rate must be finite and nonnegative, got {rate}"));
        }
        let poisson = if rate > 0.0 {
            Some(Poisson::new(rate).map_err(|e| crate::Error::InvalidArgument(e.to_string()))?)
        } else {
            None
        };
        let mut out = BTreeMap::new();
        for column in columns {
            if column == 0 {
                return invalid("columns are numbered from 1");
            }
            let times = match &poisson {
                None => Vec::new(),
                Some(p) => {
                    let mut rng = column_rng(seed, replica, column);
                    let n = p.sample(&mut rng) as usize;
                    let mut t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                    t.sort_by(f64::total_cmp);
                    t
                }
            };
            out.insert(column, times);
        }
        Ok(Self { rate, columns: out })
    }

    /// A field with given timestamps; each column must be sorted and lie
    /// in `[0, 1)`.
    pub fn from_columns(rate: f64, columns: BTreeMap<u64, Vec<f64>>) -> Result<Self> {
        for (&c, times) in &columns {
            if c == 0 {
                return invalid("columns are numbered from 1");
            }
            if !times.iter().all(|t| (0.0..1.0).contains(t)) || !times.windows(2).all(|w| w[0] <= w[1]) {
                return invalid(format!("column {c} is not a sorted list of times in [0, 1)"));
            }
        }
        Ok(Self { rate, columns })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn columns(&self) -> &BTreeMap<u64, Vec<f64>> {
        &self.columns
    }

    pub fn column(&self, j: u64) -> &[f64] {
        self.columns.get(&j).map_or(&[], Vec::as_slice)
    }

    pub fn total_points(&self) -> usize {
        self.columns.values().map(Vec::len).sum()
    }

    /// All points in time order, ties broken by column then occurrence.
    pub fn points_in_time_order(&self) -> Vec<FieldPoint> {
        let mut pts: Vec<FieldPoint> = self
            .columns
            .iter()
            .flat_map(|(&column, times)| {
                times.iter().enumerate().map(move |(i, &timestamp)| FieldPoint {
                    timestamp,
                    column,
                    occurrence: i as u32,
                })
            })
            .collect();
        pts.sort_by(|a, b| {
            a.timestamp
                .total_cmp(&b.timestamp)
                .then(a.column.cmp(&b.column))
                .then(a.occurrence.cmp(&b.occurrence))
        });
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_gives_empty_field() {
        let f = PoissonField::sample(0.0, 1, 0, 1..=5).unwrap();
        assert_eq!(f.total_points(), 0);
        assert_eq!(f.columns().len(), 5);
    }

    #[test]
    fn columns_are_reproducible_and_independent_of_the_column_set() {
        let a = PoissonField::sample(7.5, 42, 3, [1, 2, 3, 9]).unwrap();
        let b = PoissonField::sample(7.5, 42, 3, [9, 3]).unwrap();
        assert_eq!(a.column(9), b.column(9));
        assert_eq!(a.column(3), b.column(3));
        let c = PoissonField::sample(7.5, 42, 4, [9]).unwrap();
        assert_ne!(a.column(9), c.column(9));
        assert!(a.column(1).windows(2).all(|w| w[0] <= w[1]));
        assert!(a.column(1).iter().all(|&t| (0.0..1.0).contains(&t)));
    }

    #[test]
    fn time_order_breaks_ties_by_column() {
        let f = PoissonField::from_columns(1.0, [(2, vec![0.5]), (1, vec![0.5, 0.5])].into()).unwrap();
        let cols: Vec<(u64, u32)> = f.points_in_time_order().iter().map(|p| (p.column, p.occurrence)).collect();
        assert_eq!(cols, vec![(1, 0), (1, 1), (2, 0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PoissonField::sample(-1.0, 0, 0, [1]).is_err());
        assert!(PoissonField::sample(1.0, 0, 0, [0]).is_err());
        assert!(PoissonField::from_columns(1.0, [(1, vec![0.5, 0.2])].into()).is_err());
    }
}
