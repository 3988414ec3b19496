//! Exact linear algebra over the integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};

/// Solution of an exact, possibly rank-deficient, consistent system.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub x: Vec<BigRational>,
    pub rank: usize,
    /// Columns without a pivot; their unknowns are set to zero.
    pub free_columns: Vec<usize>,
}

/// Solves `A x = b` for an integer matrix by fraction-free (Bareiss)
/// elimination. Inconsistent systems are an error.
pub fn solve_integer_system(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<ExactSolution> {
    let rows = a.len();
    if rows != b.len() {
        return invalid(format!("{} rows but {} right-hand sides", rows, b.len()));
    }
    let cols = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != cols) {
        return invalid("ragged matrix");
    }
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut prev = BigInt::from(1);
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..=cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let rank = r;
    if let Some(i) = (rank..rows).find(|&i| !m[i][cols].is_zero()) {
        return Err(Error::ComputationFailed(format!(
            "inconsistent system: row {i} reduces to 0 = {}",
            m[i][cols]
        )));
    }

    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::from_integer(m[i][cols].clone());
        for j in c + 1..cols {
            if !m[i][j].is_zero() {
                acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
            }
        }
        x[c] = acc / BigRational::from_integer(m[i][c].clone());
    }
    let free_columns = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Ok(ExactSolution {
        x,
        rank,
        free_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_system() {
        let a = bi(&[&[2, 1], &[1, 3]]);
        let b = vec![BigInt::from(3), BigInt::from(5)];
        let s = solve_integer_system(&a, &b).unwrap();
        assert_eq!(s.x, vec![q(4, 5), q(7, 5)]);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn overdetermined_consistent_and_rank_deficient() {
        let a = bi(&[&[1, 2, 2], &[2, 4, 4], &[0, 0, 0], &[1, 2, 2]]);
        let b = vec![6.into(), 12.into(), 0.into(), 6.into()];
        let s = solve_integer_system(&a, &b).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.free_columns, vec![1, 2]);
        assert_eq!(s.x, vec![q(6, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn inconsistent_is_rejected() {
        let a = bi(&[&[1, 1], &[2, 2]]);
        let b = vec![1.into(), 3.into()];
        assert!(matches!(
            solve_integer_system(&a, &b),
            Err(Error::ComputationFailed(_))
        ));
    }

    proptest! {
        #[test]
        fn recovers_planted_solution(
            entries in proptest::collection::vec(-9i64..=9, 20),
            sol in proptest::collection::vec(-9i64..=9, 4),
        ) {
            let a: Vec<Vec<BigInt>> = entries.chunks(4).map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let b: Vec<BigInt> = a.iter().map(|r| r.iter().zip(&sol).map(|(x, y)| x * y).sum()).collect();
            let s = solve_integer_system(&a, &b).unwrap();
            for (row, rhs) in a.iter().zip(&b) {
                let lhs: BigRational = row.iter().zip(&s.x).map(|(x, y)| BigRational::from_integer(x.clone()) * y).sum();
                prop_assert_eq!(lhs, BigRational::from_integer(rhs.clone()));
            }
        }
    }
}
