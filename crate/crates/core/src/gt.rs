//! Exact combinatorics of the Gelfand–Tsetlin graph.
//!
//! Vertices at level `N` are signatures of length `N`; `mu` and `lam` are
//! joined by an edge when they interlace. The number of monotone paths from the
//! empty signature to `lam` is the dimension of the corresponding irreducible
//! representation of `U(N)`, which [`weyl_dim`] evaluates by the Weyl product
//! formula and [`count_paths`] by brute force.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A weakly decreasing integer vector. The length-0 signature is the root `∅`
/// of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("signature {parts:?} is not weakly decreasing"));
        }
        Ok(Self(parts))
    }

    /// The root of the graph, `∅`.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// The zero signature of length `n` (the trivial representation).
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts (the number of boxes for a partition).
    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.last().is_none_or(|&p| p >= 0)
    }

    /// Appends zeros up to length `n`. Fails if the signature is longer than
    /// `n` or has a negative part (padding would break monotonicity).
    pub fn padded(&self, n: usize) -> Result<Self> {
        if self.len() > n {
            return invalid(format!("signature of length {} exceeds {n}", self.len()));
        }
        if !self.is_nonnegative() && self.len() < n {
            return invalid("cannot pad a signature with negative parts");
        }
        let mut parts = self.0.clone();
        parts.resize(n, 0);
        Ok(Self(parts))
    }

    /// Drops trailing zeros, giving the partition in its usual form.
    pub fn trimmed(&self) -> Self {
        let mut parts = self.0.clone();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Self(parts)
    }

    /// Adds `c` to every part.
    pub fn shifted(&self, c: i64) -> Self {
        Self(self.0.iter().map(|p| p + c).collect())
    }
}

impl TryFrom<Vec<i64>> for Signature {
    type Error = Error;
    fn try_from(parts: Vec<i64>) -> Result<Self> {
        Signature::new(parts)
    }
}

impl From<Signature> for Vec<i64> {
    fn from(s: Signature) -> Self {
        s.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A finite path `∅ = levels[0] ≺ levels[1] ≺ … ≺ levels[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GtPath {
    levels: Vec<Signature>,
}

impl GtPath {
    pub fn new(levels: Vec<Signature>) -> Result<Self> {
        for (k, s) in levels.iter().enumerate() {
            if s.len() != k {
                return invalid(format!("level {k} has length {}", s.len()));
            }
        }
        for w in levels.windows(2) {
            if !is_interlaced(&w[0], &w[1])? {
                return invalid(format!("{} does not interlace {}", w[0], w[1]));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Signature] {
        &self.levels
    }

    /// Signature at the deepest level.
    pub fn top(&self) -> Option<&Signature> {
        self.levels.last()
    }
}

/// `mu ≺ lam`: `lam_i ≥ mu_i ≥ lam_{i+1}` for all `i`. `∅` precedes every
/// length-1 signature.
pub fn is_interlaced(mu: &Signature, lam: &Signature) -> Result<bool> {
    if mu.len() + 1 != lam.len() {
        return invalid(format!(
            "interlacing needs lengths N-1 and N, got {} and {}",
            mu.len(),
            lam.len()
        ));
    }
    let (m, l) = (mu.parts(), lam.parts());
    Ok((0..m.len()).all(|i| l[i] >= m[i] && m[i] >= l[i + 1]))
}

/// Dimension of the irreducible `U(N)`-module with highest weight `lam`,
/// `∏_{i<j} (λ_i − λ_j + j − i)/(j − i)`.
pub fn weyl_dim(lam: &Signature) -> BigUint {
    let p = lam.parts();
    let mut acc = BigRational::one();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let num = BigInt::from(p[i] - p[j] + (j - i) as i64);
            acc *= BigRational::new(num, BigInt::from(j - i));
        }
    }
    assert!(acc.is_integer(), "Weyl product did not reduce to an integer");
    acc.to_integer()
        .to_biguint()
        .expect("Weyl dimension is positive")
}

/// Number of chains `kappa ≺ λ^(K+1) ≺ … ≺ nu`. Exponential-time; meant as
/// an oracle for small signatures.
pub fn count_paths(kappa: &Signature, nu: &Signature) -> Result<BigUint> {
    if kappa.len() > nu.len() {
        return invalid(format!(
            "path from level {} to lower level {}",
            kappa.len(),
            nu.len()
        ));
    }
    let mut memo = HashMap::new();
    Ok(count_paths_memo(kappa, nu, &mut memo))
}

fn count_paths_memo(
    kappa: &Signature,
    nu: &Signature,
    memo: &mut HashMap<Signature, BigUint>,
) -> BigUint {
    if nu.len() == kappa.len() {
        return if nu == kappa {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    if let Some(v) = memo.get(nu) {
        return v.clone();
    }
    let total = enumerate_interlacing(nu)
        .iter()
        .map(|mu| count_paths_memo(kappa, mu, memo))
        .sum::<BigUint>();
    memo.insert(nu.clone(), total.clone());
    total
}

/// Number of standard Young tableaux of shape `lam` (hook length formula).
pub fn sym_dim(lam: &Signature) -> Result<BigUint> {
    if !lam.is_nonnegative() {
        return invalid(format!("{lam} has a negative part"));
    }
    let rows: Vec<usize> = lam
        .parts()
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| p as usize)
        .collect();
    let n: usize = rows.iter().sum();
    let mut hooks = BigUint::one();
    for (i, &len) in rows.iter().enumerate() {
        for j in 0..len {
            let arm = len - j - 1;
            let leg = rows[i + 1..].iter().take_while(|&&r| r > j).count();
            hooks *= BigUint::from(arm + leg + 1);
        }
    }
    let fact: BigUint = (1..=n).map(BigUint::from).product();
    Ok(fact / hooks)
}

/// All `mu ≺ nu`, in lexicographic order.
pub fn enumerate_interlacing(nu: &Signature) -> Vec<Signature> {
    let p = nu.parts();
    if p.is_empty() {
        return Vec::new();
    }
    let m = p.len() - 1;
    let mut out = Vec::new();
    let mut cur = vec![0i64; m];
    fn rec(i: usize, p: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if i == cur.len() {
            out.push(Signature(cur.clone()));
            return;
        }
        for v in p[i + 1]..=p[i] {
            cur[i] = v;
            rec(i + 1, p, cur, out);
        }
    }
    rec(0, p, &mut cur, &mut out);
    out
}

/// Partitions of `n` with at most `rows` nonzero parts, each padded with
/// zeros to length `rows`. Reverse-lexicographic order.
pub fn partitions(n: u32, rows: usize) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rows);
    fn rec(rem: i64, max: i64, rows: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if rem == 0 {
            let mut parts = cur.clone();
            parts.resize(rows, 0);
            out.push(Signature(parts));
            return;
        }
        if cur.len() == rows {
            return;
        }
        for v in (1..=max.min(rem)).rev() {
            cur.push(v);
            rec(rem - v, v, rows, cur, out);
            cur.pop();
        }
    }
    if rows == 0 {
        if n == 0 {
            out.push(Signature::empty());
        }
        return out;
    }
    rec(n as i64, n as i64, rows, &mut cur, &mut out);
    out
}

/// Every signature of length `n` whose parts satisfy `Σ|λ_i| ≤ max_abs_size`.
pub fn signatures_with_abs_size(n: usize, max_abs_size: i64) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, budget: i64, upper: i64, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if cur.len() == n {
            out.push(Signature(cur.clone()));
            return;
        }
        for v in (-budget..=upper.min(budget)).rev() {
            cur.push(v);
            rec(n, budget - v.abs(), v, cur, out);
            cur.pop();
        }
    }
    rec(n, max_abs_size, max_abs_size, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(p: &[i64]) -> Signature {
        Signature::new(p.to_vec()).unwrap()
    }

    #[test]
    fn rejects_increasing_parts() {
        assert!(Signature::new(vec![0, 1]).is_err());
        assert!(serde_json::from_str::<Signature>("[1,2]").is_err());
        assert_eq!(serde_json::from_str::<Signature>("[2,1]").unwrap(), sig(&[2, 1]));
    }

    #[test]
    fn interlacing_examples() {
        assert!(is_interlaced(&Signature::empty(), &sig(&[5])).unwrap());
        assert!(is_interlaced(&sig(&[1]), &sig(&[1, 0])).unwrap());
        assert!(!is_interlaced(&sig(&[2]), &sig(&[1, 0])).unwrap());
        assert!(is_interlaced(&sig(&[1, 0]), &sig(&[2, 1, 0])).unwrap());
        assert!(is_interlaced(&sig(&[1]), &sig(&[1, 0, 0])).is_err());
    }

    #[test]
    fn weyl_dim_examples() {
        assert_eq!(weyl_dim(&Signature::zeros(5)), BigUint::one());
        assert_eq!(weyl_dim(&sig(&[1, 0])), BigUint::from(2u32));
        assert_eq!(weyl_dim(&sig(&[2, 1, 0])), BigUint::from(8u32));
        assert_eq!(weyl_dim(&Signature::empty()), BigUint::one());
    }

    #[test]
    fn count_paths_examples() {
        let l = sig(&[3, 1, -2]);
        assert_eq!(count_paths(&l, &l).unwrap(), BigUint::one());
        assert_eq!(
            count_paths(&Signature::empty(), &sig(&[1, 0])).unwrap(),
            BigUint::from(2u32)
        );
        assert!(count_paths(&sig(&[1, 0]), &sig(&[1])).is_err());
        // a κ that is not in the cone of ν has no paths
        assert_eq!(count_paths(&sig(&[5]), &sig(&[1, 0])).unwrap(), BigUint::zero());
    }

    #[test]
    fn sym_dim_examples() {
        for n in 0..6 {
            assert_eq!(sym_dim(&sig(&[n])).unwrap(), BigUint::one());
        }
        assert_eq!(sym_dim(&sig(&[2, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(sym_dim(&sig(&[2, 2])).unwrap(), BigUint::from(2u32));
        assert_eq!(sym_dim(&sig(&[3, 2, 1])).unwrap(), BigUint::from(16u32));
        assert!(sym_dim(&sig(&[1, -1])).is_err());
    }

    /// Counts standard tableaux by trying every filling of the cells.
    fn brute_force_syt(rows: &[usize]) -> u64 {
        let cells: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
            .collect();
        let n = cells.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut count = 0;
        let index = |i: usize, j: usize| cells.iter().position(|&c| c == (i, j));
        loop {
            let ok = cells.iter().enumerate().all(|(c, &(i, j))| {
                let right = index(i, j + 1).is_none_or(|r| perm[r] > perm[c]);
                let below = index(i + 1, j).is_none_or(|b| perm[b] > perm[c]);
                right && below
            });
            if ok {
                count += 1;
            }
            // next permutation
            let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| perm[k] < perm[k + 1]) else {
                break;
            };
            let l = (k + 1..n).rev().find(|&l| perm[l] > perm[k]).unwrap();
            perm.swap(k, l);
            perm[k + 1..].reverse();
        }
        count
    }

    #[test]
    fn hook_length_matches_tableau_enumeration() {
        for n in 0..=7u32 {
            for p in partitions(n, n as usize) {
                let rows: Vec<usize> = p.parts().iter().filter(|&&x| x > 0).map(|&x| x as usize).collect();
                assert_eq!(sym_dim(&p).unwrap(), BigUint::from(brute_force_syt(&rows)), "{p}");
            }
        }
    }

    #[test]
    fn symmetric_group_branching() {
        // dim λ = Σ over removable corners of dim(λ − corner)
        for n in 1..=9u32 {
            for p in partitions(n, n as usize) {
                let parts = p.parts();
                let mut total = BigUint::zero();
                for i in 0..parts.len() {
                    let removable = parts[i] > 0 && parts.get(i + 1).is_none_or(|&next| next < parts[i]);
                    if removable {
                        let mut q = parts.to_vec();
                        q[i] -= 1;
                        total += sym_dim(&sig(&q)).unwrap();
                    }
                }
                assert_eq!(total, sym_dim(&p).unwrap());
            }
        }
    }

    #[test]
    fn enumerate_interlacing_examples() {
        assert_eq!(enumerate_interlacing(&sig(&[1])), vec![Signature::empty()]);
        assert_eq!(enumerate_interlacing(&sig(&[1, 0])), vec![sig(&[0]), sig(&[1])]);
        assert_eq!(
            enumerate_interlacing(&sig(&[2, 0])),
            vec![sig(&[0]), sig(&[1]), sig(&[2])]
        );
        let nu = sig(&[4, 2, 2, -1]);
        assert_eq!(enumerate_interlacing(&nu).len(), 12);
    }

    #[test]
    fn partition_counts() {
        // p(n) for n = 0..10
        let p = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &want) in p.iter().enumerate() {
            assert_eq!(partitions(n as u32, n.max(1)).len(), want);
        }
        assert_eq!(partitions(5, 2).len(), 3);
        assert_eq!(partitions(0, 0), vec![Signature::empty()]);
    }

    #[test]
    fn gt_path_validation() {
        let ok = GtPath::new(vec![Signature::empty(), sig(&[1]), sig(&[2, 0])]).unwrap();
        assert_eq!(ok.top(), Some(&sig(&[2, 0])));
        assert!(GtPath::new(vec![Signature::empty(), sig(&[3]), sig(&[2, 0])]).is_err());
        assert!(GtPath::new(vec![sig(&[1])]).is_err());
    }

    fn arb_signature(max_len: usize) -> impl Strategy<Value = Signature> {
        prop::collection::vec(-4i64..5, 1..=max_len).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Signature(v)
        })
    }

    proptest! {
        #[test]
        fn interlacing_is_translation_invariant(nu in arb_signature(4), c in -5i64..5, pick in 0usize..64) {
            let mus = enumerate_interlacing(&nu);
            prop_assume!(!mus.is_empty());
            let mu = &mus[pick % mus.len()];
            prop_assert!(is_interlaced(mu, &nu).unwrap());
            prop_assert!(is_interlaced(&mu.shifted(c), &nu.shifted(c)).unwrap());
        }

        #[test]
        fn weyl_dim_is_translation_invariant(nu in arb_signature(5), c in -5i64..5) {
            prop_assert_eq!(weyl_dim(&nu), weyl_dim(&nu.shifted(c)));
        }
    }
}
