//! Gelfand invariants, their eigenvalues, and the expansion of shifted power
//! sums in terms of them.

use std::collections::{hash_map::Entry, BTreeSet, HashMap};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::algebra::{Generator, NcPolynomial, TPoly};
use super::state::{StateEvaluator, DEFAULT_DEGREE_BOUND};
use crate::error::{invalid, Error, Result};
use crate::gt::Signature;
use crate::hp::{ratio_to_hp, Hp};
use crate::linalg::solve_integer_system;
use crate::plancherel::{scaled_shifted_power_sum, shifted_power_sum};

/// Largest `|I|^k` for which [`gelfand_invariant`] expands the sum.
pub const TERM_BUDGET: usize = 1 << 20;

/// Largest order and level accepted by [`express_p_in_casimirs`].
pub const MAX_EXPANSION_ORDER: u32 = 4;
pub const MAX_EXPANSION_LEVEL: usize = 4;

/// Number of held-out signatures used to verify an expansion.
pub const HELD_OUT_COUNT: usize = 50;

const TRAINING_RANGE: i64 = 20;
const HELD_OUT_RANGE: i64 = 5;
const EXPANSION_SEED: u64 = 0x6361_7369_6d69_7273;

fn check_index_set(indices: &[u32]) -> Result<()> {
    if indices.is_empty() {
        return invalid("index set must be nonempty");
    }
    if indices.contains(&0) {
        return invalid("indices start at 1");
    }
    let distinct: BTreeSet<_> = indices.iter().collect();
    if distinct.len() != indices.len() {
        return invalid(format!("repeated index in {indices:?}"));
    }
    Ok(())
}

/// `C_{k,I} = Σ_{i_1..i_k ∈ I} E_{i_1 i_2} E_{i_2 i_3} ⋯ E_{i_k i_1}`.
pub fn gelfand_invariant(k: u32, indices: &[u32]) -> Result<NcPolynomial> {
    if k == 0 {
        return invalid("Gelfand invariants start at k = 1");
    }
    check_index_set(indices)?;
    let n = indices.len();
    let terms = u32::try_from(n)
        .ok()
        .and_then(|n| n.checked_pow(k))
        .map(|t| t as usize)
        .filter(|&t| t <= TERM_BUDGET);
    let Some(terms) = terms else {
        return Err(Error::ResourceLimit(format!(
            "C_{k} over {n} indices needs {n}^{k} terms, budget is {TERM_BUDGET}"
        )));
    };
    let k = k as usize;
    let mut out = NcPolynomial::zero();
    let mut digits = vec![0usize; k];
    for _ in 0..terms {
        let word = (0..k)
            .map(|p| Generator::new(indices[digits[p]], indices[digits[(p + 1) % k]]))
            .collect::<Result<Vec<_>>>()?;
        out.add_term(word, TPoly::one());
        for d in digits.iter_mut() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Scalar by which `C_{k,N}` acts on the irreducible representation with
/// highest weight `lam` (Perelomov–Popov):
/// `Σ_i l_i^k Π_{j≠i} (l_i − l_j − 1)/(l_i − l_j)` with `l_i = λ_i + N − i`.
pub fn casimir_eigenvalue(k: u32, lam: &Signature) -> BigRational {
    let n = lam.len() as i64;
    let l: Vec<BigInt> = lam
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| BigInt::from(p + n - 1 - i as i64))
        .collect();
    let mut total = BigRational::zero();
    for (i, li) in l.iter().enumerate() {
        let mut term = BigRational::from_integer(li.pow(k));
        for (j, lj) in l.iter().enumerate() {
            if i != j {
                let d = li - lj;
                term *= BigRational::new(&d - 1, d);
            }
        }
        total += term;
    }
    total
}

fn integer_eigenvalue(k: u32, lam: &Signature) -> Result<BigInt> {
    let v = casimir_eigenvalue(k, lam);
    if !v.is_integer() {
        return Err(Error::ComputationFailed(format!(
            "eigenvalue of C_{k} on {lam} is not an integer: {v}"
        )));
    }
    Ok(v.to_integer())
}

/// Monomials `C_{m_1} ⋯ C_{m_r}` of weighted degree `Σ m ≤ k`, as
/// nonincreasing lists of orders. Ordered by degree, then by number of
/// factors, then lexicographically descending.
pub fn casimir_monomials(k: u32) -> Vec<Vec<u32>> {
    fn parts_of(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=max.min(n)).rev() {
            prefix.push(p);
            parts_of(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    for d in 0..=k {
        let mut level = Vec::new();
        parts_of(d, d, &mut Vec::new(), &mut level);
        level.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)));
        all.extend(level);
    }
    all
}

/// `p_k = Σ_α c_α Π_j C_j^{α_j}` on all signatures of length `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CasimirExpansion {
    pub k: u32,
    pub n: usize,
    pub monomials: Vec<Vec<u32>>,
    pub coeffs: Vec<BigRational>,
    /// Rank of the interpolation system; below `monomials.len()` when the
    /// Casimirs are algebraically dependent at this level.
    pub rank: usize,
    pub held_out: usize,
}

impl CasimirExpansion {
    /// Evaluates the expansion on a signature through the eigenvalues.
    pub fn eval(&self, lam: &Signature) -> BigRational {
        let eig: Vec<BigRational> = (1..=self.k).map(|j| casimir_eigenvalue(j, lam)).collect();
        self.monomials
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| m.iter().fold(c.clone(), |acc, &j| acc * &eig[j as usize - 1]))
            .sum()
    }

    /// The central element of `U(gl(I))` acting by `p_k`, `|I| = N`.
    pub fn realize(&self, indices: &[u32]) -> Result<NcPolynomial> {
        if indices.len() != self.n {
            return invalid(format!(
                "expansion is for level {} but the index set has {} elements",
                self.n,
                indices.len()
            ));
        }
        let mut invariants: HashMap<u32, NcPolynomial> = HashMap::new();
        let mut out = NcPolynomial::zero();
        for (m, c) in self.monomials.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut term = NcPolynomial::scalar(TPoly::constant(c.clone()));
            for &j in m {
                if let Entry::Vacant(e) = invariants.entry(j) {
                    e.insert(gelfand_invariant(j, indices)?);
                }
                term = &term * &invariants[&j];
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

fn random_signature(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Signature {
    let mut parts: Vec<i64> = (0..n).map(|_| rng.random_range(-range..=range)).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Signature::new(parts).expect("sorted parts")
}

fn all_signatures_in_box(n: usize, range: i64) -> Vec<Signature> {
    fn rec(n: usize, hi: i64, lo: i64, prefix: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if prefix.len() == n {
            out.push(Signature::new(prefix.clone()).expect("decreasing"));
            return;
        }
        for v in (lo..=hi).rev() {
            prefix.push(v);
            rec(n, v, lo, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, range, -range, &mut Vec::new(), &mut out);
    out
}

fn held_out_signatures(rng: &mut ChaCha8Rng, n: usize) -> Vec<Signature> {
    let total = all_signatures_in_box(n, HELD_OUT_RANGE);
    if total.len() <= HELD_OUT_COUNT {
        return total;
    }
    let mut chosen = BTreeSet::new();
    while chosen.len() < HELD_OUT_COUNT {
        chosen.insert(random_signature(rng, n, HELD_OUT_RANGE).parts().to_vec());
    }
    chosen
        .into_iter()
        .map(|p| Signature::new(p).expect("sorted"))
        .collect()
}

fn compute_expansion(k: u32, n: usize) -> Result<CasimirExpansion> {
    let monomials = casimir_monomials(k);
    let mut rng = ChaCha8Rng::seed_from_u64(EXPANSION_SEED ^ (u64::from(k) << 8) ^ n as u64);
    let held_out = held_out_signatures(&mut rng, n);
    let excluded: BTreeSet<Vec<i64>> = held_out.iter().map(|s| s.parts().to_vec()).collect();

    let wanted = 2 * monomials.len();
    let mut training: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut attempts = 0usize;
    while training.len() < wanted {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::ComputationFailed(format!(
                "could not draw {wanted} distinct training signatures of length {n}"
            )));
        }
        let s = random_signature(&mut rng, n, TRAINING_RANGE);
        if !excluded.contains(s.parts()) {
            training.insert(s.parts().to_vec());
        }
    }

    let mut a = Vec::with_capacity(wanted);
    let mut b = Vec::with_capacity(wanted);
    for parts in &training {
        let lam = Signature::new(parts.clone())?;
        let eig = (1..=k)
            .map(|j| integer_eigenvalue(j, &lam))
            .collect::<Result<Vec<_>>>()?;
        a.push(
            monomials
                .iter()
                .map(|m| m.iter().fold(BigInt::one(), |acc, &j| acc * &eig[j as usize - 1]))
                .collect(),
        );
        b.push(BigInt::from(scaled_shifted_power_sum(k, parts)));
    }
    let sol = solve_integer_system(&a, &b)?;
    let scale = BigRational::from_integer(BigInt::one() << k);
    let coeffs = sol.x.iter().map(|c| c / &scale).collect();
    let expansion = CasimirExpansion {
        k,
        n,
        monomials,
        coeffs,
        rank: sol.rank,
        held_out: held_out.len(),
    };
    for lam in &held_out {
        let got = expansion.eval(lam);
        let want = shifted_power_sum(k, lam);
        if got != want {
            return Err(Error::ComputationFailed(format!(
                "p_{k} expansion at level {n} fails on held-out {lam}: \
                 expansion gives {got}, direct value {want} (residual {})",
                &got - &want
            )));
        }
    }
    Ok(expansion)
}

/// Exact expansion of the shifted power sum `p_k` on signatures of length
/// `n` as a polynomial in Casimir eigenvalues. Results are memoized.
pub fn express_p_in_casimirs(k: u32, n: usize) -> Result<CasimirExpansion> {
    if k == 0 || k > MAX_EXPANSION_ORDER {
        return invalid(format!("order {k} outside 1..={MAX_EXPANSION_ORDER}"));
    }
    if n == 0 || n > MAX_EXPANSION_LEVEL {
        return invalid(format!("level {n} outside 1..={MAX_EXPANSION_LEVEL}"));
    }
    static CACHE: OnceLock<RwLock<HashMap<(u32, usize), CasimirExpansion>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.read().ok().and_then(|c| c.get(&(k, n)).cloned()) {
        return Ok(hit);
    }
    let fresh = compute_expansion(k, n)?;
    if let Ok(mut c) = cache.write() {
        c.entry((k, n)).or_insert_with(|| fresh.clone());
    }
    Ok(fresh)
}

/// The element realizing `p_{k,I}` in `U(gl(I))`.
pub fn shifted_power_element(k: u32, indices: &[u32]) -> Result<NcPolynomial> {
    check_index_set(indices)?;
    express_p_in_casimirs(k, indices.len())?.realize(indices)
}

/// One factor `(k_r, I_r)` of an ordered product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumFactor {
    pub k: u32,
    pub indices: Vec<u32>,
}

impl PowerSumFactor {
    pub fn new(k: u32, indices: Vec<u32>) -> Self {
        Self { k, indices }
    }
}

/// `⟨Π_r (P_r − ⟨P_r⟩)⟩` as a polynomial in `t`, before the `L^{−Σk}`
/// scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedState {
    pub poly: TPoly,
    pub total_order: u32,
}

impl OrderedState {
    /// Exact value at `t = γL`, scaled by `L^{−Σk}`.
    pub fn exact_at(&self, l: u64, gamma: &BigRational) -> Result<BigRational> {
        if l == 0 {
            return invalid("L must be positive");
        }
        if !gamma.is_positive() {
            return invalid("gamma must be positive");
        }
        let big_l = BigRational::from_integer(BigInt::from(l));
        let t = gamma * &big_l;
        Ok(self.poly.eval(&t) / big_l.pow(self.total_order as i32))
    }

    pub fn at(&self, l: u64, gamma: f64) -> Result<Hp> {
        let g = BigRational::from_float(gamma)
            .ok_or_else(|| Error::InvalidArgument(format!("gamma {gamma} is not finite")))?;
        Ok(ratio_to_hp(&self.exact_at(l, &g)?))
    }
}

/// Symbolic ordered centered state of `Π_r P_r`, the product taken in the
/// given order.
pub fn ordered_centered_polynomial(
    factors: &[PowerSumFactor],
    evaluator: &StateEvaluator,
) -> Result<OrderedState> {
    let total_order: u32 = factors.iter().map(|f| f.k).sum();
    if total_order as usize > evaluator.degree_bound() {
        return Err(Error::ResourceLimit(format!(
            "total order {total_order} exceeds the state degree bound {}",
            evaluator.degree_bound()
        )));
    }
    let mut product = NcPolynomial::one();
    for f in factors {
        let p = shifted_power_element(f.k, &f.indices)?;
        let mean = evaluator.eval(&p)?.poly_in_t;
        let centered = &p - &NcPolynomial::scalar(mean);
        product = &product * &centered;
    }
    Ok(OrderedState {
        poly: evaluator.eval(&product)?.poly_in_t,
        total_order,
    })
}

/// `⟨Π_r L^{−k_r}(P_r − ⟨P_r⟩)⟩` at `t = γL`.
pub fn ordered_centered_state(factors: &[PowerSumFactor], l: u64, gamma: f64) -> Result<Hp> {
    let total: u32 = factors.iter().map(|f| f.k).sum();
    let evaluator = StateEvaluator::new(DEFAULT_DEGREE_BOUND.max(total as usize));
    ordered_centered_polynomial(factors, &evaluator)?.at(l, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uea::state::state_eval;

    fn sig(p: &[i64]) -> Signature {
        Signature::new(p.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn invariant_expansions() {
        let c1 = gelfand_invariant(1, &[1, 2, 3]).unwrap();
        assert_eq!(c1.len(), 3);
        let c2 = gelfand_invariant(2, &[1, 2]).unwrap();
        let mut want = NcPolynomial::zero();
        for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            want.add_term(
                vec![Generator::new(a, b).unwrap(), Generator::new(b, a).unwrap()],
                TPoly::one(),
            );
        }
        assert_eq!(c2, want);
        assert!(matches!(
            gelfand_invariant(21, &[1, 2]),
            Err(Error::ResourceLimit(_))
        ));
        assert!(gelfand_invariant(1, &[1, 1]).is_err());
    }

    #[test]
    fn first_invariant_state_is_t_times_size() {
        for n in 1..=4u32 {
            let idx: Vec<u32> = (1..=n).collect();
            let v = state_eval(&gelfand_invariant(1, &idx).unwrap()).unwrap();
            assert_eq!(v.poly_in_t, TPoly::from_integers(&[0, n as i128]));
        }
    }

    #[test]
    fn eigenvalue_examples() {
        for m in -3..=5i64 {
            for k in 1..=4u32 {
                assert_eq!(
                    casimir_eigenvalue(k, &sig(&[m])),
                    BigRational::from_integer(BigInt::from(m).pow(k))
                );
            }
        }
        assert_eq!(casimir_eigenvalue(1, &sig(&[3, 1, -2])), q(2, 1));
        assert_eq!(casimir_eigenvalue(2, &sig(&[1, 0])), q(2, 1));
        for lam in [sig(&[2, 1]), sig(&[3, 0, -1]), sig(&[0, 0])] {
            let n = lam.len() as i64;
            let direct: i64 = lam
                .parts()
                .iter()
                .enumerate()
                .map(|(i, &l)| l * (l + n + 1 - 2 * (i as i64 + 1)))
                .sum();
            assert_eq!(casimir_eigenvalue(2, &lam), q(direct, 1));
        }
    }

    #[test]
    fn monomial_order() {
        let m = casimir_monomials(4);
        assert_eq!(m.len(), 12);
        assert_eq!(m[0], Vec::<u32>::new());
        assert_eq!(m[1], vec![1]);
        assert_eq!(m[2], vec![2]);
        assert_eq!(m[3], vec![1, 1]);
        assert_eq!(&m[7..], &[vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn low_order_expansions() {
        let e1 = express_p_in_casimirs(1, 3).unwrap();
        assert_eq!(e1.coeffs, vec![q(0, 1), q(1, 1)]);

        let e2 = express_p_in_casimirs(2, 1).unwrap();
        assert_eq!(e2.coeffs, vec![q(0, 1), q(-1, 1), q(1, 1), q(0, 1)]);
        assert_eq!(e2.rank, 3);
        assert_eq!(e2.held_out, 11);
        for m in 0..=5 {
            assert_eq!(e2.eval(&sig(&[m])), q(m * m - m, 1));
        }
    }

    #[test]
    fn expansions_exist_up_to_order_four() {
        for k in 1..=MAX_EXPANSION_ORDER {
            for n in 1..=MAX_EXPANSION_LEVEL {
                let e = express_p_in_casimirs(k, n).unwrap();
                assert!(e.held_out >= 11);
            }
        }
        assert!(express_p_in_casimirs(5, 2).is_err());
        assert!(express_p_in_casimirs(2, 5).is_err());
    }

    #[test]
    fn ordered_state_examples() {
        let one = |i: Vec<u32>| PowerSumFactor::new(1, i);
        let single = ordered_centered_state(&[one(vec![1])], 10, 1.0).unwrap();
        assert_eq!(single.hi(), 0.0);

        let st = ordered_centered_polynomial(&[one(vec![1]), one(vec![1])], &StateEvaluator::default()).unwrap();
        // L^{-2} Var(Poisson(γL)) = γ/L
        for (l, g) in [(4u64, q(1, 1)), (10, q(3, 2))] {
            assert_eq!(st.exact_at(l, &g).unwrap(), g / BigRational::from_integer(l.into()));
        }

        let ev = StateEvaluator::default();
        let a = PowerSumFactor::new(2, vec![1]);
        let b = PowerSumFactor::new(2, vec![1, 2]);
        let ab = ordered_centered_polynomial(&[a.clone(), b.clone()], &ev).unwrap();
        let ba = ordered_centered_polynomial(&[b, a], &ev).unwrap();
        assert_eq!(ab, ba);
        assert!(!ab.poly.is_zero());
    }
}
