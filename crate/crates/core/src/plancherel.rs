//! The level-`N` measure of the one-sided Plancherel character,
//!
//! ```text
//! P(λ) = e^{-tN} t^{|λ|} / |λ|! · dim λ · Dim_N λ      (λ a partition, ≤ N rows)
//! ```
//!
//! where `dim λ` counts standard Young tableaux and `Dim_N λ` is the Weyl
//! dimension. Since `Σ_{|λ|=n} dim λ · Dim_N λ = N^n`, the size `|λ|` is
//! Poisson with mean `tN`, and every weight factors as a Poisson weight times
//! the exact rational `dim λ · Dim_N λ / N^n`. All sums below are carried out
//! exactly in rationals; `e^{-tN}` is applied once at the end in double-double.
//!
//! Coherency between levels is
//! `M_N(λ) = Σ_{ν ≻ λ} M_{N+1}(ν) · Dim_N(λ) / Dim_{N+1}(ν)`; the denominator
//! is the dimension at level `N+1`, the level `ν` lives on.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gt::{enumerate_interlacing, partitions, sym_dim, weyl_dim, Signature};
use crate::hp::{self, exp_neg, poisson_numerator, ratio_to_hp, Hp};

/// Largest Poisson truncation point that [`enumerate_support`] accepts.
pub const MAX_TRUNCATION: u32 = 40;

/// Truncation bound below which [`coherency_check`] certifies agreement.
pub const COHERENCY_CERTIFY_BOUND: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PlancherelParams {
    t: BigRational,
    n: usize,
    tail_epsilon: f64,
}

impl PlancherelParams {
    pub fn new(t: BigRational, n: usize, tail_epsilon: f64) -> Result<Self> {
        if !t.is_positive() {
            return invalid(format!("t must be positive, got {t}"));
        }
        if n == 0 {
            return invalid("level N must be at least 1");
        }
        if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
            return invalid(format!("tail_epsilon must lie in (0,1), got {tail_epsilon}"));
        }
        Ok(Self { t, n, tail_epsilon })
    }

    pub fn t(&self) -> &BigRational {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tail_epsilon(&self) -> f64 {
        self.tail_epsilon
    }

    /// Poisson mean `tN` of `|λ|`.
    pub fn mean_size(&self) -> BigRational {
        &self.t * BigInt::from(self.n)
    }

    /// Same `t` and tolerance at another level.
    pub fn at_level(&self, n: usize) -> Result<Self> {
        Self::new(self.t.clone(), n, self.tail_epsilon)
    }
}

/// A weight split as `poisson_factor × rational_part`.
#[derive(Clone, Debug)]
pub struct Weight {
    /// `e^{-tN} (tN)^n / n!`
    pub poisson_factor: Hp,
    /// `dim λ · Dim_N λ / N^n`
    pub rational_part: BigRational,
}

impl Weight {
    pub fn value(&self) -> Hp {
        self.poisson_factor * ratio_to_hp(&self.rational_part)
    }
}

/// `dim λ · Dim_N λ / N^n` for a partition padded to length `N`.
fn rational_part(lam: &Signature, n_level: usize) -> BigRational {
    let size = lam.size() as u32;
    let dims = BigInt::from(sym_dim(lam).expect("nonnegative") * weyl_dim(lam));
    BigRational::new(dims, BigInt::from(n_level).pow(size))
}

/// Weight of `lam` under the level-`N` measure. Signatures shorter than `N`
/// are padded with zeros; signatures with a negative part get weight zero.
pub fn weight(lam: &Signature, params: &PlancherelParams) -> Result<Weight> {
    if lam.len() > params.n {
        return invalid(format!("{lam} is longer than N = {}", params.n));
    }
    let mu = params.mean_size();
    if !lam.is_nonnegative() {
        return Ok(Weight {
            poisson_factor: hp::hp(0.0),
            rational_part: BigRational::zero(),
        });
    }
    let lam = lam.padded(params.n)?;
    let size = lam.size() as usize;
    let poisson_factor = exp_neg(&mu) * ratio_to_hp(&poisson_numerator(&mu, size));
    Ok(Weight {
        poisson_factor,
        rational_part: rational_part(&lam, params.n),
    })
}

/// Chernoff bound `P(X ≥ a) ≤ e^{-μ} (eμ/a)^a` for `X ~ Poisson(μ)`, `a > μ`.
pub fn poisson_tail_bound(mu: f64, a: u32) -> f64 {
    let a = a as f64;
    if a <= mu {
        return 1.0;
    }
    (-mu + a * (1.0 + (mu / a).ln())).exp().min(1.0)
}

/// Smallest `n` with `P(X > n) < eps` according to [`poisson_tail_bound`].
pub fn truncation_point(mu: f64, eps: f64) -> u32 {
    let mut n = mu.ceil() as u32;
    while poisson_tail_bound(mu, n + 1) >= eps {
        n += 1;
    }
    n
}

/// Bound on `Σ_{n > n_max} C (1+n)^d P(X = n)` for `X ~ Poisson(μ)`.
///
/// Consecutive terms have ratio `((n+2)/(n+1))^d μ/(n+1)`, which decreases in
/// `n`; once it is below one the tail is dominated by a geometric series.
pub fn weighted_poisson_tail(mu: f64, n_max: u32, growth: &GrowthBound) -> f64 {
    let d = growth.degree as i32;
    let mut n = n_max + 1;
    let log_pmf = |k: u32| -> f64 {
        let k_f = k as f64;
        -mu + k_f * mu.ln() - ln_factorial(k)
    };
    let mut acc = 0.0;
    // walk forward until the ratio drops below 1/2
    loop {
        let term = growth.constant * (1.0 + n as f64).powi(d) * log_pmf(n).exp();
        let ratio = ((n as f64 + 2.0) / (n as f64 + 1.0)).powi(d) * mu / (n as f64 + 1.0);
        if ratio <= 0.5 {
            acc += term / (1.0 - ratio);
            break;
        }
        acc += term;
        n += 1;
    }
    acc
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Caller-declared bound `|f(λ)| ≤ constant · (1 + |λ|)^degree`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBound {
    pub constant: f64,
    pub degree: u32,
}

impl GrowthBound {
    pub fn new(constant: f64, degree: u32) -> Self {
        Self { constant, degree }
    }

    pub fn holds_for(&self, value: f64, size: i64) -> bool {
        value.abs() <= self.constant * (1.0 + size as f64).powi(self.degree as i32)
    }
}

/// A truncated expectation with a rigorous bound on the neglected tail.
#[derive(Clone, Copy, Debug)]
pub struct MomentEstimate {
    pub value: Hp,
    pub tail_bound: f64,
}

impl MomentEstimate {
    pub fn to_f64(&self) -> f64 {
        self.value.hi() + self.value.lo()
    }
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub signature: Signature,
    pub rational_part: BigRational,
}

/// All partitions with `|λ| ≤ n_max` and at most `N` rows, with weights.
#[derive(Clone, Debug)]
pub struct MeasureTable {
    params: PlancherelParams,
    n_max: u32,
    exp_neg_mean: Hp,
    /// `(tN)^n / n!` for `n = 0..=n_max`.
    poisson_numerators: Vec<BigRational>,
    entries: Vec<TableEntry>,
    covered_mass: f64,
    tail_bound: f64,
}

impl MeasureTable {
    pub fn params(&self) -> &PlancherelParams {
        &self.params
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// Total weight of the table, computed in double-double.
    pub fn covered_mass(&self) -> f64 {
        self.covered_mass
    }

    /// Chernoff bound on the Poisson mass beyond `n_max`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn poisson_factor(&self, size: usize) -> Hp {
        self.exp_neg_mean * ratio_to_hp(&self.poisson_numerators[size])
    }

    pub fn weight_of(&self, entry: &TableEntry) -> Hp {
        let size = entry.signature.size() as usize;
        self.poisson_factor(size) * ratio_to_hp(&entry.rational_part)
    }

    /// Exact weight of an entry divided by `e^{-tN}`.
    fn scaled_weight(&self, entry: &TableEntry) -> BigRational {
        let size = entry.signature.size() as usize;
        &self.poisson_numerators[size] * &entry.rational_part
    }

    pub fn lookup(&self, lam: &Signature) -> Option<&TableEntry> {
        self.entries.iter().find(|e| &e.signature == lam)
    }

    /// `E f` over the table plus a tail bound derived from `growth`.
    pub fn expectation<F>(&self, f: F, growth: Option<&GrowthBound>) -> Result<MomentEstimate>
    where
        F: Fn(&Signature) -> BigRational,
    {
        let growth = growth.ok_or_else(|| {
            Error::InvalidArgument("a growth bound is required to bound the truncated tail".into())
        })?;
        let mut acc = BigRational::zero();
        for e in &self.entries {
            let v = f(&e.signature);
            if !v.is_zero() {
                acc += v * self.scaled_weight(e);
            }
        }
        let mu = self.params.mean_size().to_f64().unwrap_or(f64::INFINITY);
        Ok(MomentEstimate {
            value: self.exp_neg_mean * ratio_to_hp(&acc),
            tail_bound: weighted_poisson_tail(mu, self.n_max, growth),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MeasureTableJson::from(self)).expect("table serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: MeasureTableJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidArgument(format!("malformed measure table: {e}")))?;
        raw.try_into()
    }
}

/// Builds the truncated support table. Fails when the truncation point
/// needed for `tail_epsilon` exceeds [`MAX_TRUNCATION`].
pub fn enumerate_support(params: &PlancherelParams) -> Result<MeasureTable> {
    let mu = params.mean_size();
    let mu_f = mu.to_f64().unwrap_or(f64::INFINITY);
    let n_max = truncation_point(mu_f, params.tail_epsilon);
    if n_max > MAX_TRUNCATION {
        return Err(Error::ResourceLimit(format!(
            "truncation point {n_max} exceeds the bound n_max <= {MAX_TRUNCATION} (tN = {mu_f})"
        )));
    }
    build_table(params, n_max)
}

fn build_table(params: &PlancherelParams, n_max: u32) -> Result<MeasureTable> {
    let mu = params.mean_size();
    let mu_f = mu.to_f64().unwrap_or(f64::INFINITY);
    let exp_neg_mean = exp_neg(&mu);
    let poisson_numerators: Vec<BigRational> =
        (0..=n_max as usize).map(|n| poisson_numerator(&mu, n)).collect();
    let mut entries = Vec::new();
    let mut scaled_total = BigRational::zero();
    for n in 0..=n_max {
        for lam in partitions(n, params.n) {
            let rp = rational_part(&lam, params.n);
            scaled_total += &poisson_numerators[n as usize] * &rp;
            entries.push(TableEntry {
                signature: lam,
                rational_part: rp,
            });
        }
    }
    let covered = exp_neg_mean * ratio_to_hp(&scaled_total);
    Ok(MeasureTable {
        params: params.clone(),
        n_max,
        exp_neg_mean,
        poisson_numerators,
        entries,
        covered_mass: covered.hi() + covered.lo(),
        tail_bound: poisson_tail_bound(mu_f, n_max + 1),
    })
}

/// Both sides of the coherency relation at one signature.
#[derive(Clone, Debug)]
pub struct CoherencyCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Upper bound on the mass of the level-`N+1` terms left out of `rhs`.
    pub truncation_bound: f64,
    /// `false` when the truncation bound is too large to certify agreement
    /// at [`COHERENCY_CERTIFY_BOUND`].
    pub certified: bool,
}

/// Evaluates `M_N(λ)` and `Σ_{ν ≻ λ} M_{N+1}(ν) Dim_N(λ)/Dim_{N+1}(ν)` at
/// parameter `t`, where `N = lam.len()` (`N = 0` is allowed: `M_0(∅) = 1`).
pub fn coherency_check(t: &BigRational, tail_epsilon: f64, lam: &Signature) -> Result<CoherencyCheck> {
    if !t.is_positive() {
        return invalid("t must be positive");
    }
    if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
        return invalid("tail_epsilon must lie in (0,1)");
    }
    let n = lam.len();
    let lhs = if lam.is_nonnegative() {
        let w = level_weight(t, n, lam);
        w.hi() + w.lo()
    } else {
        0.0
    };
    if !lam.is_nonnegative() {
        // ν ≻ λ forces ν_{N+1} ≤ λ_N < 0, so every term vanishes.
        return Ok(CoherencyCheck {
            lhs,
            rhs: 0.0,
            truncation_bound: 0.0,
            certified: true,
        });
    }
    let mu_up = t * BigInt::from(n + 1);
    let mu_up_f = mu_up.to_f64().unwrap_or(f64::INFINITY);
    let cutoff = truncation_point(mu_up_f, tail_epsilon).max(lam.size() as u32);
    let dim_lam = BigRational::from_integer(BigInt::from(weyl_dim(lam)));
    let mut acc = BigRational::zero();
    for nu in covering_signatures(lam, cutoff as i64) {
        let size = nu.size() as usize;
        // M_{N+1}(ν) / Dim_{N+1}(ν) = e^{-t(N+1)} t^n/n! dim ν
        let term = poisson_numerator(t, size)
            * BigRational::from_integer(BigInt::from(sym_dim(&nu)?))
            * &dim_lam;
        acc += term;
    }
    let rhs = exp_neg(&mu_up) * ratio_to_hp(&acc);
    let truncation_bound = poisson_tail_bound(mu_up_f, cutoff + 1);
    Ok(CoherencyCheck {
        lhs,
        rhs: rhs.hi() + rhs.lo(),
        truncation_bound,
        certified: truncation_bound <= COHERENCY_CERTIFY_BOUND,
    })
}

/// Level-`N` weight of a partition, including `N = 0` where `M_0(∅) = 1`.
fn level_weight(t: &BigRational, n: usize, lam: &Signature) -> Hp {
    let mu = t * BigInt::from(n);
    let size = lam.size() as usize;
    exp_neg(&mu) * ratio_to_hp(&(poisson_numerator(t, size) * dims_product(lam)))
}

fn dims_product(lam: &Signature) -> BigRational {
    BigRational::from_integer(BigInt::from(sym_dim(lam).expect("nonnegative") * weyl_dim(lam)))
}

/// Nonnegative `ν` of length `N+1` with `λ ≺ ν` and `|ν| ≤ cutoff`.
fn covering_signatures(lam: &Signature, cutoff: i64) -> Vec<Signature> {
    let l = lam.parts();
    let n = l.len();
    let mut out = Vec::new();
    // ν_1 ∈ [λ_1, ∞), ν_i ∈ [λ_i, λ_{i-1}] for 2 ≤ i ≤ N, ν_{N+1} ∈ [0, λ_N]
    let mut cur = vec![0i64; n + 1];
    fn rec(i: usize, l: &[i64], cur: &mut Vec<i64>, used: i64, cutoff: i64, out: &mut Vec<Signature>) {
        let n = l.len();
        if i == n + 1 {
            out.push(Signature::new(cur.clone()).expect("interlacing cover is decreasing"));
            return;
        }
        let (lo, hi) = if n == 0 {
            (0, cutoff - used)
        } else if i == 0 {
            (l[0], cutoff - used)
        } else if i == n {
            (0, l[n - 1])
        } else {
            (l[i], l[i - 1])
        };
        for v in lo..=hi {
            if used + v > cutoff {
                break;
            }
            cur[i] = v;
            rec(i + 1, l, cur, used + v, cutoff, out);
        }
    }
    rec(0, l, &mut cur, 0, cutoff, &mut out);
    out
}

/// Shifted power sum `Σ_i ((λ_i − i + 1/2)^k − (−i + 1/2)^k)`.
pub fn shifted_power_sum(k: u32, lam: &Signature) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut acc = BigRational::zero();
    for (idx, &p) in lam.parts().iter().enumerate() {
        let i = BigRational::from_integer(BigInt::from(idx as i64 + 1));
        let base = &half - &i;
        let shifted = BigRational::from_integer(BigInt::from(p)) + &base;
        acc += num_traits::pow(shifted, k as usize) - num_traits::pow(base, k as usize);
    }
    acc
}

/// `2^k · p_k(λ)`, which is an integer; the fast path used by the sampler.
pub fn scaled_shifted_power_sum(k: u32, parts: &[i64]) -> i128 {
    parts
        .iter()
        .enumerate()
        .map(|(idx, &p)| {
            let base = 1 - 2 * (idx as i128 + 1);
            (base + 2 * p as i128).pow(k) - base.pow(k)
        })
        .sum()
}

/// `E f` under the level-`N` measure; see [`MeasureTable::expectation`].
pub fn exact_moment<F>(f: F, params: &PlancherelParams, growth: Option<&GrowthBound>) -> Result<MomentEstimate>
where
    F: Fn(&Signature) -> BigRational,
{
    if growth.is_none() {
        return invalid("a growth bound is required to bound the truncated tail");
    }
    enumerate_support(params)?.expectation(f, growth)
}

/// Law of `λ^(K)` given `λ^(N) = ν` under the central (uniform-path) measure:
/// `P(μ | ν) = Dim_K(μ) · #paths(μ, ν) / Dim_N(ν)`.
pub fn conditional_law(nu: &Signature, k: usize) -> Result<Vec<(Signature, BigRational)>> {
    if k > nu.len() {
        return invalid(format!("level {k} lies above {nu}"));
    }
    // number of paths from each level-j signature up to ν, by dynamic programming
    let mut layer: HashMap<Signature, BigUint> = HashMap::from([(nu.clone(), BigUint::one())]);
    for _ in k..nu.len() {
        let mut next: HashMap<Signature, BigUint> = HashMap::new();
        for (s, c) in &layer {
            for mu in enumerate_interlacing(s) {
                *next.entry(mu).or_default() += c;
            }
        }
        layer = next;
    }
    let dim_nu = BigInt::from(weyl_dim(nu));
    let mut out: Vec<(Signature, BigRational)> = layer
        .into_iter()
        .map(|(mu, paths)| {
            let p = BigRational::new(BigInt::from(weyl_dim(&mu) * paths), dim_nu.clone());
            (mu, p)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// `E[f_K(λ^(K)) · f_N(λ^(N))]` along a random path; `params` is the level-`N`
/// measure and `growth` bounds `|f_K · f_N|` in terms of `|λ^(N)|`.
pub fn nested_joint_moment<FK, FN>(
    k: usize,
    f_k: FK,
    f_n: FN,
    params: &PlancherelParams,
    growth: Option<&GrowthBound>,
) -> Result<MomentEstimate>
where
    FK: Fn(&Signature) -> BigRational,
    FN: Fn(&Signature) -> BigRational,
{
    if k >= params.n {
        return invalid(format!("nested moment needs K < N, got K = {k}, N = {}", params.n));
    }
    let table = enumerate_support(params)?;
    table.expectation(
        |nu| {
            let outer = f_n(nu);
            if outer.is_zero() {
                return outer;
            }
            let inner: BigRational = conditional_law(nu, k)
                .expect("k below level")
                .into_iter()
                .map(|(mu, p)| f_k(&mu) * p)
                .sum();
            outer * inner
        },
        growth,
    )
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    t: String,
    n: usize,
    tail_epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    signature: Vec<i64>,
    /// `[poisson_factor as decimal, rational_part as "p/q"]`
    weight: [String; 2],
}

#[derive(Serialize, Deserialize)]
struct MeasureTableJson {
    params: ParamsJson,
    n_max: u32,
    covered_mass: f64,
    tail_bound: f64,
    entries: Vec<EntryJson>,
}

impl From<&MeasureTable> for MeasureTableJson {
    fn from(t: &MeasureTable) -> Self {
        Self {
            params: ParamsJson {
                t: hp::ratio_to_string(&t.params.t),
                n: t.params.n,
                tail_epsilon: t.params.tail_epsilon,
            },
            n_max: t.n_max,
            covered_mass: t.covered_mass,
            tail_bound: t.tail_bound,
            entries: t
                .entries
                .iter()
                .map(|e| EntryJson {
                    signature: e.signature.parts().to_vec(),
                    weight: [
                        hp::hp_to_decimal(t.poisson_factor(e.signature.size() as usize)),
                        hp::ratio_to_string(&e.rational_part),
                    ],
                })
                .collect(),
        }
    }
}

impl TryFrom<MeasureTableJson> for MeasureTable {
    type Error = Error;

    fn try_from(raw: MeasureTableJson) -> Result<Self> {
        let params = PlancherelParams::new(hp::ratio_from_str(&raw.params.t)?, raw.params.n, raw.params.tail_epsilon)?;
        let table = build_table(&params, raw.n_max)?;
        if table.entries.len() != raw.entries.len() {
            return invalid("entry count does not match the parameters");
        }
        for (e, r) in table.entries.iter().zip(&raw.entries) {
            let sig = Signature::new(r.signature.clone())?;
            if sig != e.signature || hp::ratio_from_str(&r.weight[1])? != e.rational_part {
                return invalid(format!("entry {sig} does not match the recomputed table"));
            }
            let pf = hp::hp_from_decimal(&r.weight[0])?;
            let want = table.poisson_factor(e.signature.size() as usize);
            if ((pf - want) / want).hi().abs() > 1e-30 {
                return invalid(format!("poisson factor of {sig} does not match"));
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sig(p: &[i64]) -> Signature {
        Signature::new(p.to_vec()).unwrap()
    }

    fn f64_of(x: Hp) -> f64 {
        x.hi() + x.lo()
    }

    #[test]
    fn params_validation() {
        assert!(PlancherelParams::new(q(0, 1), 1, 1e-12).is_err());
        assert!(PlancherelParams::new(q(1, 2), 0, 1e-12).is_err());
        assert!(PlancherelParams::new(q(1, 2), 1, 1.0).is_err());
        assert!(PlancherelParams::new(q(1, 2), 1, 0.0).is_err());
    }

    #[test]
    fn weight_examples() {
        let t = 0.3f64;
        let p = PlancherelParams::new(q(3, 10), 2, 1e-12).unwrap();
        let w0 = weight(&Signature::empty(), &p).unwrap();
        assert!((f64_of(w0.value()) - (-2.0 * t).exp()).abs() < 1e-15);
        let w1 = weight(&sig(&[1]), &p).unwrap();
        assert_eq!(w1.rational_part, BigRational::one());
        assert!((f64_of(w1.value()) - 2.0 * t * (-2.0 * t).exp()).abs() < 1e-15);
        let w11 = weight(&sig(&[1, 1]), &p).unwrap();
        assert!((f64_of(w11.value()) - t * t / 2.0 * (-2.0 * t).exp()).abs() < 1e-15);
        let neg = weight(&sig(&[1, -1]), &p).unwrap();
        assert!(neg.rational_part.is_zero());
        assert!(weight(&sig(&[1, 1, 1]), &p).is_err());
    }

    #[test]
    fn single_row_table_is_poisson() {
        let p = PlancherelParams::new(q(1, 10), 1, 1e-12).unwrap();
        let table = enumerate_support(&p).unwrap();
        assert_eq!(table.entries().len() as u32, table.n_max() + 1);
        for (n, e) in table.entries().iter().enumerate() {
            assert_eq!(e.signature, sig(&[n as i64]));
            let want = (-0.1f64).exp() * 0.1f64.powi(n as i32) / (1..=n).product::<usize>().max(1) as f64;
            let got = f64_of(table.weight_of(e));
            assert!((got - want).abs() <= 1e-15 * want.max(1e-300), "n={n}: {got} vs {want}");
        }
        assert!(table.covered_mass() >= 1.0 - 1e-12);
    }

    #[test]
    fn rational_mass_per_level_is_one() {
        // Σ_{|λ|=n} dim λ · Dim_N λ = N^n
        for n_level in 1..=3usize {
            for size in 0..=8u32 {
                let total: BigRational = partitions(size, n_level)
                    .iter()
                    .map(|l| rational_part(l, n_level))
                    .sum();
                assert_eq!(total, BigRational::one(), "N={n_level}, n={size}");
            }
        }
    }

    #[test]
    fn covered_mass_increases_as_epsilon_shrinks() {
        let mut last = 0.0;
        for eps in [1e-2, 1e-4, 1e-8, 1e-12] {
            let t = enumerate_support(&PlancherelParams::new(q(1, 2), 2, eps).unwrap()).unwrap();
            assert!(t.covered_mass() >= 1.0 - eps);
            assert!(t.covered_mass() >= last);
            last = t.covered_mass();
        }
    }

    #[test]
    fn infeasible_truncation_is_a_resource_error() {
        let p = PlancherelParams::new(q(10, 1), 3, 1e-12).unwrap();
        match enumerate_support(&p) {
            Err(Error::ResourceLimit(msg)) => assert!(msg.contains("40")),
            other => panic!("expected resource limit, got {other:?}"),
        }
    }

    #[test]
    fn coherency_examples() {
        let c = coherency_check(&q(1, 4), 1e-14, &Signature::empty()).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert!((c.rhs - 1.0).abs() < 1e-13);
        for lam in [sig(&[1]), sig(&[1, 0]), sig(&[2, 1]), sig(&[0, 0])] {
            let c = coherency_check(&q(1, 4), 1e-14, &lam).unwrap();
            assert!(c.certified);
            assert!((c.lhs - c.rhs).abs() < 1e-10, "{lam}: {} vs {}", c.lhs, c.rhs);
        }
    }

    #[test]
    fn literal_same_level_denominator_breaks_coherency() {
        // Replacing Dim_{N+1}(ν) by the level-N dimension of ν's first N parts
        // does not give a coherent system.
        let t = q(1, 4);
        let lam = sig(&[1, 0]);
        let mu_up = &t * BigInt::from(3);
        let dim_lam = BigRational::from_integer(BigInt::from(weyl_dim(&lam)));
        let mut acc = BigRational::zero();
        for nu in covering_signatures(&lam, 30) {
            let truncated = Signature::new(nu.parts()[..2].to_vec()).unwrap();
            let m_up = poisson_numerator(&t, nu.size() as usize) * dims_product(&nu);
            acc += m_up * &dim_lam / BigRational::from_integer(BigInt::from(weyl_dim(&truncated)));
        }
        let literal = f64_of(exp_neg(&mu_up) * ratio_to_hp(&acc));
        let c = coherency_check(&t, 1e-14, &lam).unwrap();
        assert!((literal - c.lhs).abs() > 1e-3, "{literal} vs {}", c.lhs);
    }

    #[test]
    fn shifted_power_sum_examples() {
        let l = sig(&[3, 1, 1, 0]);
        assert_eq!(shifted_power_sum(1, &l), q(5, 1));
        assert_eq!(shifted_power_sum(2, &sig(&[1])), q(0, 1));
        assert_eq!(shifted_power_sum(2, &sig(&[2, 1])), q(0, 1));
        assert_eq!(shifted_power_sum(3, &sig(&[2, 1])), q(27, 4));
        for k in 1..=5 {
            for lam in [sig(&[4, 2, 0]), sig(&[7, 7, 3, -2])] {
                let scaled = scaled_shifted_power_sum(k, lam.parts());
                assert_eq!(
                    shifted_power_sum(k, &lam),
                    BigRational::new(BigInt::from(scaled), BigInt::from(2).pow(k))
                );
            }
        }
    }

    #[test]
    fn exact_moment_needs_growth_bound() {
        let p = PlancherelParams::new(q(1, 4), 1, 1e-12).unwrap();
        assert!(matches!(
            exact_moment(|_| BigRational::one(), &p, None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn exact_moment_examples() {
        let g1 = GrowthBound::new(1.0, 1);
        let g2 = GrowthBound::new(1.0, 2);
        for (tn, td, n) in [(1, 4, 1), (1, 2, 2), (1, 4, 3)] {
            let p = PlancherelParams::new(q(tn, td), n, 1e-14).unwrap();
            let mean = tn as f64 / td as f64 * n as f64;
            let m1 = exact_moment(|l| shifted_power_sum(1, l), &p, Some(&g1)).unwrap();
            assert!((m1.to_f64() - mean).abs() <= m1.tail_bound + 1e-15);
            let m2 = exact_moment(|l| num_traits::pow(shifted_power_sum(1, l), 2), &p, Some(&g2)).unwrap();
            assert!((m2.to_f64() - (mean + mean * mean)).abs() <= m2.tail_bound + 1e-15);
            let one = exact_moment(|_| BigRational::one(), &p, Some(&GrowthBound::new(1.0, 0))).unwrap();
            assert!((one.to_f64() - 1.0).abs() <= one.tail_bound + 1e-15);
        }
    }

    #[test]
    fn conditional_law_sums_to_one() {
        for nu in partitions(4, 3).into_iter().chain(partitions(5, 3)) {
            for k in 0..3 {
                let total: BigRational = conditional_law(&nu, k).unwrap().into_iter().map(|(_, p)| p).sum();
                assert_eq!(total, BigRational::one(), "{nu} at level {k}");
            }
        }
    }

    #[test]
    fn nested_moment_marginals() {
        let p = PlancherelParams::new(q(1, 4), 2, 1e-14).unwrap();
        let g = GrowthBound::new(1.0, 1);
        let p1 = |l: &Signature| shifted_power_sum(1, l);
        let top_only = nested_joint_moment(1, |_| BigRational::one(), p1, &p, Some(&g)).unwrap();
        let direct = exact_moment(p1, &p, Some(&g)).unwrap();
        assert!((top_only.value - direct.value).hi().abs() < 1e-25);
        let bottom_only = nested_joint_moment(1, p1, |_| BigRational::one(), &p, Some(&g)).unwrap();
        let level1 = exact_moment(p1, &p.at_level(1).unwrap(), Some(&g)).unwrap();
        assert!((bottom_only.to_f64() - level1.to_f64()).abs() < 1e-10);
        assert!((bottom_only.to_f64() - 0.25).abs() < 1e-10);
        assert!(nested_joint_moment(2, p1, p1, &p, Some(&g)).is_err());
    }

    #[test]
    fn measure_table_json_round_trip() {
        let p = PlancherelParams::new(q(1, 4), 2, 1e-8).unwrap();
        let table = enumerate_support(&p).unwrap();
        let json = table.to_json();
        let first = &json["entries"][1];
        assert_eq!(first["signature"], serde_json::json!([1, 0]));
        assert!(first["weight"][0].as_str().unwrap().contains('e'));
        assert_eq!(first["weight"][1], "1");
        let back = MeasureTable::from_json(&json).unwrap();
        assert_eq!(back.entries().len(), table.entries().len());
        let mut tampered = json.clone();
        tampered["entries"][1]["weight"][1] = serde_json::json!("1/3");
        assert!(MeasureTable::from_json(&tampered).is_err());
    }
}
