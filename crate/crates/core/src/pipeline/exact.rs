//! Pure oracle checks: Gelfand–Tsetlin combinatorics, the exact measure and
//! the state. No randomness except the seeded choice of words.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CheckOutcome, SuiteOutput};
use crate::error::Result;
use crate::gt::{count_paths, enumerate_interlacing, partitions, signatures_with_abs_size, sym_dim, weyl_dim, Signature};
use crate::hp::ratio_from_str;
use crate::plancherel::{coherency_check, enumerate_support, exact_moment, GrowthBound, PlancherelParams};
use crate::uea::{casimir_eigenvalue, gelfand_invariant, state_eval, NcPolynomial, StateEvaluator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactCheckConfig {
    /// Highest level for dimension and branching checks.
    pub dim_max_level: usize,
    /// Bound on `Σ|λ_i|` for dimension checks.
    pub dim_max_size: i64,
    pub measure_max_level: usize,
    /// Highest `n` in `Σ_{|λ|=n} dim λ Dim_N λ = N^n`.
    pub measure_max_size: u32,
    /// Values of `t` for the measure checks, as exact fractions.
    pub measure_t: Vec<String>,
    pub coherency_t: String,
    pub coherency_max_level: usize,
    pub state_t: Vec<String>,
    pub casimir_max_order: u32,
    pub casimir_max_level: usize,
    pub commutation_pairs: usize,
    pub tail_epsilon: f64,
    /// Absolute tolerance added to certified tail bounds.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ExactCheckConfig {
    fn default() -> Self {
        Self {
            dim_max_level: 4,
            dim_max_size: 6,
            measure_max_level: 3,
            measure_max_size: 8,
            measure_t: vec!["1/4".into(), "1/2".into()],
            coherency_t: "1/4".into(),
            coherency_max_level: 2,
            state_t: vec!["1/4".into(), "1/2".into(), "1".into()],
            casimir_max_order: 3,
            casimir_max_level: 3,
            commutation_pairs: 200,
            tail_epsilon: 1e-14,
            tolerance: 1e-10,
            seed: 1,
        }
    }
}

pub fn exact_check_suite(config: &ExactCheckConfig) -> Result<SuiteOutput> {
    let mut checks = dimension_checks(config)?;
    checks.extend(measure_checks(config)?);
    checks.extend(coherency_checks(config)?);
    checks.extend(state_checks(config)?);
    Ok(SuiteOutput {
        checks,
        artifacts: Vec::new(),
    })
}

fn dimension_checks(config: &ExactCheckConfig) -> Result<Vec<CheckOutcome>> {
    let (mut cases, mut paths_ok, mut branching_ok) = (0, 0, 0);
    for n in 1..=config.dim_max_level {
        for lam in signatures_with_abs_size(n, config.dim_max_size) {
            cases += 1;
            let d = weyl_dim(&lam);
            if d == count_paths(&Signature::empty(), &lam)? {
                paths_ok += 1;
            }
            let below: BigUint = enumerate_interlacing(&lam).iter().map(weyl_dim).sum();
            if d == below {
                branching_ok += 1;
            }
        }
    }
    Ok(vec![
        CheckOutcome::count("weyl_dim_equals_path_count", cases, paths_ok),
        CheckOutcome::count("branching_identity", cases, branching_ok),
    ])
}

fn measure_checks(config: &ExactCheckConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let (mut cases, mut ok) = (0, 0);
    for n in 1..=config.measure_max_level {
        for size in 0..=config.measure_max_size {
            cases += 1;
            let total: BigUint = partitions(size, n)
                .iter()
                .map(|lam| Ok(sym_dim(lam)? * weyl_dim(lam)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            if total == BigUint::from(n).pow(size) {
                ok += 1;
            }
        }
    }
    out.push(CheckOutcome::count("schur_weyl_sum", cases, ok));
    for ts in &config.measure_t {
        let t = ratio_from_str(ts)?;
        for n in 1..=config.measure_max_level {
            let params = PlancherelParams::new(t.clone(), n, config.tail_epsilon)?;
            let tn = (&t * BigInt::from(n)).to_f64().unwrap_or(f64::NAN);
            let one = exact_moment(|_| BigRational::from_integer(1.into()), &params, Some(&GrowthBound::new(1.0, 0)))?;
            out.push(CheckOutcome::within(
                format!("normalization t={ts} N={n}"),
                1.0,
                one.to_f64(),
                1e-12 + one.tail_bound,
            ));
            let size = |lam: &Signature| BigRational::from_integer(lam.size().into());
            let m1 = exact_moment(size, &params, Some(&GrowthBound::new(1.0, 1)))?;
            out.push(CheckOutcome::within(
                format!("mean_p1 t={ts} N={n}"),
                tn,
                m1.to_f64(),
                config.tolerance + m1.tail_bound,
            ));
            let m2 = exact_moment(|lam| size(lam) * size(lam), &params, Some(&GrowthBound::new(1.0, 2)))?;
            let var = m2.to_f64() - m1.to_f64().powi(2);
            let tail = m2.tail_bound + 2.0 * m1.to_f64().abs() * m1.tail_bound + m1.tail_bound.powi(2);
            out.push(CheckOutcome::within(format!("var_p1 t={ts} N={n}"), tn, var, config.tolerance + tail));
        }
    }
    Ok(out)
}

fn coherency_checks(config: &ExactCheckConfig) -> Result<Vec<CheckOutcome>> {
    let t = ratio_from_str(&config.coherency_t)?;
    let mut out = Vec::new();
    for n in 1..=config.coherency_max_level {
        let table = enumerate_support(&PlancherelParams::new(t.clone(), n, config.tail_epsilon)?)?;
        let mut worst = 0.0f64;
        let mut certified = true;
        for e in table.entries() {
            let c = coherency_check(&t, config.tail_epsilon, &e.signature)?;
            worst = worst.max((c.lhs - c.rhs).abs());
            certified &= c.certified;
        }
        let mut check = CheckOutcome::within(
            format!("coherency t={} N={n} ({} signatures)", config.coherency_t, table.entries().len()),
            0.0,
            worst,
            config.tolerance,
        );
        check.pass &= certified;
        out.push(check);
    }
    Ok(out)
}

fn state_checks(config: &ExactCheckConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let e11 = NcPolynomial::generator(1, 1)?;
    let v = state_eval(&(&e11 * &e11))?;
    let want: Vec<BigRational> = [0, 1, 1].iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    out.push(CheckOutcome::count("state E11E11 = t + t^2", 1, usize::from(v.poly_in_t.coeffs() == want.as_slice())));

    let ev = StateEvaluator::new(10);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ok = 0;
    for _ in 0..config.commutation_pairs {
        let word = |rng: &mut ChaCha8Rng| -> Result<NcPolynomial> {
            let len = rng.random_range(0..=3);
            let mut w = NcPolynomial::one();
            for _ in 0..len {
                w = &w * &NcPolynomial::generator(rng.random_range(1..=3), rng.random_range(1..=3))?;
            }
            Ok(w)
        };
        let (u, v) = (word(&mut rng)?, word(&mut rng)?);
        let [i, j, k, l]: [u32; 4] = std::array::from_fn(|_| rng.random_range(1..=3));
        let e = |a, b| NcPolynomial::generator(a, b);
        let mut rel = &(&e(i, j)? * &e(k, l)?) - &(&e(k, l)? * &e(i, j)?);
        if j == k {
            rel = &rel - &e(i, l)?;
        }
        if l == i {
            rel = &rel + &e(k, j)?;
        }
        if ev.eval(&(&(&u * &rel) * &v))?.poly_in_t.is_zero() {
            ok += 1;
        }
    }
    out.push(CheckOutcome::count("commutation_relations_in_words", config.commutation_pairs, ok));

    for k in 1..=config.casimir_max_order {
        for n in 1..=config.casimir_max_level {
            let idx: Vec<u32> = (1..=n as u32).collect();
            let state = state_eval(&gelfand_invariant(k, &idx)?)?;
            let growth = GrowthBound::new((n as f64) * 2f64.powi(n as i32) * (n as f64 + 1.0).powi(k as i32), k);
            for ts in &config.state_t {
                let t = ratio_from_str(ts)?;
                let params = PlancherelParams::new(t.clone(), n, config.tail_epsilon)?;
                let m = exact_moment(|lam| casimir_eigenvalue(k, lam), &params, Some(&growth))?;
                out.push(CheckOutcome::within(
                    format!("casimir_state_dual_route k={k} N={n} t={ts}"),
                    state.at(&t).to_f64().unwrap_or(f64::NAN),
                    m.to_f64(),
                    config.tolerance + m.tail_bound,
                ));
            }
        }
    }
    Ok(out)
}
