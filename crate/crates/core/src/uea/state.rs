//! The state `⟨X⟩ = D(X)χ |_{x = 1}` for the one-sided Plancherel character
//! `χ = exp(t Σ (x_cc − 1))`.
//!
//! `D(E_ij) = Σ_a x_ai ∂/∂x_aj` is an algebra homomorphism, so a word
//! `E_{w1} ⋯ E_{wm}` acts as `X_{w1}(X_{w2}(⋯ X_{wm} χ))`. Every intermediate
//! expression has the form `P(x) χ` with `P` polynomial in the matrix
//! variables and in `t`, and
//!
//! `X_ij (P χ) = (Σ_a x_ai ∂P/∂x_aj + t x_ji P) χ`.
//!
//! At `x = 1` only monomials in diagonal variables survive. An operator lowers
//! the off-diagonal degree by at most one, so monomials whose off-diagonal
//! degree exceeds the number of operators still to be applied are dropped.
//!
//! All intermediate coefficients are integers, held in `i128` with overflow
//! checks.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::algebra::{Generator, NcPolynomial, StateValue, TPoly};
use crate::error::{Error, Result};

/// Longest word accepted by [`state_eval`].
pub const DEFAULT_DEGREE_BOUND: usize = 8;

/// Monomial in the matrix variables: sorted `(row, col, exponent)` triples.
type Mono = Vec<(u32, u32, u32)>;
/// Integer polynomial in `t`, lowest degree first.
type IntPoly = Vec<i128>;

fn overflow() -> Error {
    Error::ComputationFailed("integer overflow in state evaluation".into())
}

fn off_diagonal_degree(m: &Mono) -> u32 {
    m.iter().filter(|&&(a, b, _)| a != b).map(|&(_, _, e)| e).sum()
}

fn mono_mul_var(m: &Mono, a: u32, b: u32) -> Mono {
    let mut out = m.clone();
    match out.binary_search_by(|&(r, c, _)| (r, c).cmp(&(a, b))) {
        Ok(pos) => out[pos].2 += 1,
        Err(pos) => out.insert(pos, (a, b, 1)),
    }
    out
}

fn add_into(target: &mut HashMap<Mono, IntPoly>, m: Mono, coeffs: IntPoly) -> Result<()> {
    let slot = target.entry(m).or_default();
    if slot.len() < coeffs.len() {
        slot.resize(coeffs.len(), 0);
    }
    for (s, c) in slot.iter_mut().zip(coeffs) {
        *s = s.checked_add(c).ok_or_else(overflow)?;
    }
    Ok(())
}

fn scale(coeffs: &IntPoly, k: i128) -> Result<IntPoly> {
    coeffs
        .iter()
        .map(|c| c.checked_mul(k).ok_or_else(overflow))
        .collect()
}

/// Applies `X_ij` to `P χ`, keeping monomials that can still reach `x = 1`
/// after `remaining` further operators.
fn apply_generator(
    poly: &HashMap<Mono, IntPoly>,
    g: Generator,
    remaining: u32,
) -> Result<HashMap<Mono, IntPoly>> {
    let (i, j) = (g.row(), g.col());
    let mut out: HashMap<Mono, IntPoly> = HashMap::new();
    for (m, coeffs) in poly {
        for (pos, &(a, b, e)) in m.iter().enumerate() {
            if b != j {
                continue;
            }
            let mut lowered = m.clone();
            if e == 1 {
                lowered.remove(pos);
            } else {
                lowered[pos].2 -= 1;
            }
            let next = mono_mul_var(&lowered, a, i);
            if off_diagonal_degree(&next) <= remaining {
                add_into(&mut out, next, scale(coeffs, i128::from(e))?)?;
            }
        }
        let next = mono_mul_var(m, j, i);
        if off_diagonal_degree(&next) <= remaining {
            let mut shifted = Vec::with_capacity(coeffs.len() + 1);
            shifted.push(0);
            shifted.extend_from_slice(coeffs);
            add_into(&mut out, next, shifted)?;
        }
    }
    out.retain(|_, c| c.iter().any(|&x| x != 0));
    Ok(out)
}

/// Relabels indices in order of first appearance. The state is invariant
/// under index permutations, so this is a valid cache key.
fn canonical_key(word: &[Generator]) -> Vec<(u32, u32)> {
    let mut map: Vec<u32> = Vec::new();
    let mut label = |x: u32| -> u32 {
        match map.iter().position(|&y| y == x) {
            Some(p) => p as u32 + 1,
            None => {
                map.push(x);
                map.len() as u32
            }
        }
    };
    word.iter()
        .map(|g| {
            let r = label(g.row());
            let c = label(g.col());
            (r, c)
        })
        .collect()
}

fn word_state(key: &[(u32, u32)]) -> Result<IntPoly> {
    let mut poly: HashMap<Mono, IntPoly> = HashMap::new();
    poly.insert(Vec::new(), vec![1]);
    let m = key.len();
    for (step, &(i, j)) in key.iter().rev().enumerate() {
        let g = Generator::new(i, j)?;
        let remaining = (m - step - 1) as u32;
        poly = apply_generator(&poly, g, remaining)?;
        debug_assert!(poly.keys().flatten().all(|&(a, b, _)| {
            key.iter().any(|&(r, c)| a == r || a == c) && key.iter().any(|&(r, c)| b == r || b == c)
        }));
    }
    let mut acc: IntPoly = Vec::new();
    for (mono, coeffs) in poly {
        if off_diagonal_degree(&mono) == 0 {
            if acc.len() < coeffs.len() {
                acc.resize(coeffs.len(), 0);
            }
            for (s, c) in acc.iter_mut().zip(coeffs) {
                *s = s.checked_add(c).ok_or_else(overflow)?;
            }
        }
    }
    Ok(acc)
}

/// Memoizing evaluator of the state with a configurable word-length bound.
#[derive(Debug)]
pub struct StateEvaluator {
    degree_bound: usize,
    cache: RwLock<HashMap<Vec<(u32, u32)>, IntPoly>>,
}

impl Default for StateEvaluator {
    fn default() -> Self {
        Self::new(DEFAULT_DEGREE_BOUND)
    }
}

impl StateEvaluator {
    pub fn new(degree_bound: usize) -> Self {
        Self {
            degree_bound,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Number of distinct canonical words evaluated so far.
    pub fn cache_len(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    /// State of a single word.
    pub fn eval_word(&self, word: &[Generator]) -> Result<TPoly> {
        if word.len() > self.degree_bound {
            return Err(Error::ResourceLimit(format!(
                "word of length {} exceeds the state degree bound {}",
                word.len(),
                self.degree_bound
            )));
        }
        let key = canonical_key(word);
        let cached = self.cache.read().ok().and_then(|c| c.get(&key).cloned());
        let value = match cached {
            Some(v) => v,
            None => {
                let v = word_state(&key)?;
                if let Ok(mut c) = self.cache.write() {
                    c.insert(key, v.clone());
                }
                v
            }
        };
        Ok(TPoly::from_coeffs(
            value
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        ))
    }

    /// State of a linear combination of words.
    pub fn eval(&self, x: &NcPolynomial) -> Result<StateValue> {
        if x.degree() > self.degree_bound {
            return Err(Error::ResourceLimit(format!(
                "element of degree {} exceeds the state degree bound {}",
                x.degree(),
                self.degree_bound
            )));
        }
        let terms: Vec<_> = x.terms().collect();
        let parts = terms
            .par_iter()
            .map(|(w, c)| Ok(&self.eval_word(w)? * *c))
            .collect::<Result<Vec<TPoly>>>()?;
        let poly_in_t = parts.iter().fold(TPoly::zero(), |acc, p| &acc + p);
        Ok(StateValue { poly_in_t })
    }
}

fn default_evaluator() -> &'static StateEvaluator {
    static DEFAULT: OnceLock<StateEvaluator> = OnceLock::new();
    DEFAULT.get_or_init(StateEvaluator::default)
}

/// Exact state of `x` with the default degree bound.
pub fn state_eval(x: &NcPolynomial) -> Result<StateValue> {
    default_evaluator().eval(x)
}
