//! Free-algebra representation of elements of `U(gl(∞))`.
//!
//! An [`NcPolynomial`] is a finite linear combination of words in the matrix
//! units `E_ij`, with coefficients that are polynomials in a single formal
//! symbol `t` (standing for `γL`). No relations are imposed on the words; the
//! state functional is well defined on the quotient, which is checked by tests
//! rather than enforced by normal forms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hp;

/// The basis element `E_ij` of `gl(∞)`, `i, j ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    row: u32,
    col: u32,
}

impl Generator {
    pub fn new(row: u32, col: u32) -> Result<Self> {
        if row == 0 || col == 0 {
            return invalid(format!("generator indices start at 1, got E_{row}{col}"));
        }
        Ok(Self { row, col })
    }

    pub fn row(&self) -> u32 {
        self.row
    }

    pub fn col(&self) -> u32 {
        self.col
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E[{},{}]", self.row, self.col)
    }
}

pub type Word = Vec<Generator>;

/// Polynomial in `t` with exact rational coefficients; `coeffs[k]` multiplies
/// `t^k`. Trailing zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TPoly(Vec<BigRational>);

impl TPoly {
    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_integers(coeffs: &[i128]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree in `t`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.0.iter().map(|x| x * c).collect())
    }
}

impl Add for &TPoly {
    type Output = TPoly;
    fn add(self, rhs: &TPoly) -> TPoly {
        let n = self.0.len().max(rhs.0.len());
        TPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &TPoly) -> TPoly {
        let n = self.0.len().max(rhs.0.len());
        TPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &TPoly) -> TPoly {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TPoly::from_coeffs(out)
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Exact value of the state on an element: a polynomial in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StateValueJson", into = "StateValueJson")]
pub struct StateValue {
    pub poly_in_t: TPoly,
}

impl StateValue {
    pub fn at(&self, t: &BigRational) -> BigRational {
        self.poly_in_t.eval(t)
    }
}

#[derive(Serialize, Deserialize)]
struct StateValueJson {
    poly_in_t: Vec<String>,
}

impl From<StateValue> for StateValueJson {
    fn from(v: StateValue) -> Self {
        Self {
            poly_in_t: v.poly_in_t.0.iter().map(hp::ratio_to_string).collect(),
        }
    }
}

impl TryFrom<StateValueJson> for StateValue {
    type Error = Error;
    fn try_from(raw: StateValueJson) -> Result<Self> {
        let coeffs = raw
            .poly_in_t
            .iter()
            .map(|s| hp::ratio_from_str(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            poly_in_t: TPoly::from_coeffs(coeffs),
        })
    }
}

/// Element of the free algebra on the `E_ij` over `Q[t]`. The empty word is
/// the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NcPolynomialJson", into = "NcPolynomialJson")]
pub struct NcPolynomial {
    terms: BTreeMap<Word, TPoly>,
}

impl NcPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(TPoly::one())
    }

    pub fn scalar(c: TPoly) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn generator(row: u32, col: u32) -> Result<Self> {
        Ok(Self::word(vec![Generator::new(row, col)?]))
    }

    pub fn word(word: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(word, TPoly::one());
        p
    }

    /// Adds `coeff · word`, dropping the term if it cancels.
    pub fn add_term(&mut self, word: Word, coeff: TPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &TPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &[Generator]) -> TPoly {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    /// Length of the longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &TPoly) -> Self {
        let mut out = Self::zero();
        for (w, k) in &self.terms {
            out.add_term(w.clone(), k * c);
        }
        out
    }

    /// Every index occurring in some generator, sorted.
    pub fn index_set(&self) -> Vec<u32> {
        let mut idx: Vec<u32> = self
            .terms
            .keys()
            .flatten()
            .flat_map(|g| [g.row, g.col])
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Applies an index substitution to every generator.
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> Result<Self> {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let word = w
                .iter()
                .map(|g| Generator::new(map(g.row), map(g.col)))
                .collect::<Result<Word>>()?;
            out.add_term(word, c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Add for &NcPolynomial {
    type Output = NcPolynomial;
    fn add(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NcPolynomial {
    type Output = NcPolynomial;
    fn sub(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &NcPolynomial {
    type Output = NcPolynomial;
    fn mul(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = NcPolynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            for g in w {
                write!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: Vec<[u32; 2]>,
    coeff: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NcPolynomialJson {
    terms: Vec<TermJson>,
}

impl From<NcPolynomial> for NcPolynomialJson {
    fn from(p: NcPolynomial) -> Self {
        Self {
            terms: p
                .terms
                .iter()
                .map(|(w, c)| TermJson {
                    word: w.iter().map(|g| [g.row, g.col]).collect(),
                    coeff: c.0.iter().map(hp::ratio_to_string).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<NcPolynomialJson> for NcPolynomial {
    type Error = Error;
    fn try_from(raw: NcPolynomialJson) -> Result<Self> {
        let mut p = NcPolynomial::zero();
        for term in raw.terms {
            let word = term
                .word
                .iter()
                .map(|&[i, j]| Generator::new(i, j))
                .collect::<Result<Word>>()?;
            let coeffs = term
                .coeff
                .iter()
                .map(|s| hp::ratio_from_str(s))
                .collect::<Result<Vec<_>>>()?;
            p.add_term(word, TPoly::from_coeffs(coeffs));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32, j: u32) -> NcPolynomial {
        NcPolynomial::generator(i, j).unwrap()
    }

    #[test]
    fn generator_indices_start_at_one() {
        assert!(Generator::new(0, 1).is_err());
        assert!(Generator::new(1, 1).is_ok());
    }

    #[test]
    fn products_concatenate_and_cancel() {
        let a = &e(1, 2) * &e(2, 1);
        let b = &e(2, 1) * &e(1, 2);
        let comm = &a - &b;
        assert_eq!(comm.len(), 2);
        assert!((&comm - &comm).is_empty());
        assert_eq!(comm.degree(), 2);
        assert_eq!(comm.index_set(), vec![1, 2]);
    }

    #[test]
    fn tpoly_arithmetic() {
        let t = TPoly::t();
        let one = TPoly::one();
        let p = &(&t + &one) * &(&t - &one); // t^2 - 1
        assert_eq!(p, TPoly::from_integers(&[-1, 0, 1]));
        assert_eq!(p.eval(&BigRational::from_integer(3.into())), BigRational::from_integer(8.into()));
        assert!((&p - &p).is_zero());
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn json_forms() {
        let mut p = &e(1, 2) * &e(2, 1);
        p.add_term(Vec::new(), TPoly::from_coeffs(vec![BigRational::new(1.into(), 2.into()), BigRational::one()]));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"terms":[{"word":[],"coeff":["1/2","1"]},{"word":[[1,2],[2,1]],"coeff":["1"]}]}"#);
        let back: NcPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<NcPolynomial>(r#"{"terms":[{"word":[[0,1]],"coeff":["1"]}]}"#).is_err());

        let v = StateValue { poly_in_t: TPoly::from_integers(&[0, 1, 1]) };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"poly_in_t":["0","1","1"]}"#);
        assert_eq!(serde_json::from_str::<StateValue>(&s).unwrap(), v);
    }
}
