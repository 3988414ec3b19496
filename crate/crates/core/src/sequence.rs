//! Index sequences `A = (a_1, a_2, …)` of distinct positive integers and the
//! densities of their prefix intersections.

use std::collections::HashSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Rule generating `a_n(L)` for `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceRule {
    /// `a_n = n`.
    Identity,
    /// `a_n = q n + r`.
    Arithmetic { q: u64, r: u64 },
    /// `a_n = n + L` for `n ≤ L`, `n − L` for `L < n ≤ 2L`, `n` afterwards.
    BlockSwap,
    /// A finite prefix given verbatim.
    Explicit { values: Vec<u64> },
}

impl SequenceRule {
    pub fn evens() -> Self {
        Self::Arithmetic { q: 2, r: 0 }
    }

    pub fn odds() -> Self {
        Self::Arithmetic { q: 2, r: 1 }
    }

    /// Resolves the names `identity`, `evens`, `odds`, `block_swap`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "identity" | "naturals" => Ok(Self::Identity),
            "evens" => Ok(Self::evens()),
            "odds" => Ok(Self::odds()),
            "block_swap" => Ok(Self::BlockSwap),
            _ => invalid(format!("unknown sequence name {name:?}")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Arithmetic { q, r } if *q == 0 || q + r == 0 => {
                invalid(format!("arithmetic rule q={q}, r={r} does not give distinct positive terms"))
            }
            Self::Explicit { values } => {
                if values.contains(&0) {
                    return invalid("explicit sequence contains 0");
                }
                let distinct: HashSet<_> = values.iter().collect();
                if distinct.len() != values.len() {
                    return invalid("explicit sequence repeats a value");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::Arithmetic { q: 2, r: 0 } => "evens".into(),
            Self::Arithmetic { q: 2, r: 1 } => "odds".into(),
            Self::Arithmetic { q, r } => format!("arithmetic({q},{r})"),
            Self::BlockSwap => "block_swap".into(),
            Self::Explicit { values } => format!("explicit[{}]", values.len()),
        }
    }

    /// `a_n(L)`, `n ≥ 1`.
    pub fn term(&self, n: u64, l: u64) -> Result<u64> {
        if n == 0 {
            return invalid("sequence terms are indexed from 1");
        }
        let overflow = || Error::ResourceLimit(format!("term {n} of {} overflows", self.label()));
        match self {
            Self::Identity => Ok(n),
            Self::Arithmetic { q, r } => q
                .checked_mul(n)
                .and_then(|v| v.checked_add(*r))
                .ok_or_else(overflow),
            Self::BlockSwap => Ok(if n <= l {
                n + l
            } else if n <= 2 * l {
                n - l
            } else {
                n
            }),
            Self::Explicit { values } => values.get(n as usize - 1).copied().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "explicit sequence has {} terms, term {n} requested",
                    values.len()
                ))
            }),
        }
    }

    /// `A_m = {a_1, …, a_m}` in sequence order.
    pub fn prefix(&self, m: u64, l: u64) -> Result<Vec<u64>> {
        (1..=m).map(|n| self.term(n, l)).collect()
    }

    /// Limit shape of `A_{[xL]}/L`: a union of intervals of `(0, ∞)` on
    /// which the sequence fills one residue class with density `1/modulus`.
    /// `None` for explicit sequences.
    pub fn profile(&self, x: f64) -> Option<PrefixProfile> {
        match self {
            Self::Identity => Some(PrefixProfile::new(vec![(0.0, x)], 1, 0)),
            Self::Arithmetic { q, r } => {
                Some(PrefixProfile::new(vec![(0.0, *q as f64 * x)], *q, r % q))
            }
            Self::BlockSwap => {
                let intervals = if x <= 1.0 {
                    vec![(1.0, 1.0 + x)]
                } else if x <= 2.0 {
                    vec![(0.0, x - 1.0), (1.0, 2.0)]
                } else {
                    vec![(0.0, x)]
                };
                Some(PrefixProfile::new(intervals, 1, 0))
            }
            Self::Explicit { .. } => None,
        }
    }
}

/// See [`SequenceRule::profile`].
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixProfile {
    pub intervals: Vec<(f64, f64)>,
    pub modulus: u64,
    pub residue: u64,
}

impl PrefixProfile {
    pub fn new(intervals: Vec<(f64, f64)>, modulus: u64, residue: u64) -> Self {
        Self {
            intervals,
            modulus,
            residue,
        }
    }

    /// Density of the intersection of two profiles.
    pub fn overlap(&self, other: &Self) -> f64 {
        let g = self.modulus.gcd(&other.modulus);
        if self.residue % g != other.residue % g {
            return 0.0;
        }
        let lcm = self.modulus.lcm(&other.modulus) as f64;
        let mut length = 0.0;
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                length += (b.min(d) - a.max(c)).max(0.0);
            }
        }
        length / lcm
    }
}

/// How [`eval_alpha`] computes `α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    ClosedForm,
    FiniteL(u64),
}

/// `α` together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaValue {
    pub value: f64,
    /// Set when closed form was requested but unavailable, so the value is
    /// a finite-`L` count.
    pub fell_back: bool,
}

/// Scale used when a closed form is unavailable and no `L` was given.
pub const FALLBACK_L: u64 = 10_000;

/// `|A_{[xL]} ∩ B_{[yL]}| / L`.
pub fn finite_overlap(a: &SequenceRule, b: &SequenceRule, x: f64, y: f64, l: u64) -> Result<f64> {
    let ma = (x * l as f64).floor() as u64;
    let mb = (y * l as f64).floor() as u64;
    let pa: HashSet<u64> = a.prefix(ma, l)?.into_iter().collect();
    let count = b.prefix(mb, l)?.into_iter().filter(|v| pa.contains(v)).count();
    Ok(count as f64 / l as f64)
}

/// `α(i, x; j, y) = lim |A_{i,[xL]} ∩ A_{j,[yL]}| / L`.
pub fn eval_alpha(
    a: &SequenceRule,
    b: &SequenceRule,
    x: f64,
    y: f64,
    mode: AlphaMode,
) -> Result<AlphaValue> {
    if !(x > 0.0 && y > 0.0) {
        return invalid(format!("alpha needs x, y > 0, got {x}, {y}"));
    }
    a.validate()?;
    b.validate()?;
    match mode {
        AlphaMode::FiniteL(l) => {
            if l == 0 {
                return invalid("L must be positive");
            }
            Ok(AlphaValue {
                value: finite_overlap(a, b, x, y, l)?,
                fell_back: false,
            })
        }
        AlphaMode::ClosedForm => match (a.profile(x), b.profile(y)) {
            (Some(pa), Some(pb)) => Ok(AlphaValue {
                value: pa.overlap(&pb),
                fell_back: false,
            }),
            _ => Ok(AlphaValue {
                value: finite_overlap(a, b, x, y, FALLBACK_L)?,
                fell_back: true,
            }),
        },
    }
}
