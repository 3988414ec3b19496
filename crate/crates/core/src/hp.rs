//! Double-double ("high precision") helpers.
//!
//! Exact rationals are the currency of the combinatorial code; the only
//! irrational quantities that enter are exponentials of rationals. Those are
//! carried as [`Hp`] values (about 106 bits of significand).

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{invalid, Result};

/// High-precision float used for accumulating moments and weights.
pub type Hp = TwoFloat;

/// Number of significant decimal digits used by [`hp_to_decimal`].
pub const DECIMAL_DIGITS: usize = 34;

pub fn hp(x: f64) -> Hp {
    TwoFloat::from(x)
}

/// Rounds an exact rational to the nearest double-double.
pub fn ratio_to_hp(r: &BigRational) -> Hp {
    if r.is_zero() {
        return hp(0.0);
    }
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return hp(hi);
    }
    let rest = r - BigRational::from_float(hi).expect("finite float");
    let lo = rest.to_f64().unwrap_or(0.0);
    TwoFloat::new_add(hi, lo)
}

/// Exact rational value of a double-double.
pub fn hp_to_ratio(x: Hp) -> Option<BigRational> {
    let hi = BigRational::from_float(x.hi())?;
    let lo = BigRational::from_float(x.lo())?;
    Some(hi + lo)
}

/// `e^{-mu}` for a nonnegative rational `mu`, accurate to double-double
/// precision. The series for `e^{mu}` is summed exactly in rationals until the
/// remainder is below `1e-40` relative, then inverted exactly.
///
/// `TwoFloat` division only carries f64 accuracy, so it is avoided here.
pub fn exp_neg(mu: &BigRational) -> Hp {
    assert!(!mu.is_negative(), "exp_neg expects a nonnegative argument");
    if mu.is_zero() {
        return hp(1.0);
    }
    let threshold = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(40));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut n = 0u64;
    loop {
        n += 1;
        term = &term * mu / BigRational::from_integer(BigInt::from(n));
        sum += &term;
        // Once mu/(n+1) <= 1/2 the tail is at most twice the last term.
        let ratio_small = mu * BigRational::from_integer(BigInt::from(2u32))
            <= BigRational::from_integer(BigInt::from(n + 1));
        if ratio_small && &term / &sum < threshold {
            break;
        }
    }
    ratio_to_hp(&sum.recip())
}

/// `mu^n / n!` as an exact rational.
pub fn poisson_numerator(mu: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for k in 1..=n {
        acc = acc * mu / BigRational::from_integer(BigInt::from(k));
    }
    acc
}

/// Formats an exact rational in scientific notation with `digits`
/// significant digits (round half away from zero).
pub fn ratio_to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // Estimate the decimal exponent, then correct.
    let approx = a.to_f64().unwrap_or(1.0);
    let mut e = if approx.is_finite() && approx > 0.0 {
        approx.log10().floor() as i64
    } else {
        0
    };
    let ten = BigRational::from_integer(BigInt::from(10u32));
    let pow10 = |k: i64| -> BigRational { ten.pow(k as i32) };
    while a >= pow10(e + 1) {
        e += 1;
    }
    while a < pow10(e) {
        e -= 1;
    }
    let scaled = &a * pow10(digits as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut mant = q;
    if BigRational::new(rem * BigInt::from(2u32), scaled.denom().clone()) >= BigRational::one() {
        mant += BigInt::one();
    }
    let mut s = mant.to_string();
    if s.len() > digits {
        // rounding carried into a new digit
        s.truncate(digits);
        e += 1;
    }
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Parses a decimal string (`-1.25e-3`, `42`, `0.5`) into an exact rational.
pub fn decimal_to_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], &s[pos + 1..]),
        None => (s, "0"),
    };
    let exp: i32 = exp
        .parse()
        .map_err(|_| crate::Error::InvalidArgument(format!("bad exponent in {s:?}")))?;
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(pos) => (&mant[..pos], &mant[pos + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return invalid(format!("empty decimal {s:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return invalid(format!("not a decimal number: {s:?}"));
    }
    let magnitude = BigInt::parse_bytes(digits.as_bytes(), 10)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("not a decimal number: {s:?}")))?;
    let signed = if neg {
        BigInt::from_biguint(Sign::Minus, magnitude.magnitude().clone())
    } else {
        magnitude
    };
    let ten = BigRational::from_integer(BigInt::from(10u32));
    let shift = exp - frac_part.len() as i32;
    Ok(BigRational::from_integer(signed) * ten.pow(shift))
}

pub fn hp_to_decimal(x: Hp) -> String {
    match hp_to_ratio(x) {
        Some(r) => ratio_to_decimal(&r, DECIMAL_DIGITS),
        None => format!("{}", x.hi()),
    }
}

pub fn hp_from_decimal(s: &str) -> Result<Hp> {
    Ok(ratio_to_hp(&decimal_to_ratio(s)?))
}

pub fn ratio_to_string(r: &BigRational) -> String {
    r.to_string()
}

pub fn ratio_from_str(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| crate::Error::InvalidArgument(format!("not a rational: {s:?}")))
}
