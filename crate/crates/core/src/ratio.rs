//! Exact rational helpers and directed rational bounds for transcendental
//! constants (e, exp, log2, k-th roots).
//!
//! Every bound here is rounded in a documented direction so that callers
//! comparing against it never accept something that is false over the reals.

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::GameError;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Parses `p/q` or a bare integer `p`. No decimals, no floats.
pub fn parse_rational(text: &str) -> Result<Rational, GameError> {
    let text = text.trim();
    let bad = || GameError::Parse(format!("expected a rational p/q, got {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(GameError::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal expansion truncated toward zero, for display only.
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (abs.numer() * &scale) / abs.denom();
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    Rational::new(r.numer().pow(e), r.denom().pow(e))
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// The least multiple of `2^-bits` that is `>= r`.
pub fn round_up(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new(ceil(&(r * Rational::from_integer(scale.clone()))), scale)
}

/// The greatest multiple of `2^-bits` that is `<= r`.
pub fn round_down(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new(floor(&(r * Rational::from_integer(scale.clone()))), scale)
}

/// Rational upper bound on e: truncated series plus the remainder bound
/// `sum_{j>J} 1/j! < 1/(J! * J)`.
pub fn e_upper() -> Rational {
    const TERMS: u32 = 24;
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    for j in 0..=TERMS {
        if j > 0 {
            fact *= j;
        }
        sum += Rational::new(BigInt::one(), fact.clone());
    }
    sum + Rational::new(BigInt::one(), fact * TERMS)
}

/// Rational lower bound on e (the truncated series alone).
pub fn e_lower() -> Rational {
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    for j in 0..=24u32 {
        if j > 0 {
            fact *= j;
        }
        sum += Rational::new(BigInt::one(), fact.clone());
    }
    sum
}

/// Upper bound on `exp(-x)` for `0 <= x <= 1`.
///
/// The alternating series has decreasing terms there, so any partial sum
/// ending on an even-index term is an upper bound. The result is then
/// rounded up to a multiple of `2^-48` to keep later arithmetic small.
pub fn exp_neg_upper(x: &Rational) -> Rational {
    assert!(!x.is_negative() && *x <= Rational::one(), "exp_neg_upper needs 0 <= x <= 1");
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for j in 0..=30u32 {
        if j > 0 {
            term = -(term * x) / int(j as i64);
        }
        sum += &term;
    }
    // j = 30 is even, so the last added term is nonnegative.
    round_up(&sum, 48)
}

/// Lower and upper rational bounds on `log2(n)` for `n >= 1`, accurate to
/// about `2^-frac_bits`. Exact (lower == upper) when `n` is a power of two.
pub fn log2_bounds(n: &BigUint, frac_bits: u32) -> (Rational, Rational) {
    assert!(!n.is_zero(), "log2 of zero");
    let exp = n.bits() - 1;
    let int_part = Rational::from_integer(BigInt::from(exp));
    if (BigUint::one() << exp) == *n {
        return (int_part.clone(), int_part);
    }
    // Fixed point with W fractional bits; y in [1, 2).
    const W: u64 = 96;
    let one = BigUint::one() << W;
    let two = BigUint::one() << (W + 1);
    let shifted = n << W;
    let divisor = BigUint::one() << exp;
    let mut lo = &shifted / &divisor;
    let mut hi = (&shifted + &divisor - 1u32) / &divisor;
    let mut frac_lo = BigUint::zero();
    let mut frac_hi = BigUint::zero();
    for _ in 0..frac_bits {
        lo = (&lo * &lo) >> W;
        hi = (&hi * &hi + &one - 1u32) >> W;
        frac_lo <<= 1;
        frac_hi <<= 1;
        if lo >= two {
            lo >>= 1;
            frac_lo += 1u32;
        }
        if hi >= two {
            hi = (hi + 1u32) >> 1;
            frac_hi += 1u32;
        }
    }
    let scale = BigInt::one() << frac_bits;
    let lower = &int_part + Rational::new(BigInt::from_biguint(Sign::Plus, frac_lo), scale.clone());
    // The truncated digits of the upper sequence can be off by one unit.
    let upper = int_part
        + Rational::new(BigInt::from_biguint(Sign::Plus, frac_hi) + 1, scale);
    (lower, upper)
}

/// Largest `a / 2^frac_bits` with `(a / 2^frac_bits)^k <= x`, for `x >= 0`.
pub fn kth_root_floor(x: &Rational, k: u32, frac_bits: u32) -> Rational {
    assert!(k >= 1 && !x.is_negative());
    let scale = BigInt::one() << frac_bits;
    // a^k <= x * 2^(k * frac_bits)
    let target = x * Rational::from_integer(BigInt::one() << (k as u64 * frac_bits as u64));
    let fits = |a: &BigInt| Rational::from_integer(a.pow(k)) <= target;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::one();
    while fits(&hi) {
        hi <<= 1;
    }
    // invariant: fits(lo), !fits(hi)
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Rational::new(lo, scale)
}

/// `log2` of a positive big integer as `f64`, using its top 64 bits.
/// Relative error of the implied value is below `2^-52`.
pub fn log2_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}
