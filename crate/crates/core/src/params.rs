//! Parameter algebra for the Diophantine generator.
//!
//! For octave bound `C`, the left side of `β + 3C/β^(k-1) ≤ 2` is smallest
//! at `β = (3C(k-1))^(1/k)`, where it equals `k/(k-1)·β`. The condition
//! then reduces to `(k/(k-1))^(k-1)·3Ck ≤ 2^k`, which `3eCk ≤ 2^k` implies.
//! Transcendental constants enter only as directed rational bounds, rounded
//! so that every decision errs toward rejection.

use num::{BigUint, One};

use crate::dioph;
use crate::error::{GameError, Result};
use crate::ratio::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
}

/// A rational known to lie on one side of the quantity it stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalBound {
    pub value: Rational,
    pub direction: Direction,
}

pub fn e_bound(direction: Direction) -> RationalBound {
    let value = match direction {
        Direction::Lower => ratio::e_lower(),
        Direction::Upper => ratio::e_upper(),
    };
    RationalBound { value, direction }
}

/// Fractional bits used for `log2` bounds.
pub const LOG2_BITS: u32 = 40;

pub fn log2_bound(n: u64, direction: Direction) -> RationalBound {
    let (lo, hi) = ratio::log2_bounds(&BigUint::from(n), LOG2_BITS);
    let value = match direction {
        Direction::Lower => lo,
        Direction::Upper => hi,
    };
    RationalBound { value, direction }
}

/// Denominator exponent of the rational k-th root.
pub const ROOT_BITS: u32 = 32;

/// Relative tolerance on `b^k` against `3C(k-1)`.
pub const ROOT_TOLERANCE_BITS: u32 = 20;

/// Downward nudges tried when the rounded root fails validation.
const MAX_NUDGES: u32 = 64;

/// `(3C(k-1))^(1/k)` rounded to a multiple of `2^-ROOT_BITS`, then
/// validated against `β + 3C/β^(k-1) ≤ 2`.
pub fn optimal_beta(c: usize, k: u32) -> Result<Rational> {
    if c == 0 || k < 3 {
        return Err(GameError::InvalidParams(format!("need C >= 1 and k >= 3, got C = {c}, k = {k}")));
    }
    let target = ratio::int(3 * c as i64 * (k as i64 - 1));
    let mut b = ratio::kth_root_floor(&target, k, ROOT_BITS);
    let tol = Rational::new(1.into(), num::BigInt::one() << ROOT_TOLERANCE_BITS);
    let bk = ratio::pow(&b, k);
    debug_assert!(bk <= &target * (Rational::one() + &tol) && bk >= &target * (Rational::one() - &tol));
    let step = Rational::new(1.into(), num::BigInt::one() << ROOT_BITS);
    for _ in 0..=MAX_NUDGES {
        if dioph::certify_dioph(c, k, b.clone()).is_ok() {
            return Ok(b);
        }
        b -= &step;
    }
    Err(GameError::NotCertified(format!(
        "no beta near (3C(k-1))^(1/k) satisfies beta + 3C/beta^(k-1) <= 2 for C = {c}, k = {k}"
    )))
}

/// `k/(k-1)·β`, the minimum of `β + 3C/β^(k-1)` when `β` is the optimum.
pub fn minimized_objective(k: u32, beta: &Rational) -> Rational {
    ratio::ratio(k as i64, k as i64 - 1) * beta
}

/// Smallest `k ≥ 3` with `3·e·C·k ≤ 2^k`, using an upper bound for `e`.
pub fn min_k(c: usize) -> u32 {
    assert!(c >= 1, "C must be positive");
    let e = e_bound(Direction::Upper).value;
    let three_e_c = ratio::int(3 * c as i64) * e;
    let mut k = 3u32;
    while &three_e_c * ratio::int(k as i64) > Rational::from_integer(num::BigInt::one() << k) {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonReport {
    pub c: usize,
    pub k: u32,
    /// `2^-k`.
    pub epsilon: Rational,
    /// `1/(64·C·log2_upper(C))`, at most the true reference bound.
    pub reference: Rational,
    /// `2^-k ≥ 1/(64·C·log2 C)`, decided with a lower bound on `log2 C`.
    pub meets_reference: bool,
}

/// `2^-min_k(C)` alongside the reference `1/(64·C·log2 C)`.
pub fn epsilon_of_c(c: usize) -> Result<EpsilonReport> {
    if c < 2 {
        return Err(GameError::InvalidParams(format!("C = {c}: the reference bound needs C >= 2")));
    }
    let k = min_k(c);
    let epsilon = Rational::new(1.into(), num::BigInt::one() << k);
    let sixty_four_c = ratio::int(64 * c as i64);
    let reference = (&sixty_four_c * log2_bound(c as u64, Direction::Upper).value).recip();
    // 2^k <= 64·C·log2_lower(C) implies 2^k <= 64·C·log2(C).
    let meets_reference =
        Rational::from_integer(num::BigInt::one() << k) <= sixty_four_c * log2_bound(c as u64, Direction::Lower).value;
    Ok(EpsilonReport { c, k, epsilon, reference, meets_reference })
}
