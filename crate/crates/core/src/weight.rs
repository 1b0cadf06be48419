//! Exact β-weight arithmetic.
//!
//! A weight is a finite sum `sum_i m_i * beta^(-d_i)` with integer
//! multiplicities. Totals are kept as depth histograms and turned into an
//! exact rational with one integer Horner pass. Comparisons against a
//! threshold first try a cheap certified filter (exact head for shallow
//! depths, floating tail with a proven error margin) and fall back to the
//! exact value only when the filter cannot decide.

use std::collections::BTreeMap;

use num::bigint::Sign;
use num::{BigInt, BigUint, One, Signed, ToPrimitive, Zero};

use crate::ratio::{self, Rational};

/// Depths up to this value are always summed exactly.
pub const HEAD_DEPTH: u32 = 64;

/// Relative error allowance for the floating tail. The real error is below
/// 1e-8 for depths up to 10^6 and 10^7 summands.
const TAIL_SLACK: f64 = 1e-6;

/// Floating terms below `2^TINY_LOG2` are not evaluated; each one is
/// accounted for as `2^TINY_LOG2` in the upper bound.
const TINY_LOG2: f64 = -1000.0;

/// The base β together with the cached values the comparisons need.
#[derive(Clone, Debug)]
pub struct Beta {
    value: Rational,
    num: BigUint,
    den: BigUint,
    log2: f64,
    head_inv: Vec<Rational>,
    /// `q^d p^(HEAD_DEPTH-d)` for `beta = p/q`, over the common denominator `p^HEAD_DEPTH`.
    head_num: Vec<BigUint>,
    head_den: BigInt,
    /// `beta^-HEAD_DEPTH / (beta - 1)`, the sum of `beta^-d` over `d > HEAD_DEPTH`.
    geometric_tail: Rational,
    reciprocal: Rational,
}

impl Beta {
    pub fn new(value: Rational) -> Self {
        assert!(value > Rational::one(), "beta must exceed 1");
        let num = value.numer().magnitude().clone();
        let den = value.denom().magnitude().clone();
        let inv = value.recip();
        let mut head_inv = Vec::with_capacity(HEAD_DEPTH as usize + 1);
        let mut acc = Rational::one();
        for _ in 0..=HEAD_DEPTH {
            head_inv.push(acc.clone());
            acc *= &inv;
        }
        let geometric_tail = &head_inv[HEAD_DEPTH as usize] / (&value - Rational::one());
        let log2 = ratio::log2_biguint(&num) - ratio::log2_biguint(&den);
        let head_num = (0..=HEAD_DEPTH).map(|d| den.pow(d) * num.pow(HEAD_DEPTH - d)).collect();
        let head_den = BigInt::from_biguint(Sign::Plus, num.pow(HEAD_DEPTH));
        Beta { reciprocal: inv, value, num, den, log2, head_inv, head_num, head_den, geometric_tail }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn reciprocal(&self) -> &Rational {
        &self.reciprocal
    }

    pub fn log2(&self) -> f64 {
        self.log2
    }

    /// `beta^-d`, exact.
    pub fn inv_pow(&self, d: u32) -> Rational {
        match self.head_inv.get(d as usize) {
            Some(v) => v.clone(),
            None => Rational::new(
                BigInt::from_biguint(Sign::Plus, self.den.pow(d)),
                BigInt::from_biguint(Sign::Plus, self.num.pow(d)),
            ),
        }
    }

    /// Exact value of `sum_d counts[d] * beta^-d` for `d <= HEAD_DEPTH`.
    fn head_sum(&self, counts: &[u128; HEAD_DEPTH as usize + 1]) -> Rational {
        let mut acc = BigUint::zero();
        for (c, w) in counts.iter().zip(&self.head_num) {
            if *c != 0 {
                acc += w * BigUint::from(*c);
            }
        }
        // Left unreduced: only compared and subtracted from, never stored.
        Rational::new_raw(BigInt::from_biguint(Sign::Plus, acc), self.head_den.clone())
    }

    /// Exact value of `sum_d hist[d] * beta^-d`.
    pub fn exact_sum(&self, hist: &BTreeMap<u32, BigUint>) -> Rational {
        let Some((&max_depth, _)) = hist.iter().next_back() else {
            return Rational::zero();
        };
        if max_depth <= HEAD_DEPTH {
            let mut total = Rational::zero();
            for (&d, count) in hist {
                total += ratio::from_biguint(count) * &self.head_inv[d as usize];
            }
            return total;
        }
        // sum c_d q^d p^(D-d) / p^D with beta = p/q, by Horner over d.
        let mut acc = BigUint::zero();
        let mut q_pow = BigUint::one();
        let mut prev = 0u32;
        for (&d, count) in hist {
            let gap = d - prev;
            if gap > 0 {
                acc *= self.num.pow(gap);
                q_pow *= self.den.pow(gap);
            }
            acc += count * &q_pow;
            prev = d;
        }
        let denom = self.num.pow(max_depth);
        Rational::new(BigInt::from_biguint(Sign::Plus, acc), BigInt::from_biguint(Sign::Plus, denom))
    }
}

/// Running sum of weighted terms, split into an exact head and an
/// approximate tail.
#[derive(Clone, Debug)]
pub struct Tally {
    head: [u128; HEAD_DEPTH as usize + 1],
    /// Head mass that did not fit in `u128`.
    head_big: BTreeMap<u32, BigUint>,
    tail_approx: f64,
    tail_tiny: u64,
    tail_terms: u64,
    /// Depths of unit-multiplicity tail terms; these are not in `tail_approx`.
    tail_units: Vec<u32>,
    /// Run-length state of `tail_units` while it arrives in sorted order.
    units_sorted: bool,
    unit_run: u64,
    unit_max_run: u64,
    tail_has_bulk: bool,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            head: [0; HEAD_DEPTH as usize + 1],
            head_big: BTreeMap::new(),
            tail_approx: 0.0,
            tail_tiny: 0,
            tail_terms: 0,
            tail_units: Vec::new(),
            units_sorted: true,
            unit_run: 0,
            unit_max_run: 0,
            tail_has_bulk: false,
        }
    }
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.head.iter().all(|&c| c == 0) && self.head_big.is_empty() && self.tail_terms == 0
    }

    /// Adds `mult * beta^-depth`. `mult` is only evaluated for shallow terms;
    /// deep terms use `log2_mult`.
    pub fn add(
        &mut self,
        beta: &Beta,
        depth: u32,
        unit: bool,
        mult: impl FnOnce() -> BigUint,
        log2_mult: impl FnOnce() -> f64,
    ) {
        if depth <= HEAD_DEPTH {
            let slot = &mut self.head[depth as usize];
            if unit {
                *slot += 1;
                return;
            }
            let m = mult();
            match m.to_u128().and_then(|m| slot.checked_add(m)) {
                Some(v) => *slot = v,
                None => *self.head_big.entry(depth).or_default() += m,
            }
            return;
        }
        self.tail_terms += 1;
        if unit {
            match self.tail_units.last() {
                Some(&last) if last == depth => self.unit_run += 1,
                Some(&last) if last > depth => self.units_sorted = false,
                _ => self.unit_run = 1,
            }
            self.unit_max_run = self.unit_max_run.max(self.unit_run);
            self.tail_units.push(depth);
            return;
        }
        self.tail_has_bulk = true;
        let e = log2_mult() - depth as f64 * beta.log2();
        if e < TINY_LOG2 {
            self.tail_tiny += 1;
        } else {
            self.tail_approx += e.exp2();
        }
    }

    /// Largest number of unit tail terms sharing one depth.
    fn max_unit_count(&self) -> u64 {
        if self.units_sorted {
            return self.unit_max_run;
        }
        let mut depths = self.tail_units.clone();
        depths.sort_unstable();
        depths.chunk_by(|a, b| a == b).map(|run| run.len() as u64).max().unwrap_or(0)
    }

    /// Floating sum of the unit tail terms and the number of tiny ones.
    fn unit_float(&self, beta: &Beta) -> (f64, u64) {
        let mut sum = 0.0;
        let mut tiny = 0;
        for &d in &self.tail_units {
            let e = -(d as f64) * beta.log2();
            if e < TINY_LOG2 {
                tiny += 1;
            } else {
                sum += e.exp2();
            }
        }
        (sum, tiny)
    }

    fn head_value(&self, beta: &Beta) -> Rational {
        let mut v = beta.head_sum(&self.head);
        if !self.head_big.is_empty() {
            v += beta.exact_sum(&self.head_big);
        }
        v
    }

    /// Upper bound on the tail as an exact rational.
    fn tail_upper(&self, beta: &Beta) -> Rational {
        let (units, tiny) = self.unit_float(beta);
        Self::float_upper(self.tail_approx + units, self.tail_tiny + tiny)
    }

    fn float_upper(approx: f64, tiny: u64) -> Rational {
        let bound = approx * (1.0 + TAIL_SLACK) + tiny as f64 * TINY_LOG2.exp2();
        Rational::from_float(bound).expect("finite tail")
    }

    fn tail_lower(&self, beta: &Beta) -> Rational {
        let v = (self.tail_approx + self.unit_float(beta).0) * (1.0 - TAIL_SLACK);
        Rational::from_float(v.max(0.0)).expect("finite tail")
    }

    /// Decides `total < threshold` (strict) or `total <= threshold`.
    /// Returns `None` when only the exact value can decide.
    pub fn try_compare(&self, beta: &Beta, threshold: &Rational, strict: bool) -> Option<bool> {
        let head = self.head_value(beta);
        // threshold - head without a gcd pass
        let gap = Rational::new_raw(
            threshold.numer() * head.denom() - head.numer() * threshold.denom(),
            threshold.denom() * head.denom(),
        );
        let fits = |x: &Rational| if strict { *x < gap } else { *x <= gap };
        if self.tail_terms == 0 {
            return Some(fits(&Rational::zero()));
        }
        if gap.is_negative() || (strict && gap.is_zero()) {
            return Some(false);
        }
        // Unit terms alone: at most `max_count` per depth, so a geometric bound applies.
        if !self.tail_has_bulk && fits(&(ratio::int(self.max_unit_count() as i64) * &beta.geometric_tail)) {
            return Some(true);
        }
        if fits(&self.tail_upper(beta)) {
            return Some(true);
        }
        if !fits(&self.tail_lower(beta)) {
            return Some(false);
        }
        None
    }

    /// Approximate value, for diagnostics only.
    pub fn approx(&self, beta: &Beta) -> f64 {
        ratio::to_f64(&self.head_value(beta)) + self.tail_approx + self.unit_float(beta).0
    }
}

/// Exact accumulator keyed by depth.
#[derive(Clone, Debug, Default)]
pub struct Histogram {
    counts: BTreeMap<u32, BigUint>,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, depth: u32, mult: &BigUint) {
        *self.counts.entry(depth).or_default() += mult;
    }

    pub fn add_one(&mut self, depth: u32) {
        *self.counts.entry(depth).or_default() += 1u32;
    }

    pub fn value(&self, beta: &Beta) -> Rational {
        beta.exact_sum(&self.counts)
    }
}
