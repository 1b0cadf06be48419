//! Reals that are badly approximable with respect to sparse denominators.
//!
//! θ ∈ [0, 1] is ε-regular for `t` when `d(tθ, ℤ) > ε`. Let `T` be a set of
//! positive integers with at most `C` members in every octave
//! `P_j = T ∩ (2^j, 2^(j+1)]`. With `ε = 2^-k`, θ is built bit by bit as
//! the common point of nested dyadic intervals: when Bob sits on a level-`m`
//! interval, Alice forbids the level-`(m+k-2)` subintervals that come
//! within `ε/t` of some `z/t`, `t ∈ P_(m-2)`. Each `t` forbids at most three
//! of them.
//!
//! Two sufficient conditions for Bob are evaluated:
//! - the published one, `β + 3C/β^(k-1) ≤ 2`, which gates generation;
//! - the game criterion with the move weight `3C·β^-(k-2)`, i.e.
//!   `β(1 + 3C/β^(k-2)) ≤ 2`. When it holds, the budget is also enforced
//!   on every move; otherwise the run relies on the engine's per-step
//!   invariant, which fails loudly instead of producing a wrong θ. The
//!   published condition alone does not keep Bob safe: rare sets corner
//!   him at the minimal `k` although a regular θ extends his prefix.

use num::bigint::Sign;
use num::{BigInt, BigUint, One, ToPrimitive, Zero};

use crate::error::{GameError, Result};
use crate::game::{self, Accounting, Adversary, AliceMove, Child, GameParams, NoBundle, RelPath};
use crate::ratio::{self, Rational};
use crate::report::{VerificationReport, Violation};

/// Octave index `j` with `2^j < t ≤ 2^(j+1)`; `-1` for `t = 1`.
pub fn octave(t: &BigUint) -> i64 {
    assert!(!t.is_zero(), "denominators are positive");
    (t - 1u32).bits() as i64 - 1
}

/// A set of positive integer denominators, materialized up to some octave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorSet {
    /// `groups[j + 1] = P_j`, ascending.
    groups: Vec<Vec<BigUint>>,
    octave_bound: usize,
}

impl DenominatorSet {
    /// Strictly increasing positive members; octaves above `max_j` are dropped.
    pub fn from_members(members: Vec<BigUint>, max_j: i64) -> Result<Self> {
        let mut groups: Vec<Vec<BigUint>> = vec![Vec::new(); (max_j + 2).max(0) as usize];
        for (i, t) in members.iter().enumerate() {
            if t.is_zero() {
                return Err(GameError::InvalidParams("denominator 0".into()));
            }
            if i > 0 && members[i - 1] >= *t {
                return Err(GameError::InvalidParams(format!("denominators not strictly increasing at {t}")));
            }
            let j = octave(t);
            if j <= max_j {
                groups[(j + 1) as usize].push(t.clone());
            }
        }
        let octave_bound = groups.iter().map(Vec::len).max().unwrap_or(0);
        Ok(DenominatorSet { groups, octave_bound })
    }

    /// `{1, 2, 4, ...}`, one per octave.
    pub fn pow2(max_j: i64) -> Self {
        let members = (0..=(max_j + 1).max(0) as u64).map(|i| BigUint::one() << i).collect();
        Self::from_members(members, max_j).expect("powers of two are increasing")
    }

    /// Distinct Fibonacci numbers `{1, 2, 3, 5, 8, ...}`, at most two per octave.
    pub fn fib(max_j: i64) -> Self {
        let limit = BigUint::one() << (max_j + 1).max(0) as u64;
        let (mut a, mut b) = (BigUint::one(), BigUint::from(2u32));
        let mut members = Vec::new();
        while a <= limit {
            members.push(a.clone());
            let next = &a + &b;
            a = std::mem::replace(&mut b, next);
        }
        Self::from_members(members, max_j).expect("Fibonacci numbers are increasing")
    }

    /// One decimal integer per line, ascending; `#` starts a comment.
    pub fn parse(text: &str, max_j: i64) -> Result<Self> {
        let mut members = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t: BigUint = line
                .parse()
                .map_err(|_| GameError::Parse(format!("line {}: bad denominator {line:?}", lineno + 1)))?;
            members.push(t);
        }
        Self::from_members(members, max_j).map_err(|e| match e {
            GameError::InvalidParams(m) => GameError::Parse(m),
            other => other,
        })
    }

    pub fn empty() -> Self {
        DenominatorSet { groups: Vec::new(), octave_bound: 0 }
    }

    /// `P_j`; empty outside the materialized range.
    pub fn group(&self, j: i64) -> &[BigUint] {
        if j < -1 {
            return &[];
        }
        self.groups.get((j + 1) as usize).map_or(&[], Vec::as_slice)
    }

    /// Largest octave count seen.
    pub fn octave_bound(&self) -> usize {
        self.octave_bound
    }

    pub fn max_octave(&self) -> i64 {
        self.groups.len() as i64 - 2
    }
}

/// `2^-k`.
pub fn epsilon(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

fn big(n: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

fn dyadic(a: &BigUint, level: u32) -> Rational {
    Rational::new(big(a), BigInt::one() << level)
}

/// Integers `z` with `|x - z/t| ≤ ε/t` for some `x` in `[a/2^ℓ, (a+1)/2^ℓ]`.
fn stripe_range(level: u32, a: &BigUint, t: &BigUint, eps: &Rational) -> (BigInt, BigInt) {
    let tr = Rational::from_integer(big(t));
    let lo = ratio::ceil(&(&tr * dyadic(a, level) - eps));
    let hi = ratio::floor(&(&tr * dyadic(&(a + 1u32), level) + eps));
    (lo, hi)
}

/// Does the closed interval `[a/2^ℓ, (a+1)/2^ℓ]` contain some `x` with
/// `d(tx, ℤ) ≤ ε`?
pub fn interval_invalid(level: u32, a: &BigUint, t: &BigUint, eps: &Rational) -> bool {
    let (lo, hi) = stripe_range(level, a, t, eps);
    hi >= lo
}

#[derive(Clone, Debug)]
pub struct DiophParams {
    k: u32,
    c_bound: usize,
    beta: Rational,
    omega: Rational,
    game_condition: bool,
}

/// `β + 3C/β^(k-1)`.
pub fn published_lhs(c: usize, k: u32, beta: &Rational) -> Rational {
    beta + ratio::int(3 * c as i64) / ratio::pow(beta, k - 1)
}

/// `β(1 + 3C/β^(k-2))`.
pub fn game_lhs(c: usize, k: u32, beta: &Rational) -> Rational {
    beta * (Rational::one() + ratio::int(3 * c as i64) / ratio::pow(beta, k - 2))
}

/// Requires `k ≥ 3`, `1 < β < 2` and `β + 3C/β^(k-1) ≤ 2`.
pub fn certify_dioph(c_bound: usize, k: u32, beta: Rational) -> Result<DiophParams> {
    if k < 3 {
        return Err(GameError::InvalidParams(format!("k = {k} < 3")));
    }
    if c_bound == 0 {
        return Err(GameError::InvalidParams("octave bound C must be positive".into()));
    }
    if beta <= Rational::one() || beta >= ratio::int(2) {
        return Err(GameError::NotCertified(format!("beta {} not in (1, 2)", ratio::format_rational(&beta))));
    }
    let lhs = published_lhs(c_bound, k, &beta);
    if lhs > ratio::int(2) {
        return Err(GameError::NotCertified(format!(
            "beta + 3C/beta^(k-1) = {} > 2 for C = {c_bound}, k = {k}",
            ratio::format_decimal(&lhs, 6)
        )));
    }
    let omega = ratio::int(3 * c_bound as i64) / ratio::pow(&beta, k - 2);
    let game_condition = game_lhs(c_bound, k, &beta) <= ratio::int(2);
    Ok(DiophParams { k, c_bound, beta, omega, game_condition })
}

impl DiophParams {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c_bound(&self) -> usize {
        self.c_bound
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn epsilon(&self) -> Rational {
        epsilon(self.k)
    }

    /// Worst-case move weight `3C·β^-(k-2)`.
    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    /// Whether `β(1 + ω) ≤ 2` holds as well.
    pub fn game_condition(&self) -> bool {
        self.game_condition
    }

    pub fn game_params(&self) -> Result<GameParams> {
        let omega = self.game_condition.then(|| self.omega.clone());
        GameParams::new(2, self.beta.clone(), omega)
    }
}

/// Forbidden level-`(m+k-2)` subintervals of the level-`m` interval `u`,
/// as paths of `k-2` bits (most significant first).
pub fn alice_dioph_move(m: u32, u: &BigUint, set: &DenominatorSet, params: &DiophParams) -> Result<AliceMove<NoBundle>> {
    let mut mv = AliceMove::empty();
    let j = m as i64 - 2;
    let eps = params.epsilon();
    let sub_bits = params.k - 2;
    let level = m + sub_bits;
    let base = BigInt::from_biguint(Sign::Plus, u << sub_bits);
    let count = BigInt::one() << sub_bits;
    for t in set.group(j) {
        let (zlo, zhi) = stripe_range(m, u, t, &eps);
        let tr = Rational::from_integer(big(t));
        let scale = Rational::from_integer(BigInt::one() << level);
        let mut touched: Vec<BigInt> = Vec::new();
        let mut z = zlo;
        while z <= zhi {
            let center = Rational::new(z.clone(), big(t));
            let half = &eps / &tr;
            let s_lo = ratio::ceil(&((&center - &half) * &scale)) - BigInt::one();
            let s_hi = ratio::floor(&((&center + &half) * &scale));
            let mut s = (s_lo - &base).max(BigInt::zero());
            let end = (s_hi - &base).min(&count - BigInt::one());
            while s <= end {
                if !touched.contains(&s) {
                    touched.push(s.clone());
                }
                s += BigInt::one();
            }
            z += BigInt::one();
        }
        if touched.len() > 3 {
            return Err(GameError::LemmaViolated { t: t.to_string(), touched: touched.len(), level: level as u64 });
        }
        touched.sort();
        for s in touched {
            let abs = (&base + &s).to_biguint().expect("nonnegative");
            if !interval_invalid(level, &abs, t, &eps) {
                return Err(GameError::InvariantBroken(format!(
                    "subinterval {abs} at level {level} marked for t = {t} but valid"
                )));
            }
            let r = s.to_u64().expect("k - 2 bits");
            let path = (0..sub_bits).rev().map(|b| ((r >> b) & 1) as Child).collect();
            mv.push_path(RelPath::new(path)?);
        }
    }
    Ok(mv)
}

pub struct DiophAdversary {
    set: DenominatorSet,
    params: DiophParams,
    u: BigUint,
}

impl DiophAdversary {
    pub fn new(set: DenominatorSet, params: DiophParams) -> Result<Self> {
        if set.octave_bound() > params.c_bound {
            return Err(GameError::InvalidParams(format!(
                "denominator set has {} members in one octave, more than C = {}",
                set.octave_bound(),
                params.c_bound
            )));
        }
        Ok(DiophAdversary { set, params, u: BigUint::zero() })
    }
}

impl Adversary for DiophAdversary {
    type Bundle = NoBundle;

    fn arity(&self) -> usize {
        2
    }

    fn omega(&self) -> Option<Rational> {
        self.params.game_condition.then(|| self.params.omega.clone())
    }

    fn context(&self) -> &() {
        &()
    }

    fn next_move(&mut self, path: &[Child]) -> Result<AliceMove<NoBundle>> {
        alice_dioph_move(path.len() as u32, &self.u, &self.set, &self.params)
    }

    fn observe(&mut self, child: Child) -> Result<()> {
        self.u = (&self.u << 1u32) + child;
        Ok(())
    }
}

/// The first `nbits` bits of θ after the binary point.
///
/// Bob prunes the ledger (descendants of forbidden vertices, full sibling
/// sets), which only lowers the weight. When only the published condition
/// holds, Bob can still be cornered; the run then ends in `NoSafeChild`.
pub fn generate_theta(set: &DenominatorSet, params: &DiophParams, nbits: usize) -> Result<Vec<Child>> {
    let alice = DiophAdversary::new(set.clone(), params.clone())?;
    let mut game = game::Game::new(params.game_params()?, alice, Accounting::Filtered)?.with_subsumption_pruning(true);
    game.play(nbits)?;
    Ok(game.path().to_vec())
}

/// Checks the level-`n` interval of `bits` against every `t ∈ P_j` with
/// `j + k ≤ n`.
pub fn verify_regularity(bits: &[Child], set: &DenominatorSet, k: u32) -> VerificationReport {
    let mut report = VerificationReport::pass();
    let n = bits.len() as u32;
    let u = bits.iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + b);
    let eps = epsilon(k);
    let mut j = -1i64;
    while j + k as i64 <= n as i64 {
        for t in set.group(j) {
            let (lo, hi) = stripe_range(n, &u, t, &eps);
            if lo <= hi {
                let center = Rational::new(lo.clone(), big(t));
                report.push(Violation::Regularity {
                    t: t.clone(),
                    center_num: center.numer().magnitude().clone(),
                    center_den: center.denom().magnitude().clone(),
                });
            }
        }
        j += 1;
    }
    report
}

/// `d(tθ, ℤ)` for a rational θ.
pub fn distance_to_integer(x: &Rational) -> Rational {
    let frac = x - Rational::from_integer(x.floor().to_integer());
    let other = Rational::one() - &frac;
    frac.min(other)
}

/// θ as the left endpoint of the level-`n` interval.
pub fn theta_of(bits: &[Child]) -> Rational {
    let u = bits.iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + b);
    dyadic(&u, bits.len() as u32)
}

/// Parses a set spec: `pow2`, `fib` or `file:<path>` (the file's text is
/// supplied by the caller through `read`).
pub fn parse_set_spec(spec: &str, max_j: i64, read: impl FnOnce(&str) -> Result<String>) -> Result<DenominatorSet> {
    match spec {
        "pow2" => Ok(DenominatorSet::pow2(max_j)),
        "fib" => Ok(DenominatorSet::fib(max_j)),
        "empty" => Ok(DenominatorSet::empty()),
        other => match other.strip_prefix("file:") {
            Some(path) => DenominatorSet::parse(&read(path)?, max_j),
            None => Err(GameError::Parse(format!("unknown denominator set {other:?} (pow2, fib, file:<path>)"))),
        },
    }
}
