//! Binary sequences whose adjacent blocks differ substantially.
//!
//! For `0 < ε < 1/2`, any two adjacent blocks of equal length `n ≥ N` must
//! differ in at least `(1/2 - ε)n` places. After `w` is written, for every
//! suffix `v` of length `n ≥ N` Alice forbids the whole Hamming ball of
//! words within distance `T(n)` of `v`, where `T(n)` is the largest integer
//! below `(1/2 - ε)n`. A ball is kept symbolically: its anchor, its radius
//! and how many mismatches the descent has used so far.
//!
//! Ball sizes are at most `(2·e^(-2ε²))ⁿ` (Hoeffding), so for β between
//! that base and 2 the per-move weight `Σ_{n≥N} |ball(n)|·β^-n` is small
//! once `N` is large.

use std::cell::RefCell;
use std::collections::HashMap;

use num::{BigUint, One, ToPrimitive, Zero};

use crate::error::{GameError, Result};
use crate::game::{Accounting, Adversary, AliceMove, Bundle, Child, Game, GameParams};
use crate::ratio::{self, Rational};
use crate::report::{VerificationReport, Violation};
use crate::weight::{Beta, Histogram};

/// `Σ_{d=0}^{min(r,n)} C(n, d)`; zero for negative `r`.
pub fn ball_count(n: u64, r: i64) -> BigUint {
    if r < 0 {
        return BigUint::zero();
    }
    let top = (r as u64).min(n);
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for d in 1..=top {
        term = term * (n - d + 1) / d;
        total += &term;
    }
    total
}

/// Largest integer `d` with `d < (1/2 - ε)n`. Negative when no distance qualifies.
pub fn threshold(epsilon: &Rational, n: u64) -> i64 {
    let x = (ratio::ratio(1, 2) - epsilon) * ratio::int(n as i64);
    (ratio::ceil(&x) - num::BigInt::one()).to_i64().expect("threshold fits i64")
}

/// Descent state of one ball, independent of where the anchor lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BallState {
    pub len: u32,
    pub threshold: u32,
    pub consumed: u32,
    pub remaining: u32,
}

impl BallState {
    pub fn new(len: u32, threshold: u32) -> Self {
        BallState { len, threshold, consumed: 0, remaining: len }
    }

    /// Mismatches still allowed.
    pub fn budget(&self) -> u32 {
        self.threshold - self.consumed
    }

    /// Offset into the anchor of the next step.
    pub fn position(&self) -> usize {
        (self.len - self.remaining) as usize
    }

    pub fn advance(&self, mismatch: bool) -> Option<BallState> {
        assert!(self.remaining >= 1, "ball already fully walked");
        let consumed = self.consumed + mismatch as u32;
        (consumed <= self.threshold).then_some(BallState { consumed, remaining: self.remaining - 1, ..*self })
    }

    pub fn multiplicity(&self) -> BigUint {
        ball_count(self.remaining as u64, self.budget() as i64)
    }
}

/// A Hamming ball carrying its own anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HammingBallObstruction {
    pub anchor: Vec<Child>,
    pub state: BallState,
}

impl HammingBallObstruction {
    /// `None` when the radius is negative (the ball is empty).
    pub fn new(anchor: Vec<Child>, threshold: i64) -> Option<Self> {
        let t = u32::try_from(threshold).ok()?;
        let state = BallState::new(anchor.len() as u32, t);
        Some(HammingBallObstruction { anchor, state })
    }

    pub fn multiplicity(&self) -> BigUint {
        self.state.multiplicity()
    }
}

pub fn split_ball(b: &HammingBallObstruction, childbit: Child) -> Option<HammingBallObstruction> {
    let mismatch = b.anchor[b.state.position()] != childbit;
    b.state
        .advance(mismatch)
        .map(|state| HammingBallObstruction { anchor: b.anchor.clone(), state })
}

/// Ball counts as `log2`, row by row, grown on demand. Exact values are
/// memoized separately.
#[derive(Debug, Default)]
pub struct BallTables {
    /// Row `r` holds `log2 ball_count(r, b)` for `b < min(r + 1, cols)`.
    log2_rows: Vec<Vec<f64>>,
    /// `log2 C(r, d)` for the last entry of each row.
    last_term: Vec<f64>,
    cols: usize,
    exact: RefCell<HashMap<(u32, u32), BigUint>>,
}

impl BallTables {
    /// Makes `log2_ball(r, b)` a table lookup for `r ≤ max_r`, `b ≤ max_b`.
    pub fn ensure(&mut self, max_r: u32, max_b: u32) {
        self.cols = self.cols.max(max_b as usize + 1);
        while self.log2_rows.len() <= max_r as usize {
            self.log2_rows.push(vec![0.0]);
            self.last_term.push(0.0);
        }
        for (r, row) in self.log2_rows.iter_mut().enumerate() {
            let width = self.cols.min(r + 1);
            let term = &mut self.last_term[r];
            while row.len() < width {
                let d = row.len();
                *term += ((r - d + 1) as f64).log2() - (d as f64).log2();
                let acc = *row.last().expect("row starts with d = 0");
                let (hi, lo) = if *term > acc { (*term, acc) } else { (acc, *term) };
                row.push(hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2);
            }
        }
    }

    pub fn log2_ball(&self, r: u32, b: u32) -> f64 {
        if b >= r {
            return r as f64;
        }
        match self.log2_rows.get(r as usize).and_then(|row| row.get(b as usize)) {
            Some(&v) => v,
            None => crate::ratio::log2_biguint(&ball_count(r as u64, b as i64)),
        }
    }

    pub fn ball(&self, r: u32, b: u32) -> BigUint {
        if b >= r {
            return BigUint::one() << r;
        }
        self.exact
            .borrow_mut()
            .entry((r, b))
            .or_insert_with(|| ball_count(r as u64, b as i64))
            .clone()
    }
}

/// The word so far plus the counting tables.
#[derive(Debug, Default)]
pub struct BlocksState {
    word: Vec<Child>,
    tables: BallTables,
}

impl BlocksState {
    pub fn word(&self) -> &[Child] {
        &self.word
    }
}

/// A ball whose anchor is `word[anchor_start..anchor_start + len]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockBall {
    pub anchor_start: u32,
    pub state: BallState,
}

impl Bundle for BlockBall {
    type Ctx = BlocksState;
    const MAY_VANISH: bool = false;

    fn depth(&self) -> u32 {
        self.state.remaining
    }

    fn multiplicity(&self, ctx: &BlocksState) -> BigUint {
        ctx.tables.ball(self.state.remaining, self.state.budget())
    }

    fn log2_multiplicity(&self, ctx: &BlocksState) -> f64 {
        ctx.tables.log2_ball(self.state.remaining, self.state.budget())
    }

    fn split(&self, child: Child, ctx: &BlocksState) -> Option<Self> {
        let bit = ctx.word[self.anchor_start as usize + self.state.position()];
        let state = self.state.advance(bit != child)?;
        Some(BlockBall { state, ..*self })
    }

    fn describe(&self) -> String {
        format!("ball({}+{}, r={})", self.anchor_start, self.state.len, self.state.threshold)
    }
}

#[derive(Clone, Debug)]
pub struct BlocksParams {
    epsilon: Rational,
    beta: Rational,
    n: u32,
    c_upper: Rational,
    cutoff: u32,
    omega: Rational,
}

/// Exact terms are summed for `N ≤ n ≤ N + CUTOFF_SPAN`; beyond that the
/// Hoeffding bound `cⁿ` takes over.
const CUTOFF_SPAN: u32 = 64;

/// Largest `N` tried by the automatic search.
pub const MAX_AUTO_N: u32 = 1 << 14;

/// Rational upper bound on `2·e^(-2ε²)`.
pub fn c_upper(epsilon: &Rational) -> Rational {
    let x = ratio::int(2) * epsilon * epsilon;
    ratio::int(2) * ratio::exp_neg_upper(&x)
}

fn certified_omega(epsilon: &Rational, beta: &Beta, c: &Rational, n: u32) -> Result<(Rational, u32)> {
    let m = n + CUTOFF_SPAN;
    for probe in [m, m + 1] {
        let b = ball_count(probe as u64, threshold(epsilon, probe as u64));
        if ratio::from_biguint(&b) > ratio::pow(c, probe) {
            return Err(GameError::NotCertified(format!(
                "ball size at n = {probe} exceeds c_upper^n"
            )));
        }
    }
    let mut hist = Histogram::new();
    for len in n..=m {
        let t = threshold(epsilon, len as u64);
        if t >= 0 {
            hist.add(len, &ball_count(len as u64, t));
        }
    }
    let r = c / beta.value();
    let tail = ratio::pow(&r, m + 1) / (Rational::one() - &r);
    Ok((hist.value(beta) + tail, m))
}

fn fits(beta: &Rational, omega: &Rational) -> bool {
    beta * (Rational::one() + omega) <= ratio::int(2)
}

/// Certifies `(ε, β, N)`; `n = None` searches for the smallest `N` up to
/// [`MAX_AUTO_N`].
pub fn certify_blocks_params(epsilon: Rational, beta: Rational, n: Option<u32>) -> Result<BlocksParams> {
    if epsilon <= Rational::zero() || epsilon >= ratio::ratio(1, 2) {
        return Err(GameError::NotCertified(format!(
            "epsilon {} not in (0, 1/2)",
            ratio::format_rational(&epsilon)
        )));
    }
    let c = c_upper(&epsilon);
    if beta <= c || beta >= ratio::int(2) {
        return Err(GameError::NotCertified(format!(
            "beta {} not in (c_upper, 2) with c_upper = {} ~ {}",
            ratio::format_rational(&beta),
            ratio::format_rational(&c),
            ratio::format_decimal(&c, 6)
        )));
    }
    let b = Beta::new(beta.clone());
    let eval = |n: u32| certified_omega(&epsilon, &b, &c, n);
    let n = match n {
        Some(0) => return Err(GameError::InvalidParams("N must be at least 1".into())),
        Some(n) => n,
        None => {
            // omega(N) decreases in N, so bisect for the first fit.
            let (mut lo, mut hi) = (1u32, 1u32);
            while !fits(&beta, &eval(hi)?.0) {
                if hi >= MAX_AUTO_N {
                    return Err(GameError::NotCertified(format!(
                        "no N <= {MAX_AUTO_N} satisfies beta*(1+omega) <= 2"
                    )));
                }
                lo = hi + 1;
                hi = (hi * 2).min(MAX_AUTO_N);
            }
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if fits(&beta, &eval(mid)?.0) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        }
    };
    let (omega, cutoff) = eval(n)?;
    if !fits(&beta, &omega) {
        return Err(GameError::NotCertified(format!(
            "beta*(1+omega) = {} > 2 at N = {n} (omega = {})",
            ratio::format_decimal(&(&beta * (Rational::one() + &omega)), 6),
            ratio::format_decimal(&omega, 6)
        )));
    }
    Ok(BlocksParams { epsilon, beta, n, c_upper: c, cutoff, omega })
}

impl BlocksParams {
    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn c_upper(&self) -> &Rational {
        &self.c_upper
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    pub fn game_params(&self) -> Result<GameParams> {
        GameParams::new(2, self.beta.clone(), Some(self.omega.clone()))
    }
}

/// One ball per suffix length `N ≤ n ≤ |w|` with a nonnegative radius.
pub fn alice_blocks_move(w: &[Child], params: &BlocksParams) -> AliceMove<HammingBallObstruction> {
    let mut mv = AliceMove::empty();
    for n in params.n as usize..=w.len() {
        if let Some(b) = HammingBallObstruction::new(w[w.len() - n..].to_vec(), threshold(&params.epsilon, n as u64)) {
            mv.push_bundle(b);
        }
    }
    mv
}

impl Bundle for HammingBallObstruction {
    type Ctx = ();

    fn depth(&self) -> u32 {
        self.state.remaining
    }

    fn multiplicity(&self, _: &()) -> BigUint {
        HammingBallObstruction::multiplicity(self)
    }

    fn split(&self, child: Child, _: &()) -> Option<Self> {
        split_ball(self, child)
    }
}

pub struct BlocksAdversary {
    params: BlocksParams,
    thresholds: Vec<i64>,
    state: BlocksState,
}

impl BlocksAdversary {
    pub fn new(params: BlocksParams) -> Self {
        BlocksAdversary { params, thresholds: vec![-1], state: BlocksState::default() }
    }

    fn threshold(&mut self, n: usize) -> i64 {
        while self.thresholds.len() <= n {
            let t = threshold(&self.params.epsilon, self.thresholds.len() as u64);
            self.thresholds.push(t);
        }
        self.thresholds[n]
    }
}

impl Adversary for BlocksAdversary {
    type Bundle = BlockBall;

    fn arity(&self) -> usize {
        2
    }

    fn omega(&self) -> Option<Rational> {
        Some(self.params.omega.clone())
    }

    fn context(&self) -> &BlocksState {
        &self.state
    }

    fn next_move(&mut self, _path: &[Child]) -> Result<AliceMove<BlockBall>> {
        let len = self.state.word.len();
        let mut mv = AliceMove::empty();
        for n in self.params.n as usize..=len {
            if let Ok(t) = u32::try_from(self.threshold(n)) {
                let anchor_start = (len - n) as u32;
                mv.push_bundle(BlockBall { anchor_start, state: BallState::new(n as u32, t) });
            }
        }
        let max_t = self.threshold(len.max(1)).max(0) as u32;
        self.state.tables.ensure(len as u32, max_t + 1);
        Ok(mv)
    }

    fn observe(&mut self, child: Child) -> Result<()> {
        self.state.word.push(child);
        Ok(())
    }
}

pub fn generate_blocks_with(params: &BlocksParams, length: usize, accounting: Accounting) -> Result<Vec<Child>> {
    let mut game = Game::new(params.game_params()?, BlocksAdversary::new(params.clone()), accounting)?;
    game.play(length)?;
    Ok(game.path().to_vec())
}

pub fn generate_blocks(params: &BlocksParams, length: usize) -> Result<Vec<Child>> {
    generate_blocks_with(params, length, Accounting::Filtered)
}

/// Every `(i, n)` with `n ≥ N`, `i + 2n ≤ |bits|` and adjacent blocks at
/// Hamming distance below `(1/2 - ε)n`.
pub fn verify_blocks<T: PartialEq>(bits: &[T], epsilon: &Rational, n_min: u32) -> VerificationReport {
    let mut report = VerificationReport::pass();
    let len = bits.len();
    let mut prefix = vec![0usize; len + 1];
    for n in (n_min.max(1) as usize)..=len / 2 {
        let t = threshold(epsilon, n as u64);
        if t < 0 {
            continue;
        }
        // prefix[j] = number of mismatches bits[x] != bits[x+n] for x < j.
        for j in 0..len - n {
            prefix[j + 1] = prefix[j] + (bits[j] != bits[j + n]) as usize;
        }
        for i in 0..=len - 2 * n {
            let distance = prefix[i + n] - prefix[i];
            if distance as i64 <= t {
                report.push(Violation::Blocks { i, n, distance });
            }
        }
    }
    report
}
