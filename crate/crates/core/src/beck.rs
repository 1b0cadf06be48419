//! Binary sequences whose equal long factors are far apart.
//!
//! For rational `1 < c < 2`, two occurrences of the same length-`n` factor
//! (`n ≥ N`) must start at least `cⁿ` apart. After `w` has been written,
//! every start `i` with `d = |w| - i` is a potential earlier occurrence of
//! the factor that begins now. Alice forbids its continuation, which she
//! can spell out even where it overlaps the future. Only the shortest
//! relevant length `n_i` (smallest `n ≥ N` with `cⁿ > d`) is forbidden; the
//! longer ones extend that path and are already covered.

use num::{BigInt, One, ToPrimitive, Zero};

use crate::error::{GameError, Result};
use crate::game::{self, Adversary, AliceMove, Child, GameParams, NoBundle, RelPath};
use crate::ratio::{self, Rational};
use crate::report::{VerificationReport, Violation};

/// `(c/β)^N / (1 - c/β)`.
pub fn tail(c: &Rational, beta: &Rational, n: u32) -> Rational {
    let r = c / beta;
    ratio::pow(&r, n) / (Rational::one() - &r)
}

fn tail_fits(beta: &Rational, tail: &Rational) -> bool {
    beta * (Rational::one() + tail) <= ratio::int(2)
}

fn check_range(c: &Rational, beta: &Rational) -> Result<()> {
    let (one, two) = (Rational::one(), ratio::int(2));
    if *c <= one || *c >= two {
        return Err(GameError::NotCertified(format!("c = {} not in (1, 2)", ratio::format_rational(c))));
    }
    if beta <= c || *beta >= two {
        return Err(GameError::NotCertified(format!(
            "beta = {} not in (c, 2)",
            ratio::format_rational(beta)
        )));
    }
    Ok(())
}

/// Smallest `N ≥ 1` with `β(1 + tail(N)) ≤ 2`, by exact iteration.
///
/// # Panics
/// If `1 < c < β < 2` does not hold.
pub fn min_n(c: &Rational, beta: &Rational) -> u32 {
    check_range(c, beta).expect("1 < c < beta < 2");
    let r = c / beta;
    let mut t = &r / (Rational::one() - &r);
    let mut n = 1;
    while !tail_fits(beta, &t) {
        t *= &r;
        n += 1;
    }
    n
}

/// `caps[n] = ceil(cⁿ) - 1`, the largest distance `d` with `d < cⁿ`.
#[derive(Clone, Debug)]
pub struct DistanceCaps {
    c: Rational,
    power: Rational,
    caps: Vec<u64>,
}

impl DistanceCaps {
    pub fn new(c: Rational) -> Self {
        DistanceCaps { power: Rational::one(), caps: vec![0], c }
    }

    fn extend(&mut self) {
        self.power *= &self.c;
        let cap = (ratio::ceil(&self.power) - BigInt::one()).to_u64().unwrap_or(u64::MAX);
        self.caps.push(cap);
    }

    /// Smallest `n ≥ at_least` with `d < cⁿ`.
    pub fn length_for(&mut self, d: u64, at_least: u32) -> u32 {
        let mut n = at_least as usize;
        loop {
            while self.caps.len() <= n {
                self.extend();
            }
            if self.caps[n] >= d {
                return n as u32;
            }
            n += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct BeckParams {
    c: Rational,
    beta: Rational,
    n: u32,
    omega: Rational,
}

impl BeckParams {
    /// `n = None` picks `min_n(c, beta)`.
    pub fn certify(c: Rational, beta: Rational, n: Option<u32>) -> Result<Self> {
        check_range(&c, &beta)?;
        let n = match n {
            Some(0) => return Err(GameError::InvalidParams("N must be at least 1".into())),
            Some(n) => n,
            None => min_n(&c, &beta),
        };
        let omega = tail(&c, &beta, n);
        if !tail_fits(&beta, &omega) {
            return Err(GameError::NotCertified(format!(
                "beta*(1+tail(N)) > 2 for N = {n}; need N >= {}",
                min_n(&c, &beta)
            )));
        }
        Ok(BeckParams { c, beta, n, omega })
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    pub fn game_params(&self) -> Result<GameParams> {
        GameParams::new(2, self.beta.clone(), Some(self.omega.clone()))
    }
}

/// The length-`n` word `e` that starts at `i` in `w` and runs on into its
/// own continuation: `e[t] = w[i+t]` inside `w`, else `e[i+t-|w|]`.
pub fn reconstruct_overlap(w: &[Child], i: usize, n: usize) -> Vec<Child> {
    assert!(i < w.len(), "start {i} outside word of length {}", w.len());
    let mut e = Vec::with_capacity(n);
    for t in 0..n {
        let s = if i + t < w.len() { w[i + t] } else { e[i + t - w.len()] };
        e.push(s);
    }
    e
}

fn beck_move(w: &[Child], n_min: u32, caps: &mut DistanceCaps) -> AliceMove<NoBundle> {
    let mut mv = AliceMove::empty();
    for i in 0..w.len() {
        let n = caps.length_for((w.len() - i) as u64, n_min);
        let path = reconstruct_overlap(w, i, n as usize);
        mv.push_path(RelPath::new(path).expect("n >= 1"));
    }
    mv
}

pub fn alice_beck_move(w: &[Child], params: &BeckParams) -> AliceMove<NoBundle> {
    beck_move(w, params.n, &mut DistanceCaps::new(params.c.clone()))
}

pub struct BeckAdversary {
    params: BeckParams,
    caps: DistanceCaps,
}

impl BeckAdversary {
    pub fn new(params: BeckParams) -> Self {
        BeckAdversary { caps: DistanceCaps::new(params.c.clone()), params }
    }
}

impl Adversary for BeckAdversary {
    type Bundle = NoBundle;

    fn arity(&self) -> usize {
        2
    }

    fn omega(&self) -> Option<Rational> {
        Some(self.params.omega.clone())
    }

    fn context(&self) -> &() {
        &()
    }

    fn next_move(&mut self, path: &[Child]) -> Result<AliceMove<NoBundle>> {
        Ok(beck_move(path, self.params.n, &mut self.caps))
    }
}

pub fn generate_beck(params: &BeckParams, length: usize) -> Result<Vec<Child>> {
    game::run(params.game_params()?, BeckAdversary::new(params.clone()), length)
}

/// Every pair `i < j` whose common extension reaches `max(N, n)` with `n`
/// the smallest length such that `j - i < cⁿ`. The reported length is that
/// threshold. Runs in `O(L²)` time and `O(L)` memory.
pub fn verify_separation<T: PartialEq>(bits: &[T], c: &Rational, n_min: u32) -> VerificationReport {
    assert!(*c > Rational::one(), "c must exceed 1");
    let len = bits.len();
    let mut report = VerificationReport::pass();
    let mut caps = DistanceCaps::new(c.clone());
    let mut found = Vec::new();
    for delta in 1..len {
        let need = caps.length_for(delta as u64, n_min.max(1)) as usize;
        if need > len - delta {
            continue;
        }
        // lce(i, i+delta) for i descending, as a running match length.
        let mut run = 0usize;
        for i in (0..len - delta).rev() {
            run = if bits[i] == bits[i + delta] { run + 1 } else { 0 };
            if run >= need {
                found.push((i, i + delta, need));
            }
        }
    }
    found.sort_unstable();
    for (i, j, n) in found {
        report.push(Violation::Separation { i, j, n });
    }
    report
}

/// Parses `'0'`/`'1'` characters, ignoring whitespace.
pub fn parse_bits(text: &str) -> Result<Vec<Child>> {
    text.chars()
        .filter(|ch| !ch.is_whitespace())
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(GameError::Parse(format!("unexpected character {other:?} in bit string"))),
        })
        .collect()
}

pub fn format_bits(bits: &[Child]) -> String {
    bits.iter().map(|&b| if b.is_zero() { '0' } else { '1' }).collect()
}
