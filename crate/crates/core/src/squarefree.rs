//! Square-free words respecting a list assignment.
//!
//! Each position offers `arity` allowed symbols (a child index picks one of
//! them). When Bob has written `w`, Alice forbids `w·v` for every nonempty
//! suffix `v` of `w`, so a square `vv` is blocked as soon as its first half
//! is written. With β = 2 she forbids at most one vertex per depth, so a
//! move weighs less than 1 = ω and `2(1+1) ≤ 4` lets Bob win.
//!
//! The generator emits these forbidden vertices lazily: an obstruction is
//! `(start, len, progress)` and its next child index is resolved against the
//! list of the position Bob is about to fill. Lists may therefore depend on
//! the prefix written so far. An obstruction whose next symbol is missing
//! from that list is not a vertex of the tree and is dropped.

use num::BigUint;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{GameError, Result};
use crate::game::{Accounting, Adversary, AliceMove, Bundle, Child, Game, GameParams, NoBundle, RelPath};
use crate::ratio::{self, Rational};
use crate::report::{VerificationReport, Violation};

pub type Symbol = u64;

/// Per-position allowed symbols, possibly depending on the prefix.
///
/// Must be deterministic in `(position, prefix)` and return exactly
/// `arity()` distinct symbols.
pub trait ListOracle {
    fn arity(&self) -> usize;
    fn list(&mut self, position: usize, prefix: &[Symbol]) -> Result<Vec<Symbol>>;
}

/// The same list everywhere.
#[derive(Clone, Debug)]
pub struct UniformLists(pub Vec<Symbol>);

impl ListOracle for UniformLists {
    fn arity(&self) -> usize {
        self.0.len()
    }

    fn list(&mut self, _: usize, _: &[Symbol]) -> Result<Vec<Symbol>> {
        Ok(self.0.clone())
    }
}

/// Explicit per-position lists, e.g. read from a file.
#[derive(Clone, Debug)]
pub struct StaticLists {
    arity: usize,
    lists: Vec<Vec<Symbol>>,
}

impl StaticLists {
    pub fn new(lists: Vec<Vec<Symbol>>) -> Result<Self> {
        let arity = lists.first().map_or(4, Vec::len);
        for (i, l) in lists.iter().enumerate() {
            check_list(l, arity).map_err(|e| GameError::Parse(format!("list {i}: {e}")))?;
        }
        Ok(StaticLists { arity, lists })
    }

    /// Line `n` holds the symbols of position `n`, comma-separated; `#`
    /// starts a comment and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lists = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let list: std::result::Result<Vec<Symbol>, _> = line.split(',').map(|t| t.trim().parse()).collect();
            lists.push(list.map_err(|_| GameError::Parse(format!("line {}: bad symbol list", lineno + 1)))?);
        }
        Self::new(lists)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

impl ListOracle for StaticLists {
    fn arity(&self) -> usize {
        self.arity
    }

    fn list(&mut self, position: usize, _: &[Symbol]) -> Result<Vec<Symbol>> {
        self.lists
            .get(position)
            .cloned()
            .ok_or_else(|| GameError::InvalidParams(format!("no list for position {position}")))
    }
}

/// Lists of `arity` distinct symbols from `[0, sigma)`, drawn independently
/// per position: ChaCha8 seeded with `seed`, stream number = position,
/// `rand::seq::index::sample`, then sorted ascending.
#[derive(Clone, Debug)]
pub struct RandomLists {
    pub seed: u64,
    pub sigma: u64,
    pub arity: usize,
}

impl RandomLists {
    pub fn new(seed: u64, sigma: u64, arity: usize) -> Result<Self> {
        if (sigma as u128) < arity as u128 {
            return Err(GameError::InvalidParams(format!("sigma {sigma} < list size {arity}")));
        }
        Ok(RandomLists { seed, sigma, arity })
    }
}

fn draw_list(seed: u64, stream: u64, sigma: u64, arity: usize) -> Vec<Symbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sigma = usize::try_from(sigma).unwrap_or(usize::MAX);
    let mut out: Vec<Symbol> = sample(&mut rng, sigma, arity).into_iter().map(|s| s as Symbol).collect();
    out.sort_unstable();
    out
}

impl ListOracle for RandomLists {
    fn arity(&self) -> usize {
        self.arity
    }

    fn list(&mut self, position: usize, _: &[Symbol]) -> Result<Vec<Symbol>> {
        Ok(draw_list(self.seed, position as u64, self.sigma, self.arity))
    }
}

/// Adversarial dynamic lists: the most recent distinct symbols of the
/// prefix (the ones most likely to close a square), padded with the
/// smallest unused symbols.
#[derive(Clone, Debug)]
pub struct RecentEcho {
    pub arity: usize,
    /// How many of the list's slots echo the prefix.
    pub echoed: usize,
    /// Symbol offset for the padding.
    pub pad_base: Symbol,
}

impl ListOracle for RecentEcho {
    fn arity(&self) -> usize {
        self.arity
    }

    fn list(&mut self, _: usize, prefix: &[Symbol]) -> Result<Vec<Symbol>> {
        let mut out: Vec<Symbol> = Vec::with_capacity(self.arity);
        for &s in prefix.iter().rev() {
            if out.len() == self.echoed.min(self.arity) {
                break;
            }
            if !out.contains(&s) {
                out.push(s);
            }
        }
        let mut next = self.pad_base;
        while out.len() < self.arity {
            if !out.contains(&next) {
                out.push(next);
            }
            next += 1;
        }
        Ok(out)
    }
}

/// Dynamic lists chosen pseudo-randomly from the position and the last
/// `window` symbols of the prefix, with the previous symbol always offered.
#[derive(Clone, Debug)]
pub struct PrefixHash {
    pub seed: u64,
    pub sigma: u64,
    pub arity: usize,
    pub window: usize,
}

impl ListOracle for PrefixHash {
    fn arity(&self) -> usize {
        self.arity
    }

    fn list(&mut self, position: usize, prefix: &[Symbol]) -> Result<Vec<Symbol>> {
        // FNV-1a over the recent symbols.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.seed;
        let start = prefix.len().saturating_sub(self.window);
        for &s in &prefix[start..] {
            h ^= s;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let mut out = Vec::with_capacity(self.arity);
        if let Some(&last) = prefix.last() {
            out.push(last);
        }
        let mut extra = draw_list(h, position as u64, self.sigma, self.arity + 1).into_iter();
        while out.len() < self.arity {
            let s = extra.next().expect("sigma > arity");
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }
}

fn check_list(list: &[Symbol], arity: usize) -> std::result::Result<(), String> {
    if list.len() != arity {
        return Err(format!("expected {arity} symbols, got {}", list.len()));
    }
    for (i, s) in list.iter().enumerate() {
        if list[..i].contains(s) {
            return Err(format!("symbol {s} repeated"));
        }
    }
    Ok(())
}

/// The word so far and the list of every position reached.
#[derive(Clone, Debug, Default)]
pub struct SquarefreeState {
    word: Vec<Symbol>,
    lists: Vec<Vec<Symbol>>,
    /// Positions of each symbol in `word`, ascending.
    occurrences: FxHashMap<Symbol, Vec<u32>>,
}

impl SquarefreeState {
    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn lists(&self) -> &[Vec<Symbol>] {
        &self.lists
    }
}

/// The vertex `w·v` for `v = w[start..start+len]`, with `progress` of its
/// steps already walked by Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareSuffix {
    pub start: u32,
    pub len: u32,
    pub progress: u32,
}

impl Bundle for SquareSuffix {
    type Ctx = SquarefreeState;
    const MAY_VANISH: bool = true;

    fn depth(&self) -> u32 {
        self.len - self.progress
    }

    fn is_unit(&self) -> bool {
        true
    }

    fn multiplicity(&self, _: &SquarefreeState) -> BigUint {
        BigUint::from(1u32)
    }

    fn log2_multiplicity(&self, _: &SquarefreeState) -> f64 {
        0.0
    }

    fn split(&self, child: Child, st: &SquarefreeState) -> Option<Self> {
        let pos = (self.start + self.len + self.progress) as usize;
        let sym = st.word[(self.start + self.progress) as usize];
        let list = st.lists.get(pos)?;
        (list.get(child as usize) == Some(&sym)).then_some(SquareSuffix { progress: self.progress + 1, ..*self })
    }

    fn describe(&self) -> String {
        format!("suffix({}+{})", self.start, self.len)
    }
}

pub struct SquarefreeAdversary<O: ListOracle> {
    oracle: O,
    state: SquarefreeState,
}

impl<O: ListOracle> SquarefreeAdversary<O> {
    pub fn new(oracle: O) -> Result<Self> {
        certify_arity(oracle.arity())?;
        Ok(SquarefreeAdversary { oracle, state: SquarefreeState::default() })
    }

    pub fn state(&self) -> &SquarefreeState {
        &self.state
    }

    fn ensure_list(&mut self) -> Result<()> {
        let n = self.state.word.len();
        if self.state.lists.len() == n {
            let list = self.oracle.list(n, &self.state.word)?;
            check_list(&list, self.oracle.arity())
                .map_err(|e| GameError::InvalidParams(format!("list at position {n}: {e}")))?;
            self.state.lists.push(list);
        }
        Ok(())
    }
}

impl<O: ListOracle> Adversary for SquarefreeAdversary<O> {
    type Bundle = SquareSuffix;

    fn arity(&self) -> usize {
        self.oracle.arity()
    }

    fn omega(&self) -> Option<Rational> {
        Some(ratio::int(1))
    }

    fn context(&self) -> &SquarefreeState {
        &self.state
    }

    fn next_move(&mut self, _path: &[Child]) -> Result<AliceMove<SquareSuffix>> {
        self.ensure_list()?;
        let n = self.state.word.len();
        // Only suffixes whose first symbol is offered at position n are vertices.
        // Merged latest-first, so the move lists suffixes by increasing depth.
        let mut runs: Vec<&[u32]> = self.state.lists[n]
            .iter()
            .filter_map(|s| self.state.occurrences.get(s).map(Vec::as_slice))
            .collect();
        let mut mv = AliceMove::with_capacity(runs.iter().map(|r| r.len()).sum());
        while let Some(run) = runs.iter_mut().filter(|r| !r.is_empty()).max_by_key(|r| r[r.len() - 1]) {
            let (&start, rest) = run.split_last().expect("nonempty");
            *run = rest;
            mv.push_bundle(SquareSuffix { start, len: n as u32 - start, progress: 0 });
        }
        Ok(mv)
    }

    fn observe(&mut self, child: Child) -> Result<()> {
        let n = self.state.word.len();
        let sym = self.state.lists[n][child as usize];
        self.state.occurrences.entry(sym).or_default().push(n as u32);
        self.state.word.push(sym);
        Ok(())
    }
}

fn certify_arity(arity: usize) -> Result<()> {
    if arity < 4 {
        return Err(GameError::NotCertified(format!(
            "lists of size {arity}: only sizes >= 4 are covered (size 3 is open)"
        )));
    }
    Ok(())
}

/// β = 2, ω = 1, k = arity.
pub fn game_params(arity: usize) -> Result<GameParams> {
    certify_arity(arity)?;
    GameParams::new(arity, ratio::int(2), Some(ratio::int(1)))
}

/// The explicit form of Alice's move at prefix `w`: for each suffix `v`
/// whose symbols all appear in their target lists, the path of child
/// indices spelling `v` after `w`.
pub fn alice_squarefree_move<O: ListOracle>(w: &[Symbol], oracle: &mut O) -> Result<AliceMove<NoBundle>> {
    let n = w.len();
    let mut mv = AliceMove::empty();
    'suffix: for len in 1..=n {
        let v = &w[n - len..];
        let mut prefix = w.to_vec();
        let mut path = Vec::with_capacity(len);
        for (t, &sym) in v.iter().enumerate() {
            let list = oracle.list(n + t, &prefix)?;
            match list.iter().position(|&s| s == sym) {
                Some(idx) => path.push(idx as Child),
                None => continue 'suffix,
            }
            prefix.push(sym);
        }
        mv.push_path(RelPath::new(path)?);
    }
    Ok(mv)
}

/// Generated word plus the lists that were in force.
#[derive(Clone, Debug)]
pub struct SquarefreeRun {
    pub word: Vec<Symbol>,
    pub lists: Vec<Vec<Symbol>>,
}

pub fn generate_squarefree_with<O: ListOracle>(oracle: O, length: usize, accounting: Accounting) -> Result<SquarefreeRun> {
    let params = game_params(oracle.arity())?;
    let mut game = Game::new(params, SquarefreeAdversary::new(oracle)?, accounting)?;
    game.play(length)?;
    let st = game.into_alice().state;
    let mut lists = st.lists;
    lists.truncate(length);
    Ok(SquarefreeRun { word: st.word, lists })
}

pub fn generate_squarefree<O: ListOracle>(oracle: O, length: usize) -> Result<Vec<Symbol>> {
    Ok(generate_squarefree_with(oracle, length, Accounting::Filtered)?.word)
}

/// Every `(start, half)` with `word[start..start+half] == word[start+half..start+2*half]`.
pub fn verify_squarefree<T: PartialEq>(word: &[T]) -> VerificationReport {
    let mut report = VerificationReport::pass();
    let n = word.len();
    for half in 1..=n / 2 {
        // run = number of consecutive i ending here with word[i] == word[i + half]
        let mut run = 0;
        for i in 0..n - half {
            if word[i] == word[i + half] {
                run += 1;
                if run >= half {
                    report.push(Violation::Square { start: i + 1 - half, half });
                }
            } else {
                run = 0;
            }
        }
    }
    report
}

/// Every position whose symbol is not in its list.
pub fn verify_respects(word: &[Symbol], lists: &[Vec<Symbol>]) -> VerificationReport {
    let mut report = VerificationReport::pass();
    for (position, &symbol) in word.iter().enumerate() {
        if !lists.get(position).is_some_and(|l| l.contains(&symbol)) {
            report.push(Violation::List { position, symbol });
        }
    }
    report
}
