//! The (β, ω, k)-game on the k-ary tree.
//!
//! Alice forbids vertices below Bob's position; Bob walks down one edge per
//! round. Bob keeps the β-weight of everything forbidden in his current
//! subtree below 1 by always stepping into the least child whose share `s`
//! satisfies `β·s < 1`. If `β(1+ω) ≤ k` and every Alice move weighs at most
//! ω, such a child always exists.
//!
//! Obstructions are either explicit relative paths (set semantics) or
//! application-defined bundles that know their multiplicity and how they
//! split among children (multiset semantics). Weights are never stored as
//! rationals per entry: an entry at relative depth `d` with multiplicity `m`
//! weighs `m·β^-d`, so descending is a depth decrement.

use std::borrow::Borrow;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num::{BigUint, One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{GameError, Result};
use crate::ratio::{self, Rational};
use crate::weight::{Beta, Histogram, Tally};

/// Index of a child edge, in `[0, k)`.
pub type Child = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameParams {
    k: usize,
    beta: Rational,
    omega: Option<Rational>,
}

impl GameParams {
    /// Parameters with an optional per-move budget. When `omega` is given the
    /// winning condition `β(1+ω) ≤ k` must hold.
    pub fn new(k: usize, beta: Rational, omega: Option<Rational>) -> Result<Self> {
        if k < 2 {
            return Err(GameError::InvalidParams(format!("arity {k} < 2")));
        }
        let one = Rational::one();
        if beta <= one || beta >= ratio::int(k as i64) {
            return Err(GameError::InvalidParams(format!(
                "beta {} not in (1, {k})",
                ratio::format_rational(&beta)
            )));
        }
        if let Some(w) = &omega {
            if *w <= Rational::zero() {
                return Err(GameError::InvalidParams("omega must be positive".into()));
            }
            if !check_condition(k, &beta, w) {
                return Err(GameError::NotCertified(format!(
                    "beta*(1+omega) = {} > {k}",
                    ratio::format_rational(&(&beta * (one + w)))
                )));
            }
        }
        Ok(GameParams { k, beta, omega })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn omega(&self) -> Option<&Rational> {
        self.omega.as_ref()
    }
}

/// Bob's winning condition: `1 < β < k` and `β(1+ω) ≤ k`, decided exactly.
pub fn check_condition(k: usize, beta: &Rational, omega: &Rational) -> bool {
    let k = ratio::int(k as i64);
    let one = Rational::one();
    *beta > one && *beta < k && beta * (one + omega) <= k
}

/// A vertex strictly below the current root, as child indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelPath(Vec<Child>);

impl RelPath {
    pub fn new(steps: Vec<Child>) -> Result<Self> {
        if steps.is_empty() {
            return Err(GameError::IllegalDepth);
        }
        Ok(RelPath(steps))
    }

    pub fn steps(&self) -> &[Child] {
        &self.0
    }

    pub fn depth(&self) -> u32 {
        self.0.len() as u32
    }
}

impl fmt::Display for RelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// A symbolic set of forbidden vertices, all at the same relative depth.
pub trait Bundle: Clone + fmt::Debug {
    /// Shared state the bundle reads when weighing or splitting.
    type Ctx: ?Sized;

    /// Whether a bundle can turn out to lie in no child at all (its next
    /// step is not realizable). Such bundles are dropped by `settle`.
    const MAY_VANISH: bool = false;

    fn depth(&self) -> u32;

    /// Multiplicity is exactly 1.
    fn is_unit(&self) -> bool {
        false
    }

    fn multiplicity(&self, ctx: &Self::Ctx) -> BigUint;

    fn log2_multiplicity(&self, ctx: &Self::Ctx) -> f64 {
        ratio::log2_biguint(&self.multiplicity(ctx))
    }

    /// The part of the bundle inside child `child`, one level shallower.
    fn split(&self, child: Child, ctx: &Self::Ctx) -> Option<Self>;

    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

/// Bundle type for adversaries that only forbid explicit paths.
#[derive(Clone, Debug)]
pub enum NoBundle {}

impl Bundle for NoBundle {
    type Ctx = ();

    fn depth(&self) -> u32 {
        match *self {}
    }

    fn multiplicity(&self, _: &()) -> BigUint {
        match *self {}
    }

    fn split(&self, _: Child, _: &()) -> Option<Self> {
        match *self {}
    }
}

#[derive(Clone, Debug)]
pub enum Obstruction<B> {
    Explicit(RelPath),
    Bundle(B),
}

impl<B: Bundle> Obstruction<B> {
    pub fn depth(&self) -> u32 {
        match self {
            Obstruction::Explicit(p) => p.depth(),
            Obstruction::Bundle(b) => b.depth(),
        }
    }

    /// `multiplicity · β^-depth`.
    pub fn weight(&self, beta: &Rational, ctx: &B::Ctx) -> Rational {
        let inv = ratio::pow(&beta.recip(), self.depth());
        match self {
            Obstruction::Explicit(_) => inv,
            Obstruction::Bundle(b) => ratio::from_biguint(&b.multiplicity(ctx)) * inv,
        }
    }

    fn describe(&self) -> String {
        match self {
            Obstruction::Explicit(p) => p.to_string(),
            Obstruction::Bundle(b) => b.describe(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AliceMove<B> {
    pub additions: Vec<Obstruction<B>>,
}

impl<B> Default for AliceMove<B> {
    fn default() -> Self {
        AliceMove { additions: Vec::new() }
    }
}

impl<B: Bundle> AliceMove<B> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        AliceMove { additions: Vec::with_capacity(n) }
    }

    pub fn push_path(&mut self, path: RelPath) {
        self.additions.push(Obstruction::Explicit(path));
    }

    pub fn push_bundle(&mut self, bundle: B) {
        self.additions.push(Obstruction::Bundle(bundle));
    }

    pub fn len(&self) -> usize {
        self.additions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty()
    }

    /// Total weight of the move counted as a multiset.
    pub fn weight(&self, beta: &Rational, ctx: &B::Ctx) -> Rational {
        let b = Beta::new(beta.clone());
        let mut hist = Histogram::new();
        for a in &self.additions {
            match a {
                Obstruction::Explicit(p) => hist.add_one(p.depth()),
                Obstruction::Bundle(x) => hist.add(x.depth(), &x.multiplicity(ctx)),
            }
        }
        hist.value(&b)
    }

    pub fn explicit_paths(&self) -> impl Iterator<Item = &RelPath> {
        self.additions.iter().filter_map(|a| match a {
            Obstruction::Explicit(p) => Some(p),
            Obstruction::Bundle(_) => None,
        })
    }
}

/// Explicit entry: a shared path and how many of its steps are consumed.
#[derive(Clone, Debug)]
struct PathEntry {
    steps: Arc<[Child]>,
    offset: u32,
}

impl PathEntry {
    fn rest(&self) -> &[Child] {
        &self.steps[self.offset as usize..]
    }

    fn depth(&self) -> u32 {
        self.steps.len() as u32 - self.offset
    }
}

impl PartialEq for PathEntry {
    fn eq(&self, other: &Self) -> bool {
        self.rest() == other.rest()
    }
}

impl Eq for PathEntry {}

impl Hash for PathEntry {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rest().hash(state)
    }
}

impl Borrow<[Child]> for PathEntry {
    fn borrow(&self) -> &[Child] {
        self.rest()
    }
}

/// How the exact total weight is tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Accounting {
    /// Exact rational total kept incrementally and cross-checked against a
    /// from-scratch recomputation after every operation.
    Exact,
    /// Decisions use the certified filter with exact fallback; the total is
    /// computed on demand.
    Filtered,
}

#[derive(Clone, Debug)]
pub struct GameState<B: Bundle> {
    params: GameParams,
    beta: Beta,
    absolute_depth: u64,
    chosen_path: Vec<Child>,
    explicit: Vec<PathEntry>,
    explicit_index: FxHashSet<PathEntry>,
    bundles: Vec<B>,
    accounting: Accounting,
    total: Option<Rational>,
    prune_subsumed: bool,
}

impl<B: Bundle> GameState<B> {
    pub fn new(params: GameParams, accounting: Accounting) -> Self {
        let beta = Beta::new(params.beta.clone());
        let total = match accounting {
            Accounting::Exact => Some(Rational::zero()),
            Accounting::Filtered => None,
        };
        GameState {
            params,
            beta,
            absolute_depth: 0,
            chosen_path: Vec::new(),
            explicit: Vec::new(),
            explicit_index: FxHashSet::default(),
            bundles: Vec::new(),
            accounting,
            total,
            prune_subsumed: false,
        }
    }

    /// Drop explicit entries lying strictly below another explicit entry, and
    /// replace full sets of siblings by their parent.
    pub fn with_subsumption_pruning(mut self, on: bool) -> Self {
        self.prune_subsumed = on;
        self
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn absolute_depth(&self) -> u64 {
        self.absolute_depth
    }

    pub fn chosen_path(&self) -> &[Child] {
        &self.chosen_path
    }

    pub fn accounting(&self) -> Accounting {
        self.accounting
    }

    pub fn ledger_len(&self) -> usize {
        self.explicit.len() + self.bundles.len()
    }

    pub fn explicit_paths(&self) -> Vec<Vec<Child>> {
        self.explicit.iter().map(|e| e.rest().to_vec()).collect()
    }

    pub fn bundles(&self) -> &[B] {
        &self.bundles
    }

    /// The exact total weight of the ledger at the current scale.
    pub fn total_weight(&self, ctx: &B::Ctx) -> Rational {
        match &self.total {
            Some(t) => t.clone(),
            None => self.recompute_weight(ctx),
        }
    }

    /// From-scratch evaluation of the ledger's weight.
    pub fn recompute_weight(&self, ctx: &B::Ctx) -> Rational {
        let mut hist = Histogram::new();
        for e in &self.explicit {
            hist.add_one(e.depth());
        }
        for b in &self.bundles {
            hist.add(b.depth(), &b.multiplicity(ctx));
        }
        hist.value(&self.beta)
    }

    fn audit(&self, ctx: &B::Ctx, what: &str) -> Result<()> {
        if let Some(t) = &self.total {
            let fresh = self.recompute_weight(ctx);
            if *t != fresh {
                return Err(GameError::InvariantBroken(format!(
                    "{what}: incremental weight {} != recomputed {}",
                    ratio::format_rational(t),
                    ratio::format_rational(&fresh)
                )));
            }
        }
        Ok(())
    }

    fn check_child(&self, c: Child) -> Result<()> {
        if (c as usize) < self.params.k {
            Ok(())
        } else {
            Err(GameError::BadChild { child: c as usize, arity: self.params.k })
        }
    }

    /// Adds Alice's obstructions. Explicit duplicates (against the ledger or
    /// within the move) add nothing; bundles always accumulate.
    pub fn apply_alice_move(&mut self, mv: AliceMove<B>, ctx: &B::Ctx) -> Result<()> {
        let mut fresh_paths: Vec<PathEntry> = Vec::new();
        let mut seen: FxHashSet<PathEntry> = FxHashSet::default();
        let mut fresh_bundles: Vec<B> = Vec::new();
        for add in mv.additions {
            match add {
                Obstruction::Explicit(p) => {
                    for &s in p.steps() {
                        self.check_child(s)?;
                    }
                    if self.explicit_index.contains(p.steps()) || seen.contains(p.steps()) {
                        continue;
                    }
                    let entry = PathEntry { steps: Arc::from(p.0), offset: 0 };
                    seen.insert(entry.clone());
                    fresh_paths.push(entry);
                }
                Obstruction::Bundle(b) => {
                    if b.depth() == 0 {
                        return Err(GameError::IllegalDepth);
                    }
                    fresh_bundles.push(b);
                }
            }
        }

        let need_exact = self.total.is_some();
        if self.params.omega.is_some() || need_exact {
            let mut tally = Tally::new();
            for e in &fresh_paths {
                tally.add(&self.beta, e.depth(), true, BigUint::one, || 0.0);
            }
            for b in &fresh_bundles {
                tally.add(&self.beta, b.depth(), b.is_unit(), || b.multiplicity(ctx), || b.log2_multiplicity(ctx));
            }
            let exact_added = || {
                let mut hist = Histogram::new();
                for e in &fresh_paths {
                    hist.add_one(e.depth());
                }
                for b in &fresh_bundles {
                    hist.add(b.depth(), &b.multiplicity(ctx));
                }
                hist.value(&self.beta)
            };
            let mut added: Option<Rational> = None;
            if let Some(omega) = &self.params.omega {
                let within = match tally.try_compare(&self.beta, omega, false) {
                    Some(v) => v,
                    None => {
                        let w = exact_added();
                        let ok = w <= *omega;
                        added = Some(w);
                        ok
                    }
                };
                if !within {
                    let w = added.unwrap_or_else(exact_added);
                    return Err(GameError::BudgetExceeded {
                        weight: ratio::format_rational(&w),
                        omega: ratio::format_rational(omega),
                    });
                }
            }
            if let Some(total) = self.total.as_mut() {
                *total += added.unwrap_or_else(exact_added);
            }
        }

        for e in fresh_paths {
            self.explicit_index.insert(e.clone());
            self.explicit.push(e);
        }
        self.merge_bundles(fresh_bundles);
        if self.prune_subsumed {
            self.prune(ctx);
        }
        self.audit(ctx, "after Alice's move")
    }

    /// Keeps the bundle ledger in depth order, which keeps tallies on their
    /// sorted fast path. Splits lower every depth by one, so the order survives
    /// Bob's moves.
    fn merge_bundles(&mut self, mut fresh: Vec<B>) {
        if fresh.is_empty() {
            return;
        }
        fresh.sort_by_key(|b| b.depth());
        if self.bundles.last().is_none_or(|b| b.depth() <= fresh[0].depth()) {
            self.bundles.extend(fresh);
            return;
        }
        let old = std::mem::take(&mut self.bundles);
        let mut merged = Vec::with_capacity(old.len() + fresh.len());
        let mut a = old.into_iter().peekable();
        let mut b = fresh.into_iter().peekable();
        loop {
            let take_old = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => x.depth() <= y.depth(),
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            merged.push(if take_old { a.next() } else { b.next() }.expect("peeked"));
        }
        self.bundles = merged;
    }

    fn prune(&mut self, ctx: &B::Ctx) {
        let index = &self.explicit_index;
        let keep: Vec<bool> = self
            .explicit
            .iter()
            .map(|e| {
                let rest = e.rest();
                !(1..rest.len()).any(|l| index.contains(&rest[..l]))
            })
            .collect();
        let mut removed = Histogram::new();
        if !keep.iter().all(|&k| k) {
            let mut kept = Vec::with_capacity(self.explicit.len());
            for (e, k) in self.explicit.drain(..).zip(keep) {
                if k {
                    kept.push(e);
                } else {
                    removed.add_one(e.depth());
                    self.explicit_index.remove(e.rest());
                }
            }
            self.explicit = kept;
        }
        let added = self.close_siblings(&mut removed);
        if let Some(t) = self.total.as_mut() {
            *t += added.value(&self.beta) - removed.value(&self.beta);
        }
        let _ = ctx;
    }

    /// Replaces a full set of siblings by their parent, repeatedly. The
    /// weight drops from `k·β^-d` to `β^-(d-1)` since `β < k`. Children of
    /// the root are never merged.
    fn close_siblings(&mut self, removed: &mut Histogram) -> Histogram {
        let mut added = Histogram::new();
        let k = self.params.k;
        loop {
            let mut counts: FxHashMap<&[Child], usize> = FxHashMap::default();
            for e in &self.explicit {
                let rest = e.rest();
                if rest.len() >= 2 {
                    *counts.entry(&rest[..rest.len() - 1]).or_default() += 1;
                }
            }
            let mut parents: Vec<Vec<Child>> =
                counts.into_iter().filter(|&(_, c)| c == k).map(|(p, _)| p.to_vec()).collect();
            parents.sort_unstable();
            if parents.is_empty() {
                return added;
            }
            let mut kept = Vec::with_capacity(self.explicit.len());
            for e in self.explicit.drain(..) {
                let rest = e.rest();
                if rest.len() >= 2 && parents.binary_search_by(|p| p[..].cmp(&rest[..rest.len() - 1])).is_ok() {
                    removed.add_one(e.depth());
                    self.explicit_index.remove(rest);
                } else {
                    kept.push(e);
                }
            }
            for p in parents {
                added.add_one(p.len() as u32);
                let e = PathEntry { steps: p.into(), offset: 0 };
                self.explicit_index.insert(e.clone());
                kept.push(e);
            }
            self.explicit = kept;
        }
    }

    /// Drops bundles whose next step is realizable in no child.
    pub fn settle(&mut self, ctx: &B::Ctx) -> Result<()> {
        if !B::MAY_VANISH {
            return Ok(());
        }
        let k = self.params.k as Child;
        let mut dropped = Histogram::new();
        let mut any = false;
        let exact = self.total.is_some();
        self.bundles.retain(|b| {
            let alive = (0..k).any(|c| b.split(c, ctx).is_some());
            if !alive {
                any = true;
                if exact {
                    dropped.add(b.depth(), &b.multiplicity(ctx));
                }
            }
            alive
        });
        if any {
            if let Some(t) = self.total.as_mut() {
                *t -= dropped.value(&self.beta);
            }
        }
        self.audit(ctx, "after settle")
    }

    /// Weight (at the current scale) of the ledger lying inside child `c`.
    pub fn child_share(&self, c: Child, ctx: &B::Ctx) -> Rational {
        let mut hist = Histogram::new();
        for e in &self.explicit {
            if e.rest()[0] == c {
                hist.add_one(e.depth());
            }
        }
        for b in &self.bundles {
            if let Some(r) = b.split(c, ctx) {
                hist.add(r.depth() + 1, &r.multiplicity(ctx));
            }
        }
        hist.value(&self.beta)
    }

    fn child_tally(&self, c: Child, ctx: &B::Ctx) -> Tally {
        let mut tally = Tally::new();
        for e in &self.explicit {
            if e.rest()[0] == c {
                tally.add(&self.beta, e.depth(), true, BigUint::one, || 0.0);
            }
        }
        for b in &self.bundles {
            if let Some(r) = b.split(c, ctx) {
                tally.add(&self.beta, r.depth() + 1, r.is_unit(), || r.multiplicity(ctx), || r.log2_multiplicity(ctx));
            }
        }
        tally
    }

    /// `β·share(c) < 1`, decided exactly.
    pub fn is_safe(&self, c: Child, ctx: &B::Ctx) -> bool {
        let threshold = self.beta.reciprocal();
        match self.child_tally(c, ctx).try_compare(&self.beta, threshold, true) {
            Some(v) => v,
            None => self.child_share(c, ctx) < *threshold,
        }
    }

    /// The least child with `β·share < 1`.
    pub fn choose_child(&self, ctx: &B::Ctx) -> Result<Child> {
        (0..self.params.k as Child)
            .find(|&c| self.is_safe(c, ctx))
            .ok_or(GameError::NoSafeChild { depth: self.absolute_depth })
    }

    /// Moves Bob into child `c`, rescaling the ledger by β.
    pub fn descend(&mut self, c: Child, ctx: &B::Ctx) -> Result<()> {
        self.check_child(c)?;
        let new_total = match self.accounting {
            Accounting::Exact => {
                let t = self.beta.value() * self.child_share(c, ctx);
                if t >= Rational::one() {
                    return Err(GameError::InvariantBroken(format!(
                        "weight {} >= 1 after moving to child {c}",
                        ratio::format_rational(&t)
                    )));
                }
                Some(t)
            }
            Accounting::Filtered => {
                if !self.is_safe(c, ctx) {
                    return Err(GameError::InvariantBroken(format!(
                        "weight >= 1 after moving to child {c}"
                    )));
                }
                None
            }
        };
        self.descend_unchecked(c, ctx)?;
        self.total = new_total;
        self.audit(ctx, "after Bob's move")
    }

    fn descend_unchecked(&mut self, c: Child, ctx: &B::Ctx) -> Result<()> {
        let mut kept = Vec::new();
        for mut e in self.explicit.drain(..) {
            if e.rest()[0] == c {
                if e.depth() == 1 {
                    return Err(GameError::InvariantBroken(format!("moved into forbidden child {c}")));
                }
                e.offset += 1;
                kept.push(e);
            }
        }
        self.explicit_index = kept.iter().cloned().collect();
        self.explicit = kept;
        let mut bundles = Vec::with_capacity(self.bundles.len());
        for b in &self.bundles {
            if let Some(r) = b.split(c, ctx) {
                if r.depth() == 0 {
                    return Err(GameError::InvariantBroken(format!("moved into forbidden child {c}")));
                }
                bundles.push(r);
            }
        }
        self.bundles = bundles;
        self.chosen_path.push(c);
        self.absolute_depth += 1;
        Ok(())
    }

    /// `choose_child` followed by the move, without re-deciding safety.
    pub fn step(&mut self, ctx: &B::Ctx) -> Result<Child> {
        let c = self.choose_child(ctx)?;
        match self.accounting {
            Accounting::Exact => self.descend(c, ctx)?,
            Accounting::Filtered => self.descend_unchecked(c, ctx)?,
        }
        Ok(c)
    }
}

/// Alice's side of the game.
pub trait Adversary {
    type Bundle: Bundle;

    fn arity(&self) -> usize;

    /// Declared per-move budget, if any.
    fn omega(&self) -> Option<Rational>;

    fn context(&self) -> &<Self::Bundle as Bundle>::Ctx;

    /// Alice's move when Bob stands at `path` (from the true root).
    fn next_move(&mut self, path: &[Child]) -> Result<AliceMove<Self::Bundle>>;

    /// Bob moved to `child`.
    fn observe(&mut self, _child: Child) -> Result<()> {
        Ok(())
    }
}

/// Never forbids anything.
#[derive(Clone, Debug)]
pub struct NullAdversary {
    pub k: usize,
}

impl Adversary for NullAdversary {
    type Bundle = NoBundle;

    fn arity(&self) -> usize {
        self.k
    }

    fn omega(&self) -> Option<Rational> {
        None
    }

    fn context(&self) -> &() {
        &()
    }

    fn next_move(&mut self, _path: &[Child]) -> Result<AliceMove<NoBundle>> {
        Ok(AliceMove::empty())
    }
}

/// A running game: state plus adversary, with an optional transcript.
pub struct Game<A: Adversary> {
    state: GameState<A::Bundle>,
    alice: A,
    transcript: Option<Vec<String>>,
}

impl<A: Adversary> Game<A> {
    pub fn new(params: GameParams, alice: A, accounting: Accounting) -> Result<Self> {
        if params.k() != alice.arity() {
            return Err(GameError::InvalidParams(format!(
                "game arity {} but adversary arity {}",
                params.k(),
                alice.arity()
            )));
        }
        Ok(Game { state: GameState::new(params, accounting), alice, transcript: None })
    }

    pub fn with_transcript(mut self) -> Self {
        self.transcript = Some(Vec::new());
        self
    }

    pub fn with_subsumption_pruning(mut self, on: bool) -> Self {
        self.state = self.state.with_subsumption_pruning(on);
        self
    }

    pub fn state(&self) -> &GameState<A::Bundle> {
        &self.state
    }

    pub fn alice(&self) -> &A {
        &self.alice
    }

    pub fn into_alice(self) -> A {
        self.alice
    }

    pub fn path(&self) -> &[Child] {
        self.state.chosen_path()
    }

    pub fn transcript(&self) -> Option<&[String]> {
        self.transcript.as_deref()
    }

    /// One round: Alice moves, Bob answers. Returns Bob's child.
    pub fn round(&mut self) -> Result<Child> {
        let mv = self.alice.next_move(self.state.chosen_path())?;
        let forbids = self.transcript.as_ref().map(|_| {
            if mv.is_empty() {
                "none".to_string()
            } else {
                mv.additions.iter().map(Obstruction::describe).collect::<Vec<_>>().join(" ")
            }
        });
        let ctx = self.alice.context();
        self.state.apply_alice_move(mv, ctx)?;
        self.state.settle(ctx)?;
        let c = self.state.step(ctx)?;
        self.alice.observe(c)?;
        if let (Some(t), Some(f)) = (self.transcript.as_mut(), forbids) {
            let m = t.len();
            t.push(format!("step {m}: forbid {f}, move {c}"));
        }
        Ok(c)
    }

    pub fn play(&mut self, rounds: usize) -> Result<&[Child]> {
        for _ in 0..rounds {
            self.round()?;
        }
        Ok(self.state.chosen_path())
    }
}

/// Plays `steps` rounds and returns Bob's path.
pub fn run<A: Adversary>(params: GameParams, alice: A, steps: usize) -> Result<Vec<Child>> {
    let mut game = Game::new(params, alice, Accounting::Filtered)?;
    game.play(steps)?;
    Ok(game.path().to_vec())
}
