//! Words avoiding a finite set of forbidden factors.
//!
//! At every round Alice forbids each forbidden word as a path starting at
//! Bob's position. The game is winnable when
//! `β(1 + Σ_f β^-|f|) ≤ |alphabet|`.

use num::{One, Zero};

use crate::error::{GameError, Result};
use crate::game::{self, Adversary, AliceMove, Child, GameParams, NoBundle, RelPath};
use crate::ratio::{self, Rational};
use crate::report::{VerificationReport, Violation};

pub type Word = Vec<Child>;

#[derive(Clone, Debug)]
pub struct MillerSpec {
    alphabet: usize,
    forbidden: Vec<Word>,
    beta: Rational,
}

impl MillerSpec {
    pub fn new(alphabet: usize, forbidden: Vec<Word>, beta: Rational) -> Result<Self> {
        if alphabet < 2 {
            return Err(GameError::InvalidParams(format!("alphabet size {alphabet} < 2")));
        }
        for f in &forbidden {
            if f.is_empty() {
                return Err(GameError::InvalidParams("empty forbidden word".into()));
            }
            if let Some(&s) = f.iter().find(|&&s| s as usize >= alphabet) {
                return Err(GameError::InvalidParams(format!("symbol {s} outside alphabet of size {alphabet}")));
            }
        }
        Ok(MillerSpec { alphabet, forbidden, beta })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// `Σ_f β^-|f|`.
    pub fn omega(&self) -> Rational {
        self.forbidden
            .iter()
            .map(|f| ratio::pow(&self.beta.recip(), f.len() as u32))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// Returns ω if `β(1+ω) ≤ k` holds (exactly), else `NotCertified`.
pub fn certify_miller(spec: &MillerSpec) -> Result<Rational> {
    let omega = spec.omega();
    let k = ratio::int(spec.alphabet as i64);
    let one = Rational::one();
    if spec.beta <= one || spec.beta >= k {
        return Err(GameError::NotCertified(format!(
            "beta {} not in (1, {})",
            ratio::format_rational(&spec.beta),
            spec.alphabet
        )));
    }
    let lhs = &spec.beta * (&one + &omega);
    if lhs > k {
        return Err(GameError::NotCertified(format!(
            "beta*(1+omega) = {} > {}",
            ratio::format_rational(&lhs),
            spec.alphabet
        )));
    }
    Ok(omega)
}

/// Every forbidden word as a path from Bob's position. Independent of the
/// current word.
pub fn alice_miller_move(_word: &[Child], spec: &MillerSpec) -> AliceMove<NoBundle> {
    let mut mv = AliceMove::empty();
    for f in &spec.forbidden {
        mv.push_path(RelPath::new(f.clone()).expect("nonempty by construction"));
    }
    mv
}

#[derive(Clone, Debug)]
pub struct MillerAdversary {
    spec: MillerSpec,
    omega: Option<Rational>,
}

impl MillerAdversary {
    pub fn new(spec: MillerSpec) -> Result<Self> {
        let omega = certify_miller(&spec)?;
        Ok(MillerAdversary { omega: (!omega.is_zero()).then_some(omega), spec })
    }
}

impl Adversary for MillerAdversary {
    type Bundle = NoBundle;

    fn arity(&self) -> usize {
        self.spec.alphabet
    }

    fn omega(&self) -> Option<Rational> {
        self.omega.clone()
    }

    fn context(&self) -> &() {
        &()
    }

    fn next_move(&mut self, path: &[Child]) -> Result<AliceMove<NoBundle>> {
        Ok(alice_miller_move(path, &self.spec))
    }
}

pub fn game_params(spec: &MillerSpec) -> Result<GameParams> {
    let omega = certify_miller(spec)?;
    GameParams::new(spec.alphabet, spec.beta.clone(), (!omega.is_zero()).then_some(omega))
}

pub fn generate_miller(spec: &MillerSpec, length: usize) -> Result<Word> {
    let params = game_params(spec)?;
    game::run(params, MillerAdversary::new(spec.clone())?, length)
}

/// Brute-force scan for every occurrence of every forbidden word.
pub fn verify_factors(word: &[Child], forbidden: &[Word]) -> VerificationReport {
    let mut report = VerificationReport::pass();
    for position in 0..word.len() {
        for (idx, f) in forbidden.iter().enumerate() {
            if !f.is_empty() && word[position..].starts_with(f) {
                report.push(Violation::Factor { position, factor: idx });
            }
        }
    }
    report
}

/// One word per line, symbols as comma-separated decimal integers; `#`
/// starts a comment.
pub fn parse_forbidden(text: &str, alphabet: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let word = parse_word(line).map_err(|e| GameError::Parse(format!("line {}: {e}", lineno + 1)))?;
        if let Some(&s) = word.iter().find(|&&s| s as usize >= alphabet) {
            return Err(GameError::Parse(format!(
                "line {}: symbol {s} outside alphabet of size {alphabet}",
                lineno + 1
            )));
        }
        out.push(word);
    }
    Ok(out)
}

/// Comma-separated decimal symbols.
pub fn parse_word(text: &str) -> std::result::Result<Word, String> {
    text.split(',')
        .map(|t| t.trim().parse::<Child>().map_err(|_| format!("bad symbol {:?}", t.trim())))
        .collect()
}
