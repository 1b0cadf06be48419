//! `treegame`: generators, verifiers and the parameter advisor.
//!
//! Exit codes: 0 success, 1 violations found, 2 bad input or parameters
//! that do not certify, 3 an internal invariant breach.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treegame::squarefree::{ListOracle, PrefixHash, RandomLists, RecentEcho, StaticLists, Symbol};
use treegame::{beck, blocks, dioph, miller, params, squarefree};
use treegame::{GameError, Rational, VerificationReport};
use treegame::ratio;

#[derive(Parser)]
#[command(name = "treegame", version, about = "Sequences that escape forbidden patterns, with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a prefix of an infinite object.
    #[command(subcommand)]
    Gen(Gen),
    /// Check a sequence; prints a JSON report.
    #[command(subcommand)]
    Verify(Verify),
    /// Parameter advisor for the Diophantine generator.
    #[command(subcommand)]
    Params(Params),
}

#[derive(Subcommand)]
enum Gen {
    /// Word avoiding a finite set of factors.
    Miller {
        #[command(flatten)]
        factors: Factors,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Square-free word respecting a list assignment.
    Squarefree {
        /// random:<seed>,<sigma> | file:<path> | echo:<slots> | hash:<seed>,<sigma>,<window>
        #[arg(long)]
        lists: String,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Bits whose equal length-n factors (n >= N) are at distance >= c^n.
    Beck {
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        /// auto or an integer
        #[arg(long = "N", default_value = "auto", value_parser = auto_or_int)]
        n: AutoN,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Bits whose adjacent blocks of length n >= N differ in >= (1/2 - epsilon)n places.
    Blocks {
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long = "N", default_value = "auto", value_parser = auto_or_int)]
        n: AutoN,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Binary digits of a real that is 2^-k-regular for a sparse denominator set.
    Dioph {
        /// pow2 | fib | empty | file:<path>
        #[arg(long)]
        denoms: String,
        #[arg(long)]
        k: u32,
        /// auto or p/q
        #[arg(long, default_value = "auto")]
        beta: String,
        #[arg(long)]
        bits: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum Verify {
    Miller {
        #[command(flatten)]
        factors: Factors,
        #[command(flatten)]
        input: Input,
    },
    Squarefree {
        /// Also check the word against this list assignment.
        #[arg(long)]
        lists: Option<String>,
        #[command(flatten)]
        input: Input,
    },
    Beck {
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long = "N")]
        n: u32,
        #[command(flatten)]
        input: Input,
    },
    Blocks {
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        #[arg(long = "N")]
        n: u32,
        #[command(flatten)]
        input: Input,
    },
    Dioph {
        #[arg(long)]
        denoms: String,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum Params {
    /// Smallest k with 3eCk <= 2^k.
    Mink {
        #[arg(long = "C")]
        c: usize,
    },
    /// The beta minimizing beta + 3C/beta^(k-1), validated.
    Beta {
        #[arg(long = "C")]
        c: usize,
        #[arg(long)]
        k: u32,
    },
    /// 2^-min_k(C) against 1/(64 C log2 C).
    Eps {
        #[arg(long = "C")]
        c: usize,
    },
}

#[derive(Args)]
struct Factors {
    #[arg(long)]
    alphabet: usize,
    /// A forbidden word, comma-separated symbols. Repeatable.
    #[arg(long = "forbid")]
    forbid: Vec<String>,
    /// One forbidden word per line.
    #[arg(long)]
    forbid_file: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// The sequence itself. Without it, --input or standard input is read.
    #[arg(long, alias = "bits")]
    word: Option<String>,
    #[arg(long, conflicts_with = "word")]
    input: Option<PathBuf>,
}

fn rational(s: &str) -> Result<Rational, String> {
    ratio::parse_rational(s).map_err(|e| e.to_string())
}

/// `--N auto` or an explicit integer.
#[derive(Clone, Copy)]
struct AutoN(Option<u32>);

fn auto_or_int(s: &str) -> Result<AutoN, String> {
    if s == "auto" {
        return Ok(AutoN(None));
    }
    s.parse().map(|n| AutoN(Some(n))).map_err(|_| format!("expected auto or an integer, got {s:?}"))
}

/// Errors that end the run, with their exit codes.
enum Failure {
    Game(GameError),
    Io(String),
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure::Game(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn read_file(path: &str) -> treegame::Result<String> {
    fs::read_to_string(path).map_err(|e| GameError::Parse(format!("{path}: {e}")))
}

impl Input {
    fn text(&self) -> Res<String> {
        if let Some(w) = &self.word {
            return Ok(w.clone());
        }
        match &self.input {
            Some(p) => Ok(read_file(&p.to_string_lossy())?),
            None => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                Ok(s)
            }
        }
    }
}

impl Output {
    fn emit(&self, text: &str) -> Res<()> {
        let line = format!("{text}\n");
        match &self.output {
            Some(p) => fs::write(p, line)?,
            None => io::stdout().write_all(line.as_bytes())?,
        }
        Ok(())
    }
}

impl Factors {
    fn load(&self) -> Res<Vec<miller::Word>> {
        let mut text = self.forbid.join("\n");
        if let Some(p) = &self.forbid_file {
            text.push('\n');
            text.push_str(&read_file(&p.to_string_lossy())?);
        }
        Ok(miller::parse_forbidden(&text, self.alphabet)?)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_ints(text: &str) -> Res<Vec<u64>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| Failure::Game(GameError::Parse(format!("bad symbol {t:?}")))))
        .collect()
}

/// `--word` text: whitespace-separated integers, or else one symbol per character.
fn parse_symbols(text: &str) -> Res<Vec<u64>> {
    let t = text.trim();
    if t.contains(char::is_whitespace) {
        return parse_ints(t);
    }
    Ok(t.chars().map(u64::from).collect())
}

fn pair(s: &str, what: &str) -> Res<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Game(GameError::Parse(format!("bad {what} argument {t:?}")))))
        .collect()
}

fn list_oracle(spec: &str) -> Res<Box<dyn ListOracle>> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = |n: usize| Failure::Game(GameError::Parse(format!("{kind}: expected {n} comma-separated integers")));
    Ok(match kind {
        "random" => {
            let v = pair(arg, kind)?;
            let [seed, sigma] = v[..] else { return Err(bad(2)) };
            Box::new(RandomLists::new(seed, sigma, 4)?)
        }
        "hash" => {
            let v = pair(arg, kind)?;
            let [seed, sigma, window] = v[..] else { return Err(bad(3)) };
            if sigma < 5 {
                return Err(Failure::Game(GameError::InvalidParams("hash lists need sigma >= 5".into())));
            }
            Box::new(PrefixHash { seed, sigma, arity: 4, window: window as usize })
        }
        "echo" => {
            let v = pair(arg, kind)?;
            let [echoed] = v[..] else { return Err(bad(1)) };
            Box::new(RecentEcho { arity: 4, echoed: echoed as usize, pad_base: 0 })
        }
        "file" => Box::new(StaticLists::parse(&read_file(arg)?)?),
        _ => {
            return Err(Failure::Game(GameError::Parse(format!(
                "unknown list spec {spec:?} (random:, file:, echo:, hash:)"
            ))))
        }
    })
}

struct BoxedOracle(Box<dyn ListOracle>);

impl ListOracle for BoxedOracle {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn list(&mut self, position: usize, prefix: &[Symbol]) -> treegame::Result<Vec<Symbol>> {
        self.0.list(position, prefix)
    }
}

fn load_denoms(spec: &str, max_j: i64) -> Res<dioph::DenominatorSet> {
    Ok(dioph::parse_set_spec(spec, max_j, read_file)?)
}

/// Prints the report; violations mean exit 1.
fn report(r: &VerificationReport) -> Res<ExitCode> {
    println!("{}", r.to_json());
    Ok(if r.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn gen(cmd: Gen) -> Res<ExitCode> {
    match cmd {
        Gen::Miller { factors, beta, length, out } => {
            let spec = miller::MillerSpec::new(factors.alphabet, factors.load()?, beta)?;
            miller::certify_miller(&spec)?;
            out.emit(&join(&miller::generate_miller(&spec, length)?))?;
        }
        Gen::Squarefree { lists, length, out } => {
            let word = squarefree::generate_squarefree(BoxedOracle(list_oracle(&lists)?), length)?;
            out.emit(&join(&word))?;
        }
        Gen::Beck { c, beta, n, length, out } => {
            let p = beck::BeckParams::certify(c, beta, n.0)?;
            eprintln!("N = {}", p.n());
            out.emit(&beck::format_bits(&beck::generate_beck(&p, length)?))?;
        }
        Gen::Blocks { epsilon, beta, n, length, out } => {
            let p = blocks::certify_blocks_params(epsilon, beta, n.0)?;
            eprintln!("N = {}", p.n());
            out.emit(&beck::format_bits(&blocks::generate_blocks(&p, length)?))?;
        }
        Gen::Dioph { denoms, k, beta, bits, out } => {
            let set = load_denoms(&denoms, bits as i64)?;
            let c = set.octave_bound().max(1);
            let beta = match beta.as_str() {
                "auto" => params::optimal_beta(c, k)?,
                other => ratio::parse_rational(other)?,
            };
            let p = dioph::certify_dioph(c, k, beta)?;
            eprintln!("C = {c}, beta = {}", ratio::format_rational(p.beta()));
            if !p.game_condition() {
                eprintln!(
                    "warning: beta(1 + 3C/beta^(k-2)) = {} > 2; the per-move budget is not declared and the run is guarded by the weight invariant alone",
                    ratio::format_decimal(&dioph::game_lhs(c, k, p.beta()), 6)
                );
            }
            let theta = dioph::generate_theta(&set, &p, bits).inspect_err(|e| {
                if matches!(e, GameError::NoSafeChild { .. }) && !p.game_condition() {
                    eprintln!("hint: Bob was cornered without a declared budget; a larger --k satisfies the game condition");
                }
            })?;
            out.emit(&beck::format_bits(&theta))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cmd: Verify) -> Res<ExitCode> {
    match cmd {
        Verify::Miller { factors, input } => {
            let word = parse_ints(&input.text()?)?;
            let word: Vec<treegame::Child> = word.into_iter().map(|s| s as treegame::Child).collect();
            report(&miller::verify_factors(&word, &factors.load()?))
        }
        Verify::Squarefree { lists, input } => {
            let text = input.text()?;
            let word = if input.word.is_some() { parse_symbols(&text)? } else { parse_ints(&text)? };
            let mut r = squarefree::verify_squarefree(&word);
            if let Some(spec) = lists {
                let mut oracle = list_oracle(&spec)?;
                let assigned = (0..word.len()).map(|i| oracle.list(i, &word[..i])).collect::<treegame::Result<Vec<_>>>()?;
                r.violations.extend(squarefree::verify_respects(&word, &assigned).violations);
            }
            report(&r)
        }
        Verify::Beck { c, n, input } => report(&beck::verify_separation(&beck::parse_bits(&input.text()?)?, &c, n)),
        Verify::Blocks { epsilon, n, input } => {
            report(&blocks::verify_blocks(&beck::parse_bits(&input.text()?)?, &epsilon, n))
        }
        Verify::Dioph { denoms, k, input } => {
            let bits = beck::parse_bits(&input.text()?)?;
            let set = load_denoms(&denoms, bits.len() as i64)?;
            report(&dioph::verify_regularity(&bits, &set, k))
        }
    }
}

fn show(r: &Rational) -> String {
    format!("{} ({})", ratio::format_rational(r), ratio::format_decimal(r, 12))
}

fn advise(cmd: Params) -> Res<ExitCode> {
    match cmd {
        Params::Mink { c } => {
            if c == 0 {
                return Err(GameError::InvalidParams("C must be positive".into()).into());
            }
            println!("{}", params::min_k(c));
        }
        Params::Beta { c, k } => {
            let b = params::optimal_beta(c, k)?;
            println!("beta = {}", show(&b));
            println!("beta + 3C/beta^(k-1) = {}", show(&dioph::published_lhs(c, k, &b)));
        }
        Params::Eps { c } => {
            let r = params::epsilon_of_c(c)?;
            println!("k = {}", r.k);
            println!("epsilon = {}", show(&r.epsilon));
            println!("reference = {}", show(&r.reference));
            println!("meets_reference = {}", r.meets_reference);
            if !r.meets_reference {
                eprintln!("warning: 2^-k < 1/(64 C log2 C) for C = {c}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(g) => gen(g),
        Command::Verify(v) => verify(v),
        Command::Params(p) => advise(p),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Game(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
