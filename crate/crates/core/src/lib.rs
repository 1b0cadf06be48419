//! A tree-escape game with exact β-weight accounting, and generators built
//! on Bob's winning strategy:
//!
//! * [`miller`]: words avoiding a finite set of forbidden factors,
//! * [`squarefree`]: square-free words respecting 4-list assignments,
//! * [`beck`]: bit sequences whose equal long factors are far apart,
//! * [`blocks`]: bit sequences whose adjacent blocks are very different,
//! * [`dioph`]: binary expansions of reals badly approximable by a sparse
//!   set of denominators, with [`params`] for the parameter algebra.
//!
//! Every generator has an independent brute-force verifier.

pub mod beck;
pub mod blocks;
pub mod dioph;
pub mod error;
pub mod game;
pub mod miller;
pub mod params;
pub mod ratio;
pub mod report;
pub mod squarefree;
pub mod weight;

pub use error::{GameError, Result};
pub use game::{
    check_condition, run, Accounting, AliceMove, Adversary, Bundle, Child, Game, GameParams, GameState, NoBundle,
    NullAdversary, Obstruction, RelPath,
};
pub use ratio::Rational;
pub use report::{VerificationReport, Violation};
