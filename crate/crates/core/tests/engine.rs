//! Engine properties: conservation, incremental vs. from-scratch totals,
//! the per-step weight invariant, pruning safety and determinism.

use num::{One, Zero};
use proptest::prelude::*;
use treegame::ratio::{self, ratio};
use treegame::{
    Accounting, Adversary, AliceMove, Child, Game, GameError, GameParams, GameState, NoBundle, Rational, RelPath,
};

/// Replays a fixed list of explicit moves, one per round.
#[derive(Clone)]
struct Scripted {
    k: usize,
    moves: Vec<Vec<Vec<Child>>>,
    round: usize,
}

impl Adversary for Scripted {
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

    fn next_move(&mut self, _: &[Child]) -> treegame::Result<AliceMove<NoBundle>> {
        let mut mv = AliceMove::empty();
        if let Some(paths) = self.moves.get(self.round) {
            for p in paths {
                mv.push_path(RelPath::new(p.clone())?);
            }
        }
        self.round += 1;
        Ok(mv)
    }
}

fn mv(paths: &[Vec<Child>]) -> AliceMove<NoBundle> {
    let mut m = AliceMove::empty();
    for p in paths {
        m.push_path(RelPath::new(p.clone()).unwrap());
    }
    m
}

/// Every vertex ever forbidden, as absolute paths.
fn forbidden_vertices(moves: &[Vec<Vec<Child>>], path: &[Child]) -> Vec<Vec<Child>> {
    let mut out = Vec::new();
    for (m, paths) in moves.iter().enumerate().take(path.len()) {
        for p in paths {
            let mut v = path[..m].to_vec();
            v.extend_from_slice(p);
            out.push(v);
        }
    }
    out
}

fn arb_paths(k: usize, max_depth: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<Child>>> {
    prop::collection::vec(prop::collection::vec(0..k as Child, 1..=max_depth), 0..=max_len)
}

/// Moves of small total weight: few paths, each fairly deep.
fn arb_light_moves(k: usize, rounds: usize) -> impl Strategy<Value = Vec<Vec<Vec<Child>>>> {
    prop::collection::vec(prop::collection::vec(prop::collection::vec(0..k as Child, 4..=7), 0..=2), rounds)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shares_sum_to_total(k in 2usize..=4, num in 11i64..=19, paths in arb_paths(4, 6, 12)) {
        let beta = ratio(num, 10);
        prop_assume!(beta < ratio::int(k as i64));
        let params = GameParams::new(k, beta, None).unwrap();
        let mut s: GameState<NoBundle> = GameState::new(params, Accounting::Exact);
        let paths: Vec<Vec<Child>> = paths.into_iter().map(|p| p.into_iter().map(|c| c % k as Child).collect()).collect();
        s.apply_alice_move(mv(&paths), &()).unwrap();
        let total = s.total_weight(&());
        let sum = (0..k as Child).map(|c| s.child_share(c, &())).fold(Rational::zero(), |a, b| a + b);
        prop_assert_eq!(sum, total.clone());
        prop_assert_eq!(total, s.recompute_weight(&()));
    }

    #[test]
    fn exact_runs_keep_the_invariant(k in 2usize..=3, moves in arb_light_moves(3, 40)) {
        let moves: Vec<Vec<Vec<Child>>> = moves
            .into_iter()
            .map(|m| m.into_iter().map(|p| p.into_iter().map(|c| c % k as Child).collect()).collect())
            .collect();
        let params = GameParams::new(k, ratio(3, 2), None).unwrap();
        let mut s: GameState<NoBundle> = GameState::new(params, Accounting::Exact);
        for m in &moves {
            s.apply_alice_move(mv(m), &()).unwrap();
            if s.total_weight(&()) >= Rational::one() {
                // Alice overspent; nothing to check from here on.
                return Ok(());
            }
            let c = s.choose_child(&()).unwrap();
            s.descend(c, &()).unwrap();
            prop_assert!(s.total_weight(&()) < Rational::one());
            prop_assert_eq!(s.total_weight(&()), s.recompute_weight(&()));
        }
    }

    #[test]
    fn filtered_and_exact_agree(moves in arb_light_moves(2, 30)) {
        let params = GameParams::new(2, ratio(7, 4), None).unwrap();
        let script = Scripted { k: 2, moves, round: 0 };
        let mut a = Game::new(params.clone(), script.clone(), Accounting::Exact).unwrap();
        let mut b = Game::new(params, script, Accounting::Filtered).unwrap();
        let ra = a.play(30).map(|p| p.to_vec());
        let rb = b.play(30).map(|p| p.to_vec());
        match (ra, rb) {
            (Ok(pa), Ok(pb)) => prop_assert_eq!(pa, pb),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "exact {:?} vs filtered {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn pruned_runs_avoid_every_forbidden_vertex(moves in arb_light_moves(2, 30)) {
        let params = GameParams::new(2, ratio(7, 4), None).unwrap();
        let script = Scripted { k: 2, moves: moves.clone(), round: 0 };
        let mut g = Game::new(params, script, Accounting::Exact).unwrap().with_subsumption_pruning(true);
        if let Ok(path) = g.play(30) {
            let path = path.to_vec();
            for v in forbidden_vertices(&moves, &path) {
                prop_assert!(!(v.len() <= path.len() && path[..v.len()] == v[..]), "path enters {:?}", v);
            }
        }
    }

    #[test]
    fn runs_are_deterministic(moves in arb_light_moves(3, 20)) {
        let params = GameParams::new(3, ratio(2, 1), None).unwrap();
        let script = Scripted { k: 3, moves, round: 0 };
        let a = Game::new(params.clone(), script.clone(), Accounting::Filtered).unwrap().with_transcript().play(20).map(|p| p.to_vec());
        let b = Game::new(params, script, Accounting::Filtered).unwrap().with_transcript().play(20).map(|p| p.to_vec());
        prop_assert_eq!(a.ok(), b.ok());
    }
}

#[test]
fn pruning_can_change_the_chosen_child() {
    // Below child 0 sit [0,1] and [0,1,0]; the second lies under the first.
    // With beta = 3/2: unpruned beta*share(0) = 2/3 + 4/9 >= 1, pruned it is 2/3.
    let params = GameParams::new(2, ratio(3, 2), None).unwrap();
    let paths = vec![vec![0, 1], vec![0, 1, 0]];
    let mut plain: GameState<NoBundle> = GameState::new(params.clone(), Accounting::Exact);
    plain.apply_alice_move(mv(&paths), &()).unwrap();
    let mut pruned: GameState<NoBundle> = GameState::new(params, Accounting::Exact).with_subsumption_pruning(true);
    pruned.apply_alice_move(mv(&paths), &()).unwrap();
    assert_eq!(plain.choose_child(&()).unwrap(), 1);
    assert_eq!(pruned.choose_child(&()).unwrap(), 0);
    assert_eq!(pruned.ledger_len(), 1);
}

#[test]
fn transcript_lines() {
    let params = GameParams::new(2, ratio(3, 2), None).unwrap();
    let script = Scripted { k: 2, moves: vec![vec![vec![0, 0]], vec![]], round: 0 };
    let mut g = Game::new(params, script, Accounting::Exact).unwrap().with_transcript();
    g.play(2).unwrap();
    assert_eq!(g.transcript().unwrap(), &["step 0: forbid [0,0], move 0", "step 1: forbid none, move 1"]);
}

#[test]
fn overspending_alice_is_caught() {
    let params = GameParams::new(2, ratio(3, 2), Some(ratio(1, 4))).unwrap();
    let mut s: GameState<NoBundle> = GameState::new(params, Accounting::Filtered);
    let err = s.apply_alice_move(mv(&[vec![0]]), &()).unwrap_err();
    assert!(matches!(err, GameError::BudgetExceeded { .. }));
}
