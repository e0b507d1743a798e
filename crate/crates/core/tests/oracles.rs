//! Cross-checks of the decision pipeline against the independent oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use posg_core::ata::build_ata;
use posg_core::emptiness::{check_nonempty_with, EmptinessConfig, ModelMode};
use posg_core::gen::{random_posg, random_transducer, PosgParams};
use posg_core::model::text::parse_posg;
use posg_core::paritygame::{self, Player};
use posg_core::reduce::{lift_strategy, reduce_almost_sure, reduce_positive, reduce_positive_dual};
use posg_core::solve::solve_reduced;
use posg_core::threeplayer::{fix_player1, Concurrent3PG};
use posg_core::verify::{brute_force_posg, verify_almost_sure, verify_positive, Objective};
use posg_core::{solve, Mode, Posg, SolveConfig};

fn desk_scale(rng: &mut ChaCha8Rng) -> Posg {
    let p = PosgParams {
        states: rng.gen_range(3..=6),
        actions: rng.gen_range(1..=2),
        observations: 3,
        max_priority: rng.gen_range(0..=3),
    };
    random_posg(p, rng).unwrap()
}

fn objective(mode: Mode) -> Objective {
    match mode {
        Mode::AlmostSure => Objective::AlmostSure,
        Mode::Positive => Objective::Positive,
    }
}

fn verifies(g: &Posg, mode: Mode, t: &posg_core::StrategyTransducer) -> bool {
    match mode {
        Mode::AlmostSure => verify_almost_sure(g, t).unwrap(),
        Mode::Positive => verify_positive(g, t).unwrap(),
    }
}

#[test]
fn solver_agrees_with_verifier_and_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let g = desk_scale(&mut rng);
        for mode in [Mode::AlmostSure, Mode::Positive] {
            let s = solve(&g, mode, &SolveConfig::default()).unwrap();
            if let Some(t) = &s.strategy {
                assert!(verifies(&g, mode, t));
            }
            let bf = brute_force_posg(&g, 2, objective(mode)).unwrap();
            assert_eq!(bf.is_some(), s.winning, "{}", posg_core::model::text::serialize_posg(&g));
        }
    }
}

#[test]
fn fixing_the_witness_leaves_an_even_win() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let g = desk_scale(&mut rng);
        let r = reduce_almost_sure(&g).unwrap();
        let s = solve_reduced(&g, &r, &SolveConfig::default()).unwrap();
        if let Some(t) = s.strategy {
            for w in [s.reduced_strategy.unwrap(), lift_strategy(&g, &t).unwrap()] {
                let pg = fix_player1(&r.game, &w).unwrap();
                let sol = paritygame::solve(&pg);
                assert_eq!(sol.winner(pg.start.unwrap()), Player::Even);
            }
        }
    }
}

#[test]
fn even_region_matches_the_verifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..100 {
        let g = desk_scale(&mut rng);
        let t = random_transducer(&g, rng.gen_range(1..=3), &mut rng);
        let lifted = lift_strategy(&g, &t).unwrap();
        let (r, mode) = if i % 2 == 0 {
            (reduce_almost_sure(&g).unwrap(), Mode::AlmostSure)
        } else {
            (reduce_positive_dual(&g).unwrap(), Mode::Positive)
        };
        let pg = fix_player1(&r.game, &lifted).unwrap();
        let even = paritygame::solve(&pg).winner(pg.start.unwrap()) == Player::Even;
        assert_eq!(even, verifies(&g, mode, &t));
    }
}

/// A coin from `s` returns to `u` or falls into the odd trap `y`.
const TRAP: &str = "\
posg
action a
state u kind=p1 obs=o1 prio=0
state v kind=p2 obs=o2 prio=0
state s kind=prob obs=o3 prio=2
state y kind=p1 obs=o1 prio=1
state vy kind=p2 obs=o2 prio=1
state sy kind=prob obs=o3 prio=1
start u
trans u a v
trans y a vy
edge v s
edge vy sy
pdist s u 1/2
pdist s y 1/2
pdist sy y 1
";

#[test]
fn entry_gadget_overapproximates_positive_winning() {
    let g = parse_posg(TRAP).unwrap();
    assert!(brute_force_posg(&g, 3, Objective::Positive).unwrap().is_none());
    assert!(!solve(&g, Mode::Positive, &SolveConfig::default()).unwrap().winning);

    let entry = solve_reduced(&g, &reduce_positive(&g).unwrap(), &SolveConfig::default()).unwrap();
    assert!(entry.winning);
    assert!(!verify_positive(&g, &entry.strategy.unwrap()).unwrap());
}

/// Random concurrent game with three states given by a transition table.
fn table_game(rng: &mut ChaCha8Rng) -> Concurrent3PG {
    let (n, a1, a2, a3) = (3, rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
    let names = (0..n).map(|s| format!("s{s}")).collect();
    let letters = |k: usize, c: char| (0..k).map(|i| format!("{c}{i}")).collect();
    let obs = (0..n).map(|_| format!("o{}", rng.gen_range(0..2))).collect();
    let table = (0..n * a1 * a2 * a3).map(|_| rng.gen_range(0..n)).collect();
    let prios = (0..n).map(|_| rng.gen_range(0..3)).collect();
    Concurrent3PG::from_table(names, 0, letters(a1, 'a'), letters(a2, 'b'), letters(a3, 'c'), obs, prios, table).unwrap()
}

#[test]
fn minimal_models_lose_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut nonempty = 0;
    for _ in 0..200 {
        let ata = build_ata(&table_game(&mut rng));
        let min = check_nonempty_with(&ata, &EmptinessConfig::default()).unwrap();
        let all = check_nonempty_with(&ata, &EmptinessConfig { models: ModelMode::All, ..Default::default() }).unwrap();
        assert_eq!(min.witness.is_some(), all.witness.is_some());
        nonempty += min.witness.is_some() as usize;
    }
    assert!(nonempty > 0 && nonempty < 200);
}
