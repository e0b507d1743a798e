//! Deterministic inputs shared by the benchmarks.

use posg_core::gen::{random_npw, random_parity_game, random_posg_seeded, random_transducer, PosgParams};
use posg_core::omega::Npw;
use posg_core::{ParityGame, Posg, StrategyTransducer};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn desk_posg(states: usize, max_priority: u32, seed: u64) -> Posg {
    let p = PosgParams { states, actions: 2, observations: 3, max_priority };
    random_posg_seeded(p, seed).expect("valid parameters")
}

pub fn parity_game(nodes: usize, seed: u64) -> ParityGame {
    random_parity_game(nodes, 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn npw(states: usize, seed: u64) -> Npw {
    random_npw(states, 2, 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A game with a random transducer over its observations.
pub fn closed_loop(states: usize, memory: usize, seed: u64) -> (Posg, StrategyTransducer) {
    let g = desk_posg(states, 3, seed);
    let t = random_transducer(&g, memory, &mut ChaCha8Rng::seed_from_u64(seed));
    (g, t)
}
