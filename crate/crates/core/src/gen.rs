//! Seeded random instances: games, parity games, automata and transducers.
//!
//! Every generator takes the random source explicitly; the `*_seeded`
//! helpers use ChaCha8 so that a seed fixes the output on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Kind, Posg, Rational, StrategyTransducer};
use crate::omega::{Npw, Structure};
use crate::paritygame::{ParityGame, Player};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PosgParams {
    pub states: usize,
    pub actions: usize,
    pub observations: usize,
    pub max_priority: u32,
}

/// Probability vectors with denominators at most 4, by support size.
fn distributions(size: usize) -> Vec<Vec<Rational>> {
    let r = |n, d| Rational::new(n, d);
    match size {
        1 => vec![vec![r(1, 1)]],
        2 => vec![vec![r(1, 2), r(1, 2)], vec![r(1, 4), r(3, 4)], vec![r(3, 4), r(1, 4)], vec![r(1, 3), r(2, 3)]],
        3 => vec![
            vec![r(1, 3), r(1, 3), r(1, 3)],
            vec![r(1, 2), r(1, 4), r(1, 4)],
            vec![r(1, 4), r(1, 2), r(1, 4)],
            vec![r(1, 4), r(1, 4), r(1, 2)],
        ],
        _ => unreachable!("supports have at most three states"),
    }
}

/// Random game with state kinds cycling player 1, player 2, random, so
/// each kind gets a third of the states. Each kind gets at least one
/// observation and every observation is used. Priorities are uniform in
/// `0..=max_priority`; player-2 states have 1 to 3 successors and random
/// states 1 to 3 support states.
pub fn random_posg<R: Rng>(p: PosgParams, rng: &mut R) -> Result<Posg> {
    if p.states < 3 || p.actions == 0 || p.observations < 3 {
        return Err(Error::Invalid(vec![
            "a random game needs at least 3 states, 1 action and 3 observations".into(),
        ]));
    }
    let kinds_cycle = [Kind::P1, Kind::P2, Kind::Prob];
    let n = p.states;
    let kinds: Vec<Kind> = (0..n).map(|i| kinds_cycle[i % 3]).collect();
    let of_kind = |k: Kind| -> Vec<usize> { (0..n).filter(|&s| kinds[s] == k).collect() };
    let groups = [of_kind(Kind::P1), of_kind(Kind::P2), of_kind(Kind::Prob)];

    // Split observations across kinds, never more than a kind has states.
    let mut per_kind = [1usize; 3];
    let mut extra = p.observations - 3;
    let mut i = 0;
    while extra > 0 && (0..3).any(|j| per_kind[j] < groups[j].len()) {
        if per_kind[i] < groups[i].len() {
            per_kind[i] += 1;
            extra -= 1;
        }
        i = (i + 1) % 3;
    }
    let mut obs = vec![0usize; n];
    let mut observations = Vec::new();
    for (j, group) in groups.iter().enumerate() {
        let base = observations.len();
        for o in 0..per_kind[j] {
            observations.push(format!("o{}{}", ["p", "q", "r"][j], o));
        }
        let mut order = group.clone();
        order.shuffle(rng);
        for (idx, &s) in order.iter().enumerate() {
            obs[s] = base + if idx < per_kind[j] { idx } else { rng.gen_range(0..per_kind[j]) };
        }
    }
    // Observation ids must follow the sorted order of names.
    let mut sorted = observations.clone();
    sorted.sort();
    let obs: Vec<usize> = obs.iter().map(|&o| sorted.binary_search(&observations[o]).unwrap()).collect();

    let pick = |rng: &mut R, pool: &[usize]| -> Vec<usize> {
        let size = rng.gen_range(1..=pool.len().min(3));
        let mut v: Vec<usize> = pool.choose_multiple(rng, size).copied().collect();
        v.sort_unstable();
        v
    };
    let mut trans = vec![vec![None; p.actions]; n];
    let mut edges = vec![Vec::new(); n];
    let mut dist = vec![Vec::new(); n];
    for s in 0..n {
        match kinds[s] {
            Kind::P1 => {
                for a in 0..p.actions {
                    trans[s][a] = Some(*groups[1].choose(rng).unwrap());
                }
            }
            Kind::P2 => edges[s] = pick(rng, &groups[2]),
            Kind::Prob => {
                let support = pick(rng, &groups[0]);
                let probs = distributions(support.len()).choose(rng).unwrap().clone();
                dist[s] = support.into_iter().zip(probs).collect();
            }
        }
    }
    let g = Posg {
        states: (0..n).map(|s| format!("s{s}")).collect(),
        kinds,
        obs,
        observations: sorted,
        priorities: (0..n).map(|_| rng.gen_range(0..=p.max_priority)).collect(),
        actions: (0..p.actions).map(|a| format!("a{a}")).collect(),
        trans,
        edges,
        dist,
        start: 0,
    };
    g.ensure_valid()?;
    Ok(g)
}

pub fn random_posg_seeded(p: PosgParams, seed: u64) -> Result<Posg> {
    random_posg(p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random parity game; every node has 1 to 3 successors.
pub fn random_parity_game<R: Rng>(nodes: usize, max_priority: u32, rng: &mut R) -> ParityGame {
    let mut g = ParityGame::new();
    for v in 0..nodes {
        let owner = if rng.gen_bool(0.5) { Player::Even } else { Player::Odd };
        g.add_node(format!("v{v}"), owner, rng.gen_range(0..=max_priority));
    }
    for v in 0..nodes {
        let deg = rng.gen_range(1..=nodes.min(3));
        let all: Vec<usize> = (0..nodes).collect();
        for &w in all.choose_multiple(rng, deg) {
            g.add_edge(v, w);
        }
        g.succ[v].sort_unstable();
    }
    g.start = Some(0);
    g
}

/// Random nondeterministic automaton with initial state 0; each
/// transition is present with probability 0.4, so states may block.
pub fn random_npw<R: Rng>(states: usize, letters: usize, priorities: u32, rng: &mut R) -> Npw {
    let delta = (0..states)
        .map(|_| (0..letters).map(|_| (0..states).filter(|_| rng.gen_bool(0.4)).collect()).collect())
        .collect();
    Npw(Structure {
        names: (0..states).map(|q| format!("q{q}")).collect(),
        letters: (0..letters).map(|l| format!("l{l}")).collect(),
        initial: vec![0],
        delta,
        priorities: (0..states).map(|_| rng.gen_range(0..priorities)).collect(),
    })
}

/// Uniformly random transducer for `g` with `size` memory states.
pub fn random_transducer<R: Rng>(g: &Posg, size: usize, rng: &mut R) -> StrategyTransducer {
    let k = g.observations.len();
    StrategyTransducer {
        memory: (0..size).map(|m| format!("m{m}")).collect(),
        init: 0,
        observations: g.observations.clone(),
        upd: (0..size * k).map(|_| rng.gen_range(0..size)).collect(),
        nxt: (0..size).map(|_| g.actions.choose(rng).unwrap().clone()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_games_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 3..40 {
            for obs in 3..8 {
                let g = random_posg(PosgParams { states: n, actions: 2, observations: obs, max_priority: 4 }, &mut rng).unwrap();
                assert!(g.validate().is_empty());
                assert!(g.observations.len() <= obs);
                let mut used = g.obs.clone();
                used.sort();
                used.dedup();
                assert_eq!(used.len(), g.observations.len());
            }
        }
    }

    #[test]
    fn seeds_fix_the_output() {
        let p = PosgParams { states: 9, actions: 2, observations: 4, max_priority: 3 };
        assert_eq!(random_posg_seeded(p, 5).unwrap(), random_posg_seeded(p, 5).unwrap());
    }

    #[test]
    fn too_few_observations() {
        let p = PosgParams { states: 9, actions: 2, observations: 2, max_priority: 3 };
        assert!(random_posg_seeded(p, 0).is_err());
    }
}
