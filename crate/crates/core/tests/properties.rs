use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use posg_core::ata::Formula;
use posg_core::gen::{random_npw, random_parity_game, random_posg, random_transducer, PosgParams};
use posg_core::model::text::{parse_posg, parse_strategy, parse_tpg, serialize_posg, serialize_strategy, serialize_tpg};
use posg_core::model::product_with_memory;
use posg_core::omega::{complement_dpw, determinize};
use posg_core::paritygame::{self, brute_force_solve, strategy_is_winning, strategy_wins_exhaustively, Player};
use posg_core::reduce::{gadget_size, lift_strategy, lower_strategy, map_obs_seq, map_obs_seq_inv, reduce_almost_sure};
use posg_core::verify::{mec_decomposition, verify_almost_sure, verify_positive};
use posg_core::{Kind, Posg};

fn game(seed: u64, states: usize, obs: usize, prio: u32) -> Posg {
    let p = PosgParams { states, actions: 2, observations: obs, max_priority: prio };
    random_posg(p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn obs_sequence(g: &Posg, picks: &[usize]) -> Vec<String> {
    picks.iter().map(|&i| g.observations[i % g.observations.len()].clone()).collect()
}

proptest! {
    #[test]
    fn obs_mapping_round_trips(seed in 0u64..1000, picks in prop::collection::vec(0usize..10, 0..12)) {
        let g = game(seed, 6, 5, 3);
        let kappa = obs_sequence(&g, &picks);
        let mapped = map_obs_seq(&g, &kappa).unwrap();
        let extra = kappa.iter().filter(|o| g.observation_kind(g.obs_id(o).unwrap()) == Some(Kind::Prob)).count();
        prop_assert_eq!(mapped.len(), kappa.len() + 2 * extra);
        prop_assert_eq!(map_obs_seq_inv(&g, &mapped).unwrap(), kappa);
    }

    #[test]
    fn lifting_then_lowering_keeps_behaviour(seed in 0u64..1000, size in 1usize..4, picks in prop::collection::vec(0usize..10, 1..10)) {
        let g = game(seed, 6, 4, 3);
        let t = random_transducer(&g, size, &mut ChaCha8Rng::seed_from_u64(seed));
        let lifted = lift_strategy(&g, &t).unwrap();
        prop_assert!(lifted.size() <= 3 * t.size());
        let lowered = lower_strategy(&g, &lifted).unwrap();
        let kappa = obs_sequence(&g, &picks);
        let mapped = map_obs_seq(&g, &kappa).unwrap();
        prop_assert_eq!(lowered.action_for(&kappa).unwrap(), t.action_for(&kappa).unwrap());
        prop_assert_eq!(lifted.action_for(&mapped).unwrap(), t.action_for(&kappa).unwrap());
    }

    #[test]
    fn text_formats_round_trip(seed in 0u64..1000, states in 3usize..20) {
        let g = game(seed, states, 4, 5);
        prop_assert_eq!(parse_posg(&serialize_posg(&g)).unwrap(), g.clone());
        let r = reduce_almost_sure(&g).unwrap();
        prop_assert_eq!(parse_tpg(&serialize_tpg(&r.game)).unwrap(), r.game);
        let t = random_transducer(&g, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parse_strategy(&serialize_strategy(&t)).unwrap(), t);
    }

    #[test]
    fn reduced_size_is_the_closed_form(seed in 0u64..1000, states in 3usize..50, prio in 0u32..=6) {
        let g = game(seed, states, 3, prio);
        let r = reduce_almost_sure(&g).unwrap();
        let expected: usize = (0..g.num_states())
            .map(|s| if g.kinds[s] == Kind::Prob { gadget_size(g.priorities[s]) } else { 1 })
            .sum();
        prop_assert_eq!(r.game.num_states(), expected);
        prop_assert!(r.game.validate().is_empty());
        prop_assert_eq!(r.game.measure_period(), Some(4));
    }

    #[test]
    fn almost_sure_implies_positive(seed in 0u64..1000, size in 1usize..4) {
        let g = game(seed, 6, 3, 3);
        let t = random_transducer(&g, size, &mut ChaCha8Rng::seed_from_u64(seed ^ 0xabc));
        if verify_almost_sure(&g, &t).unwrap() {
            prop_assert!(verify_positive(&g, &t).unwrap());
        }
    }

    #[test]
    fn mecs_are_closed_connected_and_maximal(seed in 0u64..1000, size in 1usize..3) {
        let g = game(seed, 9, 4, 3);
        let t = random_transducer(&g, size, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = product_with_memory(&g, &t).unwrap();
        let mecs = mec_decomposition(&m);
        let is_ec = |set: &BTreeSet<usize>| {
            set.iter().all(|&v| {
                if m.is_closed_kind(v) { m.succ[v].iter().all(|w| set.contains(w)) } else { m.succ[v].iter().any(|w| set.contains(w)) }
            }) && set.iter().all(|&v| {
                // Strongly connected: every member reaches every other inside.
                let mut seen = BTreeSet::from([v]);
                let mut stack = vec![v];
                while let Some(x) = stack.pop() {
                    for &w in &m.succ[x] {
                        if set.contains(&w) && seen.insert(w) { stack.push(w); }
                    }
                }
                seen == *set
            })
        };
        let mut all = BTreeSet::new();
        for c in &mecs {
            let set: BTreeSet<usize> = c.iter().copied().collect();
            prop_assert!(is_ec(&set));
            for v in 0..m.len() {
                if !set.contains(&v) {
                    let mut bigger = set.clone();
                    bigger.insert(v);
                    prop_assert!(!is_ec(&bigger));
                }
            }
            for &v in c { prop_assert!(all.insert(v)); }
        }
    }

    #[test]
    fn minimal_models_are_minimal(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Formula::Or((0..rng.gen_range(1..4)).map(|_| {
            Formula::And((0..rng.gen_range(1..4)).map(|_| Formula::Atom(rng.gen_range(0..4), rng.gen_range(0..2))).collect())
        }).collect());
        let mins = f.minimal_models();
        for m in &mins {
            prop_assert!(f.eval_set(m));
            for a in m {
                let mut smaller = m.clone();
                smaller.remove(a);
                prop_assert!(!f.eval_set(&smaller));
            }
        }
        for m in f.all_models() {
            prop_assert!(mins.iter().any(|k| k.is_subset(&m)));
        }
    }

    #[test]
    fn zielonka_matches_brute_force(seed in 0u64..2000, nodes in 1usize..7) {
        let g = random_parity_game(nodes, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let sol = paritygame::solve(&g);
        let (even, odd) = brute_force_solve(&g).unwrap();
        prop_assert_eq!(sol.region(Player::Even), &even);
        prop_assert_eq!(sol.region(Player::Odd), &odd);
        for p in [Player::Even, Player::Odd] {
            prop_assert!(strategy_is_winning(&g, sol.region(p), &sol.strategy, p));
            prop_assert!(strategy_wins_exhaustively(&g, sol.region(p), &sol.strategy, p, 100_000).unwrap());
        }
    }

    #[test]
    fn determinization_preserves_short_lassos(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let a = random_npw(n, k, 4, &mut rng);
        let d = determinize(&a).unwrap();
        let cc = complement_dpw(&complement_dpw(&d));
        let stem: Vec<usize> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..k)).collect();
        let cycle: Vec<usize> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..k)).collect();
        let want = a.accepts(&stem, &cycle).unwrap();
        prop_assert_eq!(d.accepts(&stem, &cycle).unwrap(), want);
        prop_assert_eq!(cc.accepts(&stem, &cycle).unwrap(), want);
        prop_assert_eq!(complement_dpw(&d).accepts(&stem, &cycle).unwrap(), !want);
    }
}
