//! Independent checks of a fixed player-1 strategy: end-component
//! analysis of the product MDP, exhaustive search over small transducers,
//! and a seeded simulation for diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::graph::{reachable, tarjan};
use crate::model::{
    product_aligned, product_with_memory, AlignedStrategy, Kind, Player2Mdp, Posg, StrategyTransducer,
};
use crate::{Error, Result};

/// Maximal end components of the sub-MDP induced by `within`: strongly
/// connected sets in which player-1 and random states keep every
/// successor inside and player-2 states keep at least one.
pub fn mec_decomposition_within(m: &Player2Mdp, within: &BitSet) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut alive = within.clone();
    loop {
        let comps = tarjan(n, |v| {
            if alive.contains(v) {
                m.succ[v].iter().copied().filter(|&w| alive.contains(w)).collect()
            } else {
                Vec::new()
            }
        });
        let mut comp_of = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut removed = false;
        for v in alive.iter().collect::<Vec<_>>() {
            let inside = |w: &usize| alive.contains(*w) && comp_of[*w] == comp_of[v];
            let keep = if m.is_closed_kind(v) {
                m.succ[v].iter().all(inside)
            } else {
                m.succ[v].iter().any(inside)
            };
            if !keep {
                alive.remove(v);
                removed = true;
            }
        }
        if !removed {
            let mut out: Vec<Vec<usize>> = comps
                .into_iter()
                .filter(|c| c.iter().all(|&v| alive.contains(v)))
                .map(|mut c| {
                    c.sort_unstable();
                    c
                })
                .collect();
            out.sort();
            return out;
        }
    }
}

pub fn mec_decomposition(m: &Player2Mdp) -> Vec<Vec<usize>> {
    mec_decomposition_within(m, &BitSet::full(m.len()))
}

/// States of end components in which player 2 can keep the minimum
/// priority odd: for each odd `l`, the maximal end components among states
/// of priority `>= l` that contain a state of priority `l`.
fn odd_ec_states(m: &Player2Mdp) -> Vec<Vec<usize>> {
    let mut odd: Vec<u32> = m.priorities.iter().copied().filter(|p| p % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    let mut out = Vec::new();
    for l in odd {
        let within: BitSet = (0..m.len()).filter(|&v| m.priorities[v] >= l).collect_with(m.len());
        for c in mec_decomposition_within(m, &within) {
            if c.iter().any(|&v| m.priorities[v] == l) {
                out.push(c);
            }
        }
    }
    out
}

/// Whether some end component with odd minimum priority is reachable.
/// In an MDP, graph reachability already has positive probability.
pub fn exists_reachable_odd_ec(m: &Player2Mdp, start: usize) -> bool {
    let reach = reachable(m.len(), &[start], |v| m.succ[v].clone());
    odd_ec_states(m).iter().any(|c| c.iter().any(|&v| reach[v]))
}

/// States from which player 2 reaches `target` with probability 1:
/// repeatedly drop states that cannot reach it and the states from which
/// chance or the fixed player 1 can force a dropped state.
pub fn almost_sure_reach(m: &Player2Mdp, target: &BitSet) -> BitSet {
    let n = m.len();
    let mut alive = BitSet::full(n);
    loop {
        let mut pred = vec![Vec::new(); n];
        for v in alive.iter() {
            for &w in &m.succ[v] {
                if alive.contains(w) {
                    pred[w].push(v);
                }
            }
        }
        let seeds: Vec<usize> = target.iter().filter(|&v| alive.contains(v)).collect();
        let can = reachable(n, &seeds, |v| pred[v].clone());
        let mut bad: Vec<usize> = alive.iter().filter(|&v| !can[v]).collect();
        if bad.is_empty() {
            return alive;
        }
        // Attractor of the opponent to the dropped states.
        while let Some(v) = bad.pop() {
            if !alive.contains(v) {
                continue;
            }
            alive.remove(v);
            for u in alive.iter().collect::<Vec<_>>() {
                if target.contains(u) {
                    continue;
                }
                let forced = if m.is_closed_kind(u) {
                    m.succ[u].iter().any(|&w| !alive.contains(w))
                } else {
                    m.succ[u].iter().all(|&w| !alive.contains(w))
                };
                if forced {
                    bad.push(u);
                }
            }
        }
    }
}

/// Whether player 2 wins the co-parity objective with probability 1.
pub fn mdp_almost_sure_coparity(m: &Player2Mdp, start: usize) -> bool {
    let mut target = BitSet::new(m.len());
    for c in odd_ec_states(m) {
        for v in c {
            target.insert(v);
        }
    }
    almost_sure_reach(m, &target).contains(start)
}

/// Summary of an end-component check, for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub mecs: usize,
    pub odd_ec_reachable: bool,
    pub holds: bool,
}

pub fn report(g: &Posg, t: &StrategyTransducer, positive: bool) -> Result<Report> {
    let m = product_with_memory(g, t)?;
    let odd = exists_reachable_odd_ec(&m, m.start);
    let holds = if positive { !mdp_almost_sure_coparity(&m, m.start) } else { !odd };
    Ok(Report { mecs: mec_decomposition(&m).len(), odd_ec_reachable: odd, holds })
}

/// Whether `t` wins almost surely against every player-2 strategy.
pub fn verify_almost_sure(g: &Posg, t: &StrategyTransducer) -> Result<bool> {
    let m = product_with_memory(g, t)?;
    Ok(!exists_reachable_odd_ec(&m, m.start))
}

/// Whether `t` wins with positive probability against every player-2
/// strategy.
pub fn verify_positive(g: &Posg, t: &StrategyTransducer) -> Result<bool> {
    let m = product_with_memory(g, t)?;
    Ok(!mdp_almost_sure_coparity(&m, m.start))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    AlmostSure,
    Positive,
}

fn check_aligned(g: &Posg, st: &AlignedStrategy, objective: Objective) -> bool {
    let m = product_aligned(g, st);
    match objective {
        Objective::AlmostSure => !exists_reachable_odd_ec(&m, m.start),
        Objective::Positive => !mdp_almost_sure_coparity(&m, m.start),
    }
}

/// Default bound on the number of candidate transducers examined.
pub const BRUTE_FORCE_BUDGET: u64 = 20_000_000;

/// Searches transducers with at most `bound` memory states, smallest first
/// and lexicographically within a size, for one that passes the verifier
/// of `objective`. Only candidates whose memory states are all reachable,
/// numbered in order of first discovery, are checked.
pub fn brute_force_posg(g: &Posg, bound: usize, objective: Objective) -> Result<Option<StrategyTransducer>> {
    brute_force_posg_budget(g, bound, objective, BRUTE_FORCE_BUDGET)
}

pub fn brute_force_posg_budget(g: &Posg, bound: usize, objective: Objective, budget: u64) -> Result<Option<StrategyTransducer>> {
    let k = g.observations.len();
    let na = g.actions.len() as u64;
    let mut total: u64 = 0;
    for size in 1..=bound {
        let cells = (size * k) as u32;
        let count = (size as u64)
            .checked_pow(cells)
            .and_then(|x| x.checked_mul(na.checked_pow(size as u32)?))
            .ok_or_else(|| Error::TooLarge(format!("transducers with {size} memory states")))?;
        total = total.saturating_add(count);
        if total > budget {
            return Err(Error::TooLarge(format!(
                "{total} candidate transducers up to {size} memory states exceed the budget of {budget}"
            )));
        }
    }
    for size in 1..=bound {
        let mut upd = vec![0usize; size * k];
        loop {
            if canonical(&upd, size, k) {
                let mut nxt = vec![0usize; size];
                loop {
                    let st = AlignedStrategy { k, init: 0, upd: upd.clone(), nxt: nxt.clone() };
                    if check_aligned(g, &st, objective) {
                        return Ok(Some(named(g, &st)));
                    }
                    if !odometer(&mut nxt, g.actions.len()) {
                        break;
                    }
                }
            }
            if !odometer(&mut upd, size) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances the last position fastest; false after the final tuple.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Memory states are reachable from 0 and appear in breadth-first order.
fn canonical(upd: &[usize], size: usize, k: usize) -> bool {
    let mut next = 1;
    for m in 0..size {
        if m >= next {
            return false;
        }
        for o in 0..k {
            let t = upd[m * k + o];
            if t > next {
                return false;
            }
            if t == next {
                next += 1;
            }
        }
    }
    next == size
}

fn named(g: &Posg, st: &AlignedStrategy) -> StrategyTransducer {
    StrategyTransducer {
        memory: (0..st.size()).map(|m| format!("m{m}")).collect(),
        init: st.init,
        observations: g.observations.clone(),
        upd: st.upd.clone(),
        nxt: st.nxt.iter().map(|&a| g.actions[a].clone()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloReport {
    pub episodes: usize,
    pub steps: usize,
    /// Episodes whose minimum priority over the last `steps / 2` steps is
    /// even.
    pub even_tail: usize,
}

impl MonteCarloReport {
    pub fn fraction(&self) -> f64 {
        if self.episodes == 0 {
            0.0
        } else {
            self.even_tail as f64 / self.episodes as f64
        }
    }
}

/// Simulates `t` against a player 2 that picks uniformly at random.
/// Episode `i` draws from the stream `i` of a generator seeded with `seed`,
/// so reports are reproducible and episodes independent of each other.
pub fn monte_carlo(g: &Posg, t: &StrategyTransducer, seed: u64, steps: usize, episodes: usize) -> Result<MonteCarloReport> {
    let st = t.align(&g.observations, &g.actions)?;
    let window = (steps / 2).max(1);
    let mut even_tail = 0;
    for ep in 0..episodes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ep as u64);
        let mut s = g.start;
        let mut m = st.update(st.init, g.obs[s]);
        let mut tail_min = u32::MAX;
        for step in 0..steps {
            if step + window >= steps {
                tail_min = tail_min.min(g.priorities[s]);
            }
            s = match g.kinds[s] {
                Kind::P1 => g.succ_p1(s, st.nxt[m]),
                Kind::P2 => g.edges[s][rng.gen_range(0..g.edges[s].len())],
                Kind::Prob => sample(&g.dist[s], &mut rng),
            };
            m = st.update(m, g.obs[s]);
        }
        if tail_min != u32::MAX && tail_min % 2 == 0 {
            even_tail += 1;
        }
    }
    Ok(MonteCarloReport { episodes, steps, even_tail })
}

/// Exact sampling: draws an integer below the common denominator.
fn sample(dist: &[(usize, crate::model::Rational)], rng: &mut ChaCha8Rng) -> usize {
    let lcm = dist.iter().fold(1u64, |acc, (_, p)| num_integer::lcm(acc, *p.denom()));
    let x = rng.gen_range(0..lcm);
    let mut acc = 0;
    for &(t, p) in dist {
        acc += p.numer() * (lcm / p.denom());
        if x < acc {
            return t;
        }
    }
    dist.last().unwrap().0
}

trait CollectWith {
    fn collect_with(self, n: usize) -> BitSet;
}

impl<I: Iterator<Item = usize>> CollectWith for I {
    fn collect_with(self, n: usize) -> BitSet {
        let mut b = BitSet::new(n);
        for v in self {
            b.insert(v);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MdpKind;

    /// Hand-built MDP from (kind, priority, successors).
    fn mdp(spec: &[(MdpKind, u32, &[usize])]) -> Player2Mdp {
        Player2Mdp {
            pairs: (0..spec.len()).map(|i| (i, 0)).collect(),
            names: (0..spec.len()).map(|i| format!("x{i}")).collect(),
            kinds: spec.iter().map(|s| s.0).collect(),
            succ: spec.iter().map(|s| s.2.to_vec()).collect(),
            probs: spec
                .iter()
                .map(|s| {
                    if s.0 == MdpKind::Random {
                        vec![crate::model::Rational::new(1, s.2.len() as u64); s.2.len()]
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
            priorities: spec.iter().map(|s| s.1).collect(),
            start: 0,
        }
    }

    use MdpKind::{Player1 as P1, Player2 as P2, Random as R};

    #[test]
    fn two_disjoint_cycles() {
        let m = mdp(&[
            (P2, 0, &[1, 3]),
            (P1, 0, &[2]),
            (R, 0, &[0]),
            (P1, 1, &[4]),
            (P2, 1, &[5]),
            (R, 1, &[3]),
        ]);
        assert_eq!(mec_decomposition(&m), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(exists_reachable_odd_ec(&m, 0));
        let mut cut = m.clone();
        cut.succ[0] = vec![1];
        assert_eq!(mec_decomposition(&cut).len(), 2);
        assert!(!exists_reachable_odd_ec(&cut, 0));
    }

    #[test]
    fn leaking_random_state_is_excluded() {
        let m = mdp(&[(P2, 0, &[1]), (R, 0, &[0, 2]), (P2, 1, &[2])]);
        assert_eq!(mec_decomposition(&m), vec![vec![2]]);
    }

    #[test]
    fn player_two_steering() {
        // 0 (player 2) chooses between an even loop {1} and a coin {2}
        // that returns to 0 or falls into the odd loop {3}.
        let m = mdp(&[(P2, 2, &[1, 2]), (P2, 0, &[1]), (R, 2, &[0, 3]), (P2, 1, &[3])]);
        assert!(exists_reachable_odd_ec(&m, 0));
        // Repeating the coin reaches {3} with probability 1.
        assert!(mdp_almost_sure_coparity(&m, 0));
        // From the even loop itself there is no way out.
        assert!(!mdp_almost_sure_coparity(&m, 1));
        let target: BitSet = [3].into_iter().collect_with(4);
        let asr = almost_sure_reach(&m, &target);
        assert_eq!(asr.iter().collect::<Vec<_>>(), vec![0, 2, 3]);
    }

    #[test]
    fn chance_can_spoil_reachability() {
        // The coin at 0 may fall into an even trap 1 forever.
        let m = mdp(&[(R, 2, &[1, 2]), (P2, 0, &[1]), (P2, 1, &[2])]);
        assert!(!mdp_almost_sure_coparity(&m, 0));
        assert!(exists_reachable_odd_ec(&m, 0));
    }

    #[test]
    fn canonical_numbering() {
        assert!(canonical(&[1, 0, 1, 0], 2, 2));
        assert!(!canonical(&[0, 0, 0, 0], 2, 2));
        assert!(canonical(&[0, 1, 2, 2, 0, 0], 3, 2));
        assert!(!canonical(&[0, 2, 1, 1, 0, 0], 3, 2));
        let mut d = vec![0, 1];
        assert!(odometer(&mut d, 2));
        assert_eq!(d, vec![1, 0]);
    }
}
