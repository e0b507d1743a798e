//! Determinization of nondeterministic parity automata.
//!
//! The parity condition is first turned into a Büchi condition by letting
//! each run guess the even priority that will be its eventual minimum:
//! a state `(q, ⊥)` has not committed yet, `(q, i)` has committed to `i`,
//! must only see priorities `>= i` from then on, and is accepting when
//! `q` has priority exactly `i`. The Büchi automaton is then determinized
//! with compact Safra trees whose nodes are named by age, emitting on each
//! step the priority `2e` when node `e` is the oldest node that was
//! merged (accepting) and no older node died, `2f - 1` when `f` is the
//! oldest node that died, and a large odd neutral value otherwise.
//!
//! States of the deterministic automaton are pairs of a tree and the
//! priority emitted by the step that produced it.

use std::collections::HashMap;
use std::hash::Hash;

use super::{normalize_priorities, Dpw, Npw};
use crate::bitset::BitSet;
use crate::{Error, Result};

/// Default bound on the number of constructed deterministic states.
pub const DEFAULT_DET_CAP: usize = 2_000_000;

/// A nondeterministic parity automaton given by its successor function,
/// so that large alphabets can be explored on demand.
pub trait NondetSource {
    type Letter: Clone + Eq + Hash;
    fn num_states(&self) -> usize;
    fn initial(&self) -> Vec<usize>;
    fn priority(&self, q: usize) -> u32;
    fn successors(&self, q: usize, letter: &Self::Letter) -> Vec<usize>;
}

impl<T: NondetSource + ?Sized> NondetSource for &T {
    type Letter = T::Letter;
    fn num_states(&self) -> usize {
        (**self).num_states()
    }
    fn initial(&self) -> Vec<usize> {
        (**self).initial()
    }
    fn priority(&self, q: usize) -> u32 {
        (**self).priority(q)
    }
    fn successors(&self, q: usize, letter: &Self::Letter) -> Vec<usize> {
        (**self).successors(q, letter)
    }
}

impl NondetSource for Npw {
    type Letter = usize;
    fn num_states(&self) -> usize {
        self.0.num_states()
    }
    fn initial(&self) -> Vec<usize> {
        self.0.initial.clone()
    }
    fn priority(&self, q: usize) -> u32 {
        self.0.priorities[q]
    }
    fn successors(&self, q: usize, letter: &usize) -> Vec<usize> {
        self.0.delta[q][*letter].clone()
    }
}

const ROOT: u32 = u32::MAX;

/// Compact Safra tree: node `i` has name `i + 1`, parents are older than
/// children and older siblings come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Tree {
    parent: Vec<u32>,
    labels: Vec<BitSet>,
}

pub struct Determinizer<S: NondetSource> {
    src: S,
    /// Even priorities a run may commit to.
    evens: Vec<u32>,
    width: usize,
    accepting: BitSet,
    neutral: u32,
    states: Vec<(Tree, u32)>,
    index: HashMap<(Tree, u32), usize>,
    cap: usize,
}

impl<S: NondetSource> Determinizer<S> {
    pub fn new(src: S, cap: usize) -> Self {
        let n = src.num_states();
        let mut evens: Vec<u32> = (0..n).map(|q| src.priority(q)).filter(|p| p % 2 == 0).collect();
        evens.sort_unstable();
        evens.dedup();
        let width = evens.len() + 1;
        let nbw = n * width;
        let mut accepting = BitSet::new(nbw);
        for q in 0..n {
            for (j, &e) in evens.iter().enumerate() {
                if src.priority(q) == e {
                    accepting.insert(q * width + j + 1);
                }
            }
        }
        let mut d = Determinizer {
            src,
            evens,
            width,
            accepting,
            neutral: 2 * nbw as u32 + 1,
            states: Vec::new(),
            index: HashMap::new(),
            cap,
        };
        let mut root = BitSet::new(nbw);
        for q in d.src.initial() {
            d.enter(q, None, &mut root);
        }
        let tree = if root.is_empty() {
            Tree { parent: Vec::new(), labels: Vec::new() }
        } else {
            Tree { parent: vec![ROOT], labels: vec![root] }
        };
        let neutral = d.neutral;
        d.intern(tree, neutral).expect("a single state fits any cap");
        d
    }

    /// Adds the Büchi states for source state `t` reached from a run at
    /// level `from` (`None` for the initial step or an uncommitted run).
    fn enter(&self, t: usize, from: Option<usize>, out: &mut BitSet) {
        let p = self.src.priority(t);
        match from {
            None | Some(0) => {
                out.insert(t * self.width);
                for (j, &e) in self.evens.iter().enumerate() {
                    if e <= p {
                        out.insert(t * self.width + j + 1);
                    }
                }
            }
            Some(lvl) => {
                if p >= self.evens[lvl - 1] {
                    out.insert(t * self.width + lvl);
                }
            }
        }
    }

    fn intern(&mut self, tree: Tree, prio: u32) -> Result<usize> {
        let key = (tree, prio);
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(Error::Capacity { what: "deterministic automaton states", bound: self.cap });
        }
        let i = self.states.len();
        self.states.push(key.clone());
        self.index.insert(key, i);
        Ok(i)
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Priority of a deterministic state, in the raw range `1..=neutral`.
    pub fn priority(&self, d: usize) -> u32 {
        self.states[d].1
    }

    /// Largest priority that can occur.
    pub fn max_priority(&self) -> u32 {
        self.neutral
    }

    /// Source states tracked by the root of `d`'s tree.
    pub fn source_states(&self, d: usize) -> Vec<usize> {
        let tree = &self.states[d].0;
        let mut out: Vec<usize> = match tree.labels.first() {
            Some(root) => root.iter().map(|x| x / self.width).collect(),
            None => Vec::new(),
        };
        out.dedup();
        out
    }

    pub fn source(&self) -> &S {
        &self.src
    }

    pub fn step(&mut self, d: usize, letter: &S::Letter) -> Result<usize> {
        let (tree, prio) = self.successor_tree(d, letter);
        self.intern(tree, prio)
    }

    fn successor_tree(&self, d: usize, letter: &S::Letter) -> (Tree, u32) {
        let tree = &self.states[d].0;
        let m = tree.parent.len();
        if m == 0 {
            return (tree.clone(), self.neutral);
        }
        let nbw = self.accepting_capacity();

        // 1. Transition every label.
        let mut src_succ: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut image: HashMap<usize, BitSet> = HashMap::new();
        for x in tree.labels[0].iter() {
            let (q, lvl) = (x / self.width, x % self.width);
            let ts = src_succ.entry(q).or_insert_with(|| self.src.successors(q, letter));
            let mut out = BitSet::new(nbw);
            for &t in ts.iter() {
                self.enter(t, Some(lvl), &mut out);
            }
            image.insert(x, out);
        }
        let mut parent: Vec<usize> = tree.parent.iter().map(|&p| if p == ROOT { usize::MAX } else { p as usize }).collect();
        let mut labels: Vec<BitSet> = tree
            .labels
            .iter()
            .map(|l| {
                let mut out = BitSet::new(nbw);
                for x in l.iter() {
                    out.union_with(&image[&x]);
                }
                out
            })
            .collect();

        // 2. Spawn a youngest child holding the accepting part.
        for i in 0..m {
            let mut f = labels[i].clone();
            f.intersect_with(&self.accepting);
            if !f.is_empty() {
                parent.push(i);
                labels.push(f);
            }
        }
        let total = parent.len();
        let mut children = vec![Vec::new(); total];
        for j in 1..total {
            children[parent[j]].push(j);
        }

        // 3. A state stays only in the oldest branch that holds it.
        fn prune(i: usize, forbidden: &BitSet, labels: &mut [BitSet], children: &[Vec<usize>]) {
            labels[i].difference_with(forbidden);
            let mut acc = forbidden.clone();
            for &c in &children[i] {
                prune(c, &acc, labels, children);
                acc.union_with(&labels[c]);
            }
        }
        prune(0, &BitSet::new(nbw), &mut labels, &children);

        // 4-5. Drop empty nodes and collapse nodes covered by children.
        let mut dead = vec![false; total];
        let mut merged = vec![false; total];
        for i in 0..total {
            let p = parent[i];
            dead[i] = labels[i].is_empty() || (p != usize::MAX && (dead[p] || merged[p]));
            if dead[i] {
                continue;
            }
            let live: Vec<usize> = children[i].iter().copied().filter(|&c| !labels[c].is_empty()).collect();
            if !live.is_empty() {
                let mut u = BitSet::new(nbw);
                for &c in &live {
                    u.union_with(&labels[c]);
                }
                if u == labels[i] {
                    merged[i] = true;
                }
            }
        }
        let f = (0..m).find(|&i| dead[i]).map(|i| i as u32 + 1);
        let e = (0..total).find(|&i| merged[i]).map(|i| i as u32 + 1);
        let prio = match (e, f) {
            (Some(e), Some(f)) if e < f => 2 * e,
            (Some(e), None) => 2 * e,
            (_, Some(f)) => 2 * f - 1,
            (None, None) => self.neutral,
        };

        // 6. Rename survivors compactly, preserving age order.
        let mut rename = vec![u32::MAX; total];
        let mut out = Tree { parent: Vec::new(), labels: Vec::new() };
        for i in 0..total {
            if dead[i] {
                continue;
            }
            rename[i] = out.parent.len() as u32;
            out.parent.push(if parent[i] == usize::MAX { ROOT } else { rename[parent[i]] });
            out.labels.push(std::mem::replace(&mut labels[i], BitSet::new(0)));
        }
        (out, prio)
    }

    fn accepting_capacity(&self) -> usize {
        self.src.num_states() * self.width
    }
}

/// Deterministic automaton equivalent to `a`, explored over all letters.
pub fn determinize(a: &Npw) -> Result<Dpw> {
    determinize_with_cap(a, DEFAULT_DET_CAP)
}

pub fn determinize_with_cap(a: &Npw, cap: usize) -> Result<Dpw> {
    let k = a.0.letters.len();
    let mut det = Determinizer::new(a, cap);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut d = 0;
    while d < det.num_states() {
        let row = (0..k).map(|l| det.step(d, &l)).collect::<Result<Vec<_>>>()?;
        delta.push(row);
        d += 1;
    }
    let raw: Vec<u32> = (0..det.num_states()).map(|d| det.priority(d)).collect();
    Ok(Dpw {
        names: (0..det.num_states()).map(|d| format!("d{d}")).collect(),
        letters: a.0.letters.clone(),
        initial: 0,
        delta,
        priorities: normalize_priorities(&raw),
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::inf_b;
    use super::super::Structure;
    use super::*;

    fn all_lassos(k: usize, max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &layer {
                for a in 0..k {
                    let mut v: Vec<usize> = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn agree(n: &Npw, d: &Dpw, max: usize) {
        let words = all_lassos(n.0.letters.len(), max);
        for stem in &words {
            for cycle in words.iter().filter(|c| !c.is_empty()) {
                assert_eq!(
                    n.accepts(stem, cycle).unwrap(),
                    d.accepts(stem, cycle).unwrap(),
                    "stem {stem:?} cycle {cycle:?}"
                );
            }
        }
    }

    #[test]
    fn everything_accepting() {
        let n = Npw(Structure {
            names: vec!["q".into()],
            letters: vec!["a".into(), "b".into()],
            initial: vec![0],
            delta: vec![vec![vec![0], vec![0]]],
            priorities: vec![0],
        });
        let d = determinize(&n).unwrap();
        agree(&n, &d, 3);
        assert!(d.accepts(&[], &[1]).unwrap());
    }

    #[test]
    fn infinitely_many_b_determinizes() {
        let n = inf_b();
        agree(&n, &determinize(&n).unwrap(), 4);
    }

    #[test]
    fn finitely_many_b_needs_guessing() {
        // q0 loops on everything; on `a` it may move to q1 which only
        // accepts `a` forever.
        let n = Npw(Structure {
            names: vec!["q0".into(), "q1".into()],
            letters: vec!["a".into(), "b".into()],
            initial: vec![0],
            delta: vec![vec![vec![0, 1], vec![0]], vec![vec![1], vec![]]],
            priorities: vec![1, 0],
        });
        let d = determinize(&n).unwrap();
        agree(&n, &d, 4);
        assert!(d.accepts(&[1, 1], &[0]).unwrap());
        assert!(!d.accepts(&[], &[0, 1]).unwrap());
    }

    #[test]
    fn capacity_is_reported() {
        let n = inf_b();
        assert!(matches!(determinize_with_cap(&n, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn random_automata_agree_on_short_lassos() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..150 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=3);
            let delta = (0..n)
                .map(|_| (0..k).map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect()).collect())
                .collect();
            let a = Npw(Structure {
                names: (0..n).map(|q| format!("q{q}")).collect(),
                letters: (0..k).map(|l| format!("l{l}")).collect(),
                initial: vec![0],
                delta,
                priorities: (0..n).map(|_| rng.gen_range(0..4)).collect(),
            });
            agree(&a, &determinize(&a).unwrap(), 3);
        }
    }
}
