//! Parity word automata over finite alphabets: universal-to-nondeterministic
//! dualization, determinization, complementation of deterministic
//! automata and membership of ultimately periodic words.
//!
//! All automata use min-parity acceptance. Letters are indices into the
//! automaton's `letters` list.

mod safra;
pub mod text;

pub use safra::{determinize, determinize_with_cap, Determinizer, NondetSource, DEFAULT_DET_CAP};

use crate::graph::tarjan;
use crate::{Error, Result};

/// States, letters and a transition relation shared by nondeterministic
/// and universal automata. A state may have no successor on a letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub names: Vec<String>,
    pub letters: Vec<String>,
    pub initial: Vec<usize>,
    /// `delta[q][a]`.
    pub delta: Vec<Vec<Vec<usize>>>,
    pub priorities: Vec<u32>,
}

impl Structure {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn letter_id(&self, name: &str) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_owned()))
    }

    fn shifted(&self, by: u32) -> Structure {
        Structure {
            priorities: self.priorities.iter().map(|p| p + by).collect(),
            ..self.clone()
        }
    }
}

/// Nondeterministic parity word automaton: a word is accepted when some
/// infinite run is accepting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Npw(pub Structure);

/// Universal parity word automaton: a word is accepted when every
/// infinite run is accepting. Runs that block accept vacuously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Upw(pub Structure);

/// Deterministic parity word automaton with a total transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dpw {
    pub names: Vec<String>,
    pub letters: Vec<String>,
    pub initial: usize,
    /// `delta[q][a]`.
    pub delta: Vec<Vec<usize>>,
    pub priorities: Vec<u32>,
}

impl Dpw {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_states();
        let k = self.letters.len();
        let bad = self.initial >= n
            || self.delta.len() != n
            || self.delta.iter().any(|row| row.len() != k || row.iter().any(|&t| t >= n));
        if bad {
            Err(Error::Invalid(vec!["deterministic transition function is not total".into()]))
        } else {
            Ok(())
        }
    }
}

/// Maps priorities onto a contiguous range without changing the order or
/// parity of any pair, so the language is preserved. The result starts at
/// 0 when the least priority is even, at 1 otherwise.
pub fn normalize_priorities(prios: &[u32]) -> Vec<u32> {
    let mut distinct: Vec<u32> = prios.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut map = Vec::with_capacity(distinct.len());
    let mut cur = match distinct.first() {
        Some(p) => p % 2,
        None => return Vec::new(),
    };
    for (i, &p) in distinct.iter().enumerate() {
        if i > 0 && p % 2 != distinct[i - 1] % 2 {
            cur += 1;
        }
        map.push((p, cur));
    }
    prios
        .iter()
        .map(|p| map[map.binary_search_by_key(p, |&(q, _)| q).unwrap()].1)
        .collect()
}

/// Nondeterministic automaton for the complement of `u`: the same
/// transitions with every priority raised by one. Blocked runs of `u`
/// accept, so in the dual they simply die and are never witnesses.
pub fn dualize(u: &Upw) -> Npw {
    let mut s = u.0.shifted(1);
    s.priorities = normalize_priorities(&s.priorities);
    Npw(s)
}

/// The universal automaton whose dual is `n`; inverse of [`dualize`] up
/// to priority normalization.
pub fn undualize(n: &Npw) -> Upw {
    let mut s = n.0.shifted(1);
    s.priorities = normalize_priorities(&s.priorities);
    Upw(s)
}

pub fn complement_dpw(d: &Dpw) -> Dpw {
    Dpw {
        priorities: normalize_priorities(&d.priorities.iter().map(|p| p + 1).collect::<Vec<_>>()),
        ..d.clone()
    }
}

/// An ultimately periodic word `stem · cycle^ω` as letter indices.
#[derive(Clone, Copy, Debug)]
pub struct LassoWord<'a> {
    pub stem: &'a [usize],
    pub cycle: &'a [usize],
}

impl<'a> LassoWord<'a> {
    fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    fn letter(&self, pos: usize) -> usize {
        if pos < self.stem.len() {
            self.stem[pos]
        } else {
            self.cycle[pos - self.stem.len()]
        }
    }

    fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.stem.len()
        }
    }
}

fn check_letters(k: usize, w: &LassoWord) -> Result<()> {
    if w.cycle.is_empty() {
        return Err(Error::InvalidPlay("lasso cycle is empty".into()));
    }
    match w.stem.iter().chain(w.cycle).find(|&&a| a >= k) {
        Some(a) => Err(Error::UnknownLetter(format!("#{a}"))),
        None => Ok(()),
    }
}

/// Some infinite run from one of `starts` over `w` has even least
/// priority seen infinitely often.
fn exists_accepting_run(s: &Structure, starts: &[usize], w: &LassoWord) -> bool {
    let n = s.num_states();
    let len = w.len();
    let id = |q: usize, pos: usize| q * len + pos;
    let succ = |v: usize| -> Vec<usize> {
        let (q, pos) = (v / len, v % len);
        let next = w.next(pos);
        s.delta[q][w.letter(pos)].iter().map(|&t| id(t, next)).collect()
    };
    let roots: Vec<usize> = starts.iter().map(|&q| id(q, 0)).collect();
    let reach = crate::graph::reachable(n * len, &roots, succ);
    let mut prios: Vec<u32> = s.priorities.iter().copied().filter(|p| p % 2 == 0).collect();
    prios.sort_unstable();
    prios.dedup();
    for e in prios {
        let allowed = |v: usize| reach[v] && v % len >= w.stem.len() && s.priorities[v / len] >= e;
        let comps = tarjan(n * len, |v| {
            if allowed(v) {
                succ(v).into_iter().filter(|&t| allowed(t)).collect()
            } else {
                Vec::new()
            }
        });
        for comp in comps {
            if !allowed(comp[0]) || !comp.iter().any(|&v| s.priorities[v / len] == e) {
                continue;
            }
            if comp.len() > 1 || succ(comp[0]).contains(&comp[0]) {
                return true;
            }
        }
    }
    false
}

impl Npw {
    pub fn accepts(&self, stem: &[usize], cycle: &[usize]) -> Result<bool> {
        let w = LassoWord { stem, cycle };
        check_letters(self.0.letters.len(), &w)?;
        Ok(exists_accepting_run(&self.0, &self.0.initial, &w))
    }

    /// States from which `cycle^ω` has an accepting run.
    pub fn accepting_from(&self, cycle: &[usize]) -> Vec<bool> {
        let w = LassoWord { stem: &[], cycle };
        (0..self.0.num_states())
            .map(|q| exists_accepting_run(&self.0, &[q], &w))
            .collect()
    }
}

impl Upw {
    pub fn accepts(&self, stem: &[usize], cycle: &[usize]) -> Result<bool> {
        Ok(!dualize(self).accepts(stem, cycle)?)
    }
}

impl Dpw {
    pub fn accepts(&self, stem: &[usize], cycle: &[usize]) -> Result<bool> {
        let w = LassoWord { stem, cycle };
        check_letters(self.letters.len(), &w)?;
        let mut q = self.initial;
        for &a in stem {
            q = self.delta[q][a];
        }
        Ok(self.accepts_cycle_from(q, cycle))
    }

    /// Verdict on `cycle^ω` read from state `q`.
    pub fn accepts_cycle_from(&self, mut q: usize, cycle: &[usize]) -> bool {
        let mut seen = std::collections::HashMap::new();
        let mut trace = Vec::new();
        let mut pos = 0;
        loop {
            if let Some(&at) = seen.get(&(q, pos)) {
                let m = trace[at..].iter().map(|&x| self.priorities[x]).min().unwrap();
                return m % 2 == 0;
            }
            seen.insert((q, pos), trace.len());
            trace.push(q);
            q = self.delta[q][cycle[pos]];
            pos = (pos + 1) % cycle.len();
        }
    }
}

/// Membership of `stem · cycle^ω` for any of the three automaton kinds.
pub enum AnyAutomaton {
    Npw(Npw),
    Upw(Upw),
    Dpw(Dpw),
}

impl AnyAutomaton {
    pub fn letters(&self) -> &[String] {
        match self {
            AnyAutomaton::Npw(a) => &a.0.letters,
            AnyAutomaton::Upw(a) => &a.0.letters,
            AnyAutomaton::Dpw(a) => &a.letters,
        }
    }

    pub fn letter_ids(&self, word: &[&str]) -> Result<Vec<usize>> {
        word.iter()
            .map(|l| {
                self.letters()
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::UnknownLetter((*l).to_owned()))
            })
            .collect()
    }
}

pub fn lasso_accepts(aut: &AnyAutomaton, stem: &[usize], cycle: &[usize]) -> Result<bool> {
    match aut {
        AnyAutomaton::Npw(a) => a.accepts(stem, cycle),
        AnyAutomaton::Upw(a) => a.accepts(stem, cycle),
        AnyAutomaton::Dpw(a) => a.accepts(stem, cycle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(k: usize) -> Vec<String> {
        ["a", "b", "c"][..k].iter().map(|s| s.to_string()).collect()
    }

    /// Two states remembering the last letter; accepts infinitely many `b`.
    pub(crate) fn inf_b() -> Npw {
        Npw(Structure {
            names: vec!["qa".into(), "qb".into()],
            letters: letters(2),
            initial: vec![0],
            delta: vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
            priorities: vec![1, 0],
        })
    }

    fn one_state(prio: u32) -> Structure {
        Structure {
            names: vec!["q".into()],
            letters: letters(2),
            initial: vec![0],
            delta: vec![vec![vec![0], vec![0]]],
            priorities: vec![prio],
        }
    }

    #[test]
    fn normalization_keeps_order_and_parity() {
        assert_eq!(normalize_priorities(&[2, 4, 7, 9, 10]), vec![0, 0, 1, 1, 2]);
        assert_eq!(normalize_priorities(&[3, 5, 6]), vec![1, 1, 2]);
    }

    #[test]
    fn dual_of_universal_everything() {
        let d = dualize(&Upw(one_state(0)));
        assert_eq!(d.0.priorities, vec![1]);
        assert!(!d.accepts(&[], &[0]).unwrap());
        let d = dualize(&Upw(one_state(1)));
        assert!(d.accepts(&[0], &[1, 0]).unwrap());
    }

    #[test]
    fn universal_with_mixed_runs() {
        // From q0 on `a` go to an even sink and an odd sink.
        let u = Upw(Structure {
            names: vec!["q0".into(), "e".into(), "o".into()],
            letters: letters(1),
            initial: vec![0],
            delta: vec![vec![vec![1, 2]], vec![vec![1]], vec![vec![2]]],
            priorities: vec![0, 0, 1],
        });
        assert!(!u.accepts(&[], &[0]).unwrap());
        assert!(dualize(&u).accepts(&[], &[0]).unwrap());
    }

    #[test]
    fn blocked_runs_accept_universally() {
        let u = Upw(Structure {
            names: vec!["q".into()],
            letters: letters(1),
            initial: vec![0],
            delta: vec![vec![vec![]]],
            priorities: vec![1],
        });
        assert!(u.accepts(&[], &[0]).unwrap());
    }

    #[test]
    fn infinitely_many_b() {
        let a = inf_b();
        assert!(!a.accepts(&[], &[0]).unwrap());
        assert!(a.accepts(&[], &[0, 1]).unwrap());
        assert!(a.accepts(&[0, 0], &[1]).unwrap());
    }

    #[test]
    fn dpw_run_and_complement() {
        let d = Dpw {
            names: vec!["qa".into(), "qb".into()],
            letters: letters(2),
            initial: 0,
            delta: vec![vec![0, 1], vec![0, 1]],
            priorities: vec![1, 0],
        };
        assert!(d.accepts(&[], &[0, 1]).unwrap());
        let c = complement_dpw(&d);
        assert!(!c.accepts(&[], &[0, 1]).unwrap());
        assert!(c.accepts(&[1, 1], &[0]).unwrap());
        assert!(matches!(d.accepts(&[], &[5]), Err(Error::UnknownLetter(_))));
    }
}
