//! Positive Boolean formulas over (state, direction) atoms and alternating
//! parity tree automata built from concurrent three-player games.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::threeplayer::{Concurrent3PG, LocalShape};

/// Atom `⟨state, direction⟩`.
pub type Atom = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(usize, usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    /// Disjunction of conjunctions of atoms, deduplicated at both levels
    /// and collapsed when a level has a single member.
    pub fn dnf(disjuncts: impl IntoIterator<Item = BTreeSet<Atom>>) -> Formula {
        let ds: BTreeSet<BTreeSet<Atom>> = disjuncts.into_iter().collect();
        let mut terms: Vec<Formula> = ds
            .into_iter()
            .map(|c| {
                let mut atoms: Vec<Formula> = c.into_iter().map(|(s, d)| Formula::Atom(s, d)).collect();
                match atoms.len() {
                    0 => Formula::True,
                    1 => atoms.pop().unwrap(),
                    _ => Formula::And(atoms),
                }
            })
            .collect();
        match terms.len() {
            0 => Formula::False,
            1 => terms.pop().unwrap(),
            _ => Formula::Or(terms),
        }
    }

    pub fn eval(&self, holds: &dyn Fn(Atom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(s, d) => holds((*s, *d)),
            Formula::And(fs) => fs.iter().all(|f| f.eval(holds)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(holds)),
        }
    }

    /// Evaluates with exactly the atoms in `set` true.
    pub fn eval_set(&self, set: &BTreeSet<Atom>) -> bool {
        self.eval(&|a| set.contains(&a))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(s, d) => {
                out.insert((*s, *d));
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            _ => {}
        }
    }

    /// Minimal satisfying sets in sorted order.
    pub fn minimal_models(&self) -> Vec<BTreeSet<Atom>> {
        let mut all = self.models_upward();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut out: Vec<BTreeSet<Atom>> = Vec::new();
        for m in all {
            if !out.iter().any(|k| k.is_subset(&m)) {
                out.push(m);
            }
        }
        out.sort();
        out
    }

    /// A family of satisfying sets whose upward closure is exactly the
    /// set of models (the DNF expansion).
    fn models_upward(&self) -> Vec<BTreeSet<Atom>> {
        match self {
            Formula::True => vec![BTreeSet::new()],
            Formula::False => Vec::new(),
            Formula::Atom(s, d) => vec![BTreeSet::from([(*s, *d)])],
            Formula::Or(fs) => fs.iter().flat_map(|f| f.models_upward()).collect(),
            Formula::And(fs) => {
                let mut acc = vec![BTreeSet::new()];
                for f in fs {
                    let ms = f.models_upward();
                    let mut next = Vec::new();
                    for a in &acc {
                        for m in &ms {
                            next.push(a.union(m).copied().collect());
                        }
                    }
                    next.sort();
                    next.dedup();
                    acc = next;
                }
                acc
            }
        }
    }

    /// Every satisfying subset of the formula's atoms. Exponential; used
    /// to check that minimal models lose nothing.
    pub fn all_models(&self) -> Vec<BTreeSet<Atom>> {
        let atoms: Vec<Atom> = self.atoms().into_iter().collect();
        assert!(atoms.len() <= 20, "too many atoms to enumerate all models");
        (0u32..1 << atoms.len())
            .map(|bits| (0..atoms.len()).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i]).collect())
            .filter(|m: &BTreeSet<Atom>| self.eval_set(m))
            .collect()
    }
}

impl fmt::Display for Formula {
    /// Prefix notation: `(or (and <1,0> <2,1>) <3,0>)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(s, d) => write!(f, "<{s},{d}>"),
            Formula::And(fs) | Formula::Or(fs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Alternating parity tree automaton over `k`-ary trees labelled with
/// `letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ata {
    pub names: Vec<String>,
    pub initial: usize,
    pub letters: Vec<String>,
    /// Direction `d` stands for observation `directions[d]`.
    pub directions: Vec<String>,
    /// `delta[s][a]`.
    pub delta: Vec<Vec<Formula>>,
    pub priorities: Vec<u32>,
}

impl Ata {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.directions.len()
    }

    /// Whether `delta[s][·]` differs between letters.
    pub fn depends_on_letter(&self, s: usize) -> bool {
        self.delta[s].windows(2).any(|w| w[0] != w[1])
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "ata initial={} k={}", self.names[self.initial], self.k()).unwrap();
        for (d, o) in self.directions.iter().enumerate() {
            writeln!(out, "direction {d} {o}").unwrap();
        }
        for s in 0..self.num_states() {
            writeln!(out, "state {} {} prio={}", s, self.names[s], self.priorities[s]).unwrap();
        }
        for s in 0..self.num_states() {
            for (a, f) in self.delta[s].iter().enumerate() {
                writeln!(out, "{} {} {}", self.names[s], self.letters[a], f).unwrap();
            }
        }
        out
    }
}

/// `δ'(s, a1) = ⋁_{a3} ⋀_{a2} ⟨δ(s, a1, a2, a3), obs(δ(s, a1, a2, a3))⟩`.
/// Directions are the game's observations in sorted order.
pub fn build_ata(g: &Concurrent3PG) -> Ata {
    let delta = (0..g.num_states())
        .map(|s| {
            (0..g.a1.len())
                .map(|a1| match g.local_shape(s) {
                    Some(shape) => embedded_formula(g, s, a1, &shape),
                    None => generic_formula(g, s, a1),
                })
                .collect()
        })
        .collect();
    Ata {
        names: g.names.clone(),
        initial: g.start,
        letters: g.a1.clone(),
        directions: g.observations.clone(),
        delta,
        priorities: g.priorities.clone(),
    }
}

/// Direct enumeration of the displayed formula over all action triples.
pub fn generic_formula(g: &Concurrent3PG, s: usize, a1: usize) -> Formula {
    Formula::dnf((0..g.a3.len()).map(|a3| {
        (0..g.a2.len())
            .map(|a2| {
                let t = g.delta(s, a1, a2, a3);
                (t, g.obs[t])
            })
            .collect()
    }))
}

/// The same formula read off the turn-based structure without
/// enumerating `|A2| · |A3|` profiles.
fn embedded_formula(g: &Concurrent3PG, s: usize, a1: usize, shape: &LocalShape) -> Formula {
    let atom = |t: usize| (t, g.obs[t]);
    let (good, bad) = g.sinks().unwrap();
    match shape {
        LocalShape::Player1(trans) => Formula::dnf([BTreeSet::from([atom(trans[a1])])]),
        LocalShape::Absorbing => Formula::dnf([BTreeSet::from([atom(s)])]),
        LocalShape::Player2(edges) => {
            let mut c: BTreeSet<Atom> = edges.iter().map(|&t| atom(t)).collect();
            c.insert(atom(good));
            Formula::dnf([c])
        }
        LocalShape::Player3(edges) => {
            Formula::dnf(edges.iter().map(|&t| BTreeSet::from([atom(t)])).chain([BTreeSet::from([atom(bad)])]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Formula {
        Formula::Or(vec![
            Formula::And(vec![Formula::Atom(1, 0), Formula::Atom(2, 0)]),
            Formula::And(vec![Formula::Atom(3, 0), Formula::Atom(4, 1), Formula::Atom(5, 1)]),
        ])
    }

    #[test]
    fn eval_example() {
        let f = example();
        assert!(f.eval_set(&BTreeSet::from([(1, 0), (2, 0)])));
        assert!(!f.eval_set(&BTreeSet::from([(3, 0)])));
        assert!(f.eval_set(&f.atoms()));
    }

    #[test]
    fn minimal_models_of_example() {
        assert_eq!(
            example().minimal_models(),
            vec![BTreeSet::from([(1, 0), (2, 0)]), BTreeSet::from([(3, 0), (4, 1), (5, 1)])]
        );
        assert_eq!(Formula::Atom(7, 2).minimal_models(), vec![BTreeSet::from([(7, 2)])]);
        let absorb = Formula::And(vec![Formula::Atom(0, 0), Formula::Or(vec![Formula::Atom(0, 0), Formula::Atom(1, 0)])]);
        assert_eq!(absorb.minimal_models(), vec![BTreeSet::from([(0, 0)])]);
    }

    #[test]
    fn table_game_formula() {
        // s0 with A2 = {x, y}, A3 = {c}: x leads to s1 (obs 0), y to s2 (obs 1).
        let names = vec!["s0".into(), "s1".into(), "s2".into()];
        let g = Concurrent3PG::from_table(
            names,
            0,
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            vec!["c".into()],
            vec!["o0".into(), "o0".into(), "o1".into()],
            vec![0, 0, 0],
            vec![1, 2, 1, 1, 2, 2],
        )
        .unwrap();
        let ata = build_ata(&g);
        assert_eq!(ata.delta[0][0], Formula::And(vec![Formula::Atom(1, 0), Formula::Atom(2, 1)]));
        assert_eq!(ata.delta[1][0], Formula::Atom(1, 0));
    }

    #[test]
    fn duplicate_disjuncts_collapse() {
        let f = Formula::dnf([BTreeSet::from([(1, 0)]), BTreeSet::from([(1, 0)])]);
        assert_eq!(f, Formula::Atom(1, 0));
    }
}
