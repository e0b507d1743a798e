//! Nonemptiness of alternating parity tree automata.
//!
//! A tree is accepted iff the automaton's chooser can label every node
//! with a memoryless choice of a satisfying set for each copy (a
//! [`Labeling`]) so that every branch through the choices satisfies the
//! parity condition. Branches are checked by a universal word automaton
//! over (labeling, direction) letters, which is dualized, determinized on
//! the fly and complemented. The resulting deterministic automaton, read
//! as a nondeterministic tree automaton that guesses labelings, is tested
//! for emptiness with a parity game in which Even picks labelings and Odd
//! picks directions. A positional Even strategy is a regular witness tree.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::ata::{Ata, Atom};
use crate::model::StrategyTransducer;
use crate::omega::{Determinizer, NondetSource, Structure, Upw, DEFAULT_DET_CAP};
use crate::paritygame::{self, ParityGame, Player};
use crate::threeplayer::{BAD, GOOD};
use crate::{Error, Result};

/// Which satisfying sets a labeling may pick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModelMode {
    #[default]
    Minimal,
    /// Every satisfying subset of a formula's atoms. Exponential.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmptinessConfig {
    pub det_cap: usize,
    /// Bound on the number of labelings enumerated at one state.
    pub labeling_cap: usize,
    pub models: ModelMode,
}

impl Default for EmptinessConfig {
    fn default() -> Self {
        EmptinessConfig { det_cap: DEFAULT_DET_CAP, labeling_cap: 1_000_000, models: ModelMode::Minimal }
    }
}

/// A letter together with a chosen satisfying set for some automaton
/// states. `choice` is sorted by state and refers to [`Models`] ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    pub letter: usize,
    pub choice: Vec<(usize, usize)>,
}

/// Interned satisfying sets of every `delta[s][a]`.
#[derive(Clone, Debug)]
pub struct Models {
    pub sets: Vec<Vec<Atom>>,
    /// `of[s][a]`: ids of the sets for `delta[s][a]`.
    pub of: Vec<Vec<Vec<usize>>>,
}

impl Models {
    pub fn new(ata: &Ata, mode: ModelMode) -> Self {
        let mut sets = Vec::new();
        let mut index: HashMap<Vec<Atom>, usize> = HashMap::new();
        let of = ata
            .delta
            .iter()
            .map(|row| {
                row.iter()
                    .map(|f| {
                        let ms = match mode {
                            ModelMode::Minimal => f.minimal_models(),
                            ModelMode::All => f.all_models(),
                        };
                        ms.into_iter()
                            .map(|m: BTreeSet<Atom>| {
                                let m: Vec<Atom> = m.into_iter().collect();
                                *index.entry(m.clone()).or_insert_with(|| {
                                    sets.push(m);
                                    sets.len() - 1
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Models { sets, of }
    }

    fn targets(&self, model: usize, dir: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets[model].iter().filter(move |a| a.1 == dir).map(|a| a.0)
    }
}

/// Universal automaton over the explicit alphabet `labelings × [k]`
/// (letter `i * k + d`): a copy in state `s` moves to every `s'` with
/// `⟨s', d⟩ ∈ λ(s)`, or to an accepting sink of priority 0 when there is
/// none or `s` is not labelled.
pub fn branch_checker(ata: &Ata, models: &Models, labelings: &[Labeling]) -> Upw {
    let n = ata.num_states();
    let k = ata.k();
    let sink = n;
    let mut names = ata.names.clone();
    names.push("@sink".into());
    let mut priorities = ata.priorities.clone();
    priorities.push(0);
    let letters = (0..labelings.len()).flat_map(|i| (0..k).map(move |d| format!("l{i}/{d}"))).collect();
    let delta = (0..=n)
        .map(|s| {
            labelings
                .iter()
                .flat_map(|lab| (0..k).map(move |d| (lab, d)))
                .map(|(lab, d)| {
                    let mut out: Vec<usize> = match lab.choice.binary_search_by_key(&s, |c| c.0) {
                        Ok(i) if s < n => models.targets(lab.choice[i].1, d).collect(),
                        _ => Vec::new(),
                    };
                    out.sort_unstable();
                    out.dedup();
                    if out.is_empty() {
                        out.push(sink);
                    }
                    out
                })
                .collect()
        })
        .collect();
    Upw(Structure { names, letters, initial: vec![ata.initial], delta, priorities })
}

/// Letter of the dual checker: a labeling's choice and a direction.
pub type DualLetter = (Rc<[(usize, usize)]>, usize);

/// The dual of [`branch_checker`] as an implicit nondeterministic
/// automaton over all labelings. Copies that would enter the accepting
/// sink die instead, which leaves the dual language unchanged.
pub struct DualChecker<'a> {
    ata: &'a Ata,
    models: Models,
}

impl<'a> DualChecker<'a> {
    pub fn new(ata: &'a Ata, mode: ModelMode) -> Self {
        DualChecker { ata, models: Models::new(ata, mode) }
    }

    pub fn models(&self) -> &Models {
        &self.models
    }
}

impl NondetSource for DualChecker<'_> {
    type Letter = DualLetter;

    fn num_states(&self) -> usize {
        self.ata.num_states()
    }

    fn initial(&self) -> Vec<usize> {
        vec![self.ata.initial]
    }

    fn priority(&self, q: usize) -> u32 {
        self.ata.priorities[q] + 1
    }

    fn successors(&self, q: usize, letter: &DualLetter) -> Vec<usize> {
        let (choice, d) = letter;
        match choice.binary_search_by_key(&q, |c| c.0) {
            Ok(i) => {
                let mut out: Vec<usize> = self.models.targets(choice[i].1, *d).collect();
                out.sort_unstable();
                out.dedup();
                out
            }
            Err(_) => Vec::new(),
        }
    }
}

/// The complemented deterministic branch checker, explored on demand, read
/// as a nondeterministic tree automaton guessing labelings.
pub struct Nondeterminized<'a> {
    det: Determinizer<DualChecker<'a>>,
    config: EmptinessConfig,
    labelings: HashMap<usize, Rc<Vec<Labeling>>>,
    max_labelings: usize,
}

impl<'a> Nondeterminized<'a> {
    pub fn new(ata: &'a Ata, config: EmptinessConfig) -> Self {
        Nondeterminized {
            det: Determinizer::new(DualChecker::new(ata, config.models), config.det_cap),
            config,
            labelings: HashMap::new(),
            max_labelings: 0,
        }
    }

    pub fn initial(&self) -> usize {
        self.det.initial()
    }

    pub fn num_states(&self) -> usize {
        self.det.num_states()
    }

    /// Complemented priority: even iff the dual automaton's emitted
    /// priority is odd.
    pub fn priority(&self, q: usize) -> u32 {
        self.det.priority(q) + 1
    }

    pub fn max_priority(&self) -> u32 {
        self.det.max_priority() + 1
    }

    pub fn models(&self) -> &Models {
        self.det.source().models()
    }

    pub fn ata(&self) -> &Ata {
        self.det.source().ata
    }

    pub fn step(&mut self, q: usize, lab: &Labeling, dir: usize) -> Result<usize> {
        let letter: DualLetter = (lab.choice.clone().into(), dir);
        self.det.step(q, &letter)
    }

    /// Labelings available at `q`, over the automaton states that `q`
    /// still tracks. When none of them reads the letter, only the first
    /// letter is offered.
    pub fn labelings(&mut self, q: usize) -> Result<Rc<Vec<Labeling>>> {
        if let Some(l) = self.labelings.get(&q) {
            return Ok(l.clone());
        }
        let live = self.det.source_states(q);
        let ata = self.det.source().ata;
        let models = self.det.source().models();
        let letters = if live.iter().any(|&s| ata.depends_on_letter(s)) { ata.letters.len() } else { 1 };
        let mut out: Vec<Labeling> = Vec::new();
        let mut seen: HashMap<Vec<(usize, usize)>, ()> = HashMap::new();
        for a in 0..letters {
            let options: Vec<&[usize]> = live.iter().map(|&s| models.of[s][a].as_slice()).collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut pos = vec![0usize; live.len()];
            loop {
                let choice: Vec<(usize, usize)> = live.iter().zip(&pos).zip(&options).map(|((&s, &i), o)| (s, o[i])).collect();
                if seen.insert(choice.clone(), ()).is_none() {
                    if out.len() >= self.config.labeling_cap {
                        return Err(Error::Capacity { what: "labelings at one state", bound: self.config.labeling_cap });
                    }
                    out.push(Labeling { letter: a, choice });
                }
                // Odometer over the product of options.
                let mut i = 0;
                while i < pos.len() {
                    pos[i] += 1;
                    if pos[i] < options[i].len() {
                        break;
                    }
                    pos[i] = 0;
                    i += 1;
                }
                if i == pos.len() {
                    break;
                }
            }
        }
        self.max_labelings = self.max_labelings.max(out.len());
        let out = Rc::new(out);
        self.labelings.insert(q, out.clone());
        Ok(out)
    }
}

/// Emptiness game together with the data needed to read off a witness.
pub struct EmptinessGame {
    pub game: ParityGame,
    /// Automaton state of every Even node.
    pub state_of: Vec<Option<usize>>,
    /// Labeling of every Odd node, as (automaton state, index).
    pub labeling_of: Vec<Option<(usize, usize)>>,
    /// Even node of every explored automaton state.
    pub node_of: HashMap<usize, usize>,
}

/// Builds the emptiness game reachable from the initial state. Even nodes
/// carry the automaton's priorities, Odd nodes the largest one. A state
/// without labelings moves to a losing sink.
pub fn emptiness_game(n: &mut Nondeterminized) -> Result<EmptinessGame> {
    let mut game = ParityGame::new();
    let mut state_of = Vec::new();
    let mut labeling_of = Vec::new();
    let mut node_of = HashMap::new();
    let top = n.max_priority() + 1;
    let k = n.ata().k();

    let mut even_node = |q: usize, n: &Nondeterminized, game: &mut ParityGame, state_of: &mut Vec<Option<usize>>, labeling_of: &mut Vec<Option<(usize, usize)>>, queue: &mut Vec<usize>| -> usize {
        *node_of.entry(q).or_insert_with(|| {
            let v = game.add_node(format!("d{q}"), Player::Even, n.priority(q));
            state_of.push(Some(q));
            labeling_of.push(None);
            queue.push(q);
            v
        })
    };
    let mut queue = Vec::new();
    let root = even_node(n.initial(), n, &mut game, &mut state_of, &mut labeling_of, &mut queue);
    game.start = Some(root);
    let mut lost: Option<usize> = None;
    let mut head = 0;
    while head < queue.len() {
        let q = queue[head];
        head += 1;
        let v = even_node(q, n, &mut game, &mut state_of, &mut labeling_of, &mut queue);
        let labs = n.labelings(q)?;
        if labs.is_empty() {
            let sink = *lost.get_or_insert_with(|| {
                let s = game.add_node("@lost", Player::Odd, 1);
                state_of.push(None);
                labeling_of.push(None);
                game.add_edge(s, s);
                s
            });
            game.add_edge(v, sink);
            continue;
        }
        for (i, lab) in labs.iter().enumerate() {
            let w = game.add_node(format!("d{q}/l{i}"), Player::Odd, top);
            state_of.push(None);
            labeling_of.push(Some((q, i)));
            game.add_edge(v, w);
            for d in 0..k {
                let t = n.step(q, lab, d)?;
                let x = even_node(t, n, &mut game, &mut state_of, &mut labeling_of, &mut queue);
                game.add_edge(w, x);
            }
        }
    }
    Ok(EmptinessGame { game, state_of, labeling_of, node_of: node_of.clone() })
}

/// Infinite tree generated by a finite transducer over directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTree {
    pub letters: Vec<String>,
    pub directions: Vec<String>,
    pub root: usize,
    /// Output letter per node.
    pub output: Vec<usize>,
    /// `succ[node][direction]`.
    pub succ: Vec<Vec<usize>>,
    /// Chosen satisfying set per tracked automaton state, for diagnostics.
    pub choices: Vec<Vec<(usize, Vec<Atom>)>>,
}

impl RegularTree {
    pub fn len(&self) -> usize {
        self.output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmptinessStats {
    pub det_states: usize,
    pub game_nodes: usize,
    pub game_edges: usize,
    pub max_labelings: usize,
}

#[derive(Clone, Debug)]
pub struct Emptiness {
    pub witness: Option<RegularTree>,
    pub stats: EmptinessStats,
}

pub fn check_nonempty(ata: &Ata) -> Result<Option<RegularTree>> {
    check_nonempty_with(ata, &EmptinessConfig::default()).map(|e| e.witness)
}

pub fn check_nonempty_with(ata: &Ata, config: &EmptinessConfig) -> Result<Emptiness> {
    let mut n = Nondeterminized::new(ata, *config);
    let eg = emptiness_game(&mut n)?;
    let sol = paritygame::solve(&eg.game);
    let stats = EmptinessStats {
        det_states: n.num_states(),
        game_nodes: eg.game.len(),
        game_edges: eg.game.num_edges(),
        max_labelings: n.max_labelings,
    };
    let root = eg.game.start.unwrap();
    if sol.winner(root) != Player::Even {
        return Ok(Emptiness { witness: None, stats });
    }

    let mut order: Vec<usize> = vec![root];
    let mut index: HashMap<usize, usize> = HashMap::from([(root, 0)]);
    let mut output = Vec::new();
    let mut succ = Vec::new();
    let mut choices = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        let w = sol.strategy[v].expect("winning Even nodes have a strategy");
        let (q, li) = eg.labeling_of[w].expect("Even moves to a labeling node");
        let lab = &n.labelings(q)?[li];
        output.push(lab.letter);
        choices.push(lab.choice.iter().map(|&(s, m)| (s, n.models().sets[m].clone())).collect());
        let row = (0..ata.k())
            .map(|d| {
                let t = n.step(q, lab, d)?;
                let x = eg.node_of[&t];
                Ok(*index.entry(x).or_insert_with(|| {
                    order.push(x);
                    order.len() - 1
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        succ.push(row);
    }
    let tree = RegularTree {
        letters: ata.letters.clone(),
        directions: ata.directions.clone(),
        root: 0,
        output,
        succ,
        choices,
    };
    Ok(Emptiness { witness: Some(tree), stats })
}

/// Player-1 strategy following the tree: memory is a node, the action is
/// its output letter and an observation moves to the child in that
/// direction. A fresh initial memory moves to the root on the first
/// observation, since memory is updated on the start state as well.
/// `observations` must be directions of the tree; the embedding's sink
/// directions are dropped.
pub fn extract_player1_strategy(tree: &RegularTree, observations: &[String]) -> Result<StrategyTransducer> {
    let dirs: Vec<usize> = observations
        .iter()
        .map(|o| {
            tree.directions
                .iter()
                .position(|d| d == o)
                .ok_or_else(|| Error::AlphabetMismatch(format!("observation `{o}` is not a tree direction")))
        })
        .collect::<Result<_>>()?;
    let extra: Vec<&String> = tree
        .directions
        .iter()
        .filter(|d| !observations.contains(d) && d.as_str() != GOOD && d.as_str() != BAD)
        .collect();
    if !extra.is_empty() {
        return Err(Error::AlphabetMismatch(format!("tree direction `{}` is not an observation", extra[0])));
    }
    let n = tree.len();
    let pre = n;
    let mut memory: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    memory.push("pre".into());
    let mut upd = Vec::with_capacity((n + 1) * dirs.len());
    for m in 0..n {
        upd.extend(dirs.iter().map(|&d| tree.succ[m][d]));
    }
    upd.extend(dirs.iter().map(|_| tree.root));
    let mut nxt: Vec<String> = tree.output.iter().map(|&a| tree.letters[a].clone()).collect();
    nxt.push(tree.letters[tree.output[tree.root]].clone());
    Ok(StrategyTransducer::new(memory, pre, observations.to_vec(), upd, nxt)?.prune())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ata::{build_ata, Formula};
    use crate::model::{Owner3, TurnBasedBuilder, TurnBasedGame};
    use crate::threeplayer::to_concurrent;

    /// `u` (player 1) with actions `a`, `b` into a player-3 choice between
    /// an even and an odd loop.
    fn choice_game(p3: bool) -> TurnBasedGame {
        let mut b = TurnBasedBuilder::new();
        b.action("a").unwrap();
        b.action("b").unwrap();
        b.state("u", Owner3::P1, "o", 1).unwrap();
        b.state("v", if p3 { Owner3::P3 } else { Owner3::P2 }, "o", 1).unwrap();
        b.state("even", Owner3::P1, "oe", 0).unwrap();
        b.state("odd", Owner3::P1, "oo", 1).unwrap();
        b.trans("u", "a", "v").unwrap();
        b.trans("u", "b", "odd").unwrap();
        b.edge("v", "even").unwrap();
        b.edge("v", "odd").unwrap();
        for s in ["even", "odd"] {
            b.trans(s, "a", s).unwrap();
            b.trans(s, "b", s).unwrap();
        }
        b.start("u").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn player_three_choice_wins() {
        let ata = build_ata(&to_concurrent(&choice_game(true)).unwrap());
        let tree = check_nonempty(&ata).unwrap().expect("nonempty");
        assert_eq!(tree.letters[tree.output[tree.root]], "a");
        let t = extract_player1_strategy(&tree, &["o".into(), "oe".into(), "oo".into()]).unwrap();
        assert_eq!(t.action_for(&["o"]).unwrap(), "a");
    }

    #[test]
    fn player_two_choice_loses() {
        let ata = build_ata(&to_concurrent(&choice_game(false)).unwrap());
        assert!(check_nonempty(&ata).unwrap().is_none());
    }

    #[test]
    fn branch_checker_follows_directions() {
        // s0 -> <s1,0> ∧ <s2,1>.
        let ata = Ata {
            names: vec!["s0".into(), "s1".into(), "s2".into()],
            initial: 0,
            letters: vec!["a".into()],
            directions: vec!["d0".into(), "d1".into()],
            delta: vec![
                vec![Formula::And(vec![Formula::Atom(1, 0), Formula::Atom(2, 1)])],
                vec![Formula::Atom(1, 0)],
                vec![Formula::Atom(2, 0)],
            ],
            priorities: vec![0, 0, 0],
        };
        let models = Models::new(&ata, ModelMode::Minimal);
        let lab = Labeling { letter: 0, choice: (0..3).map(|s| (s, models.of[s][0][0])).collect() };
        let upw = branch_checker(&ata, &models, &[lab]);
        assert_eq!(upw.0.delta[0][0], vec![1]);
        assert_eq!(upw.0.delta[0][1], vec![2]);
        // s1 sends nothing in direction 1.
        assert_eq!(upw.0.delta[1][1], vec![3]);
        let dual = DualChecker::new(&ata, ModelMode::Minimal);
        let letter: DualLetter = (vec![(0, models.of[0][0][0])].into(), 1);
        assert_eq!(dual.successors(0, &letter), vec![2]);
        assert!(dual.successors(1, &letter).is_empty());
    }

    #[test]
    fn all_models_agree_with_minimal() {
        for p3 in [true, false] {
            let ata = build_ata(&to_concurrent(&choice_game(p3)).unwrap());
            let min = check_nonempty_with(&ata, &EmptinessConfig::default()).unwrap();
            let all = check_nonempty_with(&ata, &EmptinessConfig { models: ModelMode::All, ..Default::default() }).unwrap();
            assert_eq!(min.witness.is_some(), all.witness.is_some());
        }
    }

    #[test]
    fn labeling_cap_is_reported() {
        let ata = build_ata(&to_concurrent(&choice_game(true)).unwrap());
        let cfg = EmptinessConfig { labeling_cap: 0, ..Default::default() };
        assert!(check_nonempty_with(&ata, &cfg).unwrap_err().is_capacity());
    }
}
