use std::collections::HashMap;
use std::fmt;

use num_traits::{CheckedAdd, One, Zero};

use super::{canonical_observations, GameGraph, NodeShape, Rational, StateId};
use crate::{Error, Result};

/// Owner of a state in a partial-observation stochastic game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    P1,
    P2,
    Prob,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::P1 => "p1",
            Kind::P2 => "p2",
            Kind::Prob => "prob",
        }
    }
}

/// A validation finding; always names the offending state, edge or
/// observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Partial-observation stochastic parity game.
///
/// Player 1 moves from `P1` states by action into `P2` states, player 2
/// picks an edge into a `Prob` state, and the distribution of that state
/// leads back to `P1`. Storage is permissive so that malformed inputs can
/// be represented and reported by [`Posg::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posg {
    pub states: Vec<String>,
    pub kinds: Vec<Kind>,
    /// Observation index per state, into `observations`.
    pub obs: Vec<usize>,
    /// Sorted observation identifiers.
    pub observations: Vec<String>,
    pub priorities: Vec<u32>,
    pub actions: Vec<String>,
    /// `trans[s][a]`; `None` marks a missing entry.
    pub trans: Vec<Vec<Option<StateId>>>,
    pub edges: Vec<Vec<StateId>>,
    pub dist: Vec<Vec<(StateId, Rational)>>,
    pub start: StateId,
}

impl Posg {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn max_priority(&self) -> u32 {
        self.priorities.iter().copied().max().unwrap_or(0)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn obs_id(&self, name: &str) -> Option<usize> {
        self.observations.binary_search_by(|o| o.as_str().cmp(name)).ok()
    }

    pub fn action_id(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Kind shared by all states carrying observation `o`, or `None` when
    /// the observation is unused or spans several kinds.
    pub fn observation_kind(&self, o: usize) -> Option<Kind> {
        let mut kinds = (0..self.num_states()).filter(|&s| self.obs[s] == o).map(|s| self.kinds[s]);
        let first = kinds.next()?;
        kinds.all(|k| k == first).then_some(first)
    }

    /// Number of transitions: player-1 entries, player-2 edges and
    /// distribution support edges.
    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(|r| r.iter().flatten().count()).sum::<usize>()
            + self.edges.iter().map(Vec::len).sum::<usize>()
            + self.dist.iter().map(Vec::len).sum::<usize>()
    }

    /// All structural invariant violations; empty iff the game is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut v = |msg: String| out.push(Violation(msg));
        let n = self.num_states();
        let name = |s: StateId| self.states[s].as_str();

        if self.start >= n {
            v("start state is out of range".into());
        } else if self.kinds[self.start] != Kind::P1 {
            v(format!("start state `{}` is not a player-1 state", name(self.start)));
        }

        for s in 0..n {
            let kind = self.kinds[s];
            for (a, t) in self.trans[s].iter().enumerate() {
                match (kind, t) {
                    (Kind::P1, None) => {
                        v(format!("trans is not total: `{}` has no successor for action `{}`", name(s), self.actions[a]))
                    }
                    (Kind::P1, Some(t)) if self.kinds[*t] != Kind::P2 => v(format!(
                        "trans `{}` --{}--> `{}` does not lead to a player-2 state",
                        name(s),
                        self.actions[a],
                        name(*t)
                    )),
                    (Kind::P2 | Kind::Prob, Some(_)) => {
                        v(format!("trans defined on non-player-1 state `{}`", name(s)))
                    }
                    _ => {}
                }
            }
            match kind {
                Kind::P2 => {
                    if self.edges[s].is_empty() {
                        v(format!("player-2 state `{}` has no outgoing edge", name(s)));
                    }
                    for &t in &self.edges[s] {
                        if self.kinds[t] != Kind::Prob {
                            v(format!("edge `{}` -> `{}` does not lead to a probabilistic state", name(s), name(t)));
                        }
                    }
                }
                _ if !self.edges[s].is_empty() => {
                    v(format!("edge from non-player-2 state `{}`", name(s)));
                }
                _ => {}
            }
            if kind == Kind::Prob {
                let mut sum = Rational::zero();
                let mut overflow = false;
                let mut seen = Vec::new();
                for &(t, p) in &self.dist[s] {
                    if self.kinds[t] != Kind::P1 {
                        v(format!("distribution of `{}` has non-player-1 support `{}`", name(s), name(t)));
                    }
                    if p.is_zero() {
                        v(format!("distribution of `{}` gives zero probability to `{}`", name(s), name(t)));
                    }
                    if seen.contains(&t) {
                        v(format!("distribution of `{}` lists `{}` twice", name(s), name(t)));
                    }
                    seen.push(t);
                    match sum.checked_add(&p) {
                        Some(x) => sum = x,
                        None => overflow = true,
                    }
                }
                if overflow {
                    v(format!("distribution of `{}` overflows exact arithmetic", name(s)));
                } else if sum != Rational::one() {
                    v(format!("distribution of `{}` sums to {}", name(s), sum));
                }
            } else if !self.dist[s].is_empty() {
                v(format!("distribution on non-probabilistic state `{}`", name(s)));
            }
        }

        for (o, oname) in self.observations.iter().enumerate() {
            let mut kinds: Vec<Kind> =
                (0..n).filter(|&s| self.obs[s] == o).map(|s| self.kinds[s]).collect();
            kinds.sort();
            kinds.dedup();
            if kinds.len() > 1 {
                let ks: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
                v(format!("observation `{oname}` spans kinds ({})", ks.join(", ")));
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let vs = self.validate();
        if vs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(vs.into_iter().map(|v| v.0).collect()))
        }
    }

    /// Resolved player-1 successor; panics on an invalid game.
    pub fn succ_p1(&self, s: StateId, a: usize) -> StateId {
        self.trans[s][a].expect("validated game has total trans")
    }
}

impl GameGraph for Posg {
    fn num_states(&self) -> usize {
        self.states.len()
    }
    fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }
    fn priority(&self, s: StateId) -> u32 {
        self.priorities[s]
    }
    fn successors(&self, s: StateId) -> Vec<StateId> {
        match self.kinds[s] {
            Kind::P1 => {
                let mut v: Vec<StateId> = self.trans[s].iter().flatten().copied().collect();
                v.dedup();
                v
            }
            Kind::P2 => self.edges[s].clone(),
            Kind::Prob => self.dist[s].iter().map(|&(t, _)| t).collect(),
        }
    }
    fn observation_name(&self, s: StateId) -> Option<&str> {
        Some(&self.observations[self.obs[s]])
    }
    fn shape(&self, s: StateId) -> NodeShape {
        match self.kinds[s] {
            Kind::P1 => NodeShape::Diamond,
            Kind::P2 => NodeShape::Box,
            Kind::Prob => NodeShape::Ellipse,
        }
    }
    fn start_state(&self) -> Option<StateId> {
        Some(self.start)
    }
}

/// Incremental construction by name; used by the parser, the generator
/// and tests.
#[derive(Default)]
pub struct PosgBuilder {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    kinds: Vec<Kind>,
    obs_names: Vec<String>,
    priorities: Vec<u32>,
    actions: Vec<String>,
    trans: Vec<(StateId, usize, StateId)>,
    edges: Vec<(StateId, StateId)>,
    dist: Vec<(StateId, StateId, Rational)>,
    start: Option<StateId>,
}

impl PosgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn action(&mut self, name: &str) -> Result<usize> {
        if self.actions.iter().any(|a| a == name) {
            return Err(Error::Invalid(vec![format!("duplicate action `{name}`")]));
        }
        self.actions.push(name.to_owned());
        Ok(self.actions.len() - 1)
    }

    pub fn state(&mut self, name: &str, kind: Kind, obs: &str, prio: u32) -> Result<StateId> {
        if self.index.contains_key(name) {
            return Err(Error::Invalid(vec![format!("duplicate state id `{name}`")]));
        }
        let id = self.states.len();
        self.states.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        self.kinds.push(kind);
        self.obs_names.push(obs.to_owned());
        self.priorities.push(prio);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Result<StateId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(vec![format!("unknown state `{name}`")]))
    }

    fn action_id(&self, name: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Invalid(vec![format!("unknown action `{name}`")]))
    }

    pub fn start(&mut self, name: &str) -> Result<()> {
        self.start = Some(self.id(name)?);
        Ok(())
    }

    pub fn trans(&mut self, from: &str, action: &str, to: &str) -> Result<()> {
        let (f, a, t) = (self.id(from)?, self.action_id(action)?, self.id(to)?);
        if self.trans.iter().any(|&(f2, a2, _)| f2 == f && a2 == a) {
            return Err(Error::Invalid(vec![format!("duplicate trans for `{from}` and `{action}`")]));
        }
        self.trans.push((f, a, t));
        Ok(())
    }

    pub fn edge(&mut self, from: &str, to: &str) -> Result<()> {
        let (f, t) = (self.id(from)?, self.id(to)?);
        if self.edges.contains(&(f, t)) {
            return Err(Error::Invalid(vec![format!("duplicate edge `{from}` -> `{to}`")]));
        }
        self.edges.push((f, t));
        Ok(())
    }

    pub fn pdist(&mut self, from: &str, to: &str, p: Rational) -> Result<()> {
        let (f, t) = (self.id(from)?, self.id(to)?);
        self.dist.push((f, t, p));
        Ok(())
    }

    pub fn build(self) -> Result<Posg> {
        let start = self
            .start
            .ok_or_else(|| Error::Invalid(vec!["missing start state".into()]))?;
        let observations = canonical_observations(self.obs_names.iter().cloned());
        let obs = self
            .obs_names
            .iter()
            .map(|o| observations.binary_search(o).unwrap())
            .collect();
        let n = self.states.len();
        let mut trans = vec![vec![None; self.actions.len()]; n];
        for (f, a, t) in self.trans {
            trans[f][a] = Some(t);
        }
        let mut edges = vec![Vec::new(); n];
        for (f, t) in self.edges {
            edges[f].push(t);
        }
        let mut dist = vec![Vec::new(); n];
        for (f, t, p) in self.dist {
            dist[f].push((t, p));
        }
        Ok(Posg {
            states: self.states,
            kinds: self.kinds,
            obs,
            observations,
            priorities: self.priorities,
            actions: self.actions,
            trans,
            edges,
            dist,
            start,
        })
    }
}
