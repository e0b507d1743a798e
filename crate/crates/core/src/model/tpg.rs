use std::collections::HashMap;

use super::{canonical_observations, GameGraph, NodeShape, StateId, Violation};
use crate::{Error, Result};

/// Owner of a state in a three-player turn-based game. Players 1 and 3
/// cooperate against player 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner3 {
    P1,
    P2,
    P3,
}

impl Owner3 {
    pub fn as_str(self) -> &'static str {
        match self {
            Owner3::P1 => "p1",
            Owner3::P2 => "p2",
            Owner3::P3 => "p3",
        }
    }
}

/// Three-player deterministic turn-based parity game.
///
/// `period` counts the states strictly between two consecutive player-1
/// states on every path; games without a uniform period store `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnBasedGame {
    pub states: Vec<String>,
    pub owners: Vec<Owner3>,
    pub obs: Vec<usize>,
    pub observations: Vec<String>,
    pub priorities: Vec<u32>,
    pub actions: Vec<String>,
    /// `trans[s][a]` for player-1 states, empty rows elsewhere.
    pub trans: Vec<Vec<StateId>>,
    pub edges: Vec<Vec<StateId>>,
    pub start: StateId,
    pub period: Option<usize>,
}

impl TurnBasedGame {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn obs_id(&self, name: &str) -> Option<usize> {
        self.observations.binary_search_by(|o| o.as_str().cmp(name)).ok()
    }

    pub fn num_edges(&self) -> usize {
        self.trans.iter().map(Vec::len).sum::<usize>() + self.edges.iter().map(Vec::len).sum::<usize>()
    }

    pub fn distinct_priorities(&self) -> usize {
        let mut p = self.priorities.clone();
        p.sort_unstable();
        p.dedup();
        p.len()
    }

    /// Successors of `s` regardless of owner.
    pub fn succ(&self, s: StateId) -> &[StateId] {
        match self.owners[s] {
            Owner3::P1 => &self.trans[s],
            _ => &self.edges[s],
        }
    }

    /// Uniform number of states strictly between consecutive player-1
    /// states, when it exists. Every player-1 state must reach a player-1
    /// state again along every path.
    pub fn measure_period(&self) -> Option<usize> {
        let n = self.num_states();
        // depth[s] = distance from s to the next player-1 state, counting
        // the states strictly in between including s itself.
        let mut depth: Vec<Option<usize>> = vec![None; n];
        let mut on_stack = vec![false; n];
        fn visit(g: &TurnBasedGame, s: StateId, depth: &mut [Option<usize>], on_stack: &mut [bool]) -> Option<usize> {
            if let Some(d) = depth[s] {
                return Some(d);
            }
            if on_stack[s] {
                return None;
            }
            on_stack[s] = true;
            let mut common = None;
            for &t in &g.edges[s] {
                let d = if g.owners[t] == Owner3::P1 { 0 } else { visit(g, t, depth, on_stack)? };
                match common {
                    None => common = Some(d),
                    Some(c) if c != d => return None,
                    _ => {}
                }
            }
            on_stack[s] = false;
            let d = common? + 1;
            depth[s] = Some(d);
            Some(d)
        }
        let mut period = None;
        for s in 0..n {
            if self.owners[s] != Owner3::P1 {
                continue;
            }
            for &t in &self.trans[s] {
                let d = if self.owners[t] == Owner3::P1 { 0 } else { visit(self, t, &mut depth, &mut on_stack)? };
                match period {
                    None => period = Some(d),
                    Some(p) if p != d => return None,
                    _ => {}
                }
            }
        }
        period
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.num_states();
        let name = |s: StateId| self.states[s].as_str();
        if self.start >= n {
            out.push(Violation("start state is out of range".into()));
        }
        for s in 0..n {
            match self.owners[s] {
                Owner3::P1 => {
                    if self.trans[s].len() != self.actions.len() {
                        out.push(Violation(format!("trans is not total at `{}`", name(s))));
                    }
                    if !self.edges[s].is_empty() {
                        out.push(Violation(format!("edge from player-1 state `{}`", name(s))));
                    }
                }
                _ => {
                    if self.edges[s].is_empty() {
                        out.push(Violation(format!("state `{}` has no outgoing edge", name(s))));
                    }
                    if !self.trans[s].is_empty() {
                        out.push(Violation(format!("trans defined on non-player-1 state `{}`", name(s))));
                    }
                }
            }
        }
        if out.is_empty() {
            if let Some(k) = self.period {
                if self.measure_period() != Some(k) {
                    out.push(Violation(format!("player-1 states are not uniformly {k} steps apart")));
                }
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
}

impl GameGraph for TurnBasedGame {
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
        let mut v = self.succ(s).to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }
    fn observation_name(&self, s: StateId) -> Option<&str> {
        Some(&self.observations[self.obs[s]])
    }
    fn shape(&self, s: StateId) -> NodeShape {
        match self.owners[s] {
            Owner3::P1 => NodeShape::Diamond,
            Owner3::P2 => NodeShape::Box,
            Owner3::P3 => NodeShape::Ellipse,
        }
    }
    fn start_state(&self) -> Option<StateId> {
        Some(self.start)
    }
}

/// Name-based construction, used by the parser and the reductions.
#[derive(Default)]
pub struct TurnBasedBuilder {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    owners: Vec<Owner3>,
    obs_names: Vec<String>,
    priorities: Vec<u32>,
    actions: Vec<String>,
    trans: Vec<Vec<Option<StateId>>>,
    edges: Vec<Vec<StateId>>,
    start: Option<StateId>,
    period: Option<usize>,
}

impl TurnBasedBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn action(&mut self, name: &str) -> Result<usize> {
        if self.actions.iter().any(|a| a == name) {
            return Err(Error::Invalid(vec![format!("duplicate action `{name}`")]));
        }
        self.actions.push(name.to_owned());
        for row in &mut self.trans {
            row.push(None);
        }
        Ok(self.actions.len() - 1)
    }

    pub fn state(&mut self, name: &str, owner: Owner3, obs: &str, prio: u32) -> Result<StateId> {
        if self.index.contains_key(name) {
            return Err(Error::Invalid(vec![format!("duplicate state id `{name}`")]));
        }
        let id = self.states.len();
        self.states.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        self.owners.push(owner);
        self.obs_names.push(obs.to_owned());
        self.priorities.push(prio);
        self.trans.push(vec![None; self.actions.len()]);
        self.edges.push(Vec::new());
        Ok(id)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn id(&self, name: &str) -> Result<StateId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(vec![format!("unknown state `{name}`")]))
    }

    pub fn start(&mut self, name: &str) -> Result<()> {
        self.start = Some(self.id(name)?);
        Ok(())
    }

    pub fn period(&mut self, k: Option<usize>) {
        self.period = k;
    }

    pub fn trans(&mut self, from: &str, action: &str, to: &str) -> Result<()> {
        let a = self
            .actions
            .iter()
            .position(|x| x == action)
            .ok_or_else(|| Error::Invalid(vec![format!("unknown action `{action}`")]))?;
        let (f, t) = (self.id(from)?, self.id(to)?);
        if self.trans[f][a].replace(t).is_some() {
            return Err(Error::Invalid(vec![format!("duplicate trans for `{from}` and `{action}`")]));
        }
        Ok(())
    }

    pub fn edge(&mut self, from: &str, to: &str) -> Result<()> {
        let (f, t) = (self.id(from)?, self.id(to)?);
        if self.edges[f].contains(&t) {
            return Err(Error::Invalid(vec![format!("duplicate edge `{from}` -> `{to}`")]));
        }
        self.edges[f].push(t);
        Ok(())
    }

    pub fn build(self) -> Result<TurnBasedGame> {
        let start = self
            .start
            .ok_or_else(|| Error::Invalid(vec!["missing start state".into()]))?;
        let observations = canonical_observations(self.obs_names.iter().cloned());
        let obs = self
            .obs_names
            .iter()
            .map(|o| observations.binary_search(o).unwrap())
            .collect();
        let mut missing = Vec::new();
        let trans = self
            .trans
            .iter()
            .enumerate()
            .map(|(s, row)| {
                if self.owners[s] != Owner3::P1 {
                    if row.iter().any(Option::is_some) {
                        missing.push(format!("trans defined on non-player-1 state `{}`", self.states[s]));
                    }
                    return Vec::new();
                }
                row.iter()
                    .enumerate()
                    .map(|(a, t)| {
                        t.unwrap_or_else(|| {
                            missing.push(format!(
                                "trans is not total: `{}` has no successor for action `{}`",
                                self.states[s], self.actions[a]
                            ));
                            0
                        })
                    })
                    .collect()
            })
            .collect();
        if !missing.is_empty() {
            return Err(Error::Invalid(missing));
        }
        Ok(TurnBasedGame {
            states: self.states,
            owners: self.owners,
            obs,
            observations,
            priorities: self.priorities,
            actions: self.actions,
            trans,
            edges: self.edges,
            start,
            period: self.period,
        })
    }
}
