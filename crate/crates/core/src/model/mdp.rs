use std::collections::HashMap;

use super::{AlignedStrategy, GameGraph, Kind, NodeShape, Posg, Rational, StateId, StrategyTransducer};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MdpKind {
    /// Player-1 state whose action is already fixed: one successor.
    Player1,
    /// Controller choice.
    Player2,
    Random,
}

/// The MDP left for player 2 once player 1's strategy is fixed, over
/// reachable (state, memory) pairs.
#[derive(Clone, Debug)]
pub struct Player2Mdp {
    pub pairs: Vec<(StateId, usize)>,
    pub names: Vec<String>,
    pub kinds: Vec<MdpKind>,
    pub succ: Vec<Vec<usize>>,
    /// Probabilities aligned with `succ` for random states, empty otherwise.
    pub probs: Vec<Vec<Rational>>,
    pub priorities: Vec<u32>,
    pub start: usize,
}

impl Player2Mdp {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Player-1 and random states must keep all their successors inside
    /// any end component; only player-2 states may choose.
    pub fn is_closed_kind(&self, v: usize) -> bool {
        self.kinds[v] != MdpKind::Player2
    }
}

/// Synchronous product of `g` with `t`. Memory is updated once on every
/// entered state, the start included, before the state's decision.
pub fn product_with_memory(g: &Posg, t: &StrategyTransducer) -> Result<Player2Mdp> {
    let st = t.align(&g.observations, &g.actions)?;
    let mut m = product_aligned(g, &st);
    m.names = m.pairs.iter().map(|&(s, q)| format!("{}|{}", g.states[s], t.memory[q])).collect();
    Ok(m)
}

/// Product with an already aligned strategy; state names are left empty.
pub(crate) fn product_aligned(g: &Posg, st: &AlignedStrategy) -> Player2Mdp {
    let mut index: HashMap<(StateId, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut intern = |p: (StateId, usize), pairs: &mut Vec<(StateId, usize)>| -> usize {
        *index.entry(p).or_insert_with(|| {
            pairs.push(p);
            pairs.len() - 1
        })
    };
    let start = intern((g.start, st.update(st.init, g.obs[g.start])), &mut pairs);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut probs: Vec<Vec<Rational>> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (s, m) = pairs[i];
        let enter = |t: StateId| (t, st.update(m, g.obs[t]));
        let (row, pr): (Vec<usize>, Vec<Rational>) = match g.kinds[s] {
            Kind::P1 => (vec![intern(enter(g.succ_p1(s, st.nxt[m])), &mut pairs)], Vec::new()),
            Kind::P2 => (g.edges[s].iter().map(|&t| intern(enter(t), &mut pairs)).collect(), Vec::new()),
            Kind::Prob => g.dist[s].iter().map(|&(t, p)| (intern(enter(t), &mut pairs), p)).unzip(),
        };
        succ.push(row);
        probs.push(pr);
        i += 1;
    }
    let kinds = pairs
        .iter()
        .map(|&(s, _)| match g.kinds[s] {
            Kind::P1 => MdpKind::Player1,
            Kind::P2 => MdpKind::Player2,
            Kind::Prob => MdpKind::Random,
        })
        .collect();
    Player2Mdp {
        names: Vec::new(),
        priorities: pairs.iter().map(|&(s, _)| g.priorities[s]).collect(),
        kinds,
        pairs,
        succ,
        probs,
        start,
    }
}

impl GameGraph for Player2Mdp {
    fn num_states(&self) -> usize {
        self.pairs.len()
    }
    fn state_name(&self, s: StateId) -> &str {
        &self.names[s]
    }
    fn priority(&self, s: StateId) -> u32 {
        self.priorities[s]
    }
    fn successors(&self, s: StateId) -> Vec<StateId> {
        self.succ[s].clone()
    }
    fn observation_name(&self, _: StateId) -> Option<&str> {
        None
    }
    fn shape(&self, s: StateId) -> NodeShape {
        match self.kinds[s] {
            MdpKind::Player1 => NodeShape::Diamond,
            MdpKind::Player2 => NodeShape::Box,
            MdpKind::Random => NodeShape::Ellipse,
        }
    }
    fn start_state(&self) -> Option<StateId> {
        Some(self.start)
    }
}
