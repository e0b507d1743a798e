//! Concurrent three-player games, the embedding of turn-based games into
//! them, and the two-player parity game obtained by fixing player 1's
//! finite-memory strategy in a turn-based game.

use std::collections::HashMap;

use crate::model::{Owner3, StrategyTransducer, TurnBasedGame};
use crate::paritygame::{ParityGame, Player};
use crate::{Error, Result};

/// Name of the absorbing state reached when player 2 picks a non-edge.
pub const GOOD: &str = "@good";
/// Name of the absorbing state reached when player 3 picks a non-edge.
pub const BAD: &str = "@bad";

/// Deterministic concurrent game where all three players choose an action
/// simultaneously at every state.
#[derive(Clone, Debug)]
pub struct Concurrent3PG {
    pub names: Vec<String>,
    pub start: usize,
    pub a1: Vec<String>,
    pub a2: Vec<String>,
    pub a3: Vec<String>,
    pub obs: Vec<usize>,
    /// Sorted observation identifiers.
    pub observations: Vec<String>,
    pub priorities: Vec<u32>,
    delta: Delta,
}

#[derive(Clone, Debug)]
enum Delta {
    /// Flat table indexed by `((s * |A1| + a1) * |A2| + a2) * |A3| + a3`.
    Table(Vec<usize>),
    /// Embedding of a turn-based game: player-2 and player-3 actions name
    /// target states, and `good`/`bad` absorb.
    TurnBased(Embedding),
}

#[derive(Clone, Debug)]
struct Embedding {
    owners: Vec<Owner3>,
    trans: Vec<Vec<usize>>,
    edges: Vec<Vec<usize>>,
    good: usize,
    bad: usize,
}

/// How the state behaves, for consumers that exploit the turn-based shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalShape<'a> {
    Player1(&'a [usize]),
    Player2(&'a [usize]),
    Player3(&'a [usize]),
    Absorbing,
}

impl Concurrent3PG {
    /// Builds a game from an explicit transition table.
    #[allow(clippy::too_many_arguments)]
    pub fn from_table(
        names: Vec<String>,
        start: usize,
        a1: Vec<String>,
        a2: Vec<String>,
        a3: Vec<String>,
        obs_names: Vec<String>,
        priorities: Vec<u32>,
        table: Vec<usize>,
    ) -> Result<Self> {
        let n = names.len();
        let expected = n * a1.len() * a2.len() * a3.len();
        if table.len() != expected || table.iter().any(|&t| t >= n) || start >= n {
            return Err(Error::Invalid(vec!["concurrent transition table is not total".into()]));
        }
        if obs_names.len() != n || priorities.len() != n {
            return Err(Error::Invalid(vec!["observation or priority missing".into()]));
        }
        let mut observations = obs_names.clone();
        observations.sort();
        observations.dedup();
        let obs = obs_names.iter().map(|o| observations.binary_search(o).unwrap()).collect();
        Ok(Concurrent3PG { names, start, a1, a2, a3, obs, observations, priorities, delta: Delta::Table(table) })
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn delta(&self, s: usize, a1: usize, a2: usize, a3: usize) -> usize {
        match &self.delta {
            Delta::Table(t) => t[((s * self.a1.len() + a1) * self.a2.len() + a2) * self.a3.len() + a3],
            Delta::TurnBased(e) => {
                if s == e.good || s == e.bad {
                    return s;
                }
                match e.owners[s] {
                    Owner3::P1 => e.trans[s][a1],
                    Owner3::P2 => {
                        if e.edges[s].contains(&a2) {
                            a2
                        } else {
                            e.good
                        }
                    }
                    Owner3::P3 => {
                        if e.edges[s].contains(&a3) {
                            a3
                        } else {
                            e.bad
                        }
                    }
                }
            }
        }
    }

    /// The turn-based structure behind `s`, when the game is an embedding.
    pub fn local_shape(&self, s: usize) -> Option<LocalShape<'_>> {
        match &self.delta {
            Delta::Table(_) => None,
            Delta::TurnBased(e) => Some(if s == e.good || s == e.bad {
                LocalShape::Absorbing
            } else {
                match e.owners[s] {
                    Owner3::P1 => LocalShape::Player1(&e.trans[s]),
                    Owner3::P2 => LocalShape::Player2(&e.edges[s]),
                    Owner3::P3 => LocalShape::Player3(&e.edges[s]),
                }
            }),
        }
    }

    /// Indices of the absorbing states added by the embedding.
    pub fn sinks(&self) -> Option<(usize, usize)> {
        match &self.delta {
            Delta::TurnBased(e) => Some((e.good, e.bad)),
            Delta::Table(_) => None,
        }
    }
}

/// Embeds `g` into the concurrent model. Player-2 and player-3 actions
/// are the states of `g` plus the two sinks; a player choosing a
/// non-successor moves to the sink where that player loses: `@good`
/// (priority 0) for player 2, `@bad` (priority 1) for player 3. Both sinks
/// get fresh observations named after them.
pub fn to_concurrent(g: &TurnBasedGame) -> Result<Concurrent3PG> {
    g.ensure_valid()?;
    for name in [GOOD, BAD] {
        if g.state_id(name).is_some() {
            return Err(Error::NameCollision(name.to_owned()));
        }
        if g.obs_id(name).is_some() {
            return Err(Error::NameCollision(name.to_owned()));
        }
    }
    let n = g.num_states();
    let (good, bad) = (n, n + 1);
    let mut names = g.states.clone();
    names.push(GOOD.into());
    names.push(BAD.into());
    let mut obs_names: Vec<String> = (0..n).map(|s| g.observations[g.obs[s]].clone()).collect();
    obs_names.push(GOOD.into());
    obs_names.push(BAD.into());
    let mut observations = obs_names.clone();
    observations.sort();
    observations.dedup();
    let obs = obs_names.iter().map(|o| observations.binary_search(o).unwrap()).collect();
    let mut priorities = g.priorities.clone();
    priorities.push(0);
    priorities.push(1);
    let mut owners = g.owners.clone();
    owners.push(Owner3::P2);
    owners.push(Owner3::P2);
    Ok(Concurrent3PG {
        start: g.start,
        a1: g.actions.clone(),
        a2: names.clone(),
        a3: names.clone(),
        names,
        obs,
        observations,
        priorities,
        delta: Delta::TurnBased(Embedding { owners, trans: g.trans.clone(), edges: g.edges.clone(), good, bad }),
    })
}

/// Two-player parity game over reachable (state, memory) pairs of `g`
/// with player 1 fixed to `t`. Player-3 states belong to Even, player-2
/// states to Odd; player-1 states have the single successor chosen by
/// the strategy and are assigned to Even. Memory is updated on every
/// entered state, the start included.
pub fn fix_player1(g: &TurnBasedGame, t: &StrategyTransducer) -> Result<ParityGame> {
    let st = t.align(&g.observations, &g.actions)?;
    let mut pg = ParityGame::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut intern = |p: (usize, usize), pg: &mut ParityGame, pairs: &mut Vec<(usize, usize)>| -> usize {
        *index.entry(p).or_insert_with(|| {
            let (s, m) = p;
            let owner = if g.owners[s] == Owner3::P2 { Player::Odd } else { Player::Even };
            pairs.push(p);
            pg.add_node(format!("{}|{}", g.states[s], t.memory[m]), owner, g.priorities[s])
        })
    };
    let start = intern((g.start, st.update(st.init, g.obs[g.start])), &mut pg, &mut pairs);
    pg.start = Some(start);
    let mut i = 0;
    while i < pairs.len() {
        let (s, m) = pairs[i];
        let targets: Vec<usize> = match g.owners[s] {
            Owner3::P1 => vec![g.trans[s][st.nxt[m]]],
            _ => g.edges[s].clone(),
        };
        for t in targets {
            let j = intern((t, st.update(m, g.obs[t])), &mut pg, &mut pairs);
            pg.add_edge(i, j);
        }
        i += 1;
    }
    Ok(pg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TurnBasedBuilder;

    fn small() -> TurnBasedGame {
        let mut b = TurnBasedBuilder::new();
        b.action("a").unwrap();
        b.state("u", Owner3::P1, "oU", 0).unwrap();
        b.state("v", Owner3::P2, "oV", 1).unwrap();
        b.state("w", Owner3::P3, "oW", 1).unwrap();
        b.trans("u", "a", "v").unwrap();
        b.edge("v", "w").unwrap();
        b.edge("w", "u").unwrap();
        b.start("u").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn embedding_cases() {
        let g = small();
        let c = to_concurrent(&g).unwrap();
        let (good, bad) = c.sinks().unwrap();
        let (u, v, w) = (0, 1, 2);
        assert_eq!(c.delta(v, 0, w, 0), w);
        assert_eq!(c.delta(v, 0, u, 0), good);
        assert_eq!(c.delta(w, 0, 0, u), u);
        assert_eq!(c.delta(w, 0, 0, v), bad);
        for x in 0..c.a2.len() {
            for y in 0..c.a3.len() {
                assert_eq!(c.delta(u, 0, x, y), v);
            }
        }
        assert_eq!(c.priorities[good], 0);
        assert_eq!(c.priorities[bad], 1);
        assert_eq!(c.delta(good, 0, 1, 2), good);
    }

    #[test]
    fn fixing_player_one_gives_the_cycle() {
        let g = small();
        let t = StrategyTransducer::constant(&g.observations, "a");
        let pg = fix_player1(&g, &t).unwrap();
        assert_eq!(pg.len(), 3);
        assert!(pg.validate().is_ok());
        assert_eq!(pg.owners, vec![Player::Even, Player::Odd, Player::Even]);
    }
}
