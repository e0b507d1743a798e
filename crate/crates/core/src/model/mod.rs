//! Game structures, strategy transducers, plays, text formats and the
//! product of a game with a fixed strategy.

mod dot;
mod mdp;
mod posg;
mod strategy;
pub mod text;
mod tpg;

pub use dot::{to_dot, to_dot_subgraph, NodeShape};
pub use mdp::{product_with_memory, MdpKind, Player2Mdp};
pub(crate) use mdp::product_aligned;
pub use posg::{Kind, Posg, PosgBuilder, Violation};
pub use strategy::{AlignedStrategy, StrategyTransducer};
pub use tpg::{Owner3, TurnBasedGame, TurnBasedBuilder};

use crate::{Error, Result};

pub type StateId = usize;

/// Exact probabilities. Supports only matter for the qualitative
/// analysis, but sums are still checked exactly.
pub type Rational = num_rational::Ratio<u64>;

/// Read-only view shared by every game-like structure so that plays,
/// lassos and DOT export work uniformly.
pub trait GameGraph {
    fn num_states(&self) -> usize;
    fn state_name(&self, s: StateId) -> &str;
    fn priority(&self, s: StateId) -> u32;
    /// Every state the play may move to from `s`.
    fn successors(&self, s: StateId) -> Vec<StateId>;
    fn observation_name(&self, s: StateId) -> Option<&str>;
    fn shape(&self, s: StateId) -> NodeShape;
    fn start_state(&self) -> Option<StateId>;

    fn state_by_name(&self, name: &str) -> Option<StateId> {
        (0..self.num_states()).find(|&s| self.state_name(s) == name)
    }
}

/// Ultimately periodic play `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(stem: Vec<StateId>, cycle: Vec<StateId>) -> Self {
        Lasso { stem, cycle }
    }

    pub fn from_names<G: GameGraph + ?Sized>(g: &G, stem: &[&str], cycle: &[&str]) -> Result<Self> {
        let lookup = |n: &&str| {
            g.state_by_name(n)
                .ok_or_else(|| Error::InvalidPlay(format!("unknown state `{n}`")))
        };
        Ok(Lasso {
            stem: stem.iter().map(lookup).collect::<Result<_>>()?,
            cycle: cycle.iter().map(lookup).collect::<Result<_>>()?,
        })
    }
}

fn check_step<G: GameGraph + ?Sized>(g: &G, from: StateId, to: StateId) -> Result<()> {
    if g.successors(from).contains(&to) {
        Ok(())
    } else {
        Err(Error::InvalidPlay(format!(
            "`{}` -> `{}` is not a transition",
            g.state_name(from),
            g.state_name(to)
        )))
    }
}

/// Checks that consecutive states are connected.
pub fn check_play<G: GameGraph + ?Sized>(g: &G, play: &[StateId]) -> Result<()> {
    for w in play.windows(2) {
        check_step(g, w[0], w[1])?;
    }
    Ok(())
}

/// Pointwise observation sequence of a finite play prefix.
pub fn obs_of_sequence<G: GameGraph + ?Sized>(g: &G, play: &[StateId]) -> Result<Vec<String>> {
    check_play(g, play)?;
    play.iter()
        .map(|&s| {
            g.observation_name(s)
                .map(str::to_owned)
                .ok_or_else(|| Error::InvalidPlay(format!("state `{}` has no observation", g.state_name(s))))
        })
        .collect()
}

/// Minimum priority over the cycle of a lasso; the play satisfies the
/// parity objective iff the result is even.
pub fn lasso_min_inf_priority<G: GameGraph + ?Sized>(g: &G, lasso: &Lasso) -> Result<u32> {
    if lasso.cycle.is_empty() {
        return Err(Error::InvalidPlay("lasso cycle is empty".into()));
    }
    check_play(g, &lasso.stem)?;
    if let Some(&last) = lasso.stem.last() {
        check_step(g, last, lasso.cycle[0])?;
    }
    check_play(g, &lasso.cycle)?;
    check_step(g, *lasso.cycle.last().unwrap(), lasso.cycle[0])?;
    Ok(lasso.cycle.iter().map(|&s| g.priority(s)).min().unwrap())
}

/// Sorted, deduplicated observation alphabet plus the index of each name.
pub(crate) fn canonical_observations(names: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = names.into_iter().collect();
    v.sort();
    v.dedup();
    v
}
