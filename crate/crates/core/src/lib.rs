//! Qualitative analysis of partial-observation stochastic parity games.
//!
//! Player 1 observes the game only through observations, player 2 sees
//! everything, and probabilistic states resolve by exact rational
//! distributions. The crate decides whether player 1 has a finite-memory
//! almost-sure (or positive) winning strategy, extracts a witness
//! transducer when one exists, and checks such witnesses independently.
//!
//! The decision pipeline is:
//!
//! 1. [`reduce`]: replace every probabilistic state by a local gadget,
//!    giving a three-player turn-based game,
//! 2. [`threeplayer`]: embed that game into the concurrent model,
//! 3. [`ata`]: build an alternating parity tree automaton whose accepted
//!    trees are player-1 strategies,
//! 4. [`emptiness`]: decide nonemptiness through determinization of the
//!    branch checker ([`omega`]) and a parity game ([`paritygame`]),
//! 5. read back a regular tree and turn it into a strategy transducer.
//!
//! [`verify`] holds the oracles used to cross-check the pipeline:
//! end-component analysis of the player-2 MDP obtained by fixing a
//! strategy, brute-force strategy search and a Monte Carlo diagnostic.

pub mod ata;
pub mod bitset;
pub mod emptiness;
pub mod fixtures;
mod error;
pub mod gen;
mod graph;
pub mod model;
pub mod omega;
pub mod paritygame;
pub mod reduce;
pub mod solve;
pub mod threeplayer;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    GameGraph, Kind, Lasso, Owner3, Player2Mdp, Posg, Rational, StateId, StrategyTransducer,
    TurnBasedGame, Violation,
};
pub use paritygame::{ParityGame, Player};
pub use solve::{solve, Mode, SolveConfig, Solution};
