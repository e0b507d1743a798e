//! The decision pipeline from a game to a verdict and a witness.

use std::fmt::Write;

use crate::ata::build_ata;
use crate::emptiness::{check_nonempty_with, extract_player1_strategy, EmptinessConfig, EmptinessStats};
use crate::model::{Posg, StrategyTransducer};
use crate::reduce::{lower_strategy, reduce_almost_sure, reduce_positive_dual, Reduction};
use crate::threeplayer::to_concurrent;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    AlmostSure,
    Positive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    pub emptiness: EmptinessConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub reduced_states: usize,
    pub reduced_edges: usize,
    pub ata_states: usize,
    pub directions: usize,
    pub emptiness: EmptinessStats,
    pub witness_size: usize,
}

impl SolveStats {
    /// One `key=value` line per statistic.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        let e = &self.emptiness;
        for (k, v) in [
            ("reduced_states", self.reduced_states),
            ("reduced_edges", self.reduced_edges),
            ("ata_states", self.ata_states),
            ("directions", self.directions),
            ("det_states", e.det_states),
            ("game_nodes", e.game_nodes),
            ("game_edges", e.game_edges),
            ("max_labelings", e.max_labelings),
            ("witness_size", self.witness_size),
        ] {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winning: bool,
    /// Witness for the reduced game, over the same observations.
    pub reduced_strategy: Option<StrategyTransducer>,
    /// Witness for the input game.
    pub strategy: Option<StrategyTransducer>,
    pub stats: SolveStats,
}

/// Decides whether player 1 has a finite-memory strategy winning `g` in
/// the given mode and extracts one.
pub fn solve(g: &Posg, mode: Mode, config: &SolveConfig) -> Result<Solution> {
    let r = match mode {
        Mode::AlmostSure => reduce_almost_sure(g)?,
        Mode::Positive => reduce_positive_dual(g)?,
    };
    solve_reduced(g, &r, config)
}

/// Runs the pipeline on a given reduction of `g`.
pub fn solve_reduced(g: &Posg, r: &Reduction, config: &SolveConfig) -> Result<Solution> {
    let c = to_concurrent(&r.game)?;
    let ata = build_ata(&c);
    let e = check_nonempty_with(&ata, &config.emptiness)?;
    let mut stats = SolveStats {
        reduced_states: r.game.num_states(),
        reduced_edges: r.game.num_edges(),
        ata_states: ata.num_states(),
        directions: ata.k(),
        emptiness: e.stats,
        witness_size: 0,
    };
    let Some(tree) = e.witness else {
        return Ok(Solution { winning: false, reduced_strategy: None, strategy: None, stats });
    };
    let reduced = extract_player1_strategy(&tree, &r.game.observations)?.minimize();
    let lowered = lower_strategy(g, &reduced)?.minimize();
    stats.witness_size = lowered.size();
    Ok(Solution { winning: true, reduced_strategy: Some(reduced), strategy: Some(lowered), stats })
}
