//! Gadget reductions from partial-observation stochastic games to
//! three-player turn-based games, and the maps that carry observation
//! sequences and strategies across.
//!
//! Every probabilistic state `s` is replaced by a small deterministic
//! sub-game between player 2 and player 3 whose states all carry `obs(s)`.
//! Player-1 and player-2 states are copied unchanged.
//!
//! Three gadget families are provided:
//!
//! * [`reduce_almost_sure`]: player 2 picks an even bound `2k` at `s@bar`,
//!   player 3 answers with `2k-1` or `2k` at `s@t<2k>`, and the priority
//!   `j` of the chosen `s@h<j>` is visited before moving to a successor
//!   picked by player 3 (odd `j`) or player 2 (even `j`).
//! * [`reduce_positive`]: the entry-state variant for positive winning,
//!   with an entry state `s@w`, the edge `s@bar -> s@t0` removed and `s@h0`
//!   given priority `-1` before a global `+2` shift. The pipeline can
//!   answer yes on it for games player 1 does not win (see the trap game
//!   in `tests/oracles.rs`).
//! * [`reduce_positive_dual`]: the almost-sure gadget for player 2's
//!   co-parity objective with the roles of players 2 and 3 exchanged. This
//!   is what the solver uses in positive mode, since it keeps every path
//!   through a gadget the same length and lets player 3 win exactly when
//!   player 2 cannot win the co-parity objective almost surely.

use std::collections::HashSet;
use std::fmt::Write;

use crate::model::{Kind, Owner3, Posg, StateId, StrategyTransducer, TurnBasedGame};
use crate::{Error, Result};

/// Which gadget family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    AlmostSure,
    PositiveEntry,
    PositiveDual,
}

/// States created for one probabilistic source state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub source: StateId,
    /// State that external edges point to.
    pub entry: usize,
    /// `s@w`, only in the entry variant.
    pub ring: Option<usize>,
    /// `s@bar`; absent only in the entry variant when `p(s) = 0`.
    pub bar: Option<usize>,
    /// `(2k, s@t<2k>)` in increasing order.
    pub tildes: Vec<(u32, usize)>,
    /// `(j, s@h<j>)` in increasing order.
    pub hats: Vec<(u32, usize)>,
}

impl Gadget {
    pub fn states(&self) -> Vec<usize> {
        self.ring
            .iter()
            .chain(&self.bar)
            .copied()
            .chain(self.tildes.iter().map(|t| t.1))
            .chain(self.hats.iter().map(|h| h.1))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetIndex {
    pub kind: GadgetKind,
    /// Copy of each non-probabilistic source state.
    pub copies: Vec<Option<usize>>,
    pub gadgets: Vec<Gadget>,
    /// Source state of every output state.
    pub origin: Vec<StateId>,
}

impl GadgetIndex {
    pub fn gadget_of(&self, source: StateId) -> Option<&Gadget> {
        self.gadgets.iter().find(|g| g.source == source)
    }
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub game: TurnBasedGame,
    pub index: GadgetIndex,
}

impl Reduction {
    /// One `key=value` line per statistic.
    pub fn stats(&self) -> String {
        let g = &self.game;
        let mut out = String::new();
        writeln!(out, "states={}", g.num_states()).unwrap();
        writeln!(out, "transitions={}", g.num_edges()).unwrap();
        writeln!(out, "gadgets={}", self.index.gadgets.len()).unwrap();
        writeln!(out, "gadget_states={}", self.index.gadgets.iter().map(|x| x.states().len()).sum::<usize>()).unwrap();
        writeln!(out, "priorities={}", g.distinct_priorities()).unwrap();
        match g.period {
            Some(k) => writeln!(out, "period={k}").unwrap(),
            None => writeln!(out, "period=none").unwrap(),
        }
        out
    }
}

/// Closed-form number of almost-sure gadget states for priority `p`.
pub fn gadget_size(p: u32) -> usize {
    let p = p as usize;
    if p.is_multiple_of(2) {
        1 + (p / 2 + 1) + (p + 1)
    } else {
        1 + (p.div_ceil(2) + 1) + (p + 1)
    }
}

/// Even bounds offered at `s@bar` when the gadget is built for priority
/// `p`: `0, 2, ..., p` for even `p`, `0, 2, ..., p + 1` for odd `p`.
fn even_bounds(p: u32) -> Vec<u32> {
    let top = if p.is_multiple_of(2) { p } else { p + 1 };
    (0..=top).step_by(2).collect()
}

/// Successor hats of `s@t<2k>`: `2k-1` and `2k`, with `t0` going to `h0`
/// and the extra top bound for odd `p` going to `h<p>` only.
fn tilde_targets(two_k: u32, p: u32) -> Vec<u32> {
    if two_k == 0 {
        vec![0]
    } else if p % 2 == 1 && two_k == p + 1 {
        vec![p]
    } else {
        vec![two_k - 1, two_k]
    }
}

struct Out {
    states: Vec<String>,
    owners: Vec<Owner3>,
    obs: Vec<usize>,
    prios: Vec<i64>,
    origin: Vec<StateId>,
    edges: Vec<Vec<usize>>,
}

impl Out {
    fn add(&mut self, name: String, owner: Owner3, obs: usize, prio: i64, origin: StateId) -> usize {
        self.states.push(name);
        self.owners.push(owner);
        self.obs.push(obs);
        self.prios.push(prio);
        self.origin.push(origin);
        self.edges.push(Vec::new());
        self.states.len() - 1
    }
}

fn reduce(g: &Posg, kind: GadgetKind) -> Result<Reduction> {
    g.ensure_valid()?;
    let names: HashSet<&str> = g.states.iter().map(String::as_str).collect();
    let mut out = Out { states: Vec::new(), owners: Vec::new(), obs: Vec::new(), prios: Vec::new(), origin: Vec::new(), edges: Vec::new() };
    let mut copies = vec![None; g.num_states()];
    let mut gadgets = Vec::new();
    let fresh = |s: StateId, suffix: String| -> Result<String> {
        let n = format!("{}@{}", g.states[s], suffix);
        if names.contains(n.as_str()) {
            Err(Error::NameCollision(n))
        } else {
            Ok(n)
        }
    };

    for s in 0..g.num_states() {
        let (o, p) = (g.obs[s], g.priorities[s]);
        match g.kinds[s] {
            Kind::P1 => copies[s] = Some(out.add(g.states[s].clone(), Owner3::P1, o, p as i64, s)),
            Kind::P2 => copies[s] = Some(out.add(g.states[s].clone(), Owner3::P2, o, p as i64, s)),
            Kind::Prob => {
                let gadget = match kind {
                    GadgetKind::AlmostSure => build_almost_sure(&mut out, s, o, p, &fresh)?,
                    GadgetKind::PositiveEntry => build_entry(&mut out, s, o, p, &fresh)?,
                    GadgetKind::PositiveDual => build_dual(&mut out, s, o, p, &fresh)?,
                };
                gadgets.push(gadget);
            }
        }
    }

    // Hats lead to the copies of the support.
    for gd in &gadgets {
        let targets: Vec<usize> = g.dist[gd.source].iter().map(|&(t, _)| copies[t].unwrap()).collect();
        for &(_, h) in &gd.hats {
            out.edges[h] = targets.clone();
        }
    }
    let entry_of = |t: StateId| gadgets.iter().find(|x| x.source == t).unwrap().entry;
    let mut trans = vec![Vec::new(); out.states.len()];
    for s in 0..g.num_states() {
        match g.kinds[s] {
            Kind::P1 => {
                let c = copies[s].unwrap();
                trans[c] = (0..g.actions.len()).map(|a| copies[g.succ_p1(s, a)].unwrap()).collect();
            }
            Kind::P2 => {
                let c = copies[s].unwrap();
                out.edges[c] = g.edges[s].iter().map(|&t| entry_of(t)).collect();
            }
            Kind::Prob => {}
        }
    }

    let shift = if kind == GadgetKind::PositiveEntry || kind == GadgetKind::PositiveDual { 2 } else { 0 };
    let priorities = out
        .prios
        .iter()
        .map(|&p| u32::try_from(p + shift).expect("priorities are nonnegative after the shift"))
        .collect();
    let mut game = TurnBasedGame {
        states: out.states,
        owners: out.owners,
        obs: out.obs,
        observations: g.observations.clone(),
        priorities,
        actions: g.actions.clone(),
        trans,
        edges: out.edges,
        start: copies[g.start].unwrap(),
        period: None,
    };
    game.period = match kind {
        GadgetKind::PositiveEntry => game.measure_period(),
        _ => Some(4),
    };
    debug_assert!(game.validate().is_empty(), "{:?}", game.validate());
    Ok(Reduction { game, index: GadgetIndex { kind, copies, gadgets, origin: out.origin } })
}

type Fresh<'a> = dyn Fn(StateId, String) -> Result<String> + 'a;

fn build_almost_sure(out: &mut Out, s: StateId, o: usize, p: u32, fresh: &Fresh) -> Result<Gadget> {
    let pi = p as i64;
    let bar = out.add(fresh(s, "bar".into())?, Owner3::P2, o, pi, s);
    let bounds = even_bounds(p);
    let tildes: Vec<(u32, usize)> = bounds
        .iter()
        .map(|&k| Ok((k, out.add(fresh(s, format!("t{k}"))?, Owner3::P3, o, pi, s))))
        .collect::<Result<_>>()?;
    let hats: Vec<(u32, usize)> = (0..=p)
        .map(|j| {
            let owner = if j % 2 == 1 { Owner3::P3 } else { Owner3::P2 };
            Ok((j, out.add(fresh(s, format!("h{j}"))?, owner, o, j as i64, s)))
        })
        .collect::<Result<_>>()?;
    out.edges[bar] = tildes.iter().map(|t| t.1).collect();
    for &(k, t) in &tildes {
        out.edges[t] = tilde_targets(k, p).into_iter().map(|j| hats[j as usize].1).collect();
    }
    Ok(Gadget { source: s, entry: bar, ring: None, bar: Some(bar), tildes, hats })
}

fn build_entry(out: &mut Out, s: StateId, o: usize, p: u32, fresh: &Fresh) -> Result<Gadget> {
    let pi = p as i64;
    let ring = out.add(fresh(s, "w".into())?, Owner3::P3, o, pi, s);
    // With p(s) = 0 the bar would be left without successors, so it is
    // not created.
    let bar = if p > 0 { Some(out.add(fresh(s, "bar".into())?, Owner3::P2, o, pi, s)) } else { None };
    let tildes: Vec<(u32, usize)> = even_bounds(p)
        .iter()
        .map(|&k| Ok((k, out.add(fresh(s, format!("t{k}"))?, Owner3::P3, o, pi, s))))
        .collect::<Result<_>>()?;
    let hats: Vec<(u32, usize)> = (0..=p)
        .map(|j| {
            let owner = if j % 2 == 1 { Owner3::P3 } else { Owner3::P2 };
            let prio = if j == 0 { -1 } else { j as i64 };
            Ok((j, out.add(fresh(s, format!("h{j}"))?, owner, o, prio, s)))
        })
        .collect::<Result<_>>()?;
    if let Some(b) = bar {
        out.edges[b] = tildes.iter().filter(|t| t.0 > 0).map(|t| t.1).collect();
        out.edges[ring] = vec![b, tildes[0].1];
    } else {
        out.edges[ring] = vec![tildes[0].1];
    }
    for &(k, t) in &tildes {
        out.edges[t] = tilde_targets(k, p).into_iter().map(|j| hats[j as usize].1).collect();
    }
    Ok(Gadget { source: s, entry: ring, ring: Some(ring), bar, tildes, hats })
}

fn build_dual(out: &mut Out, s: StateId, o: usize, p: u32, fresh: &Fresh) -> Result<Gadget> {
    // Almost-sure gadget for priorities shifted by one, players 2 and 3
    // exchanged; hat `j` carries `j - 1`.
    let q = p + 1;
    let pi = p as i64;
    let bar = out.add(fresh(s, "bar".into())?, Owner3::P3, o, pi, s);
    let tildes: Vec<(u32, usize)> = even_bounds(q)
        .iter()
        .map(|&k| Ok((k, out.add(fresh(s, format!("t{k}"))?, Owner3::P2, o, pi, s))))
        .collect::<Result<_>>()?;
    let hats: Vec<(u32, usize)> = (0..=q)
        .map(|j| {
            let owner = if j % 2 == 1 { Owner3::P2 } else { Owner3::P3 };
            Ok((j, out.add(fresh(s, format!("h{j}"))?, owner, o, j as i64 - 1, s)))
        })
        .collect::<Result<_>>()?;
    out.edges[bar] = tildes.iter().map(|t| t.1).collect();
    for &(k, t) in &tildes {
        out.edges[t] = tilde_targets(k, q).into_iter().map(|j| hats[j as usize].1).collect();
    }
    Ok(Gadget { source: s, entry: bar, ring: None, bar: Some(bar), tildes, hats })
}

/// Turn-based game for almost-sure winning, with step period 4.
pub fn reduce_almost_sure(g: &Posg) -> Result<Reduction> {
    reduce(g, GadgetKind::AlmostSure)
}

/// The positive-winning variant with entry states `s@w`. Paths through a
/// gadget have different lengths, so the output has no uniform period.
pub fn reduce_positive(g: &Posg) -> Result<Reduction> {
    reduce(g, GadgetKind::PositiveEntry)
}

/// Turn-based game in which players 1 and 3 win surely iff player 2
/// cannot win the co-parity objective almost surely; step period 4.
pub fn reduce_positive_dual(g: &Posg) -> Result<Reduction> {
    reduce(g, GadgetKind::PositiveDual)
}

/// Observation classes of a game, as used by the sequence mapping.
fn classify(g: &Posg, o: &str) -> Result<Kind> {
    let id = g.obs_id(o).ok_or_else(|| Error::UnknownObservation(o.to_owned()))?;
    g.observation_kind(id)
        .ok_or_else(|| Error::UnknownObservation(format!("{o} (not confined to one kind of state)")))
}

/// Repeats every probabilistic observation three times, matching the
/// three gadget states that replace a probabilistic state.
pub fn map_obs_seq<S: AsRef<str>>(g: &Posg, kappa: &[S]) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(kappa.len() * 3);
    for o in kappa {
        let o = o.as_ref();
        let reps = if classify(g, o)? == Kind::Prob { 3 } else { 1 };
        out.extend(std::iter::repeat_n(o.to_owned(), reps));
    }
    Ok(out)
}

/// Inverse of [`map_obs_seq`] on its image.
pub fn map_obs_seq_inv<S: AsRef<str>>(g: &Posg, seq: &[S]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        let o = seq[i].as_ref();
        if classify(g, o)? == Kind::Prob {
            if i + 3 > seq.len() || seq[i + 1].as_ref() != o || seq[i + 2].as_ref() != o {
                return Err(Error::InvalidPlay(format!("probabilistic observation `{o}` is not repeated three times")));
            }
            i += 3;
        } else {
            i += 1;
        }
        out.push(o.to_owned());
    }
    Ok(out)
}

fn check_alphabet(g: &Posg, t: &StrategyTransducer) -> Result<()> {
    t.align(&g.observations, &g.actions).map(|_| ())
}

/// Strategy for `g` that behaves on `κ` as `tbar` behaves on the mapped
/// sequence: a probabilistic observation applies `tbar`'s update three
/// times.
pub fn lower_strategy(g: &Posg, tbar: &StrategyTransducer) -> Result<StrategyTransducer> {
    check_alphabet(g, tbar)?;
    let k = g.observations.len();
    let prob: Vec<bool> = (0..k).map(|o| g.observation_kind(o) == Some(Kind::Prob)).collect();
    let upd = (0..tbar.size())
        .flat_map(|m| (0..k).map(move |o| (m, o)))
        .map(|(m, o)| {
            if prob[o] {
                tbar.update(tbar.update(tbar.update(m, o), o), o)
            } else {
                tbar.update(m, o)
            }
        })
        .collect();
    Ok(StrategyTransducer { upd, ..tbar.clone() })
}

/// Strategy for the reduced game that lowers back to `t`. Memory is paired
/// with a counter of repeated probabilistic observations, and `t`'s update
/// is applied on the third repeat.
pub fn lift_strategy(g: &Posg, t: &StrategyTransducer) -> Result<StrategyTransducer> {
    check_alphabet(g, t)?;
    let k = g.observations.len();
    let prob: Vec<bool> = (0..k).map(|o| g.observation_kind(o) == Some(Kind::Prob)).collect();
    let id = |m: usize, c: usize| m * 3 + c;
    let mut upd = Vec::with_capacity(t.size() * 3 * k);
    for m in 0..t.size() {
        for c in 0..3 {
            for o in 0..k {
                upd.push(if !prob[o] {
                    id(t.update(m, o), 0)
                } else if c < 2 {
                    id(m, c + 1)
                } else {
                    id(t.update(m, o), 0)
                });
            }
        }
    }
    let lifted = StrategyTransducer {
        memory: (0..t.size()).flat_map(|m| (0..3).map(move |c| (m, c))).map(|(m, c)| format!("{}#{}", t.memory[m], c)).collect(),
        init: id(t.init, 0),
        observations: t.observations.clone(),
        upd,
        nxt: (0..t.size()).flat_map(|m| std::iter::repeat_n(t.nxt[m].clone(), 3)).collect(),
    };
    Ok(lifted.prune())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PosgBuilder, Rational};

    /// `u -> v -> s`, with `s` of priority `p` returning to `u` (and to
    /// `x` when `two` is set).
    fn one_gadget(p: u32, two: bool) -> Posg {
        let mut b = PosgBuilder::new();
        b.action("a").unwrap();
        b.state("u", Kind::P1, "oU", 0).unwrap();
        b.state("v", Kind::P2, "oV", 1).unwrap();
        b.state("s", Kind::Prob, "oS", p).unwrap();
        if two {
            b.state("x", Kind::P1, "oU", 1).unwrap();
            b.trans("x", "a", "v").unwrap();
        }
        b.trans("u", "a", "v").unwrap();
        b.edge("v", "s").unwrap();
        if two {
            b.pdist("s", "u", Rational::new(1, 2)).unwrap();
            b.pdist("s", "x", Rational::new(1, 2)).unwrap();
        } else {
            b.pdist("s", "u", Rational::new(1, 1)).unwrap();
        }
        b.start("u").unwrap();
        b.build().unwrap()
    }

    fn gadget_edges(r: &Reduction) -> usize {
        r.index.gadgets[0].states().iter().map(|&x| r.game.edges[x].len()).sum()
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(gadget_size(2), 6);
        assert_eq!(gadget_size(1), 5);
        assert_eq!(gadget_size(3), 8);
        for p in 0..6 {
            let r = reduce_almost_sure(&one_gadget(p, false)).unwrap();
            assert_eq!(r.index.gadgets[0].states().len(), gadget_size(p));
            assert_eq!(r.game.period, Some(4));
            assert!(r.game.validate().is_empty());
        }
    }

    #[test]
    fn priority_two_gadget_has_eleven_edges() {
        let r = reduce_almost_sure(&one_gadget(2, true)).unwrap();
        assert_eq!(r.index.gadgets[0].states().len(), 6);
        assert_eq!(gadget_edges(&r), 11);
    }

    #[test]
    fn odd_top_bound_has_one_successor() {
        let r = reduce_almost_sure(&one_gadget(1, false)).unwrap();
        let gd = &r.index.gadgets[0];
        assert_eq!(gd.tildes.iter().map(|t| t.0).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(r.game.edges[gd.tildes[1].1], vec![gd.hats[1].1]);
    }

    #[test]
    fn entry_variant() {
        let r = reduce_positive(&one_gadget(2, false)).unwrap();
        let gd = &r.index.gadgets[0];
        assert_eq!(gd.states().len(), 7);
        assert_eq!(r.game.edges[gd.bar.unwrap()], vec![gd.tildes[1].1]);
        assert_eq!(r.game.priorities[gd.hats[0].1], 1);
        let mut used: Vec<u32> = r.game.priorities.clone();
        used.sort();
        used.dedup();
        assert_eq!(used, vec![1, 2, 3, 4]);
        // v (the player-2 copy) now points at the entry state.
        assert_eq!(r.game.edges[r.index.copies[1].unwrap()], vec![gd.entry]);
    }

    #[test]
    fn dual_variant_is_uniform() {
        for p in 0..5 {
            let r = reduce_positive_dual(&one_gadget(p, true)).unwrap();
            assert_eq!(r.game.period, Some(4));
            assert!(r.game.validate().is_empty());
            assert_eq!(r.index.gadgets[0].states().len(), gadget_size(p + 1));
        }
    }

    #[test]
    fn names_are_collision_checked() {
        let mut b = PosgBuilder::new();
        b.action("a").unwrap();
        b.state("u", Kind::P1, "oU", 0).unwrap();
        b.state("v", Kind::P2, "oV", 1).unwrap();
        b.state("s", Kind::Prob, "oS", 1).unwrap();
        b.state("s@bar", Kind::P1, "oU", 1).unwrap();
        b.trans("u", "a", "v").unwrap();
        b.trans("s@bar", "a", "v").unwrap();
        b.edge("v", "s").unwrap();
        b.pdist("s", "u", Rational::new(1, 1)).unwrap();
        b.start("u").unwrap();
        let g = b.build().unwrap();
        assert!(matches!(reduce_almost_sure(&g), Err(Error::NameCollision(_))));
    }

    #[test]
    fn observation_sequences() {
        let g = one_gadget(1, false);
        let m = map_obs_seq(&g, &["oU", "oV", "oS"]).unwrap();
        assert_eq!(m, vec!["oU", "oV", "oS", "oS", "oS"]);
        assert_eq!(map_obs_seq(&g, &["oU"]).unwrap(), vec!["oU"]);
        assert_eq!(map_obs_seq_inv(&g, &m).unwrap(), vec!["oU", "oV", "oS"]);
        assert!(map_obs_seq(&g, &["zz"]).is_err());
    }

    #[test]
    fn three_cycle_update_lowers_to_identity() {
        let g = one_gadget(1, false);
        // Memory cycles through three states on oS, stays otherwise.
        let upd = vec![0, 1, 0, 1, 2, 1, 2, 0, 2];
        let tbar = StrategyTransducer::new(
            vec!["m0".into(), "m1".into(), "m2".into()],
            0,
            g.observations.clone(),
            upd,
            vec!["a".into(); 3],
        )
        .unwrap();
        let t = lower_strategy(&g, &tbar).unwrap();
        let os = t.obs_index("oS").unwrap();
        for m in 0..3 {
            assert_eq!(t.update(m, os), m);
        }
    }

    #[test]
    fn lifting_bounds_memory() {
        let g = one_gadget(1, false);
        let t = StrategyTransducer::new(
            vec!["m0".into(), "m1".into()],
            0,
            g.observations.clone(),
            vec![1, 1, 1, 0, 0, 0],
            vec!["a".into(), "a".into()],
        )
        .unwrap();
        assert!(lift_strategy(&g, &t).unwrap().size() <= 6);
    }
}
