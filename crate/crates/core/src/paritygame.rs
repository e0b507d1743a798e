//! Two-player perfect-information parity games under the min-parity
//! convention: Even wins a play iff the least priority seen infinitely
//! often is even.

use std::collections::HashMap;
use std::fmt::Write;

use crate::bitset::BitSet;
use crate::model::text::{arity, attributes, expect_header, lines, parse_u32};
use crate::model::{GameGraph, NodeShape, StateId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player favoured by priority `p`.
    pub fn of_priority(p: u32) -> Player {
        if p.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Player::Even => "even",
            Player::Odd => "odd",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub names: Vec<String>,
    pub owners: Vec<Player>,
    pub priorities: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    pub start: Option<usize>,
}

impl ParityGame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, owner: Player, prio: u32) -> usize {
        self.names.push(name.into());
        self.owners.push(owner);
        self.priorities.push(prio);
        self.succ.push(Vec::new());
        self.names.len() - 1
    }

    /// Adds an edge unless it is already present.
    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn validate(&self) -> Result<()> {
        let dead: Vec<String> = (0..self.len())
            .filter(|&v| self.succ[v].is_empty())
            .map(|v| format!("node `{}` has no successor", self.names[v]))
            .collect();
        if dead.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(dead))
        }
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, ss) in self.succ.iter().enumerate() {
            for &w in ss {
                pred[w].push(v);
            }
        }
        pred
    }

    /// Nodes from which `player` can force a visit to `target`.
    pub fn attractor(&self, target: &BitSet, player: Player) -> BitSet {
        let all = BitSet::full(self.len());
        attract(self, &self.predecessors(), &all, target, player).0
    }
}

/// Attractor to `target` inside the subgame `within`. Returns the set and,
/// for `player`'s nodes that joined, the successor used to get closer:
/// the lowest-index successor already attracted when the node joined.
fn attract(
    g: &ParityGame,
    pred: &[Vec<usize>],
    within: &BitSet,
    target: &BitSet,
    player: Player,
) -> (BitSet, Vec<(usize, usize)>) {
    let mut attr = target.clone();
    attr.intersect_with(within);
    let mut strategy = Vec::new();
    let mut count: HashMap<usize, usize> = HashMap::new();
    let mut queue: Vec<usize> = attr.iter().collect();
    let mut head = 0;
    while head < queue.len() {
        let w = queue[head];
        head += 1;
        for &v in &pred[w] {
            if !within.contains(v) || attr.contains(v) {
                continue;
            }
            let joins = if g.owners[v] == player {
                let to = g.succ[v]
                    .iter()
                    .copied()
                    .filter(|&x| attr.contains(x))
                    .min()
                    .unwrap();
                strategy.push((v, to));
                true
            } else {
                let left = count
                    .entry(v)
                    .or_insert_with(|| g.succ[v].iter().filter(|&&x| within.contains(x)).count());
                *left -= 1;
                *left == 0
            };
            if joins {
                attr.insert(v);
                queue.push(v);
            }
        }
    }
    (attr, strategy)
}

/// Winning regions and a positional strategy for each winner on its
/// region: `strategy[v]` is the chosen successor when `v`'s owner wins `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySolution {
    pub even: BitSet,
    pub odd: BitSet,
    pub strategy: Vec<Option<usize>>,
}

impl ParitySolution {
    pub fn winner(&self, v: usize) -> Player {
        if self.even.contains(v) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn region(&self, p: Player) -> &BitSet {
        match p {
            Player::Even => &self.even,
            Player::Odd => &self.odd,
        }
    }
}

struct Sub {
    win: [BitSet; 2],
}

fn idx(p: Player) -> usize {
    match p {
        Player::Even => 0,
        Player::Odd => 1,
    }
}

/// Zielonka's recursive algorithm.
pub fn solve(g: &ParityGame) -> ParitySolution {
    let pred = g.predecessors();
    let mut strategy = vec![None; g.len()];
    let all = BitSet::full(g.len());
    let sub = zielonka(g, &pred, &all, &mut strategy);
    let [even, odd] = sub.win;
    ParitySolution { even, odd, strategy }
}

fn zielonka(g: &ParityGame, pred: &[Vec<usize>], mask: &BitSet, strategy: &mut [Option<usize>]) -> Sub {
    let n = g.len();
    if mask.is_empty() {
        return Sub { win: [BitSet::new(n), BitSet::new(n)] };
    }
    let p = mask.iter().map(|v| g.priorities[v]).min().unwrap();
    let alpha = Player::of_priority(p);
    let top: BitSet = mask.iter().filter(|&v| g.priorities[v] == p).collect_with(n);
    let (a, a_strat) = attract(g, pred, mask, &top, alpha);
    let mut rest = mask.clone();
    rest.difference_with(&a);
    let sub = zielonka(g, pred, &rest, strategy);
    if sub.win[idx(alpha.opponent())].is_empty() {
        for (v, to) in a_strat {
            strategy[v] = Some(to);
        }
        for v in top.iter() {
            if g.owners[v] == alpha {
                strategy[v] = g.succ[v].iter().copied().filter(|&w| mask.contains(w)).min();
            }
        }
        let mut win = [BitSet::new(n), BitSet::new(n)];
        win[idx(alpha)] = mask.clone();
        return Sub { win };
    }
    let (b, b_strat) = attract(g, pred, mask, &sub.win[idx(alpha.opponent())], alpha.opponent());
    for (v, to) in b_strat {
        strategy[v] = Some(to);
    }
    let mut rest = mask.clone();
    rest.difference_with(&b);
    let mut sub2 = zielonka(g, pred, &rest, strategy);
    sub2.win[idx(alpha.opponent())].union_with(&b);
    sub2
}

trait CollectWith {
    fn collect_with(self, n: usize) -> BitSet;
}

impl<I: Iterator<Item = usize>> CollectWith for I {
    fn collect_with(self, n: usize) -> BitSet {
        let mut b = BitSet::new(n);
        for v in self {
            b.insert(v);
        }
        b
    }
}

/// Checks that `strategy` wins for `player` from every node of `region`:
/// in the graph left after fixing it, no cycle reachable from the region
/// has a least priority favouring the opponent.
pub fn strategy_is_winning(g: &ParityGame, region: &BitSet, strategy: &[Option<usize>], player: Player) -> bool {
    let n = g.len();
    let succ_of = |v: usize| -> Vec<usize> {
        if g.owners[v] == player {
            strategy[v].into_iter().collect()
        } else {
            g.succ[v].clone()
        }
    };
    for v in region.iter() {
        if g.owners[v] == player {
            match strategy[v] {
                Some(w) if g.succ[v].contains(&w) && region.contains(w) => {}
                _ => return false,
            }
        }
    }
    // Every state reachable from the region stays in it; look for a bad
    // cycle: for each opponent-favourable priority q, a cycle through a
    // q-node among nodes of priority >= q.
    let mut reach = region.clone();
    let mut stack: Vec<usize> = region.iter().collect();
    while let Some(v) = stack.pop() {
        for w in succ_of(v) {
            if reach.insert(w) {
                stack.push(w);
            }
        }
    }
    if !reach.is_subset(region) {
        return false;
    }
    let mut prios: Vec<u32> = reach.iter().map(|v| g.priorities[v]).collect();
    prios.sort_unstable();
    prios.dedup();
    for q in prios.into_iter().filter(|&q| Player::of_priority(q) != player) {
        let allowed: Vec<bool> = (0..n).map(|v| reach.contains(v) && g.priorities[v] >= q).collect();
        let sccs = crate::graph::tarjan(n, |v| {
            if allowed[v] {
                succ_of(v).into_iter().filter(|&w| allowed[w]).collect()
            } else {
                Vec::new()
            }
        });
        for comp in sccs {
            if !allowed[comp[0]] {
                continue;
            }
            let cyclic = comp.len() > 1 || succ_of(comp[0]).contains(&comp[0]);
            if cyclic && comp.iter().any(|&v| g.priorities[v] == q) {
                return false;
            }
        }
    }
    true
}

/// Default node limit for exhaustive strategy enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Iterates over all positional strategies of one player as successor
/// choices, odometer style.
struct Profiles<'a> {
    g: &'a ParityGame,
    nodes: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl<'a> Profiles<'a> {
    fn new(g: &'a ParityGame, p: Player) -> Self {
        let nodes: Vec<usize> = (0..g.len()).filter(|&v| g.owners[v] == p).collect();
        let digits = vec![0; nodes.len()];
        Profiles { g, nodes, digits, done: false }
    }

    fn current(&self, choice: &mut [usize]) {
        for (i, &v) in self.nodes.iter().enumerate() {
            choice[v] = self.g.succ[v][self.digits[i]];
        }
    }

    fn advance(&mut self) {
        for i in 0..self.nodes.len() {
            self.digits[i] += 1;
            if self.digits[i] < self.g.succ[self.nodes[i]].len() {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }

    fn count(&self) -> u128 {
        self.nodes.iter().map(|&v| self.g.succ[v].len() as u128).product()
    }
}

/// Winner of the unique play from each node when every node's move is
/// given by `choice`.
fn profile_outcomes(g: &ParityGame, choice: &[usize]) -> Vec<Player> {
    let n = g.len();
    let mut out = vec![None; n];
    for v in 0..n {
        if out[v].is_some() {
            continue;
        }
        let mut path = Vec::new();
        let mut pos = vec![usize::MAX; n];
        let mut x = v;
        let verdict = loop {
            if let Some(p) = out[x] {
                break p;
            }
            if pos[x] != usize::MAX {
                let m = path[pos[x]..].iter().map(|&y| g.priorities[y]).min().unwrap();
                break Player::of_priority(m);
            }
            pos[x] = path.len();
            path.push(x);
            x = choice[x];
        };
        for y in path {
            out[y] = Some(verdict);
        }
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// Exact regions by enumerating positional strategies of both players.
/// Even's region is `∃σ ∀τ`, Odd's region `∃τ ∀σ`; both are computed so
/// that determinacy can be checked by the caller.
pub fn brute_force_solve(g: &ParityGame) -> Result<(BitSet, BitSet)> {
    brute_force_solve_limited(g, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_solve_limited(g: &ParityGame, limit: usize) -> Result<(BitSet, BitSet)> {
    if g.len() > limit {
        return Err(Error::TooLarge(format!("{} nodes exceed the brute-force limit of {limit}", g.len())));
    }
    g.validate()?;
    let n = g.len();
    let mut regions = [BitSet::new(n), BitSet::new(n)];
    for me in [Player::Even, Player::Odd] {
        let mut mine = Profiles::new(g, me);
        let mut choice = vec![0; n];
        while !mine.done {
            mine.current(&mut choice);
            let mut all_win = vec![true; n];
            let mut theirs = Profiles::new(g, me.opponent());
            while !theirs.done {
                theirs.current(&mut choice);
                for (v, p) in profile_outcomes(g, &choice).into_iter().enumerate() {
                    all_win[v] &= p == me;
                }
                theirs.advance();
            }
            for v in (0..n).filter(|&v| all_win[v]) {
                regions[idx(me)].insert(v);
            }
            mine.advance();
        }
    }
    let [even, odd] = regions;
    Ok((even, odd))
}

/// Replays `strategy` against every positional strategy of the opponent
/// and reports whether `player` wins from every node of `region`.
pub fn strategy_wins_exhaustively(
    g: &ParityGame,
    region: &BitSet,
    strategy: &[Option<usize>],
    player: Player,
    limit: usize,
) -> Result<bool> {
    let theirs = Profiles::new(g, player.opponent());
    if theirs.count() > limit as u128 {
        return Err(Error::TooLarge(format!("{} opponent strategies exceed {limit}", theirs.count())));
    }
    let mut choice = vec![0; g.len()];
    for v in 0..g.len() {
        if g.owners[v] == player {
            match strategy[v] {
                Some(w) => choice[v] = w,
                None if region.contains(v) => return Ok(false),
                None => choice[v] = g.succ[v][0],
            }
        }
    }
    let mut theirs = theirs;
    while !theirs.done {
        theirs.current(&mut choice);
        let out = profile_outcomes(g, &choice);
        if region.iter().any(|v| out[v] != player) {
            return Ok(false);
        }
        theirs.advance();
    }
    Ok(true)
}

impl GameGraph for ParityGame {
    fn num_states(&self) -> usize {
        self.len()
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
        match self.owners[s] {
            Player::Even => NodeShape::Ellipse,
            Player::Odd => NodeShape::Box,
        }
    }
    fn start_state(&self) -> Option<StateId> {
        self.start
    }
}

pub fn parse_pg(text: &str) -> Result<ParityGame> {
    let mut it = lines(text);
    expect_header(&mut it, "pg")?;
    let mut g = ParityGame::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut start = None;
    for (line, t) in it {
        match t[0] {
            "node" => {
                if t.len() < 2 {
                    return Err(Error::parse(line, "`node` expects an id"));
                }
                let a = attributes(line, &t[2..], &["owner", "prio"])?;
                let owner = match a[0] {
                    "even" => Player::Even,
                    "odd" => Player::Odd,
                    o => return Err(Error::parse(line, format!("unknown owner `{o}`"))),
                };
                if index.contains_key(t[1]) {
                    return Err(Error::parse(line, format!("duplicate node id `{}`", t[1])));
                }
                index.insert(t[1].to_owned(), g.add_node(t[1], owner, parse_u32(line, a[1])?));
            }
            "succ" => {
                arity(line, &t, 3)?;
                edges.push((line, t[1].to_owned(), t[2].to_owned()));
            }
            "start" => {
                arity(line, &t, 2)?;
                start = Some((line, t[1].to_owned()));
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    let lookup = |line: usize, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::parse(line, format!("unknown node `{name}`")))
    };
    for (line, a, b) in edges {
        let (a, b) = (lookup(line, &a)?, lookup(line, &b)?);
        g.add_edge(a, b);
    }
    if let Some((line, s)) = start {
        g.start = Some(lookup(line, &s)?);
    }
    g.validate()?;
    Ok(g)
}

pub fn serialize_pg(g: &ParityGame) -> String {
    let mut out = String::from("pg\n");
    for v in 0..g.len() {
        writeln!(out, "node {} owner={} prio={}", g.names[v], g.owners[v].as_str(), g.priorities[v]).unwrap();
    }
    for v in 0..g.len() {
        for &w in &g.succ[v] {
            writeln!(out, "succ {} {}", g.names[v], g.names[w]).unwrap();
        }
    }
    if let Some(s) = g.start {
        writeln!(out, "start {}", g.names[s]).unwrap();
    }
    out
}

/// Regions and strategies in a stable, human-readable form.
pub fn format_solution(g: &ParityGame, sol: &ParitySolution) -> String {
    let names = |b: &BitSet| b.iter().map(|v| g.names[v].as_str()).collect::<Vec<_>>().join(" ");
    let mut out = format!("even: {}\nodd: {}\n", names(&sol.even), names(&sol.odd));
    for v in 0..g.len() {
        if sol.winner(v) == g.owners[v] {
            if let Some(w) = sol.strategy[v] {
                writeln!(out, "strategy {} {}", g.names[v], g.names[w]).unwrap();
            }
        }
    }
    out
}
