//! Line-oriented text formats for games and strategies.
//!
//! Every format starts with a header word, `#` starts a comment, and
//! tokens are separated by whitespace. Serializers emit states in index
//! order so that output is reproducible.

use std::collections::HashMap;
use std::fmt::Write;

use num_traits::Zero;

use super::{Kind, Owner3, Posg, PosgBuilder, Rational, StrategyTransducer, TurnBasedBuilder, TurnBasedGame};
use crate::{Error, Result};

/// Non-empty lines with comments stripped, paired with 1-based numbers.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub(crate) fn expect_header<'a>(
    it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    header: &str,
) -> Result<()> {
    match it.next() {
        Some((_, t)) if t == [header] => Ok(()),
        Some((line, _)) => Err(Error::parse(line, format!("expected header `{header}`"))),
        None => Err(Error::parse(1, format!("empty input, expected header `{header}`"))),
    }
}

pub(crate) fn arity(line: usize, toks: &[&str], n: usize) -> Result<()> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(Error::parse(line, format!("`{}` expects {} arguments, got {}", toks[0], n - 1, toks.len() - 1)))
    }
}

/// Splits `key=value` attributes, requiring exactly the given keys.
pub(crate) fn attributes<'a>(line: usize, toks: &[&'a str], keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut found: Vec<Option<&str>> = vec![None; keys.len()];
    for t in toks {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got `{t}`")))?;
        let i = keys
            .iter()
            .position(|x| *x == k)
            .ok_or_else(|| Error::parse(line, format!("unknown attribute `{k}`")))?;
        if found[i].replace(v).is_some() {
            return Err(Error::parse(line, format!("attribute `{k}` given twice")));
        }
    }
    found
        .into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| Error::parse(line, format!("missing attribute `{k}`"))))
        .collect()
}

pub(crate) fn parse_u32(line: usize, s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::parse(line, format!("expected a nonnegative integer, got `{s}`")))
}

fn parse_rational(line: usize, s: &str) -> Result<Rational> {
    let bad = || Error::parse(line, format!("expected a probability num/den, got `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<u64>().map_err(|_| bad())?, d.parse::<u64>().map_err(|_| bad())?),
        None => (s.parse::<u64>().map_err(|_| bad())?, 1),
    };
    if d.is_zero() {
        return Err(Error::parse(line, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Re-tags builder errors with the line that triggered them.
fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Invalid(msgs) => Error::parse(line, msgs.join("; ")),
        other => other,
    }
}

pub fn parse_posg(text: &str) -> Result<Posg> {
    let mut it = lines(text);
    expect_header(&mut it, "posg")?;
    let mut b = PosgBuilder::new();
    let mut last = 1;
    for (line, t) in it {
        last = line;
        let e = at(line);
        match t[0] {
            "action" => {
                arity(line, &t, 2)?;
                b.action(t[1]).map_err(e)?;
            }
            "state" => {
                if t.len() < 2 {
                    return Err(Error::parse(line, "`state` expects an id"));
                }
                let a = attributes(line, &t[2..], &["kind", "obs", "prio"])?;
                let kind = match a[0] {
                    "p1" => Kind::P1,
                    "p2" => Kind::P2,
                    "prob" => Kind::Prob,
                    k => return Err(Error::parse(line, format!("unknown kind `{k}`"))),
                };
                b.state(t[1], kind, a[1], parse_u32(line, a[2])?).map_err(e)?;
            }
            "start" => {
                arity(line, &t, 2)?;
                b.start(t[1]).map_err(e)?;
            }
            "trans" => {
                arity(line, &t, 4)?;
                b.trans(t[1], t[2], t[3]).map_err(e)?;
            }
            "edge" => {
                arity(line, &t, 3)?;
                b.edge(t[1], t[2]).map_err(e)?;
            }
            "pdist" => {
                arity(line, &t, 4)?;
                let p = parse_rational(line, t[3])?;
                b.pdist(t[1], t[2], p).map_err(e)?;
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    b.build().map_err(at(last))
}

fn fmt_rational(p: &Rational) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

pub fn serialize_posg(g: &Posg) -> String {
    let mut out = String::from("posg\n");
    for a in &g.actions {
        writeln!(out, "action {a}").unwrap();
    }
    for s in 0..g.num_states() {
        writeln!(
            out,
            "state {} kind={} obs={} prio={}",
            g.states[s],
            g.kinds[s].as_str(),
            g.observations[g.obs[s]],
            g.priorities[s]
        )
        .unwrap();
    }
    writeln!(out, "start {}", g.states[g.start]).unwrap();
    for s in 0..g.num_states() {
        for (a, t) in g.trans[s].iter().enumerate() {
            if let Some(t) = t {
                writeln!(out, "trans {} {} {}", g.states[s], g.actions[a], g.states[*t]).unwrap();
            }
        }
    }
    for s in 0..g.num_states() {
        for &t in &g.edges[s] {
            writeln!(out, "edge {} {}", g.states[s], g.states[t]).unwrap();
        }
    }
    for s in 0..g.num_states() {
        for (t, p) in &g.dist[s] {
            writeln!(out, "pdist {} {} {}", g.states[s], g.states[*t], fmt_rational(p)).unwrap();
        }
    }
    out
}

pub fn parse_tpg(text: &str) -> Result<TurnBasedGame> {
    let mut it = lines(text);
    expect_header(&mut it, "tpg")?;
    let mut b = TurnBasedBuilder::new();
    let mut last = 1;
    for (line, t) in it {
        last = line;
        let e = at(line);
        match t[0] {
            "action" => {
                arity(line, &t, 2)?;
                b.action(t[1]).map_err(e)?;
            }
            "state" => {
                if t.len() < 2 {
                    return Err(Error::parse(line, "`state` expects an id"));
                }
                let a = attributes(line, &t[2..], &["kind", "obs", "prio"])?;
                let owner = match a[0] {
                    "p1" => Owner3::P1,
                    "p2" => Owner3::P2,
                    "p3" => Owner3::P3,
                    k => return Err(Error::parse(line, format!("unknown kind `{k}`"))),
                };
                b.state(t[1], owner, a[1], parse_u32(line, a[2])?).map_err(e)?;
            }
            "start" => {
                arity(line, &t, 2)?;
                b.start(t[1]).map_err(e)?;
            }
            "period" => {
                arity(line, &t, 2)?;
                b.period(Some(parse_u32(line, t[1])? as usize));
            }
            "trans" => {
                arity(line, &t, 4)?;
                b.trans(t[1], t[2], t[3]).map_err(e)?;
            }
            "edge" => {
                arity(line, &t, 3)?;
                b.edge(t[1], t[2]).map_err(e)?;
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    b.build().map_err(at(last))
}

pub fn serialize_tpg(g: &TurnBasedGame) -> String {
    let mut out = String::from("tpg\n");
    if let Some(k) = g.period {
        writeln!(out, "period {k}").unwrap();
    }
    for a in &g.actions {
        writeln!(out, "action {a}").unwrap();
    }
    for s in 0..g.num_states() {
        writeln!(
            out,
            "state {} kind={} obs={} prio={}",
            g.states[s],
            g.owners[s].as_str(),
            g.observations[g.obs[s]],
            g.priorities[s]
        )
        .unwrap();
    }
    writeln!(out, "start {}", g.states[g.start]).unwrap();
    for s in 0..g.num_states() {
        for (a, &t) in g.trans[s].iter().enumerate() {
            writeln!(out, "trans {} {} {}", g.states[s], g.actions[a], g.states[t]).unwrap();
        }
    }
    for s in 0..g.num_states() {
        for &t in &g.edges[s] {
            writeln!(out, "edge {} {}", g.states[s], g.states[t]).unwrap();
        }
    }
    out
}

/// Parses a strategy. Optional `action <name>` lines restrict the names
/// allowed in `next` rows; the observation alphabet is the set of
/// observations mentioned in `upd` rows.
pub fn parse_strategy(text: &str) -> Result<StrategyTransducer> {
    let mut it = lines(text);
    expect_header(&mut it, "strategy")?;
    let mut memory: Vec<String> = Vec::new();
    let mut mindex: HashMap<String, usize> = HashMap::new();
    let mut actions: Vec<String> = Vec::new();
    let mut init = None;
    let mut next: Vec<(usize, Vec<String>)> = Vec::new();
    let mut upd: Vec<(usize, Vec<String>)> = Vec::new();
    let mut last = 1;
    for (line, t) in it {
        last = line;
        let owned = || t[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match t[0] {
            "memory" => {
                arity(line, &t, 2)?;
                if mindex.insert(t[1].to_owned(), memory.len()).is_some() {
                    return Err(Error::parse(line, format!("duplicate memory id `{}`", t[1])));
                }
                memory.push(t[1].to_owned());
            }
            "action" => {
                arity(line, &t, 2)?;
                actions.push(t[1].to_owned());
            }
            "init" => {
                arity(line, &t, 2)?;
                init = Some((line, t[1].to_owned()));
            }
            "next" => {
                arity(line, &t, 3)?;
                next.push((line, owned()));
            }
            "upd" => {
                arity(line, &t, 4)?;
                upd.push((line, owned()));
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    if memory.is_empty() {
        return Err(Error::parse(last, "strategy has no memory"));
    }
    let mem = |line: usize, name: &str| {
        mindex
            .get(name)
            .copied()
            .ok_or_else(|| Error::parse(line, format!("unknown memory `{name}`")))
    };
    let (iline, iname) = init.ok_or_else(|| Error::parse(last, "missing init"))?;
    let init = mem(iline, &iname)?;

    let mut nxt: Vec<Option<String>> = vec![None; memory.len()];
    for (line, row) in &next {
        let (m, a) = (mem(*line, &row[0])?, &row[1]);
        if !actions.is_empty() && !actions.contains(a) {
            return Err(Error::parse(*line, format!("unknown action `{a}`")));
        }
        if nxt[m].replace(a.clone()).is_some() {
            return Err(Error::parse(*line, format!("duplicate next row for `{}`", memory[m])));
        }
    }
    let nxt = nxt
        .into_iter()
        .enumerate()
        .map(|(m, a)| a.ok_or_else(|| Error::parse(last, format!("next not total: no row for `{}`", memory[m]))))
        .collect::<Result<Vec<_>>>()?;

    let mut observations: Vec<String> = upd.iter().map(|(_, r)| r[1].clone()).collect();
    observations.sort();
    observations.dedup();
    let k = observations.len();
    let mut table: Vec<Option<usize>> = vec![None; memory.len() * k];
    for (line, row) in &upd {
        let (m, t) = (mem(*line, &row[0])?, mem(*line, &row[2])?);
        let o = observations.binary_search(&row[1]).unwrap();
        if table[m * k + o].replace(t).is_some() {
            return Err(Error::parse(*line, format!("duplicate upd row for `{}` on `{}`", memory[m], row[1])));
        }
    }
    let table = table
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::parse(last, "upd not total"))?;
    StrategyTransducer::new(memory, init, observations, table, nxt).map_err(at(last))
}

pub fn serialize_strategy(t: &StrategyTransducer) -> String {
    let mut out = String::from("strategy\n");
    for m in &t.memory {
        writeln!(out, "memory {m}").unwrap();
    }
    writeln!(out, "init {}", t.memory[t.init]).unwrap();
    for (m, a) in t.nxt.iter().enumerate() {
        writeln!(out, "next {} {}", t.memory[m], a).unwrap();
    }
    for m in 0..t.size() {
        for (o, oname) in t.observations.iter().enumerate() {
            writeln!(out, "upd {} {} {}", t.memory[m], oname, t.memory[t.update(m, o)]).unwrap();
        }
    }
    out
}
