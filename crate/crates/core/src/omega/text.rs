//! Debug text format for word automata:
//!
//! ```text
//! npw            # or upw, dpw
//! letter a
//! state q0 prio=0
//! init q0
//! trans q0 a q0
//! ```

use std::collections::HashMap;
use std::fmt::Write;

use super::{AnyAutomaton, Dpw, Npw, Structure, Upw};
use crate::model::text::{arity, attributes, lines, parse_u32};
use crate::{Error, Result};

pub fn parse_automaton(text: &str) -> Result<AnyAutomaton> {
    let mut it = lines(text);
    let kind = match it.next() {
        Some((_, t)) if t.len() == 1 && ["npw", "upw", "dpw"].contains(&t[0]) => t[0],
        Some((line, _)) => return Err(Error::parse(line, "expected header `npw`, `upw` or `dpw`")),
        None => return Err(Error::parse(1, "empty input")),
    };
    let mut s = Structure { names: Vec::new(), letters: Vec::new(), initial: Vec::new(), delta: Vec::new(), priorities: Vec::new() };
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut trans = Vec::new();
    let mut inits = Vec::new();
    let mut last = 1;
    for (line, t) in it {
        last = line;
        match t[0] {
            "letter" => {
                arity(line, &t, 2)?;
                if s.letters.iter().any(|l| l == t[1]) {
                    return Err(Error::parse(line, format!("duplicate letter `{}`", t[1])));
                }
                s.letters.push(t[1].to_owned());
            }
            "state" => {
                if t.len() < 2 {
                    return Err(Error::parse(line, "`state` expects an id"));
                }
                let a = attributes(line, &t[2..], &["prio"])?;
                if index.insert(t[1].to_owned(), s.names.len()).is_some() {
                    return Err(Error::parse(line, format!("duplicate state id `{}`", t[1])));
                }
                s.names.push(t[1].to_owned());
                s.priorities.push(parse_u32(line, a[0])?);
            }
            "init" => {
                arity(line, &t, 2)?;
                inits.push((line, t[1].to_owned()));
            }
            "trans" => {
                arity(line, &t, 4)?;
                trans.push((line, t[1].to_owned(), t[2].to_owned(), t[3].to_owned()));
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    let state = |line: usize, n: &str| {
        index.get(n).copied().ok_or_else(|| Error::parse(line, format!("unknown state `{n}`")))
    };
    let k = s.letters.len();
    s.delta = vec![vec![Vec::new(); k]; s.names.len()];
    for (line, name) in &inits {
        s.initial.push(state(*line, name)?);
    }
    for (line, from, letter, to) in &trans {
        let a = s
            .letters
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::parse(*line, format!("unknown letter `{letter}`")))?;
        let (f, t) = (state(*line, from)?, state(*line, to)?);
        if !s.delta[f][a].contains(&t) {
            s.delta[f][a].push(t);
        }
    }
    Ok(match kind {
        "npw" => AnyAutomaton::Npw(Npw(s)),
        "upw" => AnyAutomaton::Upw(Upw(s)),
        _ => {
            if s.initial.len() != 1 {
                return Err(Error::parse(last, "a dpw needs exactly one init state"));
            }
            let delta = s
                .delta
                .iter()
                .map(|row| match row.as_slice() {
                    rows if rows.iter().all(|r| r.len() == 1) => Ok(rows.iter().map(|r| r[0]).collect()),
                    _ => Err(Error::parse(last, "dpw transitions must be total and single-valued")),
                })
                .collect::<Result<Vec<Vec<usize>>>>()?;
            AnyAutomaton::Dpw(Dpw { names: s.names, letters: s.letters, initial: s.initial[0], delta, priorities: s.priorities })
        }
    })
}

fn write_structure(out: &mut String, header: &str, s: &Structure) {
    writeln!(out, "{header}").unwrap();
    for l in &s.letters {
        writeln!(out, "letter {l}").unwrap();
    }
    for (q, n) in s.names.iter().enumerate() {
        writeln!(out, "state {n} prio={}", s.priorities[q]).unwrap();
    }
    for &q in &s.initial {
        writeln!(out, "init {}", s.names[q]).unwrap();
    }
    for (q, row) in s.delta.iter().enumerate() {
        for (a, ts) in row.iter().enumerate() {
            for &t in ts {
                writeln!(out, "trans {} {} {}", s.names[q], s.letters[a], s.names[t]).unwrap();
            }
        }
    }
}

pub fn serialize_automaton(a: &AnyAutomaton) -> String {
    let mut out = String::new();
    match a {
        AnyAutomaton::Npw(n) => write_structure(&mut out, "npw", &n.0),
        AnyAutomaton::Upw(u) => write_structure(&mut out, "upw", &u.0),
        AnyAutomaton::Dpw(d) => {
            let s = Structure {
                names: d.names.clone(),
                letters: d.letters.clone(),
                initial: vec![d.initial],
                delta: d.delta.iter().map(|row| row.iter().map(|&t| vec![t]).collect()).collect(),
                priorities: d.priorities.clone(),
            };
            write_structure(&mut out, "dpw", &s);
        }
    }
    out
}
