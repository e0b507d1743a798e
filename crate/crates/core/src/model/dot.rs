use std::fmt::Write;

use super::{GameGraph, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeShape {
    Diamond,
    Box,
    Ellipse,
}

impl NodeShape {
    fn as_str(self) -> &'static str {
        match self {
            NodeShape::Diamond => "diamond",
            NodeShape::Box => "box",
            NodeShape::Ellipse => "ellipse",
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn write_nodes<G: GameGraph + ?Sized>(g: &G, states: &[StateId], out: &mut String) {
    for &s in states {
        let name = g.state_name(s);
        let label = format!("{}:{}", name, g.priority(s));
        writeln!(out, "  {} [label={}, shape={}];", quote(name), quote(&label), g.shape(s).as_str()).unwrap();
    }
    for &s in states {
        for t in g.successors(s) {
            writeln!(out, "  {} -> {};", quote(g.state_name(s)), quote(g.state_name(t))).unwrap();
        }
    }
}

/// DOT rendering of a whole game, nodes in index order.
pub fn to_dot<G: GameGraph + ?Sized>(g: &G, graph_name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(graph_name));
    if let Some(s) = g.start_state() {
        writeln!(out, "  __start [shape=point];\n  __start -> {};", quote(g.state_name(s))).unwrap();
    }
    let all: Vec<StateId> = (0..g.num_states()).collect();
    write_nodes(g, &all, &mut out);
    out.push_str("}\n");
    out
}

/// DOT rendering of the given states and every edge leaving them, in the
/// order given. Used to compare individual gadgets against references.
pub fn to_dot_subgraph<G: GameGraph + ?Sized>(g: &G, graph_name: &str, states: &[StateId]) -> String {
    let mut out = format!("digraph {} {{\n", quote(graph_name));
    write_nodes(g, states, &mut out);
    out.push_str("}\n");
    out
}
