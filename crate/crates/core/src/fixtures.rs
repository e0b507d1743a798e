//! Small reference games used by tests, benchmarks and documentation.
//!
//! * `G1`: the cycle `u -a-> v -> w -> u` with `p(u) = 0`; player 1 wins
//!   with the constant strategy.
//! * `G2`: the same cycle with `p(u) = 1`; every play is odd.
//! * `G3`: from `u`, action `a` leads through `va`/`wa` (priority 0 at
//!   `wa`) and `b` through `vb`/`wb` (priority 1 at `wb`). The two branches
//!   share observations, so player 1 must commit to `a`.
//!
//! [`gadget_fixture`] isolates one probabilistic state `s` of a chosen
//! priority, with a fair coin into the player-1 states `u` and `x`.

use crate::model::text::parse_posg;
use crate::model::Posg;

pub const G1: &str = "\
posg
action a
state u kind=p1 obs=oU prio=0
state v kind=p2 obs=oV prio=1
state w kind=prob obs=oW prio=1
start u
trans u a v
edge v w
pdist w u 1
";

pub const G2: &str = "\
posg
action a
state u kind=p1 obs=oU prio=1
state v kind=p2 obs=oV prio=1
state w kind=prob obs=oW prio=1
start u
trans u a v
edge v w
pdist w u 1
";

pub const G3: &str = "\
posg
action a
action b
state u kind=p1 obs=oU prio=2
state va kind=p2 obs=oV prio=2
state vb kind=p2 obs=oV prio=2
state wa kind=prob obs=oW prio=0
state wb kind=prob obs=oW prio=1
start u
trans u a va
trans u b vb
edge va wa
edge vb wb
pdist wa u 1
pdist wb u 1
";

pub fn g1() -> Posg {
    parse_posg(G1).expect("fixture parses")
}

pub fn g2() -> Posg {
    parse_posg(G2).expect("fixture parses")
}

pub fn g3() -> Posg {
    parse_posg(G3).expect("fixture parses")
}

pub fn gadget_fixture(p: u32) -> Posg {
    let text = format!(
        "posg
action a
state u kind=p1 obs=oU prio=0
state x kind=p1 obs=oU prio=1
state v kind=p2 obs=oV prio=1
state s kind=prob obs=oS prio={p}
start u
trans u a v
trans x a v
edge v s
pdist s u 1/2
pdist s x 1/2
"
    );
    parse_posg(&text).expect("fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for g in [g1(), g2(), g3()] {
            assert!(g.validate().is_empty());
        }
    }
}
