use super::canonical_observations;
use crate::{Error, Result};

/// Finite-memory observation-based strategy: memory, initial memory,
/// update on each observation and the action chosen in each memory.
///
/// Observations are kept sorted so that two transducers over the same
/// alphabet index them identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTransducer {
    pub memory: Vec<String>,
    pub init: usize,
    pub observations: Vec<String>,
    /// `upd[m * observations.len() + o]`.
    pub upd: Vec<usize>,
    pub nxt: Vec<String>,
}

impl StrategyTransducer {
    /// Builds a transducer from tables, checking totality and ranges.
    /// `upd` is indexed by the position of the observation in the given
    /// `observations` list, which is re-sorted internally.
    pub fn new(
        memory: Vec<String>,
        init: usize,
        observations: Vec<String>,
        upd: Vec<usize>,
        nxt: Vec<String>,
    ) -> Result<Self> {
        let k = observations.len();
        let n = memory.len();
        if n == 0 {
            return Err(Error::Invalid(vec!["strategy has no memory".into()]));
        }
        if init >= n || upd.len() != n * k || nxt.len() != n || upd.iter().any(|&m| m >= n) {
            return Err(Error::Invalid(vec!["upd not total".into()]));
        }
        let sorted = canonical_observations(observations.iter().cloned());
        if sorted.len() != k {
            return Err(Error::Invalid(vec!["duplicate observation in strategy".into()]));
        }
        let perm: Vec<usize> = sorted
            .iter()
            .map(|o| observations.iter().position(|x| x == o).unwrap())
            .collect();
        let mut table = vec![0; n * k];
        for m in 0..n {
            for (new_o, &old_o) in perm.iter().enumerate() {
                table[m * k + new_o] = upd[m * k + old_o];
            }
        }
        Ok(StrategyTransducer { memory, init, observations: sorted, upd: table, nxt })
    }

    /// One-memory strategy always playing `action`.
    pub fn constant(observations: &[String], action: &str) -> Self {
        let observations = canonical_observations(observations.iter().cloned());
        StrategyTransducer {
            memory: vec!["m0".into()],
            init: 0,
            upd: vec![0; observations.len()],
            observations,
            nxt: vec![action.to_owned()],
        }
    }

    pub fn size(&self) -> usize {
        self.memory.len()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn obs_index(&self, o: &str) -> Result<usize> {
        self.observations
            .binary_search_by(|x| x.as_str().cmp(o))
            .map_err(|_| Error::UnknownObservation(o.to_owned()))
    }

    pub fn update(&self, m: usize, o: usize) -> usize {
        self.upd[m * self.observations.len() + o]
    }

    /// Memory reached after folding the update over `kappa` from `init`.
    pub fn memory_after<S: AsRef<str>>(&self, kappa: &[S]) -> Result<usize> {
        let mut m = self.init;
        for o in kappa {
            m = self.update(m, self.obs_index(o.as_ref())?);
        }
        Ok(m)
    }

    /// Action chosen after the observation sequence `kappa`.
    pub fn action_for<S: AsRef<str>>(&self, kappa: &[S]) -> Result<&str> {
        Ok(&self.nxt[self.memory_after(kappa)?])
    }

    /// Resolves observations and actions against a game's alphabets.
    pub fn align(&self, observations: &[String], actions: &[String]) -> Result<AlignedStrategy> {
        if self.observations.as_slice() != observations {
            return Err(Error::AlphabetMismatch(format!(
                "strategy observations {{{}}} differ from game observations {{{}}}",
                self.observations.join(", "),
                observations.join(", ")
            )));
        }
        let nxt = self
            .nxt
            .iter()
            .map(|a| {
                actions
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("unknown action `{a}`")))
            })
            .collect::<Result<_>>()?;
        Ok(AlignedStrategy { k: observations.len(), init: self.init, upd: self.upd.clone(), nxt })
    }

    /// Drops memory states unreachable from `init`, keeping their order.
    pub fn prune(&self) -> Self {
        let k = self.observations.len();
        let n = self.memory.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(m) = stack.pop() {
            for o in 0..k {
                let t = self.update(m, o);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut keep = Vec::new();
        for m in (0..n).filter(|&m| seen[m]) {
            remap[m] = keep.len();
            keep.push(m);
        }
        StrategyTransducer {
            memory: keep.iter().map(|&m| self.memory[m].clone()).collect(),
            init: remap[self.init],
            observations: self.observations.clone(),
            upd: keep.iter().flat_map(|&m| (0..k).map(move |o| (m, o))).map(|(m, o)| remap[self.update(m, o)]).collect(),
            nxt: keep.iter().map(|&m| self.nxt[m].clone()).collect(),
        }
    }

    /// Reachable part with memory states merged when they choose the same
    /// actions after every observation sequence. Each class keeps the
    /// name of its first member.
    pub fn minimize(&self) -> Self {
        let t = self.prune();
        let (n, k) = (t.size(), t.observations.len());
        let mut class: Vec<usize> = {
            let mut names: Vec<&String> = t.nxt.iter().collect();
            names.sort();
            names.dedup();
            t.nxt.iter().map(|a| names.binary_search(&a).unwrap()).collect()
        };
        loop {
            let mut index = std::collections::HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|m| {
                    let sig: Vec<usize> =
                        std::iter::once(class[m]).chain((0..k).map(|o| class[t.update(m, o)])).collect();
                    let len = index.len();
                    *index.entry(sig).or_insert(len)
                })
                .collect();
            let stable = index.len() == class.iter().collect::<std::collections::HashSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let classes = class.iter().max().map_or(0, |c| c + 1);
        let mut rep = vec![usize::MAX; classes];
        for m in 0..n {
            if rep[class[m]] == usize::MAX {
                rep[class[m]] = m;
            }
        }
        StrategyTransducer {
            memory: rep.iter().map(|&m| t.memory[m].clone()).collect(),
            init: class[t.init],
            observations: t.observations.clone(),
            upd: rep.iter().flat_map(|&m| (0..k).map(move |o| (m, o))).map(|(m, o)| class[t.update(m, o)]).collect(),
            nxt: rep.iter().map(|&m| t.nxt[m].clone()).collect(),
        }
    }
}

/// Index-resolved form of a transducer for a particular game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignedStrategy {
    pub k: usize,
    pub init: usize,
    pub upd: Vec<usize>,
    pub nxt: Vec<usize>,
}

impl AlignedStrategy {
    pub fn size(&self) -> usize {
        self.nxt.len()
    }

    pub fn update(&self, m: usize, o: usize) -> usize {
        self.upd[m * self.k + o]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs() -> Vec<String> {
        ["oU", "oV", "oW"].map(String::from).to_vec()
    }

    fn alternator() -> StrategyTransducer {
        StrategyTransducer::new(
            vec!["m0".into(), "m1".into()],
            0,
            obs(),
            vec![1, 1, 1, 0, 0, 0],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn constant_ignores_history() {
        let t = StrategyTransducer::constant(&obs(), "a");
        assert_eq!(t.action_for(&["oU", "oW", "oV"]).unwrap(), "a");
        assert_eq!(t.action_for(&["oU"]).unwrap(), "a");
    }

    #[test]
    fn alternator_folds() {
        let t = alternator();
        assert_eq!(t.action_for(&["oU"]).unwrap(), "b");
        assert_eq!(t.action_for(&["oU", "oV", "oW", "oU"]).unwrap(), "a");
    }

    #[test]
    fn unknown_observation_is_an_error() {
        let t = alternator();
        assert!(matches!(t.action_for(&["oX"]), Err(Error::UnknownObservation(_))));
    }

    #[test]
    fn observation_order_is_canonical() {
        let t = StrategyTransducer::new(
            vec!["m0".into(), "m1".into()],
            0,
            vec!["z".into(), "a".into()],
            vec![1, 0, 1, 1],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        assert_eq!(t.observations, vec!["a", "z"]);
        assert_eq!(t.action_for(&["z"]).unwrap(), "y");
        assert_eq!(t.action_for(&["a"]).unwrap(), "x");
    }

    #[test]
    fn prune_drops_unreachable_memory() {
        let t = StrategyTransducer::new(
            vec!["m0".into(), "m1".into()],
            0,
            obs(),
            vec![0, 0, 0, 1, 1, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let p = t.prune();
        assert_eq!(p.size(), 1);
        assert_eq!(p.nxt, vec!["a"]);
    }

    #[test]
    fn minimize_merges_equivalent_memory() {
        // Two copies of the alternator collapse to one.
        let t = StrategyTransducer::new(
            ["p", "q", "r", "s"].map(String::from).to_vec(),
            0,
            obs(),
            vec![1, 1, 1, 2, 2, 2, 3, 3, 3, 0, 0, 0],
            ["a", "b", "a", "b"].map(String::from).to_vec(),
        )
        .unwrap();
        let m = t.minimize();
        assert_eq!(m.size(), 2);
        for kappa in [vec![], vec!["oU"], vec!["oU", "oV"], vec!["oW", "oW", "oW"]] {
            assert_eq!(m.action_for(&kappa).unwrap(), t.action_for(&kappa).unwrap());
        }
        assert_eq!(StrategyTransducer::constant(&obs(), "a").minimize().size(), 1);
    }
}
