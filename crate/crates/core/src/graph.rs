//! Graph utilities shared by the solvers and verifiers.

/// Strongly connected components of the graph on `0..n` given by `succ`,
/// in reverse topological order (sink components first). Iterative, so
/// deep graphs do not overflow the stack.
pub(crate) fn tarjan<F>(n: usize, mut succ: F) -> Vec<Vec<usize>>
where
    F: FnMut(usize) -> Vec<usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    // Frames hold a node, its successor list and the next position.
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, succ(root), 0));
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(parent) = frames.last() {
                let p = parent.0;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Forward reachability from `start`.
pub(crate) fn reachable<F>(n: usize, start: &[usize], mut succ: F) -> Vec<bool>
where
    F: FnMut(usize) -> Vec<usize>,
{
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for w in succ(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_two_cycles_and_a_bridge() {
        let adj = [vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = tarjan(4, |v| adj[v].clone());
        assert_eq!(comps, vec![vec![2, 3], vec![0, 1]]);
    }

    #[test]
    fn singleton_without_loop_is_its_own_component() {
        let adj = [vec![1], vec![]];
        assert_eq!(tarjan(2, |v| adj[v].clone()), vec![vec![1], vec![0]]);
        assert_eq!(reachable(2, &[1], |v| adj[v].clone()), vec![false, true]);
    }
}
