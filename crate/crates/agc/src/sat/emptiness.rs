//! Language emptiness for generalized Büchi automata via SCC decomposition,
//! with lasso witness extraction.

use std::collections::VecDeque;

use crate::ltl::LassoTrace;

use super::tableau::Gba;

/// Returns a lasso accepted by the automaton, or `None` when the language is
/// empty. The witness assigns `false` to atoms a state label leaves free.
pub(crate) fn find_accepting_lasso(gba: &Gba) -> Option<LassoTrace> {
    if gba.initial.is_empty() {
        return None;
    }

    let reachable = reachable_set(gba);
    let sccs = tarjan(gba, &reachable);

    // A fair SCC contains a cycle and intersects every acceptance set.
    let fair = sccs.into_iter().find(|scc| {
        let non_trivial = scc.len() > 1 || gba.states[scc[0]].succs.contains(&scc[0]);
        non_trivial
            && gba
                .acceptance
                .iter()
                .all(|set| scc.iter().any(|s| set.contains(s)))
    })?;

    let in_fair = {
        let mut v = vec![false; gba.states.len()];
        for &s in &fair {
            v[s] = true;
        }
        v
    };

    // Shortest path from an initial state into the SCC.
    let entry_path =
        bfs_path(gba, &gba.initial, |s| in_fair[s], |_| true).expect("fair SCC is reachable");
    let entry = *entry_path.last().unwrap();

    // Closed walk from the entry point touching every acceptance set.
    let mut cycle: Vec<usize> = vec![entry];
    let mut current = entry;
    for set in &gba.acceptance {
        if cycle.iter().any(|s| set.contains(s)) {
            continue;
        }
        let target = *fair.iter().find(|s| set.contains(s)).unwrap();
        let path = bfs_path(gba, &[current], |s| s == target, |s| in_fair[s])
            .expect("SCC is strongly connected");
        cycle.extend_from_slice(&path[1..]);
        current = target;
    }
    // Close the loop with at least one step.
    let succs: Vec<usize> = gba.states[current]
        .succs
        .iter()
        .copied()
        .filter(|&s| in_fair[s])
        .collect();
    let back =
        bfs_path(gba, &succs, |s| s == entry, |s| in_fair[s]).expect("SCC is strongly connected");
    cycle.extend_from_slice(&back);
    cycle.pop(); // the trailing entry state starts the next iteration

    let mask = |s: usize| gba.states[s].pos;
    let prefix: Vec<u64> = entry_path[..entry_path.len() - 1]
        .iter()
        .map(|&s| mask(s))
        .collect();
    let loop_masks: Vec<u64> = cycle.iter().map(|&s| mask(s)).collect();
    Some(LassoTrace::from_masks(gba.aps.clone(), prefix, loop_masks))
}

fn reachable_set(gba: &Gba) -> Vec<bool> {
    let mut seen = vec![false; gba.states.len()];
    let mut queue: VecDeque<usize> = gba.initial.iter().copied().collect();
    for &s in &gba.initial {
        seen[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &t in &gba.states[s].succs {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Shortest path from any of `starts` to a state satisfying `is_goal`,
/// moving only through states allowed by `permit`. The returned path includes
/// the start state and the goal.
fn bfs_path(
    gba: &Gba,
    starts: &[usize],
    is_goal: impl Fn(usize) -> bool,
    permit: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let n = gba.states.len();
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in starts {
        if !permit(s) || seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        if is_goal(s) {
            return Some(vec![s]);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in &gba.states[s].succs {
            if seen[t] || !permit(t) {
                continue;
            }
            seen[t] = true;
            pred[t] = Some(s);
            if is_goal(t) {
                let mut path = vec![t];
                let mut cur = t;
                while let Some(p) = pred[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(t);
        }
    }
    None
}

/// Iterative Tarjan over the reachable part of the automaton; SCCs are
/// returned in a deterministic order.
fn tarjan(gba: &Gba, reachable: &[bool]) -> Vec<Vec<usize>> {
    let n = gba.states.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // (state, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if !reachable[root] || index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = gba.states[v].succs.get(*pos) {
                *pos += 1;
                if !reachable[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    sccs.push(scc);
                }
            }
        }
    }
    sccs
}
