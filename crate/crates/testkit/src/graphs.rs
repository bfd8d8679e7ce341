//! Random graphs and brute-force graph oracles.

use std::collections::BTreeSet;

use rand::Rng;

/// A random graph on `n` nodes where every node is reachable from node 0.
/// Nodes may have zero to three successors.
pub fn random_cfg(rng: &mut impl Rng, n: usize) -> Vec<Vec<usize>> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 1..n {
        let p = rng.gen_range(0..v);
        succ[p].push(v);
    }
    for u in 0..n {
        for _ in 0..rng.gen_range(0..2) {
            let v = rng.gen_range(0..n);
            if !succ[u].contains(&v) {
                succ[u].push(v);
            }
        }
    }
    succ
}

/// Nodes reachable from `from` without entering `avoid`.
pub fn reachable_avoiding(succ: &[Vec<usize>], from: usize, avoid: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    if Some(from) == avoid {
        return seen;
    }
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        for &v in &succ[u] {
            if !seen[v] && Some(v) != avoid {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// `dom[a][b]`: every path from 0 to `b` passes through `a`. A node `a`
/// dominates `b` iff removing `a` disconnects `b` from the entry.
pub fn dominance_matrix(succ: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = succ.len();
    let reach = reachable_avoiding(succ, 0, None);
    (0..n)
        .map(|a| {
            let without = reachable_avoiding(succ, 0, Some(a));
            (0..n).map(|b| reach[b] && (a == b || !without[b])).collect()
        })
        .collect()
}

/// Immediate dominators from the dominance matrix: the strict dominator of
/// `b` dominated by all other strict dominators of `b`.
pub fn brute_idoms(succ: &[Vec<usize>]) -> Vec<Option<usize>> {
    let dom = dominance_matrix(succ);
    let n = succ.len();
    (0..n)
        .map(|b| {
            if !dom[b][b] {
                return None;
            }
            if b == 0 {
                return Some(0);
            }
            let strict: Vec<usize> = (0..n).filter(|&a| a != b && dom[a][b]).collect();
            strict.iter().copied().find(|&c| strict.iter().all(|&a| dom[a][c]))
        })
        .collect()
}

/// Natural loops by definition: for each back edge `u -> h` (h dominates u),
/// `{h}` plus every node that reaches `u` without passing `h`. Loops sharing
/// a header are merged.
pub fn brute_loops(succ: &[Vec<usize>]) -> Vec<(usize, BTreeSet<usize>)> {
    let n = succ.len();
    let dom = dominance_matrix(succ);
    let mut out: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    for h in 0..n {
        let mut body = BTreeSet::new();
        for u in 0..n {
            if !(succ[u].contains(&h) && dom[h][u]) {
                continue;
            }
            body.insert(h);
            for x in 0..n {
                if x != h && dom[0][x] && reachable_avoiding(succ, x, Some(h))[u] {
                    body.insert(x);
                }
            }
        }
        if !body.is_empty() {
            out.push((h, body));
        }
    }
    out
}

/// Irreducible iff some simple cycle reachable from the entry has no member
/// dominating all of its members. Enumerates simple cycles; small graphs only.
pub fn brute_irreducible(succ: &[Vec<usize>]) -> bool {
    let n = succ.len();
    let reach = reachable_avoiding(succ, 0, None);
    let dom = dominance_matrix(succ);
    fn extend(
        succ: &[Vec<usize>],
        start: usize,
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        check: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let u = *path.last().unwrap();
        for &v in &succ[u] {
            if v == start {
                if check(path) {
                    return true;
                }
            } else if v > start && !on[v] {
                path.push(v);
                on[v] = true;
                let found = extend(succ, start, path, on, check);
                on[v] = false;
                path.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    let mut check = |cycle: &[usize]| !cycle.iter().any(|&h| cycle.iter().all(|&x| dom[h][x]));
    for s in 0..n {
        if !reach[s] {
            continue;
        }
        let mut on = vec![false; n];
        on[s] = true;
        if extend(succ, s, &mut vec![s], &mut on, &mut check) {
            return true;
        }
    }
    false
}

/// Strongly connected components by mutual reachability, each sorted, the
/// list sorted by smallest member.
pub fn brute_sccs(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|u| reachable_avoiding(succ, u, None)).collect();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for u in 0..n {
        if assigned[u] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&v| reach[u][v] && reach[v][u]).collect();
        for &v in &comp {
            assigned[v] = true;
        }
        out.push(comp);
    }
    out
}
