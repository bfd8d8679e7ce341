//! Natural loops and the irreducibility check.

use std::collections::BTreeSet;

use super::dom::{dominates, reverse_post_order};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalLoop {
    pub header: usize,
    pub body: BTreeSet<usize>,
    /// Index of the innermost enclosing loop in the forest.
    pub parent: Option<usize>,
}

/// Loops ordered outermost first (a parent always precedes its children).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoopForest {
    pub loops: Vec<NaturalLoop>,
}

impl LoopForest {
    pub fn by_header(&self, header: usize) -> Option<&NaturalLoop> {
        self.loops.iter().find(|l| l.header == header)
    }

    pub fn is_header(&self, b: usize) -> bool {
        self.by_header(b).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("edge bb{from} -> bb{to} enters a loop without passing its header")]
pub struct Irreducible {
    pub from: usize,
    pub to: usize,
}

/// Finds the natural loops of the graph reachable from block 0.
pub fn find_loops(succ: &[Vec<usize>], idom: &[Option<usize>]) -> Result<LoopForest, Irreducible> {
    let n = succ.len();
    check_reducible(succ, idom)?;
    let mut preds = vec![Vec::new(); n];
    for (b, ss) in succ.iter().enumerate() {
        if idom[b].is_none() {
            continue;
        }
        for &s in ss {
            preds[s].push(b);
        }
    }
    let mut headers: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    for h in 0..n {
        let latches: Vec<usize> =
            preds[h].iter().copied().filter(|&u| dominates(idom, h, u)).collect();
        if latches.is_empty() {
            continue;
        }
        let mut body = BTreeSet::from([h]);
        let mut work = latches;
        while let Some(u) = work.pop() {
            if body.insert(u) {
                work.extend(preds[u].iter().copied());
            }
        }
        headers.push((h, body));
    }
    headers.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    let mut loops: Vec<NaturalLoop> = Vec::with_capacity(headers.len());
    for (header, body) in headers {
        let parent = (0..loops.len())
            .rev()
            .find(|&i| loops[i].body.contains(&header) && loops[i].body.is_superset(&body));
        loops.push(NaturalLoop { header, body, parent });
    }
    Ok(LoopForest { loops })
}

/// A retreating DFS edge whose target does not dominate its source makes the
/// graph irreducible.
fn check_reducible(succ: &[Vec<usize>], idom: &[Option<usize>]) -> Result<(), Irreducible> {
    if succ.is_empty() {
        return Ok(());
    }
    let n = succ.len();
    let rpo = reverse_post_order(succ, 0);
    let mut order = vec![usize::MAX; n];
    for (i, &b) in rpo.iter().enumerate() {
        order[b] = i;
    }
    for &u in &rpo {
        for &v in &succ[u] {
            if order[v] <= order[u] && !dominates(idom, v, u) {
                return Err(Irreducible { from: u, to: v });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::dom::dominators;

    fn loops_of(g: &[Vec<usize>]) -> Result<LoopForest, Irreducible> {
        find_loops(g, &dominators(g, 0))
    }

    #[test]
    fn self_loop() {
        let f = loops_of(&[vec![0, 1], vec![]]).unwrap();
        assert_eq!(f.loops.len(), 1);
        assert_eq!(f.loops[0].body, BTreeSet::from([0]));
    }

    #[test]
    fn nested() {
        let g = vec![vec![1], vec![2], vec![1, 3], vec![0, 4], vec![]];
        let f = loops_of(&g).unwrap();
        assert_eq!(f.loops[0].header, 0);
        assert_eq!(f.loops[1].header, 1);
        assert_eq!(f.loops[1].parent, Some(0));
        assert!(f.loops[0].body.is_superset(&f.loops[1].body));
    }

    #[test]
    fn irreducible() {
        let g = vec![vec![1, 2], vec![2], vec![1, 3], vec![]];
        assert!(loops_of(&g).is_err());
    }
}
