//! Dominators (Cooper, Harvey and Kennedy's iterative algorithm) over plain
//! successor lists, and post-dominators through a virtual exit node.

use crate::ir::ullbc::UllbcBody;
use crate::ir::{BlockId, Idx};

/// Successor lists of a body, indexed by block.
pub fn successor_lists(body: &UllbcBody) -> Vec<Vec<usize>> {
    body.blocks.iter().map(|b| b.terminator.kind.successors().into_iter().map(|s| s.index()).collect()).collect()
}

/// Reverse post-order of the nodes reachable from `entry`.
pub fn reverse_post_order(succ: &[Vec<usize>], entry: usize) -> Vec<usize> {
    let mut seen = vec![false; succ.len()];
    let mut post = Vec::with_capacity(succ.len());
    let mut stack: Vec<(usize, usize)> = vec![(entry, 0)];
    seen[entry] = true;
    while let Some((n, i)) = stack.last_mut() {
        let n = *n;
        if let Some(&s) = succ[n].get(*i) {
            *i += 1;
            if !seen[s] {
                seen[s] = true;
                stack.push((s, 0));
            }
        } else {
            post.push(n);
            stack.pop();
        }
    }
    post.reverse();
    post
}

/// Immediate dominators; `idom[entry] == Some(entry)` and unreachable nodes
/// get `None`.
pub fn dominators(succ: &[Vec<usize>], entry: usize) -> Vec<Option<usize>> {
    let n = succ.len();
    let rpo = reverse_post_order(succ, entry);
    let mut order = vec![usize::MAX; n];
    for (i, &b) in rpo.iter().enumerate() {
        order[b] = i;
    }
    let mut preds = vec![Vec::new(); n];
    for (b, ss) in succ.iter().enumerate() {
        for &s in ss {
            preds[s].push(b);
        }
    }
    let mut idom: Vec<Option<usize>> = vec![None; n];
    idom[entry] = Some(entry);
    let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
        while a != b {
            while order[a] > order[b] {
                a = idom[a].expect("processed");
            }
            while order[b] > order[a] {
                b = idom[b].expect("processed");
            }
        }
        a
    };
    let mut changed = true;
    while changed {
        changed = false;
        for &b in rpo.iter().skip(1) {
            let mut new = None;
            for &p in &preds[b] {
                if idom[p].is_none() {
                    continue;
                }
                new = Some(match new {
                    None => p,
                    Some(cur) => intersect(&idom, p, cur),
                });
            }
            if new.is_some() && idom[b] != new {
                idom[b] = new;
                changed = true;
            }
        }
    }
    idom
}

/// Whether `a` dominates `b` under `idom`.
pub fn dominates(idom: &[Option<usize>], a: usize, b: usize) -> bool {
    let mut cur = b;
    loop {
        if cur == a {
            return true;
        }
        match idom[cur] {
            Some(p) if p != cur => cur = p,
            _ => return false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominators {
    pub idom: Vec<Option<usize>>,
}

impl Dominators {
    pub fn of(body: &UllbcBody) -> Dominators {
        Dominators { idom: dominators(&successor_lists(body), 0) }
    }

    pub fn idom(&self, b: BlockId) -> Option<BlockId> {
        self.idom[b.index()].map(|i| BlockId(i as u32))
    }

    pub fn dominates(&self, a: BlockId, b: BlockId) -> bool {
        dominates(&self.idom, a.index(), b.index())
    }
}

/// Post-dominators on the graph extended with a virtual exit (index
/// `blocks.len()`) that every block without successors flows into. Blocks that
/// cannot reach the exit have no post-dominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostDominators {
    pub ipdom: Vec<Option<usize>>,
    pub exit: usize,
    depth: Vec<usize>,
}

impl PostDominators {
    pub fn of(body: &UllbcBody) -> PostDominators {
        Self::from_succ(&successor_lists(body))
    }

    pub fn from_succ(succ: &[Vec<usize>]) -> PostDominators {
        let n = succ.len();
        let exit = n;
        let mut rev = vec![Vec::new(); n + 1];
        for (b, ss) in succ.iter().enumerate() {
            if ss.is_empty() {
                rev[exit].push(b);
            }
            for &s in ss {
                rev[s].push(b);
            }
        }
        let ipdom = dominators(&rev, exit);
        let mut depth = vec![usize::MAX; n + 1];
        for b in 0..=n {
            if ipdom[b].is_none() {
                continue;
            }
            let mut d = 0;
            let mut cur = b;
            while cur != exit {
                cur = ipdom[cur].expect("chain reaches exit");
                d += 1;
            }
            depth[b] = d;
        }
        PostDominators { ipdom, exit, depth }
    }

    /// Immediate post-dominator, `None` for the virtual exit or when unknown.
    pub fn ipdom(&self, b: usize) -> Option<usize> {
        match self.ipdom[b] {
            Some(p) if p != self.exit && p != b => Some(p),
            _ => None,
        }
    }

    pub fn post_dominates(&self, a: usize, b: usize) -> bool {
        dominates(&self.ipdom, a, b)
    }

    /// Nearest common post-dominator of a set of blocks; `None` if it is the
    /// virtual exit or some block cannot reach the exit.
    pub fn common(&self, blocks: &[usize]) -> Option<usize> {
        let mut it = blocks.iter();
        let mut acc = *it.next()?;
        if self.depth[acc] == usize::MAX {
            return None;
        }
        for &b in it {
            if self.depth[b] == usize::MAX {
                return None;
            }
            let mut x = b;
            while self.depth[acc] > self.depth[x] {
                acc = self.ipdom[acc]?;
            }
            while self.depth[x] > self.depth[acc] {
                x = self.ipdom[x]?;
            }
            while acc != x {
                acc = self.ipdom[acc]?;
                x = self.ipdom[x]?;
            }
        }
        (acc != self.exit).then_some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_diamond() {
        let chain = vec![vec![1], vec![2], vec![]];
        assert_eq!(dominators(&chain, 0), vec![Some(0), Some(0), Some(1)]);
        let diamond = vec![vec![1, 2], vec![3], vec![3], vec![]];
        assert_eq!(dominators(&diamond, 0)[3], Some(0));
        let pd = PostDominators::from_succ(&diamond);
        assert_eq!(pd.ipdom(0), Some(3));
        assert_eq!(pd.common(&[1, 2]), Some(3));
    }

    #[test]
    fn infinite_loop_has_no_post_dominator() {
        let g = vec![vec![1], vec![1]];
        let pd = PostDominators::from_succ(&g);
        assert_eq!(pd.ipdom(0), None);
        assert_eq!(pd.common(&[0]), None);
    }
}
