//! Small CFG and local-table rewrites shared by the passes.

use std::collections::BTreeSet;

use crate::ir::ullbc::{Locals, UllbcBody};
use crate::ir::visit::{locals_used, ullbc_locals_mut};
use crate::ir::{BlockId, Idx, IndexVec, LocalId};

/// Blocks reachable from the entry, in id order.
pub fn reachable(body: &UllbcBody) -> Vec<bool> {
    let mut seen = vec![false; body.blocks.len()];
    if body.blocks.is_empty() {
        return seen;
    }
    let mut stack = vec![BlockId(0)];
    seen[0] = true;
    while let Some(b) = stack.pop() {
        for s in body.successors(b) {
            if !seen[s.index()] {
                seen[s.index()] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// Removes blocks unreachable from the entry, keeping the relative order of
/// the others. Returns whether anything was removed.
pub fn prune_unreachable(body: &mut UllbcBody) -> bool {
    let seen = reachable(body);
    if seen.iter().all(|&s| s) {
        return false;
    }
    let mut remap = vec![None; seen.len()];
    let mut next = 0u32;
    for (i, &s) in seen.iter().enumerate() {
        if s {
            remap[i] = Some(BlockId(next));
            next += 1;
        }
    }
    let old = std::mem::take(&mut body.blocks).into_vec();
    let mut blocks = IndexVec::new();
    for (i, mut block) in old.into_iter().enumerate() {
        if remap[i].is_none() {
            continue;
        }
        for t in block.terminator.kind.successors_mut() {
            *t = remap[t.index()].expect("successor of a reachable block is reachable");
        }
        blocks.push(block);
    }
    body.blocks = blocks;
    true
}

/// Number of times each local is mentioned in statements and terminators.
pub fn use_counts(body: &UllbcBody) -> Vec<usize> {
    let mut counts = vec![0usize; body.locals.vars.len()];
    for block in body.blocks.iter() {
        let used = block.statements.iter().flat_map(locals_used).chain(locals_used(&block.terminator));
        for l in used {
            if let Some(c) = counts.get_mut(l.index()) {
                *c += 1;
            }
        }
    }
    counts
}

/// Deletes the given locals (which must no longer be mentioned) and renumbers
/// the remaining ones.
pub fn remove_locals(body: &mut UllbcBody, dead: &BTreeSet<LocalId>) {
    if dead.is_empty() {
        return;
    }
    let mut remap = Vec::with_capacity(body.locals.vars.len());
    let mut vars = IndexVec::new();
    for local in body.locals.vars.iter() {
        if dead.contains(&local.index) {
            remap.push(None);
        } else {
            let index = vars.next_id();
            remap.push(Some(index));
            let mut l = local.clone();
            l.index = index;
            vars.push(l);
        }
    }
    ullbc_locals_mut(body, &mut |l| {
        *l = remap[l.index()].expect("removed local is still used");
    });
    body.locals = Locals { arg_count: body.locals.arg_count, vars };
}
