use std::collections::BTreeSet;

use crate::ir::ullbc::{StatementKind, TerminatorKind, UllbcBody};
use crate::ir::{BlockId, Idx, LocalId, Operand, Place, ProjectionElem, Rvalue};

use super::util::{prune_unreachable, remove_locals, use_counts};

/// `t.f<n>` read by copy or move, with `t` a bare local.
fn field_read(op: &Operand, n: u32) -> Option<LocalId> {
    let p = op.place()?;
    match p.projection.as_slice() {
        [ProjectionElem::Field(f)] if f.0 == n => Some(p.local),
        _ => None,
    }
}

struct Site {
    block: BlockId,
    target: BlockId,
    tmp: LocalId,
}

fn find(body: &UllbcBody, preds: &[Vec<BlockId>], counts: &[usize]) -> Option<Site> {
    for (id, block) in body.blocks.iter_enumerated() {
        let TerminatorKind::Assert { cond, expected: false, target } = &block.terminator.kind else { continue };
        let Some(tmp) = field_read(cond, 1) else { continue };
        let Some(last) = block.statements.last() else { continue };
        let StatementKind::Assign(dest, Rvalue::BinOp(op, _, _)) = &last.kind else { continue };
        if !op.is_checked() || *dest != Place::local(tmp) {
            continue;
        }
        if body.locals.is_arg(tmp) || tmp == LocalId(0) || counts[tmp.index()] != 3 {
            continue;
        }
        let target = *target;
        if target == id || target.0 == 0 || preds[target.index()] != [id] {
            continue;
        }
        let Some(first) = body.blocks[target].statements.first() else { continue };
        let StatementKind::Assign(x, Rvalue::Use(src)) = &first.kind else { continue };
        if field_read(src, 0) != Some(tmp) || x.local == tmp {
            continue;
        }
        return Some(Site { block: id, target, tmp });
    }
    None
}

/// Packs `t = CheckedOp(a, b); assert(t.f1 == false) -> bbK; bbK: x = use t.f0`
/// into `x = Op(a, b)`, whose overflow aborts.
pub fn fuse_checked_arith(body: &mut UllbcBody) -> bool {
    let mut dead = BTreeSet::new();
    loop {
        let preds = body.predecessors().into_vec();
        let counts = use_counts(body);
        let Some(site) = find(body, &preds, &counts) else { break };
        let mut rest = std::mem::take(&mut body.blocks[site.target].statements);
        let first = rest.remove(0);
        let StatementKind::Assign(x, _) = first.kind else { unreachable!("matched above") };
        let terminator = body.blocks[site.target].terminator.clone();
        body.blocks[site.target].terminator.kind = TerminatorKind::Unreachable;
        let block = &mut body.blocks[site.block];
        let last = block.statements.last_mut().expect("matched above");
        if let StatementKind::Assign(dest, Rvalue::BinOp(op, _, _)) = &mut last.kind {
            *dest = x;
            *op = op.unchecked().expect("checked op");
        }
        last.span = last.span.merge(&first.span);
        last.comments.extend(first.comments);
        block.statements.extend(rest);
        block.terminator = terminator;
        dead.insert(site.tmp);
    }
    if dead.is_empty() {
        return false;
    }
    prune_unreachable(body);
    remove_locals(body, &dead);
    true
}
