use crate::ir::ullbc::{TerminatorKind, UllbcBody};
use crate::ir::{AbortKind, FnOperand, FunIdOrTraitMethodRef, TranslatedCrate};

use super::util::prune_unreachable;

pub const DEFAULT_PANIC_FNS: [&str; 3] = ["core::panicking::panic", "core::panicking::panic_fmt", "std::panic::begin_panic"];

/// Whether a call terminator calls one of the panic functions.
pub fn is_panic_call(krate: &TranslatedCrate, panic_fns: &[String], kind: &TerminatorKind) -> bool {
    let TerminatorKind::Call { call, .. } = kind else { return false };
    let FnOperand::Regular(ptr) = &call.func else { return false };
    let FunIdOrTraitMethodRef::Fun(id) = ptr.func else { return false };
    krate
        .fun_decls
        .get(id)
        .is_some_and(|f| panic_fns.iter().any(|p| *p == f.meta.name.to_string()))
}

/// Replaces panic calls by `abort panic` and `unreachable` by `abort ub`,
/// then drops the blocks this disconnects.
pub fn unify_panics(krate: &TranslatedCrate, panic_fns: &[String], body: &mut UllbcBody) -> bool {
    let mut changed = false;
    for block in body.blocks.iter_mut() {
        let t = &mut block.terminator.kind;
        if is_panic_call(krate, panic_fns, t) {
            *t = TerminatorKind::Abort(AbortKind::Panic);
            changed = true;
        } else if matches!(t, TerminatorKind::Unreachable) {
            *t = TerminatorKind::Abort(AbortKind::UndefinedBehavior);
            changed = true;
        }
    }
    prune_unreachable(body) || changed
}
