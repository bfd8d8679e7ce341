use std::collections::BTreeSet;

use crate::ir::typing::place_ty;
use crate::ir::ullbc::{MatchCase, StatementKind, TerminatorKind, UllbcBody};
use crate::ir::{DiagCode, Diagnostic, Idx, LocalId, Place, Rvalue, TranslatedCrate, Ty, TypeDeclKind};

use super::util::{prune_unreachable, remove_locals, use_counts};

/// Turns `d = discriminant(p); switchInt(d) -> [...]` into `match p -> [...]`.
/// On a case value that names no variant the body is left untouched.
pub fn reconstruct_matches(krate: &TranslatedCrate, body: &mut UllbcBody) -> Result<bool, Diagnostic> {
    let mut work = body.clone();
    let counts = use_counts(&work);
    let mut dead = BTreeSet::new();
    for block in work.blocks.iter_mut() {
        let TerminatorKind::SwitchInt { discr, cases, otherwise } = &block.terminator.kind else { continue };
        let Some(d) = discr.place().filter(|p| p.is_local()).map(|p| p.local) else { continue };
        let Some(last) = block.statements.last() else { continue };
        let StatementKind::Assign(dest, Rvalue::Discriminant(scrutinee)) = &last.kind else { continue };
        if *dest != Place::local(d) || d == LocalId(0) || work.locals.is_arg(d) || counts[d.index()] != 2 {
            continue;
        }
        let Ok(Ty::Adt(id, _)) = place_ty(krate, &work.locals, scrutinee) else { continue };
        let Some(TypeDeclKind::Enum(variants)) = krate.type_decls.get(id).map(|t| &t.kind) else { continue };
        let decl = &krate.type_decls[id];
        let mut out = Vec::with_capacity(cases.len());
        for case in cases {
            let Some(variant) = decl.variant_by_discriminant(case.value.value) else {
                return Err(Diagnostic::error(
                    DiagCode::BadDiscriminant,
                    Some(block.terminator.span),
                    format!("case value {} matches no variant of `{}`", case.value.value, decl.meta.name),
                ));
            };
            out.push(MatchCase { variant, target: case.target });
        }
        let covered: BTreeSet<_> = out.iter().map(|c| c.variant).collect();
        let otherwise = (covered.len() < variants.len()).then_some(*otherwise);
        let scrutinee = scrutinee.clone();
        let last = block.statements.pop().expect("checked above");
        block.terminator.comments.splice(0..0, last.comments);
        block.terminator.kind = TerminatorKind::Match { scrutinee, cases: out, otherwise };
        dead.insert(d);
    }
    if dead.is_empty() {
        return Ok(false);
    }
    prune_unreachable(&mut work);
    remove_locals(&mut work, &dead);
    *body = work;
    Ok(true)
}
