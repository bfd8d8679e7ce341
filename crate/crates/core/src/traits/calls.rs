use rayon::prelude::*;

use crate::ir::subst::{Subst, Substitution};
use crate::ir::ullbc::{TerminatorKind, UllbcBody};
use crate::ir::{
    Body, DiagCode, Diagnostic, FnOperand, FnPtr, FunIdOrTraitMethodRef, GenericParams, Span, TraitClause,
    TraitRef, TraitRefKind, TranslatedCrate, PENDING,
};

use super::normalize::{instantiate_method, normalize_args};
use super::solve::{resolve_trait_ref, TraitEnv};
use super::split::split_method_generics;

/// Resolves every method call written `Trait::method::<..>` to the impl or
/// clause providing it and fills in the proofs of the callees' where-clauses.
/// Failures leave an `Unknown` proof behind and are reported.
pub fn resolve_calls(mut krate: TranslatedCrate) -> (TranslatedCrate, Vec<Diagnostic>) {
    let work: Vec<_> = krate
        .fun_decls
        .iter()
        .filter_map(|f| match &f.body {
            Body::Ullbc(b) => Some((f.id, b.clone())),
            _ => None,
        })
        .collect();
    let done: Vec<_> = work
        .into_par_iter()
        .map(|(id, mut body)| {
            let f = &krate.fun_decls[id];
            let env = TraitEnv::new(&krate, &f.signature.generics);
            let diags = resolve_body(&env, &mut body);
            let name = f.meta.name.to_string();
            (id, body, diags.into_iter().map(|d| d.in_item(name.clone())).collect::<Vec<_>>())
        })
        .collect();
    let mut diags = Vec::new();
    for (id, body, d) in done {
        krate.fun_decls[id].body = Body::Ullbc(body);
        diags.extend(d);
    }
    (krate, diags)
}

pub fn resolve_body(env: &TraitEnv<'_>, body: &mut UllbcBody) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for block in body.blocks.iter_mut() {
        let span = block.terminator.span;
        let TerminatorKind::Call { call, .. } = &mut block.terminator.kind else { continue };
        let FnOperand::Regular(ptr) = &mut call.func else { continue };
        if let Err(d) = resolve_fn_ptr(env, ptr, span) {
            diags.extend(d);
        }
    }
    diags
}

fn diag(code: DiagCode, span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(code, Some(span), msg)
}

/// Resolves one callee in place.
pub fn resolve_fn_ptr(env: &TraitEnv<'_>, ptr: &mut FnPtr, span: Span) -> Result<(), Vec<Diagnostic>> {
    let krate = env.krate;
    let mut diags = Vec::new();
    if let FunIdOrTraitMethodRef::UnresolvedMethod(trait_id, method) = &ptr.func {
        let (trait_id, method) = (*trait_id, method.clone());
        let Some(decl) = krate.trait_decls.get(trait_id) else {
            return Err(vec![diag(DiagCode::UnresolvedCall, span, format!("unknown trait {trait_id}"))]);
        };
        let (trait_args, method_args) = split_method_generics(&ptr.generics, &decl.generics)
            .map_err(|e| vec![diag(DiagCode::TruncationUnderflow, span, format!("{}::{method}: {e}", decl.meta.name))])?;
        let trait_args = normalize_args(&trait_args, env.params, krate).map_err(|d| vec![d.with_span(span)])?;
        let kind = match resolve_trait_ref(env, trait_id, &trait_args) {
            Ok(k) => k,
            Err(e) => {
                diags.push(diag(e.code(), span, e.to_string()));
                TraitRefKind::Unknown(e.to_string())
            }
        };
        ptr.func = FunIdOrTraitMethodRef::TraitMethod(TraitRef { kind, trait_id, args: trait_args }, method);
        ptr.generics = method_args;
    }
    let clauses: Vec<TraitClause> = match &ptr.func {
        FunIdOrTraitMethodRef::Fun(id) => {
            let Some(f) = krate.fun_decls.get(*id) else { return finish(diags) };
            let s = Substitution::new(&ptr.generics);
            f.signature.generics.trait_clauses.iter().filter_map(|c| c.subst(&s).ok()).collect()
        }
        FunIdOrTraitMethodRef::TraitMethod(tref, name) => {
            let Some(m) = krate.trait_decls.get(tref.trait_id).and_then(|d| d.method(name)) else {
                diags.push(diag(DiagCode::UnresolvedCall, span, format!("trait has no method `{name}`")));
                return finish(diags);
            };
            m.signature
                .generics
                .trait_clauses
                .iter()
                .filter_map(|c| instantiate_method(c, &tref.args, &tref.kind, &ptr.generics).ok())
                .collect()
        }
        FunIdOrTraitMethodRef::UnresolvedMethod(..) => unreachable!("resolved above"),
    };
    if ptr.generics.trait_refs.len() != clauses.len() {
        diags.push(diag(DiagCode::UnresolvedCall, span, "callee where-clauses do not match the call's proofs"));
        return finish(diags);
    }
    for (slot, clause) in ptr.generics.trait_refs.iter_mut().zip(clauses) {
        if !matches!(slot, TraitRefKind::Unknown(m) if m == PENDING) {
            continue;
        }
        let args = match normalize_args(&clause.args, env.params, krate) {
            Ok(a) => a,
            Err(d) => {
                diags.push(d.with_span(span));
                continue;
            }
        };
        *slot = match resolve_trait_ref(env, clause.trait_id, &args) {
            Ok(k) => k,
            Err(e) => {
                diags.push(diag(e.code(), span, e.to_string()));
                TraitRefKind::Unknown(e.to_string())
            }
        };
    }
    finish(diags)
}

fn finish(diags: Vec<Diagnostic>) -> Result<(), Vec<Diagnostic>> {
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

/// The generics a call's callee is checked against after resolution.
pub fn callee_params<'a>(krate: &'a TranslatedCrate, ptr: &FnPtr) -> Option<&'a GenericParams> {
    match &ptr.func {
        FunIdOrTraitMethodRef::Fun(id) => krate.fun_decls.get(*id).map(|f| &f.signature.generics),
        FunIdOrTraitMethodRef::TraitMethod(t, name) => {
            krate.trait_decls.get(t.trait_id).and_then(|d| d.method(name)).map(|m| &m.signature.generics)
        }
        FunIdOrTraitMethodRef::UnresolvedMethod(..) => None,
    }
}

