use std::collections::{BTreeSet, VecDeque};

use crate::ir::subst::{Subst, Substitution};
use crate::ir::{DiagCode, Diagnostic, GenericArgs, GenericParams, TraitDeclId, TraitRefKind, TranslatedCrate};

/// Longest derivation path explored while elaborating.
pub const MAX_CLAUSE_DEPTH: usize = 32;

/// A trait instance known to hold in some environment, with its proof.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KnownClause {
    pub path: TraitRefKind,
    pub trait_id: TraitDeclId,
    pub args: GenericArgs,
}

/// The instance proven by `path`, where `args` are the trait arguments of the
/// parent step. Substitutes the trait's `Self` clause by `path`.
fn instantiate(args: &GenericArgs, via: &GenericArgs, path: &TraitRefKind) -> Option<GenericArgs> {
    args.subst(&Substitution { args: via, self_ref: Some(path), target: 0 }).ok()
}

/// Every clause implied by `params`: the declared ones, then their parent and
/// associated-type clauses, breadth first. An instance reached twice keeps
/// its first (shortest) path.
pub fn elaborate_implied_clauses(params: &GenericParams, krate: &TranslatedCrate) -> (Vec<KnownClause>, Vec<Diagnostic>) {
    elaborate_from(
        params.trait_clauses.iter().map(|c| KnownClause {
            path: TraitRefKind::Clause(c.clause_id),
            trait_id: c.trait_id,
            args: c.args.clone(),
        }),
        krate,
    )
}

pub fn elaborate_from(
    roots: impl IntoIterator<Item = KnownClause>,
    krate: &TranslatedCrate,
) -> (Vec<KnownClause>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let mut seen: BTreeSet<(TraitDeclId, GenericArgs)> = BTreeSet::new();
    let mut queue: VecDeque<KnownClause> = roots.into_iter().collect();
    while let Some(k) = queue.pop_front() {
        if !seen.insert((k.trait_id, strip_refs(&k.args))) {
            continue;
        }
        if k.path.depth() > MAX_CLAUSE_DEPTH {
            diags.push(Diagnostic::error(
                DiagCode::ClauseDepthExceeded,
                None,
                format!("implied clauses nest deeper than {MAX_CLAUSE_DEPTH}"),
            ));
            continue;
        }
        if let Some(decl) = krate.trait_decls.get(k.trait_id) {
            for (i, parent) in decl.parent_clauses.iter().enumerate() {
                if let Some(args) = instantiate(&parent.args, &k.args, &k.path) {
                    let path = TraitRefKind::ParentClause(Box::new(k.path.clone()), i as u32);
                    queue.push_back(KnownClause { path, trait_id: parent.trait_id, args });
                }
            }
            for assoc in &decl.assoc_types {
                for (j, bound) in assoc.bounds.iter().enumerate() {
                    if let Some(args) = instantiate(&bound.args, &k.args, &k.path) {
                        let path = TraitRefKind::ItemClause(Box::new(k.path.clone()), assoc.name.clone(), j as u32);
                        queue.push_back(KnownClause { path, trait_id: bound.trait_id, args });
                    }
                }
            }
        }
        out.push(k);
    }
    diags.dedup();
    (out, diags)
}

/// Trait arguments compared up to regions and nested proofs.
pub(crate) fn strip_refs(args: &GenericArgs) -> GenericArgs {
    GenericArgs {
        regions: Vec::new(),
        types: args.types.clone(),
        const_generics: args.const_generics.clone(),
        trait_refs: Vec::new(),
    }
}
