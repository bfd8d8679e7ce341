//! Declaration-level dependency edges.

use std::collections::BTreeSet;

use super::expressions::{AggregateKind, FnPtr, FunIdOrTraitMethodRef};
use super::krate::{AnyDeclId, TranslatedCrate};
use super::types::{TraitRefKind, Ty};
use super::visit::{Visitor, Walk};

struct DepCollector(BTreeSet<AnyDeclId>);

impl Visitor for DepCollector {
    fn visit_ty(&mut self, ty: &Ty) {
        if let Ty::Adt(id, _) = ty {
            self.0.insert(AnyDeclId::Type(*id));
        }
    }

    fn visit_trait_ref(&mut self, tref: &TraitRefKind) {
        if let TraitRefKind::TraitImpl(id, _) = tref {
            self.0.insert(AnyDeclId::TraitImpl(*id));
        }
    }

    fn visit_fn_ptr(&mut self, ptr: &FnPtr) {
        match &ptr.func {
            FunIdOrTraitMethodRef::Fun(id) => {
                self.0.insert(AnyDeclId::Fun(*id));
            }
            FunIdOrTraitMethodRef::TraitMethod(tref, _) => {
                self.0.insert(AnyDeclId::TraitDecl(tref.trait_id));
            }
            FunIdOrTraitMethodRef::UnresolvedMethod(id, _) => {
                self.0.insert(AnyDeclId::TraitDecl(*id));
            }
        }
    }

    fn visit_aggregate(&mut self, kind: &AggregateKind) {
        if let AggregateKind::Adt(id, _, _) = kind {
            self.0.insert(AnyDeclId::Type(*id));
        }
    }
}

/// Every declaration mentioned by `id`'s signature, fields or body.
pub fn dependencies(krate: &TranslatedCrate, id: AnyDeclId) -> BTreeSet<AnyDeclId> {
    let mut c = DepCollector(BTreeSet::new());
    match id {
        AnyDeclId::Type(id) => {
            if let Some(d) = krate.type_decls.get(id) {
                d.walk(&mut c);
                for clause in d.generics.trait_clauses.iter() {
                    c.0.insert(AnyDeclId::TraitDecl(clause.trait_id));
                }
            }
        }
        AnyDeclId::Fun(id) => {
            if let Some(d) = krate.fun_decls.get(id) {
                d.walk(&mut c);
                for clause in d.signature.generics.trait_clauses.iter() {
                    c.0.insert(AnyDeclId::TraitDecl(clause.trait_id));
                }
            }
        }
        AnyDeclId::TraitDecl(id) => {
            if let Some(d) = krate.trait_decls.get(id) {
                d.walk(&mut c);
                let clauses = d
                    .parent_clauses
                    .iter()
                    .chain(d.assoc_types.iter().flat_map(|a| a.bounds.iter()))
                    .chain(d.methods.iter().flat_map(|m| m.signature.generics.trait_clauses.iter()));
                for clause in clauses {
                    c.0.insert(AnyDeclId::TraitDecl(clause.trait_id));
                }
            }
        }
        AnyDeclId::TraitImpl(id) => {
            if let Some(d) = krate.trait_impls.get(id) {
                d.walk(&mut c);
                c.0.insert(AnyDeclId::TraitDecl(d.trait_id));
                for clause in d.generics.trait_clauses.iter() {
                    c.0.insert(AnyDeclId::TraitDecl(clause.trait_id));
                }
                for m in &d.methods {
                    c.0.insert(AnyDeclId::Fun(m.fun_id));
                }
            }
        }
    }
    c.0
}
