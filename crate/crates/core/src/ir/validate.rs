//! Structural well-formedness checks for a whole crate.

use std::collections::{BTreeMap, BTreeSet};

use super::deps::dependencies;
use super::diag::{DiagCode, Diagnostic};
use super::expressions::{AggregateKind, Call, FnOperand, FunIdOrTraitMethodRef, Operand, Place, Rvalue};
use super::ids::Idx;
use super::krate::{AnyDeclId, Body, DeclGroup, FunSig, TranslatedCrate, TypeDeclKind};
use super::llbc::{self, Block, Switch};
use super::meta::Span;
use super::subst::check_arity;
use super::types::{ConstGeneric, GenericArgs, GenericParams, TraitRefKind, Ty};
use super::typing::{operand_ty, place_ty};
use super::ullbc::{self, Locals, TerminatorKind, UllbcBody};
use super::values::{ConstantKind, ConstantValue};

/// Returns an empty list iff the crate is well formed.
pub fn validate_crate(krate: &TranslatedCrate) -> Vec<Diagnostic> {
    let mut v = CrateValidator { krate, diags: Vec::new(), item: String::new() };
    v.check_dense_ids();
    for d in krate.type_decls.iter() {
        v.item = d.meta.name.to_string();
        v.check_span(&d.meta.span);
        let scope = Scope { levels: vec![&d.generics], allow_self: false };
        v.check_params(&scope, &d.generics, d.meta.span);
        let field_tys: Vec<&Ty> = match &d.kind {
            TypeDeclKind::Struct(fields) => fields.iter().collect(),
            TypeDeclKind::Enum(vs) => {
                let mut seen = BTreeSet::new();
                for var in vs {
                    if !seen.insert(var.discriminant) {
                        v.error(DiagCode::DuplicateCase, d.meta.span, format!("duplicate discriminant {}", var.discriminant));
                    }
                }
                vs.iter().flat_map(|var| var.fields.iter()).collect()
            }
            TypeDeclKind::Opaque => Vec::new(),
        };
        for ty in field_tys {
            v.check_ty(&scope, ty, d.meta.span);
        }
    }
    for t in krate.trait_decls.iter() {
        v.item = t.meta.name.to_string();
        v.check_span(&t.meta.span);
        if t.generics.types.is_empty() {
            v.error(DiagCode::ArityMismatch, t.meta.span, "trait declarations must bind Self as their first type parameter");
        }
        let scope = Scope { levels: vec![&t.generics], allow_self: true };
        v.check_params(&scope, &t.generics, t.meta.span);
        for clause in t.parent_clauses.iter().chain(t.assoc_types.iter().flat_map(|a| a.bounds.iter())) {
            v.check_trait_goal(&scope, clause.trait_id, &clause.args, t.meta.span);
        }
        for m in &t.methods {
            let scope = Scope { levels: vec![&m.signature.generics, &t.generics], allow_self: true };
            v.check_sig(&scope, &m.signature, t.meta.span);
        }
    }
    for imp in krate.trait_impls.iter() {
        v.item = imp.meta.name.to_string();
        v.check_span(&imp.meta.span);
        let span = imp.meta.span;
        let scope = Scope { levels: vec![&imp.generics], allow_self: false };
        v.check_params(&scope, &imp.generics, span);
        let Some(tdecl) = krate.trait_decls.get(imp.trait_id) else {
            v.error(DiagCode::UnresolvedId, span, format!("unknown trait {}", imp.trait_id));
            continue;
        };
        v.check_trait_goal(&scope, imp.trait_id, &imp.trait_args, span);
        if imp.parent_trait_refs.len() != tdecl.parent_clauses.len() {
            v.error(
                DiagCode::ArityMismatch,
                span,
                format!("expected {} parent trait refs, got {}", tdecl.parent_clauses.len(), imp.parent_trait_refs.len()),
            );
        }
        for r in &imp.parent_trait_refs {
            v.check_trait_ref(&scope, r, span);
        }
        let declared: BTreeSet<&str> = tdecl.assoc_types.iter().map(|a| a.name.as_str()).collect();
        let provided: BTreeSet<&str> = imp.assoc_types.iter().map(|a| a.name.as_str()).collect();
        if declared != provided || provided.len() != imp.assoc_types.len() {
            v.error(DiagCode::MissingImplItem, span, format!("associated types {provided:?} do not match the trait's {declared:?}"));
        }
        for a in &imp.assoc_types {
            v.check_ty(&scope, &a.ty, span);
            if let Some(decl) = tdecl.assoc_type(&a.name) {
                if decl.bounds.len() != a.bound_refs.len() {
                    v.error(DiagCode::ArityMismatch, span, format!("associated type `{}` needs {} bound proofs", a.name, decl.bounds.len()));
                }
            }
            for r in &a.bound_refs {
                v.check_trait_ref(&scope, r, span);
            }
        }
        let declared: BTreeSet<&str> = tdecl.methods.iter().map(|m| m.name.as_str()).collect();
        let provided: BTreeSet<&str> = imp.methods.iter().map(|m| m.name.as_str()).collect();
        if declared != provided || provided.len() != imp.methods.len() {
            v.error(DiagCode::MissingImplItem, span, format!("methods {provided:?} do not match the trait's {declared:?}"));
        }
        for m in &imp.methods {
            if krate.fun_decls.get(m.fun_id).is_none() {
                v.error(DiagCode::UnresolvedId, span, format!("unknown function {}", m.fun_id));
            }
        }
    }
    for f in krate.fun_decls.iter() {
        v.item = f.meta.name.to_string();
        v.check_span(&f.meta.span);
        let scope = Scope { levels: vec![&f.signature.generics], allow_self: false };
        v.check_sig(&scope, &f.signature, f.meta.span);
        match &f.body {
            Body::Ullbc(body) => v.check_ullbc(&scope, &f.signature, body),
            Body::Llbc(body) => v.check_llbc(&scope, &f.signature, body),
            Body::Opaque => {}
        }
    }
    v.item.clear();
    v.check_decl_groups();
    v.diags
}

/// Every `Raw` constant in the crate's bodies, with its span.
pub fn raw_constants(krate: &TranslatedCrate) -> Vec<Span> {
    let mut out = Vec::new();
    for f in krate.fun_decls.iter() {
        let mut body = f.body.clone();
        let mut on_const = |c: &mut ConstantValue, span: Span| {
            if c.contains_raw() {
                out.push(span);
            }
        };
        match &mut body {
            Body::Ullbc(b) => super::visit::ullbc_constants_mut(b, &mut on_const),
            Body::Llbc(b) => super::visit::llbc_constants_mut(&mut b.body, &mut on_const),
            Body::Opaque => {}
        }
    }
    out
}

struct Scope<'a> {
    /// Binder levels, innermost first.
    levels: Vec<&'a GenericParams>,
    allow_self: bool,
}

struct CrateValidator<'a> {
    krate: &'a TranslatedCrate,
    diags: Vec<Diagnostic>,
    item: String,
}

impl<'a> CrateValidator<'a> {
    fn error(&mut self, code: DiagCode, span: Span, message: impl Into<String>) {
        let mut d = Diagnostic::error(code, Some(span), message);
        if !self.item.is_empty() {
            d = d.in_item(self.item.clone());
        }
        self.diags.push(d);
    }

    fn check_dense_ids(&mut self) {
        let k = self.krate;
        let mut bad = Vec::new();
        bad.extend(k.type_decls.iter_enumerated().filter(|(i, d)| *i != d.id).map(|(_, d)| (d.meta.span, d.meta.name.to_string())));
        bad.extend(k.fun_decls.iter_enumerated().filter(|(i, d)| *i != d.id).map(|(_, d)| (d.meta.span, d.meta.name.to_string())));
        bad.extend(k.trait_decls.iter_enumerated().filter(|(i, d)| *i != d.id).map(|(_, d)| (d.meta.span, d.meta.name.to_string())));
        bad.extend(k.trait_impls.iter_enumerated().filter(|(i, d)| *i != d.id).map(|(_, d)| (d.meta.span, d.meta.name.to_string())));
        for (span, name) in bad {
            self.error(DiagCode::NonDenseId, span, format!("declaration `{name}` is not stored at its id"));
        }
    }

    fn check_span(&mut self, span: &Span) {
        if self.krate.files.get(span.file_id).is_none() || !span.is_well_formed() {
            self.error(DiagCode::BadSpan, *span, format!("malformed span {span}"));
        }
    }

    fn check_params(&mut self, scope: &Scope<'_>, params: &GenericParams, span: Span) {
        for (i, t) in params.types.iter().enumerate() {
            if t.index as usize != i {
                self.error(DiagCode::NonDenseId, span, format!("type variable `{}` has index {} at position {i}", t.name, t.index));
            }
        }
        for (i, c) in params.trait_clauses.iter_enumerated() {
            if c.clause_id != i {
                self.error(DiagCode::NonDenseId, span, format!("clause {} stored at {i}", c.clause_id));
            }
            self.check_trait_goal(scope, c.trait_id, &c.args, span);
        }
        for o in &params.types_outlive {
            self.check_ty(scope, &o.ty, span);
        }
        for c in &params.trait_type_constraints {
            self.check_trait_ref(scope, &c.trait_ref, span);
            self.check_ty(scope, &c.ty, span);
        }
    }

    fn check_sig(&mut self, scope: &Scope<'_>, sig: &FunSig, span: Span) {
        self.check_params(scope, &sig.generics, span);
        for ty in sig.inputs.iter().chain(std::iter::once(&sig.output)) {
            self.check_ty(scope, ty, span);
        }
    }

    /// A trait applied to full arguments (self type first).
    fn check_trait_goal(&mut self, scope: &Scope<'_>, trait_id: super::ids::TraitDeclId, args: &GenericArgs, span: Span) {
        let Some(t) = self.krate.trait_decls.get(trait_id) else {
            self.error(DiagCode::UnresolvedId, span, format!("unknown trait {trait_id}"));
            return;
        };
        if let Err(e) = check_arity(&t.meta.name.to_string(), &t.generics, args) {
            self.error(DiagCode::ArityMismatch, span, e.to_string());
        }
        self.check_args(scope, args, span);
    }

    fn check_args(&mut self, scope: &Scope<'_>, args: &GenericArgs, span: Span) {
        for ty in &args.types {
            self.check_ty(scope, ty, span);
        }
        for c in &args.const_generics {
            self.check_const_generic(scope, c, span);
        }
        for r in &args.trait_refs {
            self.check_trait_ref(scope, r, span);
        }
    }

    fn check_const_generic(&mut self, scope: &Scope<'_>, c: &ConstGeneric, span: Span) {
        match c {
            ConstGeneric::Value(v) => {
                if !v.in_range() {
                    self.error(DiagCode::BadConstant, span, format!("{} does not fit {}", v.value, v.kind.name()));
                }
            }
            ConstGeneric::Var(var) => {
                let ok = scope
                    .levels
                    .get(var.depth as usize)
                    .is_some_and(|p| (var.index as usize) < p.const_generics.len());
                if !ok {
                    self.error(DiagCode::OutOfRange, span, format!("const generic variable {var:?} out of range"));
                }
            }
        }
    }

    fn check_ty(&mut self, scope: &Scope<'_>, ty: &Ty, span: Span) {
        match ty {
            Ty::Scalar(_) | Ty::Bool => {}
            Ty::TypeVar(var) => {
                let ok = scope
                    .levels
                    .get(var.depth as usize)
                    .is_some_and(|p| (var.index as usize) < p.types.len());
                if !ok {
                    self.error(DiagCode::OutOfRange, span, format!("type variable {var:?} out of range"));
                }
            }
            Ty::Adt(id, args) => {
                match self.krate.type_decls.get(*id) {
                    None => self.error(DiagCode::UnresolvedId, span, format!("unknown type {id}")),
                    Some(d) => {
                        if let Err(e) = check_arity(&d.meta.name.to_string(), &d.generics, args) {
                            self.error(DiagCode::ArityMismatch, span, e.to_string());
                        }
                    }
                }
                self.check_args(scope, args, span);
            }
            Ty::Ref(_, inner, _) => self.check_ty(scope, inner, span),
            Ty::Tuple(tys) => tys.iter().for_each(|t| self.check_ty(scope, t, span)),
            Ty::Array(elem, len) => {
                self.check_ty(scope, elem, span);
                self.check_const_generic(scope, len, span);
            }
            Ty::AssocType(tref, _) => self.check_trait_ref(scope, tref, span),
        }
    }

    fn check_trait_ref(&mut self, scope: &Scope<'_>, tref: &TraitRefKind, span: Span) {
        match tref {
            TraitRefKind::TraitImpl(id, args) => {
                match self.krate.trait_impls.get(*id) {
                    None => self.error(DiagCode::UnresolvedId, span, format!("unknown impl {id}")),
                    Some(imp) => {
                        if let Err(e) = check_arity(&imp.meta.name.to_string(), &imp.generics, args) {
                            self.error(DiagCode::ArityMismatch, span, e.to_string());
                        }
                    }
                }
                self.check_args(scope, args, span);
            }
            TraitRefKind::Clause(c) => {
                if scope.levels.first().map_or(true, |p| c.index() >= p.trait_clauses.len()) {
                    self.error(DiagCode::OutOfRange, span, format!("clause {c} out of range"));
                }
            }
            TraitRefKind::ParentClause(base, _) | TraitRefKind::ItemClause(base, _, _) => {
                self.check_trait_ref(scope, base, span)
            }
            TraitRefKind::SelfId => {
                if !scope.allow_self {
                    self.error(DiagCode::OutOfRange, span, "`Self` clause used outside a trait declaration");
                }
            }
            TraitRefKind::Unknown(_) => {}
        }
    }

    fn check_locals(&mut self, scope: &Scope<'_>, sig: &FunSig, locals: &Locals, span: Span) {
        for (i, l) in locals.vars.iter_enumerated() {
            if l.index != i {
                self.error(DiagCode::NonDenseId, span, format!("local `{}` stored at {i}", l.name));
            }
            self.check_ty(scope, &l.ty, span);
        }
        if locals.arg_count as usize != sig.inputs.len() || locals.vars.len() < 1 + sig.inputs.len() {
            self.error(
                DiagCode::ArityMismatch,
                span,
                format!("body has {} locals and {} arguments for {} inputs", locals.vars.len(), locals.arg_count, sig.inputs.len()),
            );
        }
    }

    fn check_place(&mut self, locals: &Locals, place: &Place, span: Span) {
        if locals.vars.get(place.local).is_none() {
            self.error(DiagCode::OutOfRange, span, format!("unknown local {}", place.local));
            return;
        }
        for op in place.index_operands() {
            self.check_operand(locals, op, span);
            if let Ok(ty) = operand_ty(self.krate, locals, op) {
                if !matches!(ty, Ty::Scalar(k) if !k.is_signed()) {
                    self.error(DiagCode::IllTypedPlace, span, "index offsets must have an unsigned scalar type");
                }
            }
        }
        if let Err(e) = place_ty(self.krate, locals, place) {
            self.error(DiagCode::IllTypedPlace, span, e.to_string());
        }
    }

    fn check_operand(&mut self, locals: &Locals, op: &Operand, span: Span) {
        match op {
            Operand::Copy(p) | Operand::Move(p) => self.check_place(locals, p, span),
            Operand::Const(c) => self.check_constant(c, span),
        }
    }

    fn check_constant(&mut self, c: &ConstantValue, span: Span) {
        match (&c.kind, &c.ty) {
            (ConstantKind::Raw(_), _) => {}
            (ConstantKind::Scalar(v), Ty::Scalar(k)) if v.kind == *k => {
                if !v.in_range() {
                    self.error(DiagCode::BadConstant, span, format!("{} does not fit {}", v.value, k.name()));
                }
            }
            (ConstantKind::Bool(_), Ty::Bool) => {}
            (ConstantKind::Adt(variant, fields), ty) => {
                let expected = match ty {
                    Ty::Tuple(tys) if variant.is_none() => Some(tys.len()),
                    Ty::Array(_, ConstGeneric::Value(n)) if variant.is_none() => Some(n.value as usize),
                    Ty::Adt(id, _) => self
                        .krate
                        .type_decls
                        .get(*id)
                        .and_then(|d| d.field_tys(*variant))
                        .map(|f| f.len()),
                    _ => None,
                };
                match expected {
                    Some(n) if n == fields.len() => {}
                    _ => self.error(DiagCode::BadConstant, span, format!("constant does not match type {ty:?}")),
                }
                fields.iter().for_each(|f| self.check_constant(f, span));
            }
            _ => self.error(DiagCode::BadConstant, span, format!("constant does not match type {:?}", c.ty)),
        }
    }

    fn check_rvalue(&mut self, locals: &Locals, rv: &Rvalue, span: Span) {
        match rv {
            Rvalue::Discriminant(p) | Rvalue::Ref(p, _) => self.check_place(locals, p, span),
            Rvalue::Aggregate(kind, ops) => {
                if let AggregateKind::Adt(id, variant, args) = kind {
                    match self.krate.type_decls.get(*id) {
                        None => self.error(DiagCode::UnresolvedId, span, format!("unknown type {id}")),
                        Some(d) => {
                            if let Err(e) = check_arity(&d.meta.name.to_string(), &d.generics, args) {
                                self.error(DiagCode::ArityMismatch, span, e.to_string());
                            }
                            match d.field_tys(*variant) {
                                Some(f) if f.len() == ops.len() => {}
                                _ => self.error(DiagCode::ArityMismatch, span, format!("bad aggregate for `{}`", d.meta.name)),
                            }
                        }
                    }
                }
                ops.iter().for_each(|o| self.check_operand(locals, o, span));
            }
            _ => rv.operands().into_iter().for_each(|o| self.check_operand(locals, o, span)),
        }
    }

    fn check_call(&mut self, scope: &Scope<'_>, locals: &Locals, call: &Call, span: Span) {
        match &call.func {
            FnOperand::Regular(ptr) => {
                self.check_args(scope, &ptr.generics, span);
                match &ptr.func {
                    FunIdOrTraitMethodRef::Fun(id) => match self.krate.fun_decls.get(*id) {
                        None => self.error(DiagCode::UnresolvedId, span, format!("unknown function {id}")),
                        Some(f) => {
                            if let Err(e) = check_arity(&f.meta.name.to_string(), &f.signature.generics, &ptr.generics) {
                                self.error(DiagCode::ArityMismatch, span, e.to_string());
                            }
                            if f.signature.inputs.len() != call.args.len() {
                                self.error(DiagCode::ArityMismatch, span, format!("`{}` expects {} arguments", f.meta.name, f.signature.inputs.len()));
                            }
                        }
                    },
                    FunIdOrTraitMethodRef::TraitMethod(tref, name) => {
                        self.check_trait_ref(scope, &tref.kind, span);
                        self.check_trait_goal(scope, tref.trait_id, &tref.args, span);
                        if let Some(t) = self.krate.trait_decls.get(tref.trait_id) {
                            match t.method(name) {
                                None => self.error(DiagCode::UnresolvedId, span, format!("trait `{}` has no method `{name}`", t.meta.name)),
                                Some(m) => {
                                    if let Err(e) = check_arity(name, &m.signature.generics, &ptr.generics) {
                                        self.error(DiagCode::ArityMismatch, span, e.to_string());
                                    }
                                }
                            }
                        }
                    }
                    FunIdOrTraitMethodRef::UnresolvedMethod(tid, name) => match self.krate.trait_decls.get(*tid) {
                        None => self.error(DiagCode::UnresolvedId, span, format!("unknown trait {tid}")),
                        Some(t) => match t.method(name) {
                            None => self.error(DiagCode::UnresolvedId, span, format!("trait `{}` has no method `{name}`", t.meta.name)),
                            Some(m) => {
                                let g = &ptr.generics;
                                let mg = &m.signature.generics;
                                let ok = g.types.len() == t.generics.types.len() + mg.types.len()
                                    && g.regions.len() == t.generics.regions.len() + mg.regions.len()
                                    && g.const_generics.len() == t.generics.const_generics.len() + mg.const_generics.len();
                                if !ok {
                                    self.error(DiagCode::ArityMismatch, span, format!("wrong number of generics for `{}::{name}`", t.meta.name));
                                }
                            }
                        },
                    },
                }
            }
            FnOperand::Move(p) => self.check_place(locals, p, span),
        }
        call.args.iter().for_each(|a| self.check_operand(locals, a, span));
        self.check_place(locals, &call.dest, span);
    }

    fn check_ullbc(&mut self, scope: &Scope<'_>, sig: &FunSig, body: &UllbcBody) {
        self.check_span(&body.span);
        self.check_locals(scope, sig, &body.locals, body.span);
        if body.blocks.is_empty() {
            self.error(DiagCode::OutOfRange, body.span, "body has no entry block");
        }
        let n = body.blocks.len();
        let locals = &body.locals;
        for block in body.blocks.iter() {
            for st in &block.statements {
                self.check_span(&st.span);
                match &st.kind {
                    ullbc::StatementKind::Assign(p, rv) => {
                        self.check_place(locals, p, st.span);
                        self.check_rvalue(locals, rv, st.span);
                    }
                    ullbc::StatementKind::Drop(p) => self.check_place(locals, p, st.span),
                    ullbc::StatementKind::Nop => {}
                }
            }
            let term = &block.terminator;
            self.check_span(&term.span);
            for succ in term.kind.successors() {
                if succ.index() >= n {
                    self.error(DiagCode::OutOfRange, term.span, format!("unknown block {succ}"));
                }
            }
            match &term.kind {
                TerminatorKind::SwitchInt { discr, cases, .. } => {
                    self.check_operand(locals, discr, term.span);
                    let mut seen = BTreeSet::new();
                    for c in cases {
                        if !seen.insert(c.value.value) {
                            self.error(DiagCode::DuplicateCase, term.span, format!("duplicate case value {}", c.value.value));
                        }
                    }
                }
                TerminatorKind::Match { scrutinee, cases, .. } => {
                    self.check_place(locals, scrutinee, term.span);
                    let mut seen = BTreeSet::new();
                    let variant_count = match place_ty(self.krate, locals, scrutinee) {
                        Ok(Ty::Adt(id, _)) => self.krate.type_decls.get(id).and_then(|d| d.variants()).map(|v| v.len()),
                        _ => None,
                    };
                    match variant_count {
                        None => self.error(DiagCode::IllTypedPlace, term.span, "match scrutinee is not an enum"),
                        Some(count) => {
                            for c in cases {
                                if c.variant.index() >= count {
                                    self.error(DiagCode::OutOfRange, term.span, format!("unknown variant {}", c.variant));
                                }
                                if !seen.insert(c.variant) {
                                    self.error(DiagCode::DuplicateCase, term.span, format!("duplicate variant {}", c.variant));
                                }
                            }
                        }
                    }
                }
                TerminatorKind::Assert { cond, .. } => self.check_operand(locals, cond, term.span),
                TerminatorKind::Call { call, .. } => self.check_call(scope, locals, call, term.span),
                TerminatorKind::Goto(_)
                | TerminatorKind::Return
                | TerminatorKind::Abort(_)
                | TerminatorKind::Unreachable => {}
            }
        }
    }

    fn check_llbc(&mut self, scope: &Scope<'_>, sig: &FunSig, body: &llbc::LlbcBody) {
        self.check_span(&body.span);
        self.check_locals(scope, sig, &body.locals, body.span);
        self.check_block(scope, &body.locals, &body.body, 0);
    }

    fn check_block(&mut self, scope: &Scope<'_>, locals: &Locals, block: &Block, loops: u32) {
        for st in &block.statements {
            self.check_span(&st.span);
            match &st.kind {
                llbc::StatementKind::Assign(p, rv) => {
                    self.check_place(locals, p, st.span);
                    self.check_rvalue(locals, rv, st.span);
                }
                llbc::StatementKind::Call(call) => self.check_call(scope, locals, call, st.span),
                llbc::StatementKind::Drop(p) => self.check_place(locals, p, st.span),
                llbc::StatementKind::Switch(sw) => {
                    match sw {
                        Switch::If(op, _, _) => self.check_operand(locals, op, st.span),
                        Switch::SwitchInt(op, arms, _) => {
                            self.check_operand(locals, op, st.span);
                            let mut seen = BTreeSet::new();
                            for v in arms.iter().flat_map(|(vs, _)| vs) {
                                if !seen.insert(v.value) {
                                    self.error(DiagCode::DuplicateCase, st.span, format!("duplicate case value {}", v.value));
                                }
                            }
                        }
                        Switch::Match(p, arms, _) => {
                            self.check_place(locals, p, st.span);
                            let mut seen = BTreeSet::new();
                            for v in arms.iter().flat_map(|(vs, _)| vs) {
                                if !seen.insert(*v) {
                                    self.error(DiagCode::DuplicateCase, st.span, format!("duplicate variant {v}"));
                                }
                            }
                        }
                    }
                    for b in sw.blocks() {
                        self.check_block(scope, locals, b, loops);
                    }
                }
                llbc::StatementKind::Loop(b) => self.check_block(scope, locals, b, loops + 1),
                llbc::StatementKind::Break(d) | llbc::StatementKind::Continue(d) => {
                    if *d >= loops {
                        self.error(DiagCode::BadLoopDepth, st.span, format!("depth {d} with only {loops} enclosing loops"));
                    }
                }
                llbc::StatementKind::Abort(_) | llbc::StatementKind::Return | llbc::StatementKind::Nop => {}
            }
        }
    }

    fn check_decl_groups(&mut self) {
        let groups = &self.krate.decl_groups;
        if groups.is_empty() {
            return;
        }
        let span = Span::dummy();
        let mut position: BTreeMap<AnyDeclId, usize> = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            if let DeclGroup::Recursive(ids) = g {
                if ids.is_empty() {
                    self.error(DiagCode::BadDeclGroups, span, format!("group {i} is empty"));
                }
            }
            for id in g.members() {
                if position.insert(*id, i).is_some() {
                    self.error(DiagCode::BadDeclGroups, span, format!("{id} appears in several groups"));
                }
            }
        }
        for id in self.krate.all_decl_ids() {
            let Some(&pos) = position.get(&id) else {
                self.error(DiagCode::BadDeclGroups, span, format!("{id} is in no group"));
                continue;
            };
            for dep in dependencies(self.krate, id) {
                match position.get(&dep) {
                    Some(&dpos) if dpos <= pos => {}
                    Some(_) => self.error(DiagCode::BadDeclGroups, span, format!("{id} depends on later group member {dep}")),
                    None => {}
                }
            }
            if let (DeclGroup::NonRecursive(_), true) = (&groups[pos], dependencies(self.krate, id).contains(&id)) {
                self.error(DiagCode::BadDeclGroups, span, format!("{id} is self-recursive but in a non-recursive group"));
            }
        }
        if position.len() != self.krate.all_decl_ids().len() {
            self.error(DiagCode::BadDeclGroups, span, "groups mention unknown declarations");
        }
    }
}
