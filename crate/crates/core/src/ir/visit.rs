//! Generic traversals over IR terms.

use super::expressions::{AggregateKind, Call, FnOperand, FnPtr, FunIdOrTraitMethodRef, Operand, Place, ProjectionElem, Rvalue};
use super::ids::LocalId;
use super::krate::{Body, FunDecl, FunSig, TraitDecl, TraitImpl, TypeDecl, TypeDeclKind};
use super::llbc::{self, Block, Switch};
use super::meta::Span;
use super::types::{ConstGeneric, GenericArgs, GenericParams, TraitClause, TraitRefKind, Ty};
use super::ullbc::{self, TerminatorKind, UllbcBody};
use super::values::{ConstantKind, ConstantValue};

/// Read-only visitor. Every hook is called once per node, parents first.
pub trait Visitor {
    fn visit_ty(&mut self, _ty: &Ty) {}
    fn visit_trait_ref(&mut self, _tref: &TraitRefKind) {}
    fn visit_fn_ptr(&mut self, _ptr: &FnPtr) {}
    fn visit_constant(&mut self, _c: &ConstantValue) {}
    fn visit_local(&mut self, _local: LocalId) {}
    fn visit_place(&mut self, _place: &Place) {}
    fn visit_aggregate(&mut self, _kind: &AggregateKind) {}
}

pub trait Walk {
    fn walk(&self, v: &mut dyn Visitor);
}

impl Walk for Ty {
    fn walk(&self, v: &mut dyn Visitor) {
        v.visit_ty(self);
        match self {
            Ty::Scalar(_) | Ty::Bool | Ty::TypeVar(_) => {}
            Ty::Adt(_, args) => args.walk(v),
            Ty::Ref(_, ty, _) => ty.walk(v),
            Ty::Tuple(tys) => tys.iter().for_each(|t| t.walk(v)),
            Ty::Array(ty, len) => {
                ty.walk(v);
                len.walk(v);
            }
            Ty::AssocType(tref, _) => tref.walk(v),
        }
    }
}

impl Walk for ConstGeneric {
    fn walk(&self, _v: &mut dyn Visitor) {}
}

impl Walk for GenericArgs {
    fn walk(&self, v: &mut dyn Visitor) {
        self.types.iter().for_each(|t| t.walk(v));
        self.const_generics.iter().for_each(|c| c.walk(v));
        self.trait_refs.iter().for_each(|r| r.walk(v));
    }
}

impl Walk for TraitRefKind {
    fn walk(&self, v: &mut dyn Visitor) {
        v.visit_trait_ref(self);
        match self {
            TraitRefKind::TraitImpl(_, args) => args.walk(v),
            TraitRefKind::ParentClause(base, _) | TraitRefKind::ItemClause(base, _, _) => base.walk(v),
            TraitRefKind::Clause(_) | TraitRefKind::SelfId | TraitRefKind::Unknown(_) => {}
        }
    }
}

impl Walk for TraitClause {
    fn walk(&self, v: &mut dyn Visitor) {
        self.args.walk(v);
    }
}

impl Walk for GenericParams {
    fn walk(&self, v: &mut dyn Visitor) {
        self.trait_clauses.iter().for_each(|c| c.walk(v));
        for o in &self.types_outlive {
            o.ty.walk(v);
        }
        for c in &self.trait_type_constraints {
            c.trait_ref.walk(v);
            c.ty.walk(v);
        }
    }
}

impl Walk for ConstantValue {
    fn walk(&self, v: &mut dyn Visitor) {
        v.visit_constant(self);
        self.ty.walk(v);
        if let ConstantKind::Adt(_, fields) = &self.kind {
            fields.iter().for_each(|f| f.walk(v));
        }
    }
}

impl Walk for Place {
    fn walk(&self, v: &mut dyn Visitor) {
        v.visit_place(self);
        v.visit_local(self.local);
        for elem in &self.projection {
            if let ProjectionElem::Index(op) = elem {
                op.walk(v);
            }
        }
    }
}

impl Walk for Operand {
    fn walk(&self, v: &mut dyn Visitor) {
        match self {
            Operand::Copy(p) | Operand::Move(p) => p.walk(v),
            Operand::Const(c) => c.walk(v),
        }
    }
}

impl Walk for Rvalue {
    fn walk(&self, v: &mut dyn Visitor) {
        match self {
            Rvalue::Use(op) | Rvalue::UnOp(_, op) => op.walk(v),
            Rvalue::BinOp(_, a, b) => {
                a.walk(v);
                b.walk(v);
            }
            Rvalue::Discriminant(p) | Rvalue::Ref(p, _) => p.walk(v),
            Rvalue::Aggregate(kind, ops) => {
                v.visit_aggregate(kind);
                match kind {
                    AggregateKind::Adt(_, _, args) => args.walk(v),
                    AggregateKind::Tuple => {}
                    AggregateKind::Array(ty) => ty.walk(v),
                }
                ops.iter().for_each(|o| o.walk(v));
            }
        }
    }
}

impl Walk for FnPtr {
    fn walk(&self, v: &mut dyn Visitor) {
        v.visit_fn_ptr(self);
        if let FunIdOrTraitMethodRef::TraitMethod(tref, _) = &self.func {
            tref.kind.walk(v);
            tref.args.walk(v);
        }
        self.generics.walk(v);
    }
}

impl Walk for Call {
    fn walk(&self, v: &mut dyn Visitor) {
        match &self.func {
            FnOperand::Regular(ptr) => ptr.walk(v),
            FnOperand::Move(p) => p.walk(v),
        }
        self.args.iter().for_each(|a| a.walk(v));
        self.dest.walk(v);
    }
}

impl Walk for ullbc::Statement {
    fn walk(&self, v: &mut dyn Visitor) {
        match &self.kind {
            ullbc::StatementKind::Assign(p, rv) => {
                p.walk(v);
                rv.walk(v);
            }
            ullbc::StatementKind::Drop(p) => p.walk(v),
            ullbc::StatementKind::Nop => {}
        }
    }
}

impl Walk for ullbc::Terminator {
    fn walk(&self, v: &mut dyn Visitor) {
        match &self.kind {
            TerminatorKind::SwitchInt { discr, .. } => discr.walk(v),
            TerminatorKind::Match { scrutinee, .. } => scrutinee.walk(v),
            TerminatorKind::Assert { cond, .. } => cond.walk(v),
            TerminatorKind::Call { call, .. } => call.walk(v),
            TerminatorKind::Goto(_)
            | TerminatorKind::Return
            | TerminatorKind::Abort(_)
            | TerminatorKind::Unreachable => {}
        }
    }
}

impl Walk for ullbc::Locals {
    fn walk(&self, v: &mut dyn Visitor) {
        self.vars.iter().for_each(|l| l.ty.walk(v));
    }
}

impl Walk for UllbcBody {
    fn walk(&self, v: &mut dyn Visitor) {
        self.locals.walk(v);
        for block in &self.blocks {
            block.statements.iter().for_each(|s| s.walk(v));
            block.terminator.walk(v);
        }
    }
}

impl Walk for Block {
    fn walk(&self, v: &mut dyn Visitor) {
        self.statements.iter().for_each(|s| s.walk(v));
    }
}

impl Walk for llbc::Statement {
    fn walk(&self, v: &mut dyn Visitor) {
        match &self.kind {
            llbc::StatementKind::Assign(p, rv) => {
                p.walk(v);
                rv.walk(v);
            }
            llbc::StatementKind::Call(call) => call.walk(v),
            llbc::StatementKind::Drop(p) => p.walk(v),
            llbc::StatementKind::Switch(sw) => {
                match sw {
                    Switch::If(op, _, _) | Switch::SwitchInt(op, _, _) => op.walk(v),
                    Switch::Match(p, _, _) => p.walk(v),
                }
                sw.blocks().into_iter().for_each(|b| b.walk(v));
            }
            llbc::StatementKind::Loop(b) => b.walk(v),
            llbc::StatementKind::Abort(_)
            | llbc::StatementKind::Return
            | llbc::StatementKind::Nop
            | llbc::StatementKind::Break(_)
            | llbc::StatementKind::Continue(_) => {}
        }
    }
}

impl Walk for llbc::LlbcBody {
    fn walk(&self, v: &mut dyn Visitor) {
        self.locals.walk(v);
        self.body.walk(v);
    }
}

impl Walk for Body {
    fn walk(&self, v: &mut dyn Visitor) {
        match self {
            Body::Ullbc(b) => b.walk(v),
            Body::Llbc(b) => b.walk(v),
            Body::Opaque => {}
        }
    }
}

impl Walk for FunSig {
    fn walk(&self, v: &mut dyn Visitor) {
        self.generics.walk(v);
        self.inputs.iter().for_each(|t| t.walk(v));
        self.output.walk(v);
    }
}

impl Walk for FunDecl {
    fn walk(&self, v: &mut dyn Visitor) {
        self.signature.walk(v);
        self.body.walk(v);
    }
}

impl Walk for TypeDecl {
    fn walk(&self, v: &mut dyn Visitor) {
        self.generics.walk(v);
        match &self.kind {
            TypeDeclKind::Struct(fields) => fields.iter().for_each(|t| t.walk(v)),
            TypeDeclKind::Enum(variants) => {
                variants.iter().flat_map(|var| var.fields.iter()).for_each(|t| t.walk(v))
            }
            TypeDeclKind::Opaque => {}
        }
    }
}

impl Walk for TraitDecl {
    fn walk(&self, v: &mut dyn Visitor) {
        self.generics.walk(v);
        self.parent_clauses.iter().for_each(|c| c.walk(v));
        self.assoc_types.iter().flat_map(|a| a.bounds.iter()).for_each(|c| c.walk(v));
        self.methods.iter().for_each(|m| m.signature.walk(v));
    }
}

impl Walk for TraitImpl {
    fn walk(&self, v: &mut dyn Visitor) {
        self.generics.walk(v);
        self.trait_args.walk(v);
        self.parent_trait_refs.iter().for_each(|r| r.walk(v));
        for a in &self.assoc_types {
            a.ty.walk(v);
            a.bound_refs.iter().for_each(|r| r.walk(v));
        }
    }
}

/// Collects every local mentioned in a term.
pub fn locals_used<T: Walk + ?Sized>(term: &T) -> Vec<LocalId> {
    struct Collect(Vec<LocalId>);
    impl Visitor for Collect {
        fn visit_local(&mut self, local: LocalId) {
            self.0.push(local);
        }
    }
    let mut c = Collect(Vec::new());
    term.walk(&mut c);
    c.0
}

// Mutable helpers.

pub fn place_locals_mut(place: &mut Place, f: &mut dyn FnMut(&mut LocalId)) {
    f(&mut place.local);
    for elem in &mut place.projection {
        if let ProjectionElem::Index(op) = elem {
            operand_locals_mut(op, f);
        }
    }
}

pub fn operand_locals_mut(op: &mut Operand, f: &mut dyn FnMut(&mut LocalId)) {
    match op {
        Operand::Copy(p) | Operand::Move(p) => place_locals_mut(p, f),
        Operand::Const(_) => {}
    }
}

pub fn rvalue_locals_mut(rv: &mut Rvalue, f: &mut dyn FnMut(&mut LocalId)) {
    match rv {
        Rvalue::Use(op) | Rvalue::UnOp(_, op) => operand_locals_mut(op, f),
        Rvalue::BinOp(_, a, b) => {
            operand_locals_mut(a, f);
            operand_locals_mut(b, f);
        }
        Rvalue::Discriminant(p) | Rvalue::Ref(p, _) => place_locals_mut(p, f),
        Rvalue::Aggregate(_, ops) => ops.iter_mut().for_each(|o| operand_locals_mut(o, f)),
    }
}

pub fn call_locals_mut(call: &mut Call, f: &mut dyn FnMut(&mut LocalId)) {
    if let FnOperand::Move(p) = &mut call.func {
        place_locals_mut(p, f);
    }
    call.args.iter_mut().for_each(|a| operand_locals_mut(a, f));
    place_locals_mut(&mut call.dest, f);
}

pub fn ullbc_locals_mut(body: &mut UllbcBody, f: &mut dyn FnMut(&mut LocalId)) {
    for block in body.blocks.iter_mut() {
        for st in &mut block.statements {
            match &mut st.kind {
                ullbc::StatementKind::Assign(p, rv) => {
                    place_locals_mut(p, f);
                    rvalue_locals_mut(rv, f);
                }
                ullbc::StatementKind::Drop(p) => place_locals_mut(p, f),
                ullbc::StatementKind::Nop => {}
            }
        }
        match &mut block.terminator.kind {
            TerminatorKind::SwitchInt { discr, .. } => operand_locals_mut(discr, f),
            TerminatorKind::Match { scrutinee, .. } => place_locals_mut(scrutinee, f),
            TerminatorKind::Assert { cond, .. } => operand_locals_mut(cond, f),
            TerminatorKind::Call { call, .. } => call_locals_mut(call, f),
            _ => {}
        }
    }
}

fn place_constants_mut(place: &mut Place, span: Span, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    for elem in &mut place.projection {
        if let ProjectionElem::Index(op) = elem {
            operand_constants_mut(op, span, f);
        }
    }
}

fn operand_constants_mut(op: &mut Operand, span: Span, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    match op {
        Operand::Copy(p) | Operand::Move(p) => place_constants_mut(p, span, f),
        Operand::Const(c) => f(c, span),
    }
}

fn rvalue_constants_mut(rv: &mut Rvalue, span: Span, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    match rv {
        Rvalue::Use(op) | Rvalue::UnOp(_, op) => operand_constants_mut(op, span, f),
        Rvalue::BinOp(_, a, b) => {
            operand_constants_mut(a, span, f);
            operand_constants_mut(b, span, f);
        }
        Rvalue::Discriminant(p) | Rvalue::Ref(p, _) => place_constants_mut(p, span, f),
        Rvalue::Aggregate(_, ops) => ops.iter_mut().for_each(|o| operand_constants_mut(o, span, f)),
    }
}

fn call_constants_mut(call: &mut Call, span: Span, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    if let FnOperand::Move(p) = &mut call.func {
        place_constants_mut(p, span, f);
    }
    call.args.iter_mut().for_each(|a| operand_constants_mut(a, span, f));
    place_constants_mut(&mut call.dest, span, f);
}

/// Visits every operand constant of a ULLBC body with the span of the enclosing
/// statement or terminator.
pub fn ullbc_constants_mut(body: &mut UllbcBody, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    for block in body.blocks.iter_mut() {
        for st in &mut block.statements {
            let span = st.span;
            match &mut st.kind {
                ullbc::StatementKind::Assign(p, rv) => {
                    place_constants_mut(p, span, f);
                    rvalue_constants_mut(rv, span, f);
                }
                ullbc::StatementKind::Drop(p) => place_constants_mut(p, span, f),
                ullbc::StatementKind::Nop => {}
            }
        }
        let span = block.terminator.span;
        match &mut block.terminator.kind {
            TerminatorKind::SwitchInt { discr, .. } => operand_constants_mut(discr, span, f),
            TerminatorKind::Match { scrutinee, .. } => place_constants_mut(scrutinee, span, f),
            TerminatorKind::Assert { cond, .. } => operand_constants_mut(cond, span, f),
            TerminatorKind::Call { call, .. } => call_constants_mut(call, span, f),
            _ => {}
        }
    }
}

/// Same as [`ullbc_constants_mut`] for structured bodies.
pub fn llbc_constants_mut(block: &mut Block, f: &mut dyn FnMut(&mut ConstantValue, Span)) {
    for st in &mut block.statements {
        let span = st.span;
        match &mut st.kind {
            llbc::StatementKind::Assign(p, rv) => {
                place_constants_mut(p, span, f);
                rvalue_constants_mut(rv, span, f);
            }
            llbc::StatementKind::Call(call) => call_constants_mut(call, span, f),
            llbc::StatementKind::Drop(p) => place_constants_mut(p, span, f),
            llbc::StatementKind::Switch(sw) => {
                match sw {
                    Switch::If(op, _, _) | Switch::SwitchInt(op, _, _) => operand_constants_mut(op, span, f),
                    Switch::Match(p, _, _) => place_constants_mut(p, span, f),
                }
                sw.blocks_mut().into_iter().for_each(|b| llbc_constants_mut(b, f));
            }
            llbc::StatementKind::Loop(b) => llbc_constants_mut(b, f),
            _ => {}
        }
    }
}
