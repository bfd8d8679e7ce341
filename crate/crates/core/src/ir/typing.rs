//! Types of places, operands and right-hand sides.

use super::expressions::{AggregateKind, BinOp, Operand, Place, ProjectionElem, Rvalue, UnOp};
use super::ids::{LocalId, TypeDeclId, VariantId};
use super::krate::{TranslatedCrate, TypeDeclKind};
use super::subst::{substitute, SubstError};
use super::types::{ConstGeneric, Region, ScalarKind, Ty};
use super::ullbc::Locals;
use super::values::ScalarValue;

/// Scalar kind used for array lengths.
pub const LENGTH_KIND: ScalarKind = ScalarKind::U64;

pub fn array_len(n: usize) -> ConstGeneric {
    ConstGeneric::Value(ScalarValue { kind: LENGTH_KIND, value: n as i128 })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unknown local {0}")]
    UnknownLocal(LocalId),
    #[error("unknown type declaration {0}")]
    UnknownType(TypeDeclId),
    #[error("cannot apply {proj} to a value of type {ty:?}")]
    BadProjection { proj: &'static str, ty: Ty },
    #[error("field {field} out of range")]
    FieldOutOfRange { field: u32 },
    #[error("variant {0} out of range")]
    VariantOutOfRange(VariantId),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

pub fn local_ty(locals: &Locals, local: LocalId) -> Result<&Ty, TypeError> {
    locals.vars.get(local).map(|l| &l.ty).ok_or(TypeError::UnknownLocal(local))
}

pub fn place_ty(krate: &TranslatedCrate, locals: &Locals, place: &Place) -> Result<Ty, TypeError> {
    let mut ty = local_ty(locals, place.local)?.clone();
    let mut variant: Option<VariantId> = None;
    for elem in &place.projection {
        match elem {
            ProjectionElem::Deref => match ty {
                Ty::Ref(_, inner, _) => ty = *inner,
                other => return Err(TypeError::BadProjection { proj: "deref", ty: other }),
            },
            ProjectionElem::Downcast(v) => match &ty {
                Ty::Adt(id, _) => {
                    let decl = krate.type_decls.get(*id).ok_or(TypeError::UnknownType(*id))?;
                    match &decl.kind {
                        TypeDeclKind::Enum(vs) if (v.0 as usize) < vs.len() => variant = Some(*v),
                        TypeDeclKind::Enum(_) => return Err(TypeError::VariantOutOfRange(*v)),
                        _ => return Err(TypeError::BadProjection { proj: "downcast", ty }),
                    }
                }
                _ => return Err(TypeError::BadProjection { proj: "downcast", ty }),
            },
            ProjectionElem::Field(f) => {
                ty = field_ty(krate, &ty, variant.take(), f.0)?;
            }
            ProjectionElem::Index(_) => match ty {
                Ty::Array(elem, _) => ty = *elem,
                other => return Err(TypeError::BadProjection { proj: "index", ty: other }),
            },
        }
    }
    Ok(ty)
}

fn field_ty(krate: &TranslatedCrate, ty: &Ty, variant: Option<VariantId>, field: u32) -> Result<Ty, TypeError> {
    match ty {
        Ty::Tuple(tys) if variant.is_none() => {
            tys.get(field as usize).cloned().ok_or(TypeError::FieldOutOfRange { field })
        }
        Ty::Adt(id, args) => {
            let decl = krate.type_decls.get(*id).ok_or(TypeError::UnknownType(*id))?;
            let fields = decl
                .field_tys(variant)
                .ok_or_else(|| TypeError::BadProjection { proj: "field", ty: ty.clone() })?;
            let fty = fields.get(field as usize).ok_or(TypeError::FieldOutOfRange { field })?;
            Ok(substitute(fty, args)?)
        }
        _ => Err(TypeError::BadProjection { proj: "field", ty: ty.clone() }),
    }
}

pub fn operand_ty(krate: &TranslatedCrate, locals: &Locals, op: &Operand) -> Result<Ty, TypeError> {
    match op {
        Operand::Copy(p) | Operand::Move(p) => place_ty(krate, locals, p),
        Operand::Const(c) => Ok(c.ty.clone()),
    }
}

/// Type of an rvalue; `None` for discriminant reads, whose integer type is
/// taken from the destination.
pub fn rvalue_ty(krate: &TranslatedCrate, locals: &Locals, rv: &Rvalue) -> Result<Option<Ty>, TypeError> {
    Ok(Some(match rv {
        Rvalue::Use(op) => operand_ty(krate, locals, op)?,
        Rvalue::BinOp(op, a, _) => {
            let lhs = operand_ty(krate, locals, a)?;
            if op.is_comparison() {
                Ty::Bool
            } else if op.is_checked() {
                Ty::Tuple(vec![lhs, Ty::Bool])
            } else {
                lhs
            }
        }
        Rvalue::UnOp(UnOp::Cast(k), _) => Ty::Scalar(*k),
        Rvalue::UnOp(_, op) => operand_ty(krate, locals, op)?,
        Rvalue::Discriminant(_) => return Ok(None),
        Rvalue::Aggregate(AggregateKind::Adt(id, _, args), _) => Ty::Adt(*id, args.clone()),
        Rvalue::Aggregate(AggregateKind::Tuple, ops) => Ty::Tuple(
            ops.iter().map(|o| operand_ty(krate, locals, o)).collect::<Result<_, _>>()?,
        ),
        Rvalue::Aggregate(AggregateKind::Array(elem), ops) => {
            Ty::Array(Box::new(elem.clone()), array_len(ops.len()))
        }
        Rvalue::Ref(p, m) => Ty::Ref(Region::erased(), Box::new(place_ty(krate, locals, p)?), *m),
    }))
}

/// True for the arithmetic operators whose operands must be integers.
pub fn is_integer_only(op: BinOp) -> bool {
    !matches!(op, BinOp::Eq | BinOp::Ne | BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor)
}
