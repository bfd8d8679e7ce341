//! Capture-free substitution of bound variables.
//!
//! Variables are de Bruijn style (`BoundVar { depth, index }`). Substituting the
//! binder at `target` depth replaces the variables bound there, removes the binder
//! (variables bound further out move one level in) and shifts the replacement's
//! own free variables past the `target` binders that remain around it.

use super::types::{
    BoundVar, ConstGeneric, GenericArgs, GenericParams, TraitClause, TraitRefKind,
    TraitTypeConstraint, Ty,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("{binder}: expected {expected} {component}, got {actual}")]
    Arity { binder: String, component: &'static str, expected: usize, actual: usize },
    #[error("{component} variable {index} is out of range ({len} arguments)")]
    OutOfRange { component: &'static str, index: u32, len: usize },
}

pub struct Substitution<'a> {
    pub args: &'a GenericArgs,
    /// Replacement for `SelfId` when instantiating a trait's own binder.
    pub self_ref: Option<&'a TraitRefKind>,
    pub target: u32,
}

impl<'a> Substitution<'a> {
    pub fn new(args: &'a GenericArgs) -> Substitution<'a> {
        Substitution { args, self_ref: None, target: 0 }
    }
}

pub trait Subst: Sized {
    fn subst(&self, s: &Substitution<'_>) -> Result<Self, SubstError>;
    /// Adds `by` to the depth of every variable.
    fn shift(&self, by: u32) -> Self;
}

/// Replaces the innermost binder's variables in `ty` with `args`.
pub fn substitute(ty: &Ty, args: &GenericArgs) -> Result<Ty, SubstError> {
    ty.subst(&Substitution::new(args))
}

/// Checks that `args` instantiates every component of `params`.
pub fn check_arity(binder: &str, params: &GenericParams, args: &GenericArgs) -> Result<(), SubstError> {
    let checks = [
        ("regions", params.regions.len(), args.regions.len()),
        ("types", params.types.len(), args.types.len()),
        ("const generics", params.const_generics.len(), args.const_generics.len()),
        ("trait refs", params.trait_clauses.len(), args.trait_refs.len()),
    ];
    for (component, expected, actual) in checks {
        if expected != actual {
            return Err(SubstError::Arity { binder: binder.to_string(), component, expected, actual });
        }
    }
    Ok(())
}

/// `substitute` after checking `args` against the binder's parameters.
pub fn substitute_checked(
    binder: &str,
    ty: &Ty,
    params: &GenericParams,
    args: &GenericArgs,
) -> Result<Ty, SubstError> {
    check_arity(binder, params, args)?;
    substitute(ty, args)
}

/// Composition: `substitute(substitute(t, a), b) == substitute(t, compose(a, b))`.
pub fn compose(a: &GenericArgs, b: &GenericArgs) -> Result<GenericArgs, SubstError> {
    a.subst(&Substitution::new(b))
}

fn shift_var(v: BoundVar, by: u32) -> BoundVar {
    BoundVar { depth: v.depth + by, index: v.index }
}

impl Subst for Ty {
    fn subst(&self, s: &Substitution<'_>) -> Result<Ty, SubstError> {
        Ok(match self {
            Ty::Scalar(_) | Ty::Bool => self.clone(),
            Ty::TypeVar(v) => {
                if v.depth == s.target {
                    let arg = s.args.types.get(v.index as usize).ok_or(SubstError::OutOfRange {
                        component: "type",
                        index: v.index,
                        len: s.args.types.len(),
                    })?;
                    arg.shift(s.target)
                } else if v.depth > s.target {
                    Ty::TypeVar(BoundVar { depth: v.depth - 1, index: v.index })
                } else {
                    self.clone()
                }
            }
            Ty::Adt(id, args) => Ty::Adt(*id, args.subst(s)?),
            Ty::Ref(r, ty, m) => Ty::Ref(r.clone(), Box::new(ty.subst(s)?), *m),
            Ty::Tuple(tys) => Ty::Tuple(tys.iter().map(|t| t.subst(s)).collect::<Result<_, _>>()?),
            Ty::Array(ty, len) => Ty::Array(Box::new(ty.subst(s)?), len.subst(s)?),
            Ty::AssocType(tref, name) => Ty::AssocType(Box::new(tref.subst(s)?), name.clone()),
        })
    }

    fn shift(&self, by: u32) -> Ty {
        if by == 0 {
            return self.clone();
        }
        match self {
            Ty::Scalar(_) | Ty::Bool => self.clone(),
            Ty::TypeVar(v) => Ty::TypeVar(shift_var(*v, by)),
            Ty::Adt(id, args) => Ty::Adt(*id, args.shift(by)),
            Ty::Ref(r, ty, m) => Ty::Ref(r.clone(), Box::new(ty.shift(by)), *m),
            Ty::Tuple(tys) => Ty::Tuple(tys.iter().map(|t| t.shift(by)).collect()),
            Ty::Array(ty, len) => Ty::Array(Box::new(ty.shift(by)), len.shift(by)),
            Ty::AssocType(tref, name) => Ty::AssocType(Box::new(tref.shift(by)), name.clone()),
        }
    }
}

impl Subst for ConstGeneric {
    fn subst(&self, s: &Substitution<'_>) -> Result<ConstGeneric, SubstError> {
        Ok(match self {
            ConstGeneric::Value(_) => self.clone(),
            ConstGeneric::Var(v) if v.depth == s.target => s
                .args
                .const_generics
                .get(v.index as usize)
                .ok_or(SubstError::OutOfRange {
                    component: "const generic",
                    index: v.index,
                    len: s.args.const_generics.len(),
                })?
                .shift(s.target),
            ConstGeneric::Var(v) if v.depth > s.target => {
                ConstGeneric::Var(BoundVar { depth: v.depth - 1, index: v.index })
            }
            ConstGeneric::Var(_) => self.clone(),
        })
    }

    fn shift(&self, by: u32) -> ConstGeneric {
        match self {
            ConstGeneric::Value(_) => self.clone(),
            ConstGeneric::Var(v) => ConstGeneric::Var(shift_var(*v, by)),
        }
    }
}

impl Subst for GenericArgs {
    fn subst(&self, s: &Substitution<'_>) -> Result<GenericArgs, SubstError> {
        Ok(GenericArgs {
            regions: self.regions.clone(),
            types: self.types.iter().map(|t| t.subst(s)).collect::<Result<_, _>>()?,
            const_generics: self.const_generics.iter().map(|c| c.subst(s)).collect::<Result<_, _>>()?,
            trait_refs: self.trait_refs.iter().map(|r| r.subst(s)).collect::<Result<_, _>>()?,
        })
    }

    fn shift(&self, by: u32) -> GenericArgs {
        GenericArgs {
            regions: self.regions.clone(),
            types: self.types.iter().map(|t| t.shift(by)).collect(),
            const_generics: self.const_generics.iter().map(|c| c.shift(by)).collect(),
            trait_refs: self.trait_refs.iter().map(|r| r.shift(by)).collect(),
        }
    }
}

impl Subst for TraitRefKind {
    fn subst(&self, s: &Substitution<'_>) -> Result<TraitRefKind, SubstError> {
        Ok(match self {
            TraitRefKind::TraitImpl(id, args) => TraitRefKind::TraitImpl(*id, args.subst(s)?),
            TraitRefKind::Clause(c) if s.target == 0 => s
                .args
                .trait_refs
                .get(c.0 as usize)
                .cloned()
                .ok_or(SubstError::OutOfRange {
                    component: "trait clause",
                    index: c.0,
                    len: s.args.trait_refs.len(),
                })?,
            TraitRefKind::SelfId => match s.self_ref {
                Some(r) => r.shift(s.target),
                None => TraitRefKind::SelfId,
            },
            TraitRefKind::ParentClause(base, i) => {
                TraitRefKind::ParentClause(Box::new(base.subst(s)?), *i)
            }
            TraitRefKind::ItemClause(base, name, i) => {
                TraitRefKind::ItemClause(Box::new(base.subst(s)?), name.clone(), *i)
            }
            TraitRefKind::Clause(_) | TraitRefKind::Unknown(_) => self.clone(),
        })
    }

    fn shift(&self, by: u32) -> TraitRefKind {
        match self {
            TraitRefKind::TraitImpl(id, args) => TraitRefKind::TraitImpl(*id, args.shift(by)),
            TraitRefKind::ParentClause(base, i) => TraitRefKind::ParentClause(Box::new(base.shift(by)), *i),
            TraitRefKind::ItemClause(base, name, i) => {
                TraitRefKind::ItemClause(Box::new(base.shift(by)), name.clone(), *i)
            }
            TraitRefKind::Clause(_) | TraitRefKind::SelfId | TraitRefKind::Unknown(_) => self.clone(),
        }
    }
}

impl Subst for TraitClause {
    fn subst(&self, s: &Substitution<'_>) -> Result<TraitClause, SubstError> {
        Ok(TraitClause { clause_id: self.clause_id, trait_id: self.trait_id, args: self.args.subst(s)? })
    }

    fn shift(&self, by: u32) -> TraitClause {
        TraitClause { clause_id: self.clause_id, trait_id: self.trait_id, args: self.args.shift(by) }
    }
}

impl Subst for TraitTypeConstraint {
    fn subst(&self, s: &Substitution<'_>) -> Result<TraitTypeConstraint, SubstError> {
        Ok(TraitTypeConstraint {
            trait_ref: self.trait_ref.subst(s)?,
            name: self.name.clone(),
            ty: self.ty.subst(s)?,
        })
    }

    fn shift(&self, by: u32) -> TraitTypeConstraint {
        TraitTypeConstraint { trait_ref: self.trait_ref.shift(by), name: self.name.clone(), ty: self.ty.shift(by) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ids::{TraitClauseId, TypeDeclId};
    use crate::ir::types::ScalarKind;

    fn u32_ty() -> Ty {
        Ty::Scalar(ScalarKind::U32)
    }

    #[test]
    fn var_lookup() {
        let args = GenericArgs::from_types(vec![u32_ty()]);
        assert_eq!(substitute(&Ty::var(0), &args).unwrap(), u32_ty());
    }

    #[test]
    fn congruence_through_adt() {
        let vec = TypeDeclId(0);
        let ty = Ty::Adt(vec, GenericArgs::from_types(vec![Ty::var(0)]));
        let args = GenericArgs::from_types(vec![Ty::Bool]);
        assert_eq!(
            substitute(&ty, &args).unwrap(),
            Ty::Adt(vec, GenericArgs::from_types(vec![Ty::Bool]))
        );
    }

    #[test]
    fn out_of_range_is_reported() {
        let err = substitute(&Ty::var(2), &GenericArgs::from_types(vec![Ty::Bool])).unwrap_err();
        assert_eq!(err, SubstError::OutOfRange { component: "type", index: 2, len: 1 });
    }

    #[test]
    fn arity_checked_against_params() {
        let mut params = GenericParams::empty();
        params.types.push(crate::ir::types::TypeVarDecl { index: 0, name: "T".into() });
        let err = substitute_checked("fn id", &Ty::var(0), &params, &GenericArgs::empty()).unwrap_err();
        assert_eq!(
            err,
            SubstError::Arity { binder: "fn id".into(), component: "types", expected: 1, actual: 0 }
        );
    }

    #[test]
    fn outer_binder_shifts() {
        // A method signature mentions the trait's first parameter at depth 1 and its own at depth 0.
        let ty = Ty::Tuple(vec![Ty::TypeVar(BoundVar::new(1, 0)), Ty::TypeVar(BoundVar::new(0, 0))]);
        // Trait args written in the caller's scope, mentioning the caller's variable 3.
        let trait_args = GenericArgs::from_types(vec![Ty::var(3)]);
        let s = Substitution { args: &trait_args, self_ref: None, target: 1 };
        let out = ty.subst(&s).unwrap();
        assert_eq!(
            out,
            Ty::Tuple(vec![Ty::TypeVar(BoundVar::new(1, 3)), Ty::TypeVar(BoundVar::new(0, 0))])
        );
    }

    #[test]
    fn clause_replaced_by_trait_ref() {
        let tref = TraitRefKind::Clause(TraitClauseId(0));
        let args = GenericArgs {
            trait_refs: vec![TraitRefKind::Clause(TraitClauseId(4))],
            ..GenericArgs::default()
        };
        let out = tref.subst(&Substitution::new(&args)).unwrap();
        assert_eq!(out, TraitRefKind::Clause(TraitClauseId(4)));
    }
}
