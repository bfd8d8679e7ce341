use crate::ir::subst::{substitute, Subst, Substitution};
use crate::ir::{DiagCode, Diagnostic, GenericArgs, GenericParams, TraitRefKind, TranslatedCrate, Ty};

pub const MAX_REWRITES: usize = 64;

/// Rewrites associated types known to be equal to some other type, either
/// through a `T::Item = U` constraint or through the impl that defines them.
pub fn normalize_assoc_types(ty: &Ty, params: &GenericParams, krate: &TranslatedCrate) -> Result<Ty, Diagnostic> {
    let mut n = Normalizer { params, krate, rewrites: 0 };
    n.ty(ty)
}

pub fn normalize_args(args: &GenericArgs, params: &GenericParams, krate: &TranslatedCrate) -> Result<GenericArgs, Diagnostic> {
    let mut n = Normalizer { params, krate, rewrites: 0 };
    n.args(args)
}

struct Normalizer<'a> {
    params: &'a GenericParams,
    krate: &'a TranslatedCrate,
    rewrites: usize,
}

impl Normalizer<'_> {
    fn step(&self, tref: &TraitRefKind, name: &str) -> Option<Ty> {
        if let Some(c) = self.params.trait_type_constraints.iter().find(|c| c.trait_ref == *tref && c.name == name) {
            return Some(c.ty.clone());
        }
        let TraitRefKind::TraitImpl(id, args) = tref else { return None };
        let imp = self.krate.trait_impls.get(*id)?;
        substitute(&imp.assoc_type(name)?.ty, args).ok()
    }

    fn ty(&mut self, ty: &Ty) -> Result<Ty, Diagnostic> {
        Ok(match ty {
            Ty::Scalar(_) | Ty::Bool | Ty::TypeVar(_) => ty.clone(),
            Ty::Adt(id, args) => Ty::Adt(*id, self.args(args)?),
            Ty::Ref(r, t, m) => Ty::Ref(r.clone(), Box::new(self.ty(t)?), *m),
            Ty::Tuple(ts) => Ty::Tuple(ts.iter().map(|t| self.ty(t)).collect::<Result<_, _>>()?),
            Ty::Array(t, n) => Ty::Array(Box::new(self.ty(t)?), n.clone()),
            Ty::AssocType(tref, name) => {
                let tref = self.tref(tref)?;
                match self.step(&tref, name) {
                    Some(next) => {
                        self.rewrites += 1;
                        if self.rewrites > MAX_REWRITES {
                            return Err(Diagnostic::error(
                                DiagCode::NormalizationDiverged,
                                None,
                                format!("associated type `{name}` still unresolved after {MAX_REWRITES} rewrites"),
                            ));
                        }
                        self.ty(&next)?
                    }
                    None => Ty::AssocType(Box::new(tref), name.clone()),
                }
            }
        })
    }

    fn args(&mut self, args: &GenericArgs) -> Result<GenericArgs, Diagnostic> {
        Ok(GenericArgs {
            regions: args.regions.clone(),
            types: args.types.iter().map(|t| self.ty(t)).collect::<Result<_, _>>()?,
            const_generics: args.const_generics.clone(),
            trait_refs: args.trait_refs.iter().map(|r| self.tref(r)).collect::<Result<_, _>>()?,
        })
    }

    fn tref(&mut self, r: &TraitRefKind) -> Result<TraitRefKind, Diagnostic> {
        Ok(match r {
            TraitRefKind::TraitImpl(id, args) => TraitRefKind::TraitImpl(*id, self.args(args)?),
            TraitRefKind::ParentClause(b, i) => TraitRefKind::ParentClause(Box::new(self.tref(b)?), *i),
            TraitRefKind::ItemClause(b, n, i) => TraitRefKind::ItemClause(Box::new(self.tref(b)?), n.clone(), *i),
            _ => r.clone(),
        })
    }
}

/// Instantiates a trait method's signature-level `item` with the trait's
/// arguments (and proof) then the method's own arguments.
pub fn instantiate_method<T: Subst>(
    item: &T,
    trait_args: &GenericArgs,
    self_ref: &TraitRefKind,
    method_args: &GenericArgs,
) -> Result<T, crate::ir::subst::SubstError> {
    let outer = item.subst(&Substitution { args: trait_args, self_ref: Some(self_ref), target: 1 })?;
    outer.subst(&Substitution::new(method_args))
}
