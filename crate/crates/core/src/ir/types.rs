//! Types, generic parameters and trait references.

use serde::{Deserialize, Serialize};

use super::ids::{IndexVec, TraitClauseId, TraitDeclId, TraitImplId, TypeDeclId};
use super::values::ScalarValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScalarKind {
    U8,
    U16,
    U32,
    U64,
    I8,
    I16,
    I32,
    I64,
}

impl ScalarKind {
    pub const ALL: [ScalarKind; 8] = [
        ScalarKind::U8,
        ScalarKind::U16,
        ScalarKind::U32,
        ScalarKind::U64,
        ScalarKind::I8,
        ScalarKind::I16,
        ScalarKind::I32,
        ScalarKind::I64,
    ];

    pub fn bits(self) -> u32 {
        match self {
            ScalarKind::U8 | ScalarKind::I8 => 8,
            ScalarKind::U16 | ScalarKind::I16 => 16,
            ScalarKind::U32 | ScalarKind::I32 => 32,
            ScalarKind::U64 | ScalarKind::I64 => 64,
        }
    }

    pub fn bytes(self) -> usize {
        (self.bits() / 8) as usize
    }

    pub fn is_signed(self) -> bool {
        matches!(self, ScalarKind::I8 | ScalarKind::I16 | ScalarKind::I32 | ScalarKind::I64)
    }

    pub fn min(self) -> i128 {
        if self.is_signed() {
            -(1i128 << (self.bits() - 1))
        } else {
            0
        }
    }

    pub fn max(self) -> i128 {
        if self.is_signed() {
            (1i128 << (self.bits() - 1)) - 1
        } else {
            (1i128 << self.bits()) - 1
        }
    }

    pub fn contains(self, value: i128) -> bool {
        self.min() <= value && value <= self.max()
    }

    /// Two's-complement wrap of `value` into this kind's range.
    pub fn wrap(self, value: i128) -> i128 {
        let bits = self.bits();
        let mask = (1i128 << bits) - 1;
        let low = value & mask;
        if self.is_signed() && low > self.max() {
            low - (1i128 << bits)
        } else {
            low
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::U8 => "u8",
            ScalarKind::U16 => "u16",
            ScalarKind::U32 => "u32",
            ScalarKind::U64 => "u64",
            ScalarKind::I8 => "i8",
            ScalarKind::I16 => "i16",
            ScalarKind::I32 => "i32",
            ScalarKind::I64 => "i64",
        }
    }

    pub fn from_name(name: &str) -> Option<ScalarKind> {
        ScalarKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// An opaque region name such as `'a`. Regions are carried for fidelity only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(pub String);

impl Region {
    pub fn erased() -> Region {
        Region("'_".to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mutability {
    Shared,
    Mut,
}

/// A variable bound by an enclosing binder, in de Bruijn style: `depth` 0 is the
/// innermost binder. Declarations have one binder level; trait method signatures
/// have two (the method's own parameters at depth 0, the trait's at depth 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoundVar {
    pub depth: u32,
    pub index: u32,
}

impl BoundVar {
    pub fn new(depth: u32, index: u32) -> BoundVar {
        BoundVar { depth, index }
    }

    pub fn innermost(index: u32) -> BoundVar {
        BoundVar { depth: 0, index }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ty {
    Scalar(ScalarKind),
    Bool,
    Adt(TypeDeclId, GenericArgs),
    TypeVar(BoundVar),
    Ref(Region, Box<Ty>, Mutability),
    Tuple(Vec<Ty>),
    Array(Box<Ty>, ConstGeneric),
    AssocType(Box<TraitRefKind>, String),
}

impl Ty {
    pub fn unit() -> Ty {
        Ty::Tuple(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Ty::Tuple(tys) if tys.is_empty())
    }

    pub fn as_scalar(&self) -> Option<ScalarKind> {
        match self {
            Ty::Scalar(k) => Some(*k),
            _ => None,
        }
    }

    pub fn var(index: u32) -> Ty {
        Ty::TypeVar(BoundVar::innermost(index))
    }

    /// Calls `f` on this type and every type nested inside it, outermost first.
    pub fn visit_tys(&self, f: &mut impl FnMut(&Ty)) {
        f(self);
        match self {
            Ty::Scalar(_) | Ty::Bool | Ty::TypeVar(_) => {}
            Ty::Adt(_, args) => args.walk_tys(f),
            Ty::Ref(_, ty, _) => ty.visit_tys(f),
            Ty::Tuple(tys) => tys.iter().for_each(|t| t.visit_tys(f)),
            Ty::Array(ty, _) => ty.visit_tys(f),
            Ty::AssocType(tref, _) => tref.walk_tys(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstGeneric {
    Value(ScalarValue),
    Var(BoundVar),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenericArgs {
    pub regions: Vec<Region>,
    pub types: Vec<Ty>,
    pub const_generics: Vec<ConstGeneric>,
    pub trait_refs: Vec<TraitRefKind>,
}

impl GenericArgs {
    pub fn empty() -> GenericArgs {
        GenericArgs::default()
    }

    pub fn from_types(types: Vec<Ty>) -> GenericArgs {
        GenericArgs { types, ..GenericArgs::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
            && self.types.is_empty()
            && self.const_generics.is_empty()
            && self.trait_refs.is_empty()
    }

    /// Identity arguments for `params`: every parameter mapped to its own variable.
    pub fn identity(params: &GenericParams) -> GenericArgs {
        GenericArgs {
            regions: params.regions.iter().map(|r| Region(r.clone())).collect(),
            types: (0..params.types.len() as u32).map(Ty::var).collect(),
            const_generics: (0..params.const_generics.len() as u32)
                .map(|i| ConstGeneric::Var(BoundVar::innermost(i)))
                .collect(),
            trait_refs: params.trait_clauses.ids().map(TraitRefKind::Clause).collect(),
        }
    }

    pub fn walk_tys(&self, f: &mut impl FnMut(&Ty)) {
        self.types.iter().for_each(|t| t.visit_tys(f));
        self.trait_refs.iter().for_each(|r| r.walk_tys(f));
    }

    pub fn walk_trait_refs(&self, f: &mut impl FnMut(&TraitRefKind)) {
        let mut on_ty = |ty: &Ty| {
            if let Ty::AssocType(tref, _) = ty {
                tref.visit_refs(f);
            }
        };
        self.types.iter().for_each(|t| t.visit_tys(&mut on_ty));
        self.trait_refs.iter().for_each(|r| r.visit_refs(f));
    }
}

/// Derivation explaining how a trait obligation is discharged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraitRefKind {
    /// A top-level impl, instantiated.
    TraitImpl(TraitImplId, GenericArgs),
    /// A where-clause of the enclosing declaration.
    Clause(TraitClauseId),
    /// The n-th parent (super-trait) clause of the trait proven by the base.
    ParentClause(Box<TraitRefKind>, u32),
    /// The n-th bound on an associated type of the trait proven by the base.
    ItemClause(Box<TraitRefKind>, String, u32),
    /// The implicit `Self: Trait` clause inside a trait declaration.
    SelfId,
    /// An obligation that has not been (or could not be) resolved.
    Unknown(String),
}

pub const PENDING: &str = "pending";

impl TraitRefKind {
    pub fn pending() -> TraitRefKind {
        TraitRefKind::Unknown(PENDING.to_string())
    }

    pub fn is_unknown(&self) -> bool {
        let mut unknown = false;
        self.visit_refs(&mut |r| unknown |= matches!(r, TraitRefKind::Unknown(_)));
        unknown
    }

    /// Number of nested derivation steps.
    pub fn depth(&self) -> usize {
        match self {
            TraitRefKind::TraitImpl(_, args) => {
                1 + args.trait_refs.iter().map(|r| r.depth()).max().unwrap_or(0)
            }
            TraitRefKind::ParentClause(base, _) | TraitRefKind::ItemClause(base, _, _) => {
                1 + base.depth()
            }
            TraitRefKind::Clause(_) | TraitRefKind::SelfId | TraitRefKind::Unknown(_) => 1,
        }
    }

    /// Visits this reference and every reference nested in it (including through
    /// associated types in generic arguments).
    pub fn visit_refs(&self, f: &mut impl FnMut(&TraitRefKind)) {
        f(self);
        match self {
            TraitRefKind::TraitImpl(_, args) => {
                let mut sub = |r: &TraitRefKind| r.visit_refs(&mut *f);
                args.types.iter().for_each(|t| {
                    t.visit_tys(&mut |ty| {
                        if let Ty::AssocType(tref, _) = ty {
                            sub(tref);
                        }
                    })
                });
                args.trait_refs.iter().for_each(|r| r.visit_refs(&mut *f));
            }
            TraitRefKind::ParentClause(base, _) | TraitRefKind::ItemClause(base, _, _) => {
                base.visit_refs(f)
            }
            TraitRefKind::Clause(_) | TraitRefKind::SelfId | TraitRefKind::Unknown(_) => {}
        }
    }

    pub fn walk_tys(&self, f: &mut impl FnMut(&Ty)) {
        match self {
            TraitRefKind::TraitImpl(_, args) => args.walk_tys(f),
            TraitRefKind::ParentClause(base, _) | TraitRefKind::ItemClause(base, _, _) => {
                base.walk_tys(f)
            }
            TraitRefKind::Clause(_) | TraitRefKind::SelfId | TraitRefKind::Unknown(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeVarDecl {
    pub index: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstGenericVar {
    pub index: u32,
    pub name: String,
    pub ty: ScalarKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraitClause {
    pub clause_id: TraitClauseId,
    pub trait_id: TraitDeclId,
    /// Full trait arguments; `types[0]` is the self type.
    pub args: GenericArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionOutlives {
    pub longer: Region,
    pub shorter: Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeOutlives {
    pub ty: Ty,
    pub region: Region,
}

/// `<trait_ref>::name = ty`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraitTypeConstraint {
    pub trait_ref: TraitRefKind,
    pub name: String,
    pub ty: Ty,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenericParams {
    pub regions: Vec<String>,
    pub types: Vec<TypeVarDecl>,
    pub const_generics: Vec<ConstGenericVar>,
    pub trait_clauses: IndexVec<TraitClauseId, TraitClause>,
    pub regions_outlive: Vec<RegionOutlives>,
    pub types_outlive: Vec<TypeOutlives>,
    pub trait_type_constraints: Vec<TraitTypeConstraint>,
}

impl GenericParams {
    pub fn empty() -> GenericParams {
        GenericParams::default()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
            && self.types.is_empty()
            && self.const_generics.is_empty()
            && self.trait_clauses.is_empty()
    }

    pub fn type_var_name(&self, index: u32) -> Option<&str> {
        self.types.get(index as usize).map(|v| v.name.as_str())
    }
}
