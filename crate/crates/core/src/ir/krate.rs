//! Declarations and the crate container.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::{FileId, FunDeclId, IndexVec, TraitDeclId, TraitImplId, TypeDeclId, VariantId};
use super::llbc::LlbcBody;
use super::meta::{FileInfo, ItemMeta};
use super::types::{GenericArgs, GenericParams, TraitClause, TraitRefKind, Ty};
use super::ullbc::UllbcBody;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    #[serde(with = "super::values::i128_string")]
    pub discriminant: i128,
    pub fields: Vec<Ty>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeDeclKind {
    Struct(Vec<Ty>),
    Enum(Vec<Variant>),
    Opaque,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeDecl {
    pub id: TypeDeclId,
    pub meta: ItemMeta,
    pub generics: GenericParams,
    pub kind: TypeDeclKind,
}

impl TypeDecl {
    pub fn variants(&self) -> Option<&[Variant]> {
        match &self.kind {
            TypeDeclKind::Enum(vs) => Some(vs),
            _ => None,
        }
    }

    pub fn variant_by_discriminant(&self, discr: i128) -> Option<VariantId> {
        self.variants()?
            .iter()
            .position(|v| v.discriminant == discr)
            .map(|i| VariantId(i as u32))
    }

    /// Field types of the struct, or of `variant` for enums.
    pub fn field_tys(&self, variant: Option<VariantId>) -> Option<&[Ty]> {
        match (&self.kind, variant) {
            (TypeDeclKind::Struct(fields), None) => Some(fields),
            (TypeDeclKind::Enum(vs), Some(v)) => vs.get(v.0 as usize).map(|v| v.fields.as_slice()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunSig {
    pub generics: GenericParams,
    pub inputs: Vec<Ty>,
    pub output: Ty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Body {
    Ullbc(UllbcBody),
    Llbc(LlbcBody),
    Opaque,
}

impl Body {
    pub fn is_opaque(&self) -> bool {
        matches!(self, Body::Opaque)
    }

    pub fn as_ullbc(&self) -> Option<&UllbcBody> {
        match self {
            Body::Ullbc(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_llbc(&self) -> Option<&LlbcBody> {
        match self {
            Body::Llbc(b) => Some(b),
            _ => None,
        }
    }

    pub fn locals(&self) -> Option<&super::ullbc::Locals> {
        match self {
            Body::Ullbc(b) => Some(&b.locals),
            Body::Llbc(b) => Some(&b.locals),
            Body::Opaque => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunDecl {
    pub id: FunDeclId,
    pub meta: ItemMeta,
    pub signature: FunSig,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AssocTypeDecl {
    pub name: String,
    /// Bounds on the associated type; their self type is `<Self>::name`.
    pub bounds: Vec<TraitClause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraitMethodDecl {
    pub name: String,
    /// Method-level generics; trait-level variables appear at depth 1.
    pub signature: FunSig,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraitDecl {
    pub id: TraitDeclId,
    pub meta: ItemMeta,
    /// `types[0]` is the implicit `Self`.
    pub generics: GenericParams,
    pub parent_clauses: Vec<TraitClause>,
    pub assoc_types: Vec<AssocTypeDecl>,
    pub methods: Vec<TraitMethodDecl>,
}

impl TraitDecl {
    pub fn method(&self, name: &str) -> Option<&TraitMethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn assoc_type(&self, name: &str) -> Option<&AssocTypeDecl> {
        self.assoc_types.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImplAssocType {
    pub name: String,
    pub ty: Ty,
    /// Proofs of the trait's bounds on this associated type.
    pub bound_refs: Vec<TraitRefKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImplMethod {
    pub name: String,
    /// The implementing function; its generics are the impl's followed by the method's.
    pub fun_id: FunDeclId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraitImpl {
    pub id: TraitImplId,
    pub meta: ItemMeta,
    pub generics: GenericParams,
    pub trait_id: TraitDeclId,
    /// Trait arguments, self type first.
    pub trait_args: GenericArgs,
    /// Proofs of the trait's parent clauses, one per parent clause.
    pub parent_trait_refs: Vec<TraitRefKind>,
    pub assoc_types: Vec<ImplAssocType>,
    pub methods: Vec<ImplMethod>,
}

impl TraitImpl {
    pub fn method(&self, name: &str) -> Option<FunDeclId> {
        self.methods.iter().find(|m| m.name == name).map(|m| m.fun_id)
    }

    pub fn assoc_type(&self, name: &str) -> Option<&ImplAssocType> {
        self.assoc_types.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnyDeclId {
    Type(TypeDeclId),
    TraitDecl(TraitDeclId),
    TraitImpl(TraitImplId),
    Fun(FunDeclId),
}

impl fmt::Display for AnyDeclId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyDeclId::Type(id) => write!(f, "{id}"),
            AnyDeclId::TraitDecl(id) => write!(f, "{id}"),
            AnyDeclId::TraitImpl(id) => write!(f, "{id}"),
            AnyDeclId::Fun(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeclGroup {
    NonRecursive(AnyDeclId),
    Recursive(Vec<AnyDeclId>),
}

impl DeclGroup {
    pub fn members(&self) -> &[AnyDeclId] {
        match self {
            DeclGroup::NonRecursive(id) => std::slice::from_ref(id),
            DeclGroup::Recursive(ids) => ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranslatedCrate {
    pub crate_name: String,
    pub files: IndexVec<FileId, FileInfo>,
    pub type_decls: IndexVec<TypeDeclId, TypeDecl>,
    pub fun_decls: IndexVec<FunDeclId, FunDecl>,
    pub trait_decls: IndexVec<TraitDeclId, TraitDecl>,
    pub trait_impls: IndexVec<TraitImplId, TraitImpl>,
    pub decl_groups: Vec<DeclGroup>,
}

impl TranslatedCrate {
    pub fn new(name: impl Into<String>) -> TranslatedCrate {
        TranslatedCrate {
            crate_name: name.into(),
            files: IndexVec::new(),
            type_decls: IndexVec::new(),
            fun_decls: IndexVec::new(),
            trait_decls: IndexVec::new(),
            trait_impls: IndexVec::new(),
            decl_groups: Vec::new(),
        }
    }

    pub fn all_decl_ids(&self) -> Vec<AnyDeclId> {
        let mut ids = Vec::new();
        ids.extend(self.type_decls.ids().map(AnyDeclId::Type));
        ids.extend(self.trait_decls.ids().map(AnyDeclId::TraitDecl));
        ids.extend(self.trait_impls.ids().map(AnyDeclId::TraitImpl));
        ids.extend(self.fun_decls.ids().map(AnyDeclId::Fun));
        ids
    }

    pub fn decl_meta(&self, id: AnyDeclId) -> Option<&ItemMeta> {
        match id {
            AnyDeclId::Type(id) => self.type_decls.get(id).map(|d| &d.meta),
            AnyDeclId::TraitDecl(id) => self.trait_decls.get(id).map(|d| &d.meta),
            AnyDeclId::TraitImpl(id) => self.trait_impls.get(id).map(|d| &d.meta),
            AnyDeclId::Fun(id) => self.fun_decls.get(id).map(|d| &d.meta),
        }
    }

    pub fn fun_by_name(&self, name: &str) -> Option<&FunDecl> {
        self.fun_decls.iter().find(|f| f.meta.name.to_string() == name)
    }

    pub fn type_by_name(&self, name: &str) -> Option<&TypeDecl> {
        self.type_decls.iter().find(|t| t.meta.name.to_string() == name)
    }

    pub fn trait_by_name(&self, name: &str) -> Option<&TraitDecl> {
        self.trait_decls.iter().find(|t| t.meta.name.to_string() == name)
    }

    pub fn impl_by_name(&self, name: &str) -> Option<&TraitImpl> {
        self.trait_impls.iter().find(|t| t.meta.name.to_string() == name)
    }
}
