//! Surface syntax, before name resolution.

use crate::ir::{AbortKind, Mutability, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub segments: Vec<String>,
    pub span: Span,
}

impl Path {
    pub fn text(&self) -> String {
        self.segments.join("::")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLit {
    pub negative: bool,
    pub magnitude: u128,
    pub suffix: Option<String>,
    pub span: Span,
}

impl IntLit {
    pub fn value(&self) -> i128 {
        let m = self.magnitude.min(i128::MAX as u128) as i128;
        if self.negative {
            -m
        } else {
            m
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenericArg {
    Region(String),
    Ty(Ty),
    /// An integer literal; bare names are parsed as types and reclassified later.
    Const(IntLit),
    TraitRef(TraitRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    /// Scalars, `bool`, type variables, ADTs, `T::Item`, const-generic names.
    Path(Path, Vec<GenericArg>),
    Ref(Option<String>, Box<Ty>, Mutability, Span),
    Tuple(Vec<Ty>, Span),
    Array(Box<Ty>, Box<GenericArg>, Span),
    Assoc(TraitRef, String, Span),
}

impl Ty {
    pub fn span(&self) -> Span {
        match self {
            Ty::Path(p, _) => p.span,
            Ty::Ref(_, _, _, s) | Ty::Tuple(_, s) | Ty::Array(_, _, s) | Ty::Assoc(_, _, s) => *s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraitRef {
    Clause(u32, Span),
    SelfRef(Span),
    Parent(Box<TraitRef>, u32, Span),
    Item(Box<TraitRef>, String, u32, Span),
    Impl(Path, Vec<GenericArg>),
    Unknown(String, Span),
}

impl TraitRef {
    pub fn span(&self) -> Span {
        match self {
            TraitRef::Clause(_, s)
            | TraitRef::SelfRef(s)
            | TraitRef::Parent(_, _, s)
            | TraitRef::Item(_, _, _, s)
            | TraitRef::Unknown(_, s) => *s,
            TraitRef::Impl(p, _) => p.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Generics {
    pub regions: Vec<String>,
    pub types: Vec<String>,
    /// (name, scalar kind name)
    pub consts: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitBound {
    pub path: Path,
    /// Arguments after the self type.
    pub args: Vec<GenericArg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WherePred {
    Trait(Ty, TraitBound),
    TypeOutlives(Ty, String),
    RegionOutlives(String, String),
    Eq(Ty, Ty),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub name: String,
    pub fields: Vec<Ty>,
    pub discriminant: IntLit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeDeclKind {
    Struct(Vec<Ty>),
    Enum(Vec<Variant>),
    Opaque,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub attrs: Vec<String>,
    pub name: Path,
    pub generics: Generics,
    pub preds: Vec<WherePred>,
    pub kind: TypeDeclKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Ty,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub generics: Generics,
    pub params: Vec<Param>,
    pub output: Option<Ty>,
    pub preds: Vec<WherePred>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssocTypeDecl {
    pub name: String,
    pub bounds: Vec<TraitBound>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub sig: Signature,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitDecl {
    pub attrs: Vec<String>,
    pub name: Path,
    pub generics: Generics,
    pub parents: Vec<TraitBound>,
    pub assoc_types: Vec<AssocTypeDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplAssocType {
    pub name: String,
    pub ty: Ty,
    pub bound_refs: Option<Vec<TraitRef>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplDecl {
    pub attrs: Vec<String>,
    pub name: Path,
    pub generics: Generics,
    pub trait_bound: TraitBound,
    pub self_ty: Ty,
    pub preds: Vec<WherePred>,
    pub parents: Option<Vec<TraitRef>>,
    pub assoc_types: Vec<ImplAssocType>,
    pub methods: Vec<(String, Path)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDecl {
    pub attrs: Vec<String>,
    pub name: Path,
    pub sig: Signature,
    pub body: Option<Body>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetDecl {
    pub name: String,
    pub ty: Ty,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub lets: Vec<LetDecl>,
    pub blocks: Vec<BasicBlock>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLabel {
    pub index: u32,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicBlock {
    pub label: BlockLabel,
    pub statements: Vec<Statement>,
    pub terminator: Terminator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Field(u32),
    Downcast(String),
    Index(Box<Operand>),
    Deref,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub base: String,
    pub projection: Vec<Projection>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Copy(Place),
    Move(Place),
    Const(Constant),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constant {
    Int(IntLit),
    Bool(bool, Span),
    Tuple(Vec<Constant>, Span),
    /// `adt Path<args>::Variant(fields)`; the variant may be folded into the path.
    Adt(Path, Vec<GenericArg>, Option<String>, Vec<Constant>),
    Array(Ty, Vec<Constant>, Span),
    Raw(Ty, String, Span),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rvalue {
    Use(Operand),
    BinOp(String, Operand, Operand, Span),
    UnOp(String, Option<String>, Operand, Span),
    Discriminant(Place),
    Ref(Place, Mutability),
    Adt(Path, Vec<GenericArg>, Option<String>, Vec<Operand>),
    Tuple(Vec<Operand>),
    Array(Ty, Vec<Operand>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Assign(Place, Rvalue),
    Drop(Place),
    Nop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub span: Span,
    pub comments: Vec<String>,
    pub attrs: Vec<String>,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Callee {
    /// `f::<args>` or `Trait::method::<args>`.
    Path(Path, Vec<GenericArg>),
    /// `<@ref as Trait<args>>::method::<args>`
    TraitMethod { tref: TraitRef, bound: TraitBound, self_ty: Ty, method: String, generics: Vec<GenericArg> },
    Ptr(Place),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminatorKind {
    Goto(BlockLabel),
    SwitchInt(Operand, Vec<(IntLit, BlockLabel)>, BlockLabel),
    Match(Place, Vec<(String, BlockLabel)>, Option<BlockLabel>),
    Assert(Operand, bool, BlockLabel),
    Call { dest: Place, callee: Callee, args: Vec<Operand>, target: BlockLabel },
    Return,
    Abort(AbortKind),
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminator {
    pub span: Span,
    pub comments: Vec<String>,
    pub kind: TerminatorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Type(TypeDecl),
    Trait(TraitDecl),
    Impl(ImplDecl),
    Fun(FunDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}
