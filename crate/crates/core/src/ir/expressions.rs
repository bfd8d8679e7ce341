//! Places, operands and right-hand sides shared by ULLBC and LLBC.

use serde::{Deserialize, Serialize};

use super::ids::{FieldId, FunDeclId, LocalId, TraitDeclId, TypeDeclId, VariantId};
use super::types::{GenericArgs, Mutability, ScalarKind, Ty, TraitRefKind};
use super::values::ConstantValue;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Place {
    pub local: LocalId,
    pub projection: Vec<ProjectionElem>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjectionElem {
    Field(FieldId),
    Downcast(VariantId),
    Index(Box<Operand>),
    Deref,
}

impl Place {
    pub fn local(local: LocalId) -> Place {
        Place { local, projection: Vec::new() }
    }

    pub fn project(mut self, elem: ProjectionElem) -> Place {
        self.projection.push(elem);
        self
    }

    pub fn field(self, index: u32) -> Place {
        self.project(ProjectionElem::Field(FieldId(index)))
    }

    pub fn is_local(&self) -> bool {
        self.projection.is_empty()
    }

    pub fn has_deref(&self) -> bool {
        self.projection.iter().any(|p| matches!(p, ProjectionElem::Deref))
    }

    /// Operands used as index offsets inside the projection.
    pub fn index_operands(&self) -> impl Iterator<Item = &Operand> {
        self.projection.iter().filter_map(|p| match p {
            ProjectionElem::Index(op) => Some(&**op),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operand {
    Copy(Place),
    Move(Place),
    Const(ConstantValue),
}

impl Operand {
    pub fn place(&self) -> Option<&Place> {
        match self {
            Operand::Copy(p) | Operand::Move(p) => Some(p),
            Operand::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinOp {
    /// Panics on overflow.
    Add,
    /// Panics on overflow.
    Sub,
    /// Panics on overflow.
    Mul,
    /// Panics on division by zero and on signed overflow.
    Div,
    /// Panics on division by zero and on signed overflow.
    Rem,
    WrappingAdd,
    WrappingSub,
    WrappingMul,
    /// Returns `(wrapped result, overflowed)`.
    CheckedAdd,
    CheckedSub,
    CheckedMul,
    BitAnd,
    BitOr,
    BitXor,
    /// Panics when the shift amount is not below the bit width.
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub const ALL: [BinOp; 22] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Rem,
        BinOp::WrappingAdd,
        BinOp::WrappingSub,
        BinOp::WrappingMul,
        BinOp::CheckedAdd,
        BinOp::CheckedSub,
        BinOp::CheckedMul,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinOp::Add => "Add",
            BinOp::Sub => "Sub",
            BinOp::Mul => "Mul",
            BinOp::Div => "Div",
            BinOp::Rem => "Rem",
            BinOp::WrappingAdd => "WrappingAdd",
            BinOp::WrappingSub => "WrappingSub",
            BinOp::WrappingMul => "WrappingMul",
            BinOp::CheckedAdd => "CheckedAdd",
            BinOp::CheckedSub => "CheckedSub",
            BinOp::CheckedMul => "CheckedMul",
            BinOp::BitAnd => "BitAnd",
            BinOp::BitOr => "BitOr",
            BinOp::BitXor => "BitXor",
            BinOp::Shl => "Shl",
            BinOp::Shr => "Shr",
            BinOp::Eq => "Eq",
            BinOp::Ne => "Ne",
            BinOp::Lt => "Lt",
            BinOp::Le => "Le",
            BinOp::Gt => "Gt",
            BinOp::Ge => "Ge",
        }
    }

    pub fn from_name(name: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.name() == name)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_checked(self) -> bool {
        matches!(self, BinOp::CheckedAdd | BinOp::CheckedSub | BinOp::CheckedMul)
    }

    /// `CheckedAdd` -> `Add`, etc.
    pub fn unchecked(self) -> Option<BinOp> {
        match self {
            BinOp::CheckedAdd => Some(BinOp::Add),
            BinOp::CheckedSub => Some(BinOp::Sub),
            BinOp::CheckedMul => Some(BinOp::Mul),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UnOp {
    Not,
    /// Panics on overflow.
    Neg,
    /// Integer (or bool-to-integer) conversion, truncating or sign-extending.
    Cast(ScalarKind),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AggregateKind {
    Adt(TypeDeclId, Option<VariantId>, GenericArgs),
    Tuple,
    Array(Ty),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rvalue {
    Use(Operand),
    BinOp(BinOp, Operand, Operand),
    UnOp(UnOp, Operand),
    Discriminant(Place),
    Aggregate(AggregateKind, Vec<Operand>),
    Ref(Place, Mutability),
}

impl Rvalue {
    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            Rvalue::Use(op) | Rvalue::UnOp(_, op) => vec![op],
            Rvalue::BinOp(_, a, b) => vec![a, b],
            Rvalue::Aggregate(_, ops) => ops.iter().collect(),
            Rvalue::Discriminant(_) | Rvalue::Ref(_, _) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TraitRef {
    pub kind: TraitRefKind,
    pub trait_id: TraitDeclId,
    /// Trait arguments, self type first.
    pub args: GenericArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FunIdOrTraitMethodRef {
    Fun(FunDeclId),
    /// A trait method, with method-level generics in the enclosing `FnPtr`.
    TraitMethod(TraitRef, String),
    /// A trait method call as written in the source, before resolution: the
    /// enclosing `FnPtr` carries the full (trait followed by method) generics.
    UnresolvedMethod(TraitDeclId, String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FnPtr {
    pub func: FunIdOrTraitMethodRef,
    pub generics: GenericArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FnOperand {
    Regular(FnPtr),
    Move(Place),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Call {
    pub func: FnOperand,
    pub args: Vec<Operand>,
    pub dest: Place,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AbortKind {
    Panic,
    UndefinedBehavior,
}
