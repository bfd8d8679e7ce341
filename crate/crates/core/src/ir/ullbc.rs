//! Unstructured bodies: a CFG of basic blocks.

use serde::{Deserialize, Serialize};

use super::expressions::{AbortKind, Call, Operand, Place, Rvalue};
use super::ids::{BlockId, IndexVec, LocalId, VariantId};
use super::meta::Span;
use super::types::Ty;
use super::values::ScalarValue;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Local {
    pub index: LocalId,
    pub name: String,
    pub ty: Ty,
}

/// Local 0 is the return slot, locals `1..=arg_count` are the inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Locals {
    pub arg_count: u32,
    pub vars: IndexVec<LocalId, Local>,
}

impl Locals {
    pub fn return_local() -> LocalId {
        LocalId(0)
    }

    pub fn args(&self) -> impl Iterator<Item = &Local> {
        self.vars.iter().skip(1).take(self.arg_count as usize)
    }

    pub fn is_arg(&self, id: LocalId) -> bool {
        id.0 >= 1 && id.0 <= self.arg_count
    }

    pub fn by_name(&self, name: &str) -> Option<LocalId> {
        self.vars.iter().find(|l| l.name == name).map(|l| l.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Statement {
    pub span: Span,
    pub comments: Vec<String>,
    pub attributes: Vec<String>,
    pub kind: StatementKind,
}

impl Statement {
    pub fn new(span: Span, kind: StatementKind) -> Statement {
        Statement { span, comments: Vec::new(), attributes: Vec::new(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatementKind {
    Assign(Place, Rvalue),
    Drop(Place),
    Nop,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchCase {
    pub value: ScalarValue,
    pub target: BlockId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchCase {
    pub variant: VariantId,
    pub target: BlockId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Terminator {
    pub span: Span,
    pub comments: Vec<String>,
    pub kind: TerminatorKind,
}

impl Terminator {
    pub fn new(span: Span, kind: TerminatorKind) -> Terminator {
        Terminator { span, comments: Vec::new(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminatorKind {
    Goto(BlockId),
    SwitchInt { discr: Operand, cases: Vec<SwitchCase>, otherwise: BlockId },
    Match { scrutinee: Place, cases: Vec<MatchCase>, otherwise: Option<BlockId> },
    Assert { cond: Operand, expected: bool, target: BlockId },
    Call { call: Call, target: BlockId },
    Return,
    Abort(AbortKind),
    Unreachable,
}

impl TerminatorKind {
    pub fn successors(&self) -> Vec<BlockId> {
        match self {
            TerminatorKind::Goto(t) => vec![*t],
            TerminatorKind::SwitchInt { cases, otherwise, .. } => {
                let mut out: Vec<BlockId> = cases.iter().map(|c| c.target).collect();
                out.push(*otherwise);
                dedup_in_order(out)
            }
            TerminatorKind::Match { cases, otherwise, .. } => {
                let mut out: Vec<BlockId> = cases.iter().map(|c| c.target).collect();
                out.extend(otherwise.iter().copied());
                dedup_in_order(out)
            }
            TerminatorKind::Assert { target, .. } | TerminatorKind::Call { target, .. } => {
                vec![*target]
            }
            TerminatorKind::Return | TerminatorKind::Abort(_) | TerminatorKind::Unreachable => {
                Vec::new()
            }
        }
    }

    pub fn successors_mut(&mut self) -> Vec<&mut BlockId> {
        match self {
            TerminatorKind::Goto(t) => vec![t],
            TerminatorKind::SwitchInt { cases, otherwise, .. } => {
                let mut out: Vec<&mut BlockId> = cases.iter_mut().map(|c| &mut c.target).collect();
                out.push(otherwise);
                out
            }
            TerminatorKind::Match { cases, otherwise, .. } => {
                let mut out: Vec<&mut BlockId> = cases.iter_mut().map(|c| &mut c.target).collect();
                out.extend(otherwise.iter_mut());
                out
            }
            TerminatorKind::Assert { target, .. } | TerminatorKind::Call { target, .. } => {
                vec![target]
            }
            TerminatorKind::Return | TerminatorKind::Abort(_) | TerminatorKind::Unreachable => {
                Vec::new()
            }
        }
    }
}

fn dedup_in_order(ids: Vec<BlockId>) -> Vec<BlockId> {
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockData {
    pub statements: Vec<Statement>,
    pub terminator: Terminator,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UllbcBody {
    pub span: Span,
    pub locals: Locals,
    pub blocks: IndexVec<BlockId, BlockData>,
}

impl UllbcBody {
    pub fn successors(&self, block: BlockId) -> Vec<BlockId> {
        self.blocks[block].terminator.kind.successors()
    }

    pub fn predecessors(&self) -> IndexVec<BlockId, Vec<BlockId>> {
        let mut preds: IndexVec<BlockId, Vec<BlockId>> =
            self.blocks.iter().map(|_| Vec::new()).collect();
        for (id, block) in self.blocks.iter_enumerated() {
            for succ in block.terminator.kind.successors() {
                if let Some(p) = preds.get_mut(succ) {
                    p.push(id);
                }
            }
        }
        preds
    }
}
