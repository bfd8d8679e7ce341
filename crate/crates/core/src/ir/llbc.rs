//! Structured bodies: nested blocks with loops, switches, breaks and continues.

use serde::{Deserialize, Serialize};

use super::expressions::{AbortKind, Call, Operand, Place, Rvalue};
use super::ids::VariantId;
use super::meta::Span;
use super::ullbc::Locals;
use super::values::ScalarValue;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub span: Span,
    pub statements: Vec<Statement>,
}

impl Block {
    pub fn new(span: Span, statements: Vec<Statement>) -> Block {
        Block { span, statements }
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
    Call(Call),
    Abort(AbortKind),
    Switch(Switch),
    Loop(Block),
    Return,
    Nop,
    Drop(Place),
    /// Exit the `n`-th enclosing loop (0 is the innermost).
    Break(u32),
    /// Jump to the start of the `n`-th enclosing loop.
    Continue(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Switch {
    If(Operand, Block, Block),
    /// Arms sharing a target are grouped; `otherwise` covers the remaining values.
    SwitchInt(Operand, Vec<(Vec<ScalarValue>, Block)>, Block),
    Match(Place, Vec<(Vec<VariantId>, Block)>, Option<Block>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LlbcBody {
    pub span: Span,
    pub locals: Locals,
    pub body: Block,
}

impl Block {
    /// Visits every statement, parents before children.
    pub fn visit_statements(&self, f: &mut impl FnMut(&Statement)) {
        for st in &self.statements {
            f(st);
            match &st.kind {
                StatementKind::Loop(b) => b.visit_statements(f),
                StatementKind::Switch(sw) => sw.blocks().into_iter().for_each(|b| b.visit_statements(f)),
                _ => {}
            }
        }
    }

    pub fn visit_statements_mut(&mut self, f: &mut impl FnMut(&mut Statement)) {
        for st in &mut self.statements {
            f(st);
            match &mut st.kind {
                StatementKind::Loop(b) => b.visit_statements_mut(f),
                StatementKind::Switch(sw) => {
                    sw.blocks_mut().into_iter().for_each(|b| b.visit_statements_mut(f))
                }
                _ => {}
            }
        }
    }

    pub fn statement_count(&self) -> usize {
        let mut n = 0;
        self.visit_statements(&mut |_| n += 1);
        n
    }
}

impl Switch {
    pub fn blocks(&self) -> Vec<&Block> {
        match self {
            Switch::If(_, a, b) => vec![a, b],
            Switch::SwitchInt(_, arms, otherwise) => {
                arms.iter().map(|(_, b)| b).chain(std::iter::once(otherwise)).collect()
            }
            Switch::Match(_, arms, otherwise) => {
                arms.iter().map(|(_, b)| b).chain(otherwise.iter()).collect()
            }
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Block> {
        match self {
            Switch::If(_, a, b) => vec![a, b],
            Switch::SwitchInt(_, arms, otherwise) => arms
                .iter_mut()
                .map(|(_, b)| b)
                .chain(std::iter::once(otherwise))
                .collect(),
            Switch::Match(_, arms, otherwise) => {
                arms.iter_mut().map(|(_, b)| b).chain(otherwise.iter_mut()).collect()
            }
        }
    }
}
