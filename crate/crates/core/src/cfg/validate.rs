//! Structural checks on LLBC bodies.

use crate::ir::llbc::{Block, LlbcBody, StatementKind};
use crate::ir::{DiagCode, Diagnostic};

/// Checks that Break/Continue depths stay within the enclosing loops and that
/// no path falls off the end of the body or of a loop body.
pub fn validate_llbc(body: &LlbcBody) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if falls_through(&body.body, 0, &mut diags) {
        diags.push(Diagnostic::error(
            DiagCode::BadLoopDepth,
            Some(body.span),
            "control can fall off the end of the body",
        ));
    }
    diags
}

/// Whether control can reach the end of `block`; `loops` is the nesting depth.
fn falls_through(block: &Block, loops: u32, diags: &mut Vec<Diagnostic>) -> bool {
    for st in &block.statements {
        let continues = match &st.kind {
            StatementKind::Return | StatementKind::Abort(_) => false,
            StatementKind::Break(d) | StatementKind::Continue(d) => {
                if *d >= loops {
                    diags.push(Diagnostic::error(
                        DiagCode::BadLoopDepth,
                        Some(st.span),
                        format!("depth {d} with {loops} enclosing loops"),
                    ));
                }
                false
            }
            StatementKind::Loop(b) => {
                if falls_through(b, loops + 1, diags) {
                    diags.push(Diagnostic::error(
                        DiagCode::BadLoopDepth,
                        Some(st.span),
                        "loop body can fall through",
                    ));
                }
                breaks_to(b, 0)
            }
            StatementKind::Switch(sw) => {
                let mut any = false;
                for b in sw.blocks() {
                    any |= falls_through(b, loops, diags);
                }
                any
            }
            StatementKind::Assign(..)
            | StatementKind::Call(_)
            | StatementKind::Nop
            | StatementKind::Drop(_) => true,
        };
        if !continues {
            return false;
        }
    }
    true
}

/// Whether `block` contains a Break leaving the loop `depth` levels up.
fn breaks_to(block: &Block, depth: u32) -> bool {
    block.statements.iter().any(|st| match &st.kind {
        StatementKind::Break(d) => *d == depth,
        StatementKind::Loop(b) => breaks_to(b, depth + 1),
        StatementKind::Switch(sw) => sw.blocks().into_iter().any(|b| breaks_to(b, depth)),
        _ => false,
    })
}
