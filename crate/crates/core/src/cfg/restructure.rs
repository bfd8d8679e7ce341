//! ULLBC to LLBC: loops from natural loops, joins at immediate post-dominators.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::ir::llbc::{Block, LlbcBody, Statement, StatementKind, Switch};
use crate::ir::typing::operand_ty;
use crate::ir::ullbc::{self, TerminatorKind, UllbcBody};
use crate::ir::{AbortKind, Body, DiagCode, Diagnostic, Span, TranslatedCrate, Ty, VariantId};
use crate::passes::util::prune_unreachable;

use super::dom::{dominators, successor_lists, PostDominators};
use super::loops::{find_loops, LoopForest};

/// A source block may be emitted at most this many extra times.
pub const MAX_DUPLICATES: usize = 4;

struct LoopCtx {
    header: usize,
    exit: Option<usize>,
}

struct TooLarge;

struct Restructurer<'a> {
    krate: &'a TranslatedCrate,
    body: &'a UllbcBody,
    succ: Vec<Vec<usize>>,
    pdom: PostDominators,
    forest: LoopForest,
    emitted: Vec<usize>,
    total: usize,
}

fn convert_statement(st: &ullbc::Statement) -> Statement {
    let kind = match &st.kind {
        ullbc::StatementKind::Assign(p, rv) => StatementKind::Assign(p.clone(), rv.clone()),
        ullbc::StatementKind::Drop(p) => StatementKind::Drop(p.clone()),
        ullbc::StatementKind::Nop => StatementKind::Nop,
    };
    Statement { span: st.span, comments: st.comments.clone(), attributes: st.attributes.clone(), kind }
}

fn block_of(span: Span, statements: Vec<Statement>) -> Block {
    let span = statements.first().map(|s| s.span).unwrap_or(span);
    Block::new(span, statements)
}

impl<'a> Restructurer<'a> {
    fn jump(&self, b: usize, stack: &[LoopCtx]) -> Option<StatementKind> {
        for (depth, l) in stack.iter().rev().enumerate() {
            if l.header == b {
                return Some(StatementKind::Continue(depth as u32));
            }
            if l.exit == Some(b) {
                return Some(StatementKind::Break(depth as u32));
            }
        }
        None
    }

    fn loop_exit(&self, header: usize, stop: Option<usize>) -> Option<usize> {
        let body = &self.forest.by_header(header).expect("header has a loop").body;
        let targets: BTreeSet<usize> = body
            .iter()
            .flat_map(|&u| self.succ[u].iter().copied())
            .filter(|v| !body.contains(v))
            .collect();
        if targets.is_empty() {
            return None;
        }
        let targets: Vec<usize> = targets.into_iter().collect();
        if let Some(e) = self.pdom.common(&targets) {
            if !body.contains(&e) {
                return Some(e);
            }
        }
        match stop {
            Some(s) if !body.contains(&s) => Some(s),
            _ if targets.len() == 1 => Some(targets[0]),
            _ => None,
        }
    }

    fn count(&mut self, b: usize) -> Result<(), TooLarge> {
        self.emitted[b] += 1;
        self.total += 1;
        if self.emitted[b] > MAX_DUPLICATES + 1 || self.total > MAX_DUPLICATES * self.body.blocks.len() {
            return Err(TooLarge);
        }
        Ok(())
    }

    /// Translates the code starting at `start`. Reaching `stop` ends the
    /// sequence by falling through, which the second component reports.
    fn seq(
        &mut self,
        start: usize,
        stack: &mut Vec<LoopCtx>,
        stop: Option<usize>,
        entering: bool,
    ) -> Result<(Vec<Statement>, bool), TooLarge> {
        let mut out = Vec::new();
        let mut cur = start;
        let mut skip_checks = entering;
        loop {
            if !skip_checks {
                if Some(cur) == stop {
                    return Ok((out, true));
                }
                if let Some(kind) = self.jump(cur, stack) {
                    out.push(Statement::new(self.block_span(cur), kind));
                    return Ok((out, false));
                }
                if self.forest.is_header(cur) {
                    let exit = self.loop_exit(cur, stop);
                    stack.push(LoopCtx { header: cur, exit });
                    let (inner, _) = self.seq(cur, stack, None, true)?;
                    stack.pop();
                    let span = self.block_span(cur);
                    out.push(Statement::new(span, StatementKind::Loop(block_of(span, inner))));
                    match exit {
                        Some(e) => {
                            cur = e;
                            continue;
                        }
                        None => return Ok((out, false)),
                    }
                }
            }
            skip_checks = false;
            self.count(cur)?;
            let body = self.body;
            let data = &body.blocks.as_slice()[cur];
            out.extend(data.statements.iter().map(convert_statement));
            let term = &data.terminator;
            let mk = |kind: StatementKind| Statement {
                span: term.span,
                comments: term.comments.clone(),
                attributes: Vec::new(),
                kind,
            };
            match &term.kind {
                TerminatorKind::Goto(t) => cur = t.0 as usize,
                TerminatorKind::Call { call, target } => {
                    out.push(mk(StatementKind::Call(call.clone())));
                    cur = target.0 as usize;
                }
                TerminatorKind::Assert { cond, expected, target } => {
                    let fail = vec![Statement::new(term.span, StatementKind::Abort(AbortKind::Panic))];
                    let (then, els) = if *expected { (Vec::new(), fail) } else { (fail, Vec::new()) };
                    out.push(mk(StatementKind::Switch(Switch::If(
                        cond.clone(),
                        block_of(term.span, then),
                        block_of(term.span, els),
                    ))));
                    cur = target.0 as usize;
                }
                TerminatorKind::Return => {
                    out.push(mk(StatementKind::Return));
                    return Ok((out, false));
                }
                TerminatorKind::Abort(k) => {
                    out.push(mk(StatementKind::Abort(*k)));
                    return Ok((out, false));
                }
                TerminatorKind::Unreachable => {
                    out.push(mk(StatementKind::Abort(AbortKind::UndefinedBehavior)));
                    return Ok((out, false));
                }
                TerminatorKind::SwitchInt { .. } | TerminatorKind::Match { .. } => {
                    let succs = term.kind.successors();
                    if succs.len() == 1 {
                        cur = succs[0].0 as usize;
                        continue;
                    }
                    let join = self.pdom.ipdom(cur).filter(|&j| self.jump(j, stack).is_none());
                    let arm_stop = join.or(stop);
                    let mut falls = false;
                    let mut arm = |this: &mut Self, target: usize, stack: &mut Vec<LoopCtx>| {
                        let (stmts, f) = this.seq(target, stack, arm_stop, false)?;
                        falls |= f;
                        Ok::<Block, TooLarge>(block_of(term.span, stmts))
                    };
                    let switch = match &term.kind {
                        TerminatorKind::SwitchInt { discr, cases, otherwise } => {
                            let is_bool = matches!(
                                operand_ty(self.krate, &body.locals, discr),
                                Ok(Ty::Bool)
                            );
                            let target_of = |v: i128| {
                                cases.iter().find(|c| c.value.value == v).map_or(*otherwise, |c| c.target)
                            };
                            if is_bool {
                                let t = arm(self, target_of(1).0 as usize, stack)?;
                                let e = arm(self, target_of(0).0 as usize, stack)?;
                                Switch::If(discr.clone(), t, e)
                            } else {
                                let mut groups: Vec<(ullbc::SwitchCase, Vec<_>)> = Vec::new();
                                for c in cases.iter().filter(|c| c.target != *otherwise) {
                                    match groups.iter_mut().find(|(g, _)| g.target == c.target) {
                                        Some((_, vs)) => vs.push(c.value),
                                        None => groups.push((c.clone(), vec![c.value])),
                                    }
                                }
                                let mut arms = Vec::with_capacity(groups.len());
                                for (c, vs) in groups {
                                    arms.push((vs, arm(self, c.target.0 as usize, stack)?));
                                }
                                let other = arm(self, otherwise.0 as usize, stack)?;
                                Switch::SwitchInt(discr.clone(), arms, other)
                            }
                        }
                        TerminatorKind::Match { scrutinee, cases, otherwise } => {
                            let mut groups: Vec<(usize, Vec<VariantId>)> = Vec::new();
                            for c in cases.iter().filter(|c| Some(c.target) != *otherwise) {
                                let t = c.target.0 as usize;
                                match groups.iter_mut().find(|(g, _)| *g == t) {
                                    Some((_, vs)) => vs.push(c.variant),
                                    None => groups.push((t, vec![c.variant])),
                                }
                            }
                            let mut arms = Vec::with_capacity(groups.len());
                            for (t, vs) in groups {
                                arms.push((vs, arm(self, t, stack)?));
                            }
                            let other = match otherwise {
                                Some(o) => Some(arm(self, o.0 as usize, stack)?),
                                None => None,
                            };
                            Switch::Match(scrutinee.clone(), arms, other)
                        }
                        _ => unreachable!(),
                    };
                    out.push(mk(StatementKind::Switch(switch)));
                    match (join, falls) {
                        (Some(j), true) => cur = j,
                        (None, true) => return Ok((out, true)),
                        (_, false) => return Ok((out, false)),
                    }
                }
            }
        }
    }

    fn block_span(&self, b: usize) -> Span {
        let data = &self.body.blocks.as_slice()[b];
        data.statements.first().map_or(data.terminator.span, |s| s.span)
    }
}

/// Rebuilds structured control flow for one body.
pub fn restructure(krate: &TranslatedCrate, body: &UllbcBody) -> Result<LlbcBody, Diagnostic> {
    let mut body = body.clone();
    prune_unreachable(&mut body);
    if body.blocks.is_empty() {
        return Ok(LlbcBody { span: body.span, locals: body.locals, body: Block::new(body.span, Vec::new()) });
    }
    let succ = successor_lists(&body);
    let idom = dominators(&succ, 0);
    let forest = find_loops(&succ, &idom).map_err(|e| {
        let span = body.blocks.as_slice()[e.from].terminator.span;
        Diagnostic::error(DiagCode::IrreducibleCfg, Some(span), e.to_string())
    })?;
    let pdom = PostDominators::from_succ(&succ);
    let n = body.blocks.len();
    let mut r = Restructurer { krate, body: &body, succ, pdom, forest, emitted: vec![0; n], total: 0 };
    let (stmts, _) = r.seq(0, &mut Vec::new(), None, false).map_err(|TooLarge| {
        Diagnostic::error(
            DiagCode::MultiExitUnsupported,
            Some(body.span),
            format!("structuring needs more than {MAX_DUPLICATES} copies of a block"),
        )
    })?;
    Ok(LlbcBody { span: body.span, locals: body.locals.clone(), body: block_of(body.span, stmts) })
}

/// Restructures every ULLBC body in parallel; failures leave the body Opaque.
pub fn restructure_crate(mut krate: TranslatedCrate) -> (TranslatedCrate, Vec<Diagnostic>) {
    let shared = &krate;
    let results: Vec<Option<Result<LlbcBody, Diagnostic>>> = shared
        .fun_decls
        .as_slice()
        .par_iter()
        .map(|f| f.body.as_ullbc().map(|b| restructure(shared, b)))
        .collect();
    let mut diags = Vec::new();
    for (f, res) in krate.fun_decls.iter_mut().zip(results) {
        match res {
            None => {}
            Some(Ok(b)) => f.body = Body::Llbc(b),
            Some(Err(d)) => {
                diags.push(d.in_item(f.meta.name.to_string()));
                f.body = Body::Opaque;
            }
        }
    }
    (krate, diags)
}
