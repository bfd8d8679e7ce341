//! Constant-time checking: a flow-, field- and context-sensitive taint
//! analysis over structured bodies.
//!
//! Parameters named in a function's `#[secret(..)]` attribute are secret.
//! Branching on a secret, indexing with a secret and feeding a secret to a
//! variable-latency operator are reported.

mod report;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

use crate::ir::llbc::{Block, StatementKind, Switch};
use crate::ir::ullbc::Locals;
use crate::ir::{
    BinOp, Body, Call, FnOperand, FunDeclId, FunIdOrTraitMethodRef, Idx, LocalId, Operand, Place, ProjectionElem,
    Rvalue, Span, TraitRefKind, TranslatedCrate, AggregateKind,
};

pub use report::{FnSummaryReport, Report, Violation, ViolationKind};
pub use tree::{Elem, Label, TaintTree, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingBody {
    /// The result and everything reachable from the arguments get the join
    /// of the arguments' taint.
    TaintEverything,
    /// Report the call and treat its effects like `TaintEverything`.
    Error,
}

#[derive(Debug, Clone)]
pub struct TaintConfig {
    pub variable_latency: Vec<BinOp>,
    pub missing_body: MissingBody,
}

impl Default for TaintConfig {
    fn default() -> Self {
        TaintConfig { variable_latency: vec![BinOp::Div, BinOp::Rem], missing_body: MissingBody::TaintEverything }
    }
}

/// The parameters a function's `#[secret(a, b)]` attribute names.
pub fn secret_params(attrs: &[String], locals: &Locals) -> Vec<LocalId> {
    let mut out = Vec::new();
    for a in attrs {
        let Some(list) = a.strip_prefix("secret(").and_then(|r| r.strip_suffix(')')) else { continue };
        for name in list.split(',').map(str::trim) {
            if let Some(id) = locals.by_name(name).filter(|id| locals.is_arg(*id)) {
                out.push(id);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

type Key = (FunDeclId, Vec<TaintTree>);

#[derive(Debug, Clone, PartialEq, Eq)]
struct Summary {
    ret: TaintTree,
    /// Pointee taint of each argument at return.
    args_after: Vec<TaintTree>,
    violations: BTreeSet<Violation>,
    missing: BTreeSet<Violation>,
}

impl Summary {
    fn bottom(n: usize) -> Summary {
        Summary {
            ret: TaintTree::public(),
            args_after: vec![TaintTree::public(); n],
            violations: BTreeSet::new(),
            missing: BTreeSet::new(),
        }
    }

    fn join(&self, o: &Summary) -> Summary {
        Summary {
            ret: self.ret.join(&o.ret),
            args_after: self.args_after.iter().zip(&o.args_after).map(|(a, b)| a.join(b)).collect(),
            violations: self.violations.union(&o.violations).cloned().collect(),
            missing: self.missing.union(&o.missing).cloned().collect(),
        }
    }
}

/// Runs the analysis from every function with a body, under the secrecy its
/// own attributes declare.
pub fn analyze_crate(krate: &TranslatedCrate, config: &TaintConfig) -> Report {
    let mut cx = Analyzer { krate, config, table: BTreeMap::new(), fresh: BTreeSet::new(), changed: false };
    let mut roots = Vec::new();
    for f in krate.fun_decls.iter() {
        let Body::Llbc(body) = &f.body else { continue };
        let secret = secret_params(&f.meta.attributes, &body.locals);
        let inputs = (1..=body.locals.arg_count as usize)
            .map(|i| if secret.contains(&LocalId::new(i)) { TaintTree::secret() } else { TaintTree::public() })
            .collect();
        roots.push((f.id, inputs));
    }
    loop {
        cx.changed = false;
        cx.fresh.clear();
        for r in &roots {
            cx.summary(r.clone());
        }
        if !cx.changed {
            break;
        }
    }
    let mut violations = BTreeSet::new();
    let mut errors = BTreeSet::new();
    let mut summaries = Vec::new();
    for ((id, inputs), s) in &cx.table {
        violations.extend(s.violations.iter().cloned());
        if config.missing_body == MissingBody::Error {
            errors.extend(s.missing.iter().cloned());
        }
        summaries.push(FnSummaryReport {
            function: krate.fun_decls[*id].meta.name.to_string(),
            inputs: inputs.iter().map(|t| t.to_string()).collect(),
            output: s.ret.to_string(),
            violations: s.violations.len(),
        });
    }
    let files = krate.files.iter().map(|f| f.name.clone()).collect();
    Report::new(violations.into_iter().collect(), errors.into_iter().collect(), summaries, files)
}

struct Analyzer<'a> {
    krate: &'a TranslatedCrate,
    config: &'a TaintConfig,
    table: BTreeMap<Key, Summary>,
    /// Keys recomputed in the current round.
    fresh: BTreeSet<Key>,
    changed: bool,
}

impl Analyzer<'_> {
    fn summary(&mut self, key: Key) -> Summary {
        if self.fresh.contains(&key) {
            return self.table[&key].clone();
        }
        self.fresh.insert(key.clone());
        let n = key.1.len();
        let old = self.table.entry(key.clone()).or_insert_with(|| Summary::bottom(n)).clone();
        let new = old.join(&self.analyze(&key));
        if new != old {
            self.changed = true;
            self.table.insert(key, new.clone());
        }
        new
    }

    fn analyze(&mut self, (id, inputs): &Key) -> Summary {
        let f = &self.krate.fun_decls[*id];
        let Body::Llbc(body) = &f.body else { return Summary::bottom(inputs.len()) };
        let mut state = State::default();
        for (i, t) in inputs.iter().enumerate() {
            state.trees.insert(LocalId::new(i + 1), t.clone());
        }
        let mut fx = FnCx { fun: f.meta.name.to_string(), locals: &body.locals, violations: BTreeSet::new(), missing: BTreeSet::new() };
        let flow = self.block(&mut fx, &body.body, state);
        let end = flow.ret.unwrap_or_default();
        let args_after = (1..=inputs.len()).map(|i| end.tree(LocalId::new(i))).collect();
        Summary { ret: end.tree(LocalId(0)), args_after, violations: fx.violations, missing: fx.missing }
    }

    fn block(&mut self, fx: &mut FnCx<'_>, block: &Block, mut state: State) -> Flow {
        let mut flow = Flow::default();
        for st in &block.statements {
            match &st.kind {
                StatementKind::Assign(dest, rv) => {
                    let mut value = self.rvalue(fx, &state, rv, st.span);
                    if st.attributes.iter().any(|a| a == "declassify") {
                        value = TaintTree::public();
                    }
                    if let Rvalue::Ref(p, _) = rv {
                        let targets = state.targets_of(p);
                        state.points.insert(dest.local, targets);
                    } else if let Some(src) = copied_ref(rv, &state) {
                        state.points.insert(dest.local, src);
                    } else if dest.projection.is_empty() {
                        state.points.remove(&dest.local);
                    }
                    fx.check_place(&state, dest, st.span);
                    state.write(dest, &value);
                }
                StatementKind::Call(call) => self.call(fx, &mut state, call, st.span),
                StatementKind::Abort(_) => return flow,
                StatementKind::Return => {
                    flow.ret = Some(join_opt(flow.ret.take(), state));
                    return flow;
                }
                StatementKind::Nop | StatementKind::Drop(_) => {}
                StatementKind::Break(d) => {
                    flow.add_break(*d, state);
                    return flow;
                }
                StatementKind::Continue(d) => {
                    flow.add_continue(*d, state);
                    return flow;
                }
                StatementKind::Switch(sw) => {
                    let arms: Vec<&Block> = match sw {
                        Switch::If(op, a, b) => {
                            let l = fx.operand(&state, op, st.span).collapse();
                            fx.check_branch(l, st.span);
                            vec![a, b]
                        }
                        Switch::SwitchInt(op, arms, other) => {
                            let l = fx.operand(&state, op, st.span).collapse();
                            fx.check_branch(l, st.span);
                            arms.iter().map(|(_, b)| b).chain([other]).collect()
                        }
                        Switch::Match(p, arms, other) => {
                            let l = fx.read(&state, p, st.span).tag;
                            fx.check_branch(l, st.span);
                            arms.iter().map(|(_, b)| b).chain(other.as_ref()).collect()
                        }
                    };
                    let mut next: Option<State> = None;
                    for arm in arms {
                        let f = self.block(fx, arm, state.clone());
                        flow.merge_exits(&f);
                        if let Some(s) = f.next {
                            next = Some(join_opt(next, s));
                        }
                    }
                    match next {
                        Some(s) => state = s,
                        None => return flow,
                    }
                }
                StatementKind::Loop(body) => {
                    let mut entry = state.clone();
                    let inner = loop {
                        let f = self.block(fx, body, entry.clone());
                        let mut again = entry.clone();
                        if let Some(s) = &f.next {
                            again = again.join(s);
                        }
                        if let Some(s) = f.continues.get(&0) {
                            again = again.join(s);
                        }
                        if again == entry {
                            break f;
                        }
                        entry = again;
                    };
                    if let Some(r) = inner.ret.clone() {
                        flow.ret = Some(join_opt(flow.ret.take(), r));
                    }
                    for (d, s) in inner.breaks.iter().filter(|(d, _)| **d > 0) {
                        flow.add_break(d - 1, s.clone());
                    }
                    for (d, s) in inner.continues.iter().filter(|(d, _)| **d > 0) {
                        flow.add_continue(d - 1, s.clone());
                    }
                    match inner.breaks.get(&0) {
                        Some(s) => state = s.clone(),
                        None => return flow,
                    }
                }
            }
        }
        flow.next = Some(state);
        flow
    }

    fn rvalue(&mut self, fx: &mut FnCx<'_>, state: &State, rv: &Rvalue, span: Span) -> TaintTree {
        match rv {
            Rvalue::Use(op) => fx.operand(state, op, span),
            Rvalue::BinOp(op, a, b) => {
                let l = fx.operand(state, a, span).collapse().join(fx.operand(state, b, span).collapse());
                if l.is_secret() && self.config.variable_latency.contains(op) {
                    fx.violation(ViolationKind::Div, span, format!("secret operand to variable-latency `{}`", op.name()));
                }
                TaintTree::leaf(l)
            }
            Rvalue::UnOp(_, a) => TaintTree::leaf(fx.operand(state, a, span).collapse()),
            Rvalue::Discriminant(p) => TaintTree::leaf(fx.read(state, p, span).tag),
            Rvalue::Ref(p, _) => fx.read(state, p, span),
            Rvalue::Aggregate(kind, ops) => {
                let fields: Vec<TaintTree> = ops.iter().map(|o| fx.operand(state, o, span)).collect();
                match kind {
                    AggregateKind::Array(_) => fields.iter().fold(TaintTree::public(), |a, b| a.join(b)),
                    AggregateKind::Tuple | AggregateKind::Adt(_, None, _) => TaintTree::node(
                        fields.into_iter().enumerate().map(|(i, t)| (Elem::Field(crate::ir::FieldId(i as u32)), t)).collect(),
                    ),
                    AggregateKind::Adt(_, Some(v), _) => {
                        let inner = TaintTree::node(
                            fields.into_iter().enumerate().map(|(i, t)| (Elem::Field(crate::ir::FieldId(i as u32)), t)).collect(),
                        );
                        TaintTree::node([(Elem::Variant(*v), inner)].into_iter().collect())
                    }
                }
            }
        }
    }

    fn call(&mut self, fx: &mut FnCx<'_>, state: &mut State, call: &Call, span: Span) {
        let args: Vec<TaintTree> = call.args.iter().map(|a| fx.operand(state, a, span)).collect();
        let callee = match &call.func {
            FnOperand::Regular(ptr) => match &ptr.func {
                FunIdOrTraitMethodRef::Fun(id) => Some(*id),
                FunIdOrTraitMethodRef::TraitMethod(tref, name) => match &tref.kind {
                    TraitRefKind::TraitImpl(imp, _) => self.krate.trait_impls.get(*imp).and_then(|i| i.method(name)),
                    _ => None,
                },
                FunIdOrTraitMethodRef::UnresolvedMethod(..) => None,
            },
            FnOperand::Move(p) => {
                fx.read(state, p, span);
                None
            }
        };
        let has_body = callee.is_some_and(|id| matches!(self.krate.fun_decls.get(id).map(|f| &f.body), Some(Body::Llbc(_))));
        let (ret, after) = if has_body {
            let s = self.summary((callee.unwrap(), args.clone()));
            (s.ret, s.args_after)
        } else {
            let name = callee.map(|id| self.krate.fun_decls[id].meta.name.to_string()).unwrap_or_else(|| "an unknown function".into());
            fx.missing.insert(Violation {
                kind: ViolationKind::MissingBody,
                span,
                function: fx.fun.clone(),
                message: format!("call to {name}, which has no body"),
            });
            let all = TaintTree::leaf(args.iter().fold(Label::Public, |l, t| l.join(t.collapse())));
            (all.clone(), vec![all; args.len()])
        };
        // effects through reference arguments
        for (a, t) in call.args.iter().zip(&after) {
            if let Operand::Copy(p) | Operand::Move(p) = a {
                if !state.points.get(&p.local).is_some_and(|s| !s.is_empty()) {
                    continue;
                }
                let l = TaintTree::leaf(t.collapse());
                for target in state.points[&p.local].clone() {
                    let cur = state.tree(target).join(&l);
                    state.trees.insert(target, cur);
                }
                let cur = state.tree(p.local).join(&l);
                state.trees.insert(p.local, cur);
            }
        }
        fx.check_place(state, &call.dest, span);
        state.points.remove(&call.dest.local);
        state.write(&call.dest, &ret);
    }
}

struct FnCx<'a> {
    fun: String,
    locals: &'a Locals,
    violations: BTreeSet<Violation>,
    missing: BTreeSet<Violation>,
}

impl FnCx<'_> {
    fn violation(&mut self, kind: ViolationKind, span: Span, message: String) {
        self.violations.insert(Violation { kind, span, function: self.fun.clone(), message });
    }

    fn check_branch(&mut self, l: Label, span: Span) {
        if l.is_secret() {
            self.violation(ViolationKind::Branch, span, "branch on a secret value".into());
        }
    }

    fn local_name(&self, id: LocalId) -> String {
        self.locals.vars.get(id).map(|l| l.name.clone()).unwrap_or_else(|| id.to_string())
    }

    /// Reports secret index operands in `p`'s projection.
    fn check_place(&mut self, state: &State, p: &Place, span: Span) {
        for e in &p.projection {
            if let ProjectionElem::Index(op) = e {
                if self.operand(state, op, span).collapse().is_secret() {
                    let msg = format!("index into `{}` with a secret offset", self.local_name(p.local));
                    self.violation(ViolationKind::Index, span, msg);
                }
            }
        }
    }

    fn operand(&mut self, state: &State, op: &Operand, span: Span) -> TaintTree {
        match op {
            Operand::Copy(p) | Operand::Move(p) => self.read(state, p, span),
            Operand::Const(_) => TaintTree::public(),
        }
    }

    fn read(&mut self, state: &State, p: &Place, span: Span) -> TaintTree {
        self.check_place(state, p, span);
        let mut t = state.tree(p.local);
        for e in &p.projection {
            t = match e {
                ProjectionElem::Field(f) => t.child(Elem::Field(*f)),
                ProjectionElem::Downcast(v) => t.child(Elem::Variant(*v)),
                ProjectionElem::Index(_) => t,
                ProjectionElem::Deref => match state.points.get(&p.local) {
                    Some(targets) => targets.iter().fold(t, |acc, x| acc.join(&state.tree(*x))),
                    None => t,
                },
            };
        }
        t
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct State {
    trees: BTreeMap<LocalId, TaintTree>,
    /// Locals a reference may point into.
    points: BTreeMap<LocalId, BTreeSet<LocalId>>,
}

impl State {
    fn tree(&self, l: LocalId) -> TaintTree {
        self.trees.get(&l).cloned().unwrap_or_else(TaintTree::public)
    }

    fn targets_of(&self, p: &Place) -> BTreeSet<LocalId> {
        let mut out = BTreeSet::from([p.local]);
        if p.projection.contains(&ProjectionElem::Deref) {
            out.extend(self.points.get(&p.local).into_iter().flatten().copied());
        }
        out
    }

    fn write(&mut self, p: &Place, value: &TaintTree) {
        if p.projection.contains(&ProjectionElem::Deref) {
            let l = TaintTree::leaf(value.collapse());
            for t in self.points.get(&p.local).cloned().unwrap_or_default() {
                let cur = self.tree(t).join(&l);
                self.trees.insert(t, cur);
            }
            let cur = self.tree(p.local).join(&l);
            self.trees.insert(p.local, cur);
            return;
        }
        let mut path = Vec::new();
        let mut weak = false;
        for e in &p.projection {
            match e {
                ProjectionElem::Field(f) => path.push(Elem::Field(*f)),
                ProjectionElem::Downcast(v) => path.push(Elem::Variant(*v)),
                ProjectionElem::Index(_) => weak = true,
                ProjectionElem::Deref => unreachable!("handled above"),
            }
        }
        let cur = self.tree(p.local);
        let new = if weak { cur.update(&path, value, true) } else { cur.update(&path, value, false) };
        self.trees.insert(p.local, new);
    }

    fn join(&self, o: &State) -> State {
        let mut trees = self.trees.clone();
        for (k, t) in &o.trees {
            let j = self.tree(*k).join(t);
            trees.insert(*k, j);
        }
        let mut points = self.points.clone();
        for (k, s) in &o.points {
            points.entry(*k).or_default().extend(s.iter().copied());
        }
        State { trees, points }
    }
}

fn join_opt(a: Option<State>, b: State) -> State {
    match a {
        Some(a) => a.join(&b),
        None => b,
    }
}

/// How control leaves a block.
#[derive(Debug, Default)]
struct Flow {
    next: Option<State>,
    ret: Option<State>,
    breaks: BTreeMap<u32, State>,
    continues: BTreeMap<u32, State>,
}

impl Flow {
    fn add_break(&mut self, d: u32, s: State) {
        let j = join_opt(self.breaks.remove(&d), s);
        self.breaks.insert(d, j);
    }

    fn add_continue(&mut self, d: u32, s: State) {
        let j = join_opt(self.continues.remove(&d), s);
        self.continues.insert(d, j);
    }

    fn merge_exits(&mut self, o: &Flow) {
        if let Some(r) = &o.ret {
            self.ret = Some(join_opt(self.ret.take(), r.clone()));
        }
        for (d, s) in &o.breaks {
            self.add_break(*d, s.clone());
        }
        for (d, s) in &o.continues {
            self.add_continue(*d, s.clone());
        }
    }
}

/// Targets of a reference moved or copied as a whole.
fn copied_ref(rv: &Rvalue, state: &State) -> Option<BTreeSet<LocalId>> {
    let Rvalue::Use(Operand::Copy(p) | Operand::Move(p)) = rv else { return None };
    if !p.projection.is_empty() {
        return None;
    }
    state.points.get(&p.local).cloned()
}
