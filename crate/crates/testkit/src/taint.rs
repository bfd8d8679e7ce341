//! A deliberately coarse taint oracle: one label per local, no flow, field
//! or calling-context sensitivity, references merged with their targets,
//! and `declassify` ignored. Anything the real analysis reports must be
//! reported here too.

use std::collections::{BTreeSet, HashMap};

use charon_lite::ir::llbc::{Block, Statement, StatementKind, Switch};
use charon_lite::ir::{
    BinOp, Body, FnOperand, FunDeclId, FunIdOrTraitMethodRef, LocalId, Operand, Place, ProjectionElem, Rvalue,
    Span, TraitRefKind, TranslatedCrate, Ty,
};
use charon_lite::taint::{secret_params, ViolationKind};

type Node = (FunDeclId, LocalId);

#[derive(Default)]
struct Graph {
    ids: HashMap<Node, usize>,
    parent: Vec<usize>,
    /// (from, to) over nodes.
    edges: Vec<(usize, usize)>,
}

impl Graph {
    fn node(&mut self, n: Node) -> usize {
        let next = self.parent.len();
        let id = *self.ids.entry(n).or_insert(next);
        if id == next {
            self.parent.push(next);
        }
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.parent[a] = b;
    }
}

fn place_locals(p: &Place, out: &mut Vec<LocalId>) {
    out.push(p.local);
    for e in &p.projection {
        if let ProjectionElem::Index(op) = e {
            operand_locals(op, out);
        }
    }
}

fn operand_locals(op: &Operand, out: &mut Vec<LocalId>) {
    if let Some(p) = op.place() {
        place_locals(p, out);
    }
}

fn index_operands<'a>(p: &'a Place, out: &mut Vec<&'a Operand>) {
    for e in &p.projection {
        if let ProjectionElem::Index(op) = e {
            out.push(op);
        }
    }
}

fn walk<'a>(b: &'a Block, out: &mut Vec<&'a Statement>) {
    for st in &b.statements {
        out.push(st);
        match &st.kind {
            StatementKind::Loop(body) => walk(body, out),
            StatementKind::Switch(Switch::If(_, a, b)) => {
                walk(a, out);
                walk(b, out);
            }
            StatementKind::Switch(Switch::SwitchInt(_, arms, other)) => {
                arms.iter().for_each(|(_, a)| walk(a, out));
                walk(other, out);
            }
            StatementKind::Switch(Switch::Match(_, arms, other)) => {
                arms.iter().for_each(|(_, a)| walk(a, out));
                other.iter().for_each(|a| walk(a, out));
            }
            _ => {}
        }
    }
}

fn callee(krate: &TranslatedCrate, f: &FnOperand) -> Option<FunDeclId> {
    let FnOperand::Regular(ptr) = f else { return None };
    let id = match &ptr.func {
        FunIdOrTraitMethodRef::Fun(id) => *id,
        FunIdOrTraitMethodRef::TraitMethod(tref, name) => match &tref.kind {
            TraitRefKind::TraitImpl(imp, _) => krate.trait_impls.get(*imp)?.method(name)?,
            _ => return None,
        },
        FunIdOrTraitMethodRef::UnresolvedMethod(..) => return None,
    };
    matches!(krate.fun_decls.get(id)?.body, Body::Llbc(_)).then_some(id)
}

/// Every (span, kind) an insensitive analysis flags, with `variable_latency`
/// as the operators checked for secret operands.
pub fn brute_force_violations(krate: &TranslatedCrate, variable_latency: &[BinOp]) -> BTreeSet<(Span, ViolationKind)> {
    let mut g = Graph::default();
    let mut roots = Vec::new();
    let mut bodies = Vec::new();
    for f in krate.fun_decls.iter() {
        let Body::Llbc(body) = &f.body else { continue };
        for l in body.locals.vars.iter() {
            g.node((f.id, l.index));
        }
        roots.extend(secret_params(&f.meta.attributes, &body.locals).into_iter().map(|l| (f.id, l)));
        let mut sts = Vec::new();
        walk(&body.body, &mut sts);
        bodies.push((f.id, body, sts));
    }
    let is_ref = |body: &charon_lite::ir::llbc::LlbcBody, l: LocalId| {
        body.locals.vars.get(l).is_some_and(|v| matches!(v.ty, Ty::Ref(..)))
    };
    for (fid, body, sts) in &bodies {
        let fid = *fid;
        for st in sts {
            match &st.kind {
                StatementKind::Assign(dest, rv) => {
                    let d = g.node((fid, dest.local));
                    let mut srcs = Vec::new();
                    match rv {
                        Rvalue::Use(op) => {
                            operand_locals(op, &mut srcs);
                            if let Some(p) = op.place().filter(|p| is_ref(body, p.local)) {
                                let s = g.node((fid, p.local));
                                g.union(d, s);
                            }
                        }
                        Rvalue::BinOp(_, a, b) => {
                            operand_locals(a, &mut srcs);
                            operand_locals(b, &mut srcs);
                        }
                        Rvalue::UnOp(_, a) => operand_locals(a, &mut srcs),
                        Rvalue::Discriminant(p) => place_locals(p, &mut srcs),
                        Rvalue::Aggregate(_, ops) => ops.iter().for_each(|o| operand_locals(o, &mut srcs)),
                        Rvalue::Ref(p, _) => {
                            place_locals(p, &mut srcs);
                            let s = g.node((fid, p.local));
                            g.union(d, s);
                        }
                    }
                    for s in srcs {
                        let s = g.node((fid, s));
                        g.edges.push((s, d));
                    }
                }
                StatementKind::Call(call) => {
                    let d = g.node((fid, call.dest.local));
                    let mut args = Vec::new();
                    for a in &call.args {
                        let mut ls = Vec::new();
                        operand_locals(a, &mut ls);
                        args.push(ls.into_iter().map(|l| g.node((fid, l))).collect::<Vec<_>>());
                    }
                    match callee(krate, &call.func) {
                        Some(c) => {
                            for (i, (a, ls)) in call.args.iter().zip(&args).enumerate() {
                                let p = g.node((c, LocalId(i as u32 + 1)));
                                for &s in ls {
                                    g.edges.push((s, p));
                                }
                                if let Some(pl) = a.place().filter(|pl| is_ref(body, pl.local)) {
                                    let s = g.node((fid, pl.local));
                                    g.union(s, p);
                                }
                            }
                            let r = g.node((c, LocalId(0)));
                            g.edges.push((r, d));
                        }
                        None => {
                            let all: Vec<usize> = args.iter().flatten().copied().collect();
                            for &s in &all {
                                g.edges.push((s, d));
                                for &t in &all {
                                    g.edges.push((s, t));
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
    let mut tainted = BTreeSet::new();
    for r in roots {
        let n = g.node(r);
        tainted.insert(g.find(n));
    }
    loop {
        let before = tainted.len();
        for i in 0..g.edges.len() {
            let (a, b) = g.edges[i];
            if tainted.contains(&g.find(a)) {
                let b = g.find(b);
                tainted.insert(b);
            }
        }
        if tainted.len() == before {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for (fid, _, sts) in &bodies {
        let secret = |g: &mut Graph, op: &Operand| {
            let mut ls = Vec::new();
            operand_locals(op, &mut ls);
            ls.into_iter().any(|l| {
                let n = g.node((*fid, l));
                tainted.contains(&g.find(n))
            })
        };
        for st in sts {
            let mut places = Vec::new();
            match &st.kind {
                StatementKind::Assign(dest, rv) => {
                    places.push(dest);
                    match rv {
                        Rvalue::Use(op) | Rvalue::UnOp(_, op) => places.extend(op.place()),
                        Rvalue::BinOp(op, a, b) => {
                            places.extend(a.place());
                            places.extend(b.place());
                            if variable_latency.contains(op) && (secret(&mut g, a) || secret(&mut g, b)) {
                                out.insert((st.span, ViolationKind::Div));
                            }
                        }
                        Rvalue::Discriminant(p) | Rvalue::Ref(p, _) => places.push(p),
                        Rvalue::Aggregate(_, ops) => places.extend(ops.iter().filter_map(Operand::place)),
                    }
                }
                StatementKind::Call(call) => {
                    places.push(&call.dest);
                    places.extend(call.args.iter().filter_map(Operand::place));
                    if let FnOperand::Move(p) = &call.func {
                        places.push(p);
                    }
                }
                StatementKind::Switch(Switch::If(op, ..) | Switch::SwitchInt(op, ..)) => {
                    if secret(&mut g, op) {
                        out.insert((st.span, ViolationKind::Branch));
                    }
                    places.extend(op.place());
                }
                StatementKind::Switch(Switch::Match(p, ..)) => {
                    if secret(&mut g, &Operand::Copy(p.clone())) {
                        out.insert((st.span, ViolationKind::Branch));
                    }
                    places.push(p);
                }
                _ => {}
            }
            let mut idx = Vec::new();
            places.iter().for_each(|p| index_operands(p, &mut idx));
            if idx.into_iter().any(|op| secret(&mut g, op)) {
                out.insert((st.span, ViolationKind::Index));
            }
        }
    }
    out
}
