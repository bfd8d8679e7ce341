//! Canonical text form of a crate. ULLBC output parses back to the same crate
//! (up to spans); LLBC bodies use a structured, print-only syntax.

use std::fmt::Write;

use crate::ir::llbc::{self, Block, LlbcBody, Switch};
use crate::ir::typing::place_ty;
use crate::ir::ullbc::{self, Locals, TerminatorKind, UllbcBody};
use crate::ir::*;

pub fn pretty_print(krate: &TranslatedCrate) -> String {
    let mut p = Printer { krate, out: String::new() };
    for d in krate.type_decls.iter() {
        p.type_decl(d);
    }
    for d in krate.trait_decls.iter() {
        p.trait_decl(d);
    }
    for d in krate.trait_impls.iter() {
        p.impl_decl(d);
    }
    for d in krate.fun_decls.iter() {
        p.fun_decl(d);
    }
    p.out
}

/// Prints one function only.
pub fn print_fun(krate: &TranslatedCrate, fun: &FunDecl) -> String {
    let mut p = Printer { krate, out: String::new() };
    p.fun_decl(fun);
    p.out
}

/// Binder stack used to name variables, innermost first.
#[derive(Clone, Copy)]
pub struct Env<'a> {
    levels: [Option<&'a GenericParams>; 2],
}

impl<'a> Env<'a> {
    pub fn new(params: &'a GenericParams) -> Env<'a> {
        Env { levels: [Some(params), None] }
    }

    pub fn nested(inner: &'a GenericParams, outer: &'a GenericParams) -> Env<'a> {
        Env { levels: [Some(inner), Some(outer)] }
    }

    fn level(&self, depth: u32) -> Option<&'a GenericParams> {
        self.levels.get(depth as usize).copied().flatten()
    }

    fn type_name(&self, v: BoundVar) -> String {
        self.level(v.depth)
            .and_then(|g| g.types.get(v.index as usize))
            .map(|t| t.name.clone())
            .unwrap_or_else(|| format!("T{}_{}", v.depth, v.index))
    }

    fn const_name(&self, v: BoundVar) -> String {
        self.level(v.depth)
            .and_then(|g| g.const_generics.get(v.index as usize))
            .map(|c| c.name.clone())
            .unwrap_or_else(|| format!("N{}_{}", v.depth, v.index))
    }
}

struct Printer<'a> {
    krate: &'a TranslatedCrate,
    out: String,
}

fn join<T>(items: &[T], mut f: impl FnMut(&T) -> String) -> String {
    items.iter().map(&mut f).collect::<Vec<_>>().join(", ")
}

fn local_name(locals: &Locals, id: LocalId) -> String {
    if id.0 == 0 {
        return "ret".into();
    }
    match locals.vars.get(id) {
        Some(l) if is_plain_ident(&l.name) && l.name != "ret" && locals.by_name(&l.name) == Some(id) => l.name.clone(),
        _ => format!("_{}", id.0),
    }
}

fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
        && !(s.starts_with("bb") && s[2..].bytes().all(|b| b.is_ascii_digit()))
}

const KEYWORDS: [&str; 12] =
    ["move", "copy", "const", "call", "drop", "nop", "let", "use", "true", "false", "goto", "return"];

impl<'a> Printer<'a> {
    fn line(&mut self, indent: usize, text: &str) {
        for _ in 0..indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn attrs(&mut self, indent: usize, attrs: &[String]) {
        for a in attrs {
            self.line(indent, &format!("#[{a}]"));
        }
    }

    fn comments(&mut self, indent: usize, comments: &[String]) {
        for c in comments {
            self.line(indent, &format!("// {c}"));
        }
    }

    fn type_decl(&mut self, d: &TypeDecl) {
        let env = Env::new(&d.generics);
        self.attrs(0, &d.meta.attributes);
        let head = format!("type {}{}{}", d.meta.name, generics_header(&d.generics), where_clause(self.krate, env, &d.generics));
        match &d.kind {
            TypeDeclKind::Struct(fields) => {
                let fields = join(fields, |t| ty(self.krate, env, t));
                self.line(0, &format!("{head} = struct({fields});"));
            }
            TypeDeclKind::Enum(variants) => {
                self.line(0, &format!("{head} = enum {{"));
                for v in variants {
                    let fields = if v.fields.is_empty() {
                        String::new()
                    } else {
                        format!("({})", join(&v.fields, |t| ty(self.krate, env, t)))
                    };
                    self.line(1, &format!("{}{} = {},", v.name, fields, v.discriminant));
                }
                self.line(0, "};");
            }
            TypeDeclKind::Opaque => self.line(0, &format!("{head} = opaque;")),
        }
        self.out.push('\n');
    }

    fn bound(&self, env: Env<'_>, trait_id: TraitDeclId, args: &GenericArgs) -> String {
        let mut rest = args.clone();
        if !rest.types.is_empty() {
            rest.types.remove(0);
        }
        format!("{}{}", trait_name(self.krate, trait_id), angle_args(self.krate, env, &rest))
    }

    fn trait_decl(&mut self, d: &TraitDecl) {
        let env = Env::new(&d.generics);
        self.attrs(0, &d.meta.attributes);
        let mut shown = d.generics.clone();
        if !shown.types.is_empty() {
            shown.types.remove(0);
        }
        let parents = if d.parent_clauses.is_empty() {
            String::new()
        } else {
            let bounds: Vec<String> = d.parent_clauses.iter().map(|c| self.bound(env, c.trait_id, &c.args)).collect();
            format!(": {}", bounds.join(" + "))
        };
        self.line(0, &format!("trait {}{}{} {{", d.meta.name, generics_header(&shown), parents));
        for a in &d.assoc_types {
            let bounds = if a.bounds.is_empty() {
                String::new()
            } else {
                let bs: Vec<String> = a.bounds.iter().map(|c| self.bound(env, c.trait_id, &c.args)).collect();
                format!(": {}", bs.join(" + "))
            };
            self.line(1, &format!("type {}{};", a.name, bounds));
        }
        for m in &d.methods {
            let menv = Env::nested(&m.signature.generics, &d.generics);
            let sig = signature(self.krate, menv, &m.signature, None);
            self.line(1, &format!("fn {}{};", m.name, sig));
        }
        self.line(0, "}");
        self.out.push('\n');
    }

    fn impl_decl(&mut self, d: &TraitImpl) {
        let env = Env::new(&d.generics);
        self.attrs(0, &d.meta.attributes);
        let self_ty = d.trait_args.types.first().map(|t| ty(self.krate, env, t)).unwrap_or_else(|| "()".into());
        self.line(
            0,
            &format!(
                "impl {}{}: {} for {}{} {{",
                d.meta.name,
                generics_header(&d.generics),
                self.bound(env, d.trait_id, &d.trait_args),
                self_ty,
                where_clause(self.krate, env, &d.generics)
            ),
        );
        if !d.parent_trait_refs.is_empty() {
            let refs = join(&d.parent_trait_refs, |r| trait_ref(self.krate, env, r));
            self.line(1, &format!("parents [{refs}];"));
        }
        for a in &d.assoc_types {
            let with = if a.bound_refs.is_empty() {
                String::new()
            } else {
                format!(" with [{}]", join(&a.bound_refs, |r| trait_ref(self.krate, env, r)))
            };
            self.line(1, &format!("type {} = {}{};", a.name, ty(self.krate, env, &a.ty), with));
        }
        for m in &d.methods {
            let target = self.krate.fun_decls.get(m.fun_id).map(|f| f.meta.name.to_string()).unwrap_or_else(|| m.fun_id.to_string());
            self.line(1, &format!("fn {} = {};", m.name, target));
        }
        self.line(0, "}");
        self.out.push('\n');
    }

    fn fun_decl(&mut self, d: &FunDecl) {
        let env = Env::new(&d.signature.generics);
        self.attrs(0, &d.meta.attributes);
        let locals = d.body.locals();
        let sig = signature(self.krate, env, &d.signature, locals);
        match &d.body {
            Body::Opaque => self.line(0, &format!("fn {}{};", d.meta.name, sig)),
            Body::Ullbc(body) => {
                self.line(0, &format!("fn {}{} {{", d.meta.name, sig));
                self.lets(env, &body.locals);
                self.ullbc_body(env, body);
                self.line(0, "}");
            }
            Body::Llbc(body) => {
                self.line(0, &format!("fn {}{} {{", d.meta.name, sig));
                self.lets(env, &body.locals);
                self.llbc_body(env, body);
                self.line(0, "}");
            }
        }
        self.out.push('\n');
    }

    fn lets(&mut self, env: Env<'_>, locals: &Locals) {
        for l in locals.vars.iter().skip(locals.arg_count as usize + 1) {
            let line = format!("let {}: {};", local_name(locals, l.index), ty(self.krate, env, &l.ty));
            self.line(1, &line);
        }
    }

    fn ullbc_body(&mut self, env: Env<'_>, body: &UllbcBody) {
        let cx = BodyPrinter { krate: self.krate, env, locals: &body.locals };
        for (id, block) in body.blocks.iter_enumerated() {
            self.line(1, &format!("{id}: {{"));
            for st in &block.statements {
                self.comments(2, &st.comments);
                self.attrs(2, &st.attributes);
                let text = match &st.kind {
                    ullbc::StatementKind::Assign(p, rv) => format!("{} = {};", cx.place(p), cx.rvalue(rv)),
                    ullbc::StatementKind::Drop(p) => format!("drop {};", cx.place(p)),
                    ullbc::StatementKind::Nop => "nop;".into(),
                };
                self.line(2, &text);
            }
            self.comments(2, &block.terminator.comments);
            let t = cx.terminator(&block.terminator.kind);
            self.line(2, &t);
            self.line(1, "}");
        }
    }

    fn llbc_body(&mut self, env: Env<'_>, body: &LlbcBody) {
        let cx = BodyPrinter { krate: self.krate, env, locals: &body.locals };
        self.llbc_block(&cx, &body.body, 1);
    }

    fn llbc_block(&mut self, cx: &BodyPrinter<'_>, block: &Block, indent: usize) {
        for st in &block.statements {
            self.comments(indent, &st.comments);
            self.attrs(indent, &st.attributes);
            match &st.kind {
                llbc::StatementKind::Assign(p, rv) => self.line(indent, &format!("{} = {};", cx.place(p), cx.rvalue(rv))),
                llbc::StatementKind::Call(call) => self.line(indent, &format!("{};", cx.call(call))),
                llbc::StatementKind::Abort(k) => self.line(indent, &format!("abort {};", abort_kind(*k))),
                llbc::StatementKind::Return => self.line(indent, "return;"),
                llbc::StatementKind::Nop => self.line(indent, "nop;"),
                llbc::StatementKind::Drop(p) => self.line(indent, &format!("drop {};", cx.place(p))),
                llbc::StatementKind::Break(d) => self.line(indent, &format!("break {d};")),
                llbc::StatementKind::Continue(d) => self.line(indent, &format!("continue {d};")),
                llbc::StatementKind::Loop(body) => {
                    self.line(indent, "loop {");
                    self.llbc_block(cx, body, indent + 1);
                    self.line(indent, "}");
                }
                llbc::StatementKind::Switch(sw) => match sw {
                    Switch::If(cond, then, els) => {
                        self.line(indent, &format!("if {} {{", cx.operand(cond)));
                        self.llbc_block(cx, then, indent + 1);
                        self.line(indent, "} else {");
                        self.llbc_block(cx, els, indent + 1);
                        self.line(indent, "}");
                    }
                    Switch::SwitchInt(discr, arms, otherwise) => {
                        self.line(indent, &format!("switch {} {{", cx.operand(discr)));
                        for (values, b) in arms {
                            let pat = values.iter().map(|v| v.value.to_string()).collect::<Vec<_>>().join(" | ");
                            self.line(indent + 1, &format!("{pat} => {{"));
                            self.llbc_block(cx, b, indent + 2);
                            self.line(indent + 1, "}");
                        }
                        self.line(indent + 1, "_ => {");
                        self.llbc_block(cx, otherwise, indent + 2);
                        self.line(indent + 1, "}");
                        self.line(indent, "}");
                    }
                    Switch::Match(scrut, arms, otherwise) => {
                        let ty = place_ty(self.krate, cx.locals, scrut).ok();
                        self.line(indent, &format!("match {} {{", cx.place(scrut)));
                        for (variants, b) in arms {
                            let pat = variants
                                .iter()
                                .map(|v| variant_name(self.krate, ty.as_ref(), *v))
                                .collect::<Vec<_>>()
                                .join(" | ");
                            self.line(indent + 1, &format!("{pat} => {{"));
                            self.llbc_block(cx, b, indent + 2);
                            self.line(indent + 1, "}");
                        }
                        if let Some(b) = otherwise {
                            self.line(indent + 1, "_ => {");
                            self.llbc_block(cx, b, indent + 2);
                            self.line(indent + 1, "}");
                        }
                        self.line(indent, "}");
                    }
                },
            }
        }
    }
}

fn abort_kind(k: AbortKind) -> &'static str {
    match k {
        AbortKind::Panic => "panic",
        AbortKind::UndefinedBehavior => "ub",
    }
}

fn trait_name(krate: &TranslatedCrate, id: TraitDeclId) -> String {
    krate.trait_decls.get(id).map(|t| t.meta.name.to_string()).unwrap_or_else(|| id.to_string())
}

fn variant_name(krate: &TranslatedCrate, ty: Option<&Ty>, v: VariantId) -> String {
    if let Some(Ty::Adt(id, _)) = ty {
        if let Some(var) = krate.type_decls.get(*id).and_then(|d| d.variants()).and_then(|vs| vs.get(v.0 as usize)) {
            return var.name.clone();
        }
    }
    v.to_string()
}

pub fn generics_header(g: &GenericParams) -> String {
    let mut parts: Vec<String> = g.regions.clone();
    parts.extend(g.types.iter().map(|t| t.name.clone()));
    parts.extend(g.const_generics.iter().map(|c| format!("const {}: {}", c.name, c.ty.name())));
    if parts.is_empty() {
        String::new()
    } else {
        format!("<{}>", parts.join(", "))
    }
}

pub fn where_clause(krate: &TranslatedCrate, env: Env<'_>, g: &GenericParams) -> String {
    let mut preds = Vec::new();
    for c in g.trait_clauses.iter() {
        let self_ty = c.args.types.first().map(|t| ty(krate, env, t)).unwrap_or_else(|| "()".into());
        let mut rest = c.args.clone();
        if !rest.types.is_empty() {
            rest.types.remove(0);
        }
        preds.push(format!("{}: {}{}", self_ty, trait_name(krate, c.trait_id), angle_args(krate, env, &rest)));
    }
    for o in &g.types_outlive {
        preds.push(format!("{}: {}", ty(krate, env, &o.ty), o.region.0));
    }
    for o in &g.regions_outlive {
        preds.push(format!("{}: {}", o.longer.0, o.shorter.0));
    }
    for c in &g.trait_type_constraints {
        preds.push(format!("<{}>::{} = {}", trait_ref(krate, env, &c.trait_ref), c.name, ty(krate, env, &c.ty)));
    }
    if preds.is_empty() {
        String::new()
    } else {
        format!(" where {}", preds.join(", "))
    }
}

fn signature(krate: &TranslatedCrate, env: Env<'_>, sig: &FunSig, locals: Option<&Locals>) -> String {
    let params: Vec<String> = sig
        .inputs
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let name = match locals {
                Some(l) => local_name(l, LocalId(i as u32 + 1)),
                None => format!("_{}", i + 1),
            };
            format!("{}: {}", name, ty(krate, env, t))
        })
        .collect();
    let output = if sig.output.is_unit() { String::new() } else { format!(" -> {}", ty(krate, env, &sig.output)) };
    format!(
        "{}({}){}{}",
        generics_header(&sig.generics),
        params.join(", "),
        output,
        where_clause(krate, env, &sig.generics)
    )
}

/// Arguments in `<...>`, omitting erased regions and pending trait refs that
/// the parser fills in by itself.
pub fn angle_args(krate: &TranslatedCrate, env: Env<'_>, args: &GenericArgs) -> String {
    let parts = arg_list(krate, env, args);
    if parts.is_empty() {
        String::new()
    } else {
        format!("<{}>", parts.join(", "))
    }
}

fn arg_list(krate: &TranslatedCrate, env: Env<'_>, args: &GenericArgs) -> Vec<String> {
    let mut parts = Vec::new();
    if !args.regions.iter().all(|r| *r == Region::erased()) {
        parts.extend(args.regions.iter().map(|r| r.0.clone()));
    }
    parts.extend(args.types.iter().map(|t| ty(krate, env, t)));
    parts.extend(args.const_generics.iter().map(|c| const_generic(env, c)));
    if !args.trait_refs.iter().all(|r| *r == TraitRefKind::pending()) {
        parts.extend(args.trait_refs.iter().map(|r| trait_ref(krate, env, r)));
    }
    parts
}

fn const_generic(env: Env<'_>, c: &ConstGeneric) -> String {
    match c {
        ConstGeneric::Value(v) => v.to_string(),
        ConstGeneric::Var(v) => env.const_name(*v),
    }
}

pub fn ty(krate: &TranslatedCrate, env: Env<'_>, t: &Ty) -> String {
    match t {
        Ty::Scalar(k) => k.name().into(),
        Ty::Bool => "bool".into(),
        Ty::Adt(id, args) => {
            let name = krate.type_decls.get(*id).map(|d| d.meta.name.to_string()).unwrap_or_else(|| id.to_string());
            format!("{}{}", name, angle_args(krate, env, args))
        }
        Ty::TypeVar(v) => env.type_name(*v),
        Ty::Ref(r, inner, m) => {
            let m = if *m == Mutability::Mut { "mut " } else { "" };
            if *r == Region::erased() {
                format!("&{}{}", m, ty(krate, env, inner))
            } else {
                format!("&{} {}{}", r.0, m, ty(krate, env, inner))
            }
        }
        Ty::Tuple(tys) if tys.len() == 1 => format!("({},)", ty(krate, env, &tys[0])),
        Ty::Tuple(tys) => format!("({})", join(tys, |t| ty(krate, env, t))),
        Ty::Array(elem, len) => format!("[{}; {}]", ty(krate, env, elem), const_generic(env, len)),
        Ty::AssocType(r, name) => format!("<{}>::{}", trait_ref(krate, env, r), name),
    }
}

pub fn trait_ref(krate: &TranslatedCrate, env: Env<'_>, r: &TraitRefKind) -> String {
    match r {
        TraitRefKind::TraitImpl(id, args) => {
            let name = krate.trait_impls.get(*id).map(|d| d.meta.name.to_string()).unwrap_or_else(|| id.to_string());
            format!("@impl {}{}", name, angle_args(krate, env, args))
        }
        TraitRefKind::Clause(c) => format!("@c{}", c.0),
        TraitRefKind::ParentClause(base, k) => format!("@parent({}, {})", trait_ref(krate, env, base), k),
        TraitRefKind::ItemClause(base, name, k) => format!("@item({}, {}, {})", trait_ref(krate, env, base), name, k),
        TraitRefKind::SelfId => "@self".into(),
        TraitRefKind::Unknown(msg) => format!("@unknown({msg:?})"),
    }
}

pub fn constant(krate: &TranslatedCrate, env: Env<'_>, c: &ConstantValue) -> String {
    match &c.kind {
        ConstantKind::Scalar(v) => v.to_string(),
        ConstantKind::Bool(b) => b.to_string(),
        ConstantKind::Raw(bytes) => format!("raw<{}>(\"{}\")", ty(krate, env, &c.ty), to_hex(bytes)),
        ConstantKind::Adt(variant, fields) => {
            let fs = join(fields, |f| constant(krate, env, f));
            match &c.ty {
                Ty::Tuple(_) => format!("({fs})"),
                Ty::Array(elem, _) => format!("array<{}>[{}]", ty(krate, env, elem), fs),
                other => {
                    let head = ty(krate, env, other);
                    match variant {
                        Some(v) => format!("adt {}::{}({})", head, variant_name(krate, Some(other), *v), fs),
                        None => format!("adt {head}({fs})"),
                    }
                }
            }
        }
    }
}

pub struct BodyPrinter<'a> {
    pub krate: &'a TranslatedCrate,
    pub env: Env<'a>,
    pub locals: &'a Locals,
}

impl BodyPrinter<'_> {
    pub fn place(&self, p: &Place) -> String {
        let mut s = local_name(self.locals, p.local);
        let mut prefix = Place::local(p.local);
        for elem in &p.projection {
            match elem {
                ProjectionElem::Deref => s = format!("(*{s})"),
                ProjectionElem::Field(f) => write!(s, ".f{}", f.0).unwrap(),
                ProjectionElem::Index(op) => write!(s, "[{}]", self.operand(op)).unwrap(),
                ProjectionElem::Downcast(v) => {
                    let ty = place_ty(self.krate, self.locals, &prefix).ok();
                    write!(s, ".as {}", variant_name(self.krate, ty.as_ref(), *v)).unwrap();
                }
            }
            prefix.projection.push(elem.clone());
        }
        s
    }

    pub fn operand(&self, op: &Operand) -> String {
        match op {
            Operand::Copy(p) => format!("copy {}", self.place(p)),
            Operand::Move(p) => format!("move {}", self.place(p)),
            Operand::Const(c) => format!("const {}", constant(self.krate, self.env, c)),
        }
    }

    fn operands(&self, ops: &[Operand]) -> String {
        join(ops, |o| self.operand(o))
    }

    pub fn rvalue(&self, rv: &Rvalue) -> String {
        match rv {
            Rvalue::Use(op) => format!("use {}", self.operand(op)),
            Rvalue::BinOp(op, a, b) => format!("{}({}, {})", op.name(), self.operand(a), self.operand(b)),
            Rvalue::UnOp(UnOp::Not, a) => format!("Not({})", self.operand(a)),
            Rvalue::UnOp(UnOp::Neg, a) => format!("Neg({})", self.operand(a)),
            Rvalue::UnOp(UnOp::Cast(k), a) => format!("Cast<{}>({})", k.name(), self.operand(a)),
            Rvalue::Discriminant(p) => format!("discriminant({})", self.place(p)),
            Rvalue::Ref(p, Mutability::Shared) => format!("&{}", self.place(p)),
            Rvalue::Ref(p, Mutability::Mut) => format!("&mut {}", self.place(p)),
            Rvalue::Aggregate(AggregateKind::Tuple, ops) => format!("({})", self.operands(ops)),
            Rvalue::Aggregate(AggregateKind::Array(t), ops) => {
                format!("array<{}>[{}]", ty(self.krate, self.env, t), self.operands(ops))
            }
            Rvalue::Aggregate(AggregateKind::Adt(id, variant, args), ops) => {
                let adt = Ty::Adt(*id, args.clone());
                let head = ty(self.krate, self.env, &adt);
                match variant {
                    Some(v) => format!("adt {}::{}({})", head, variant_name(self.krate, Some(&adt), *v), self.operands(ops)),
                    None => format!("adt {}({})", head, self.operands(ops)),
                }
            }
        }
    }

    fn callee(&self, f: &FnOperand) -> String {
        match f {
            FnOperand::Move(p) => format!("({})", self.place(p)),
            FnOperand::Regular(ptr) => {
                let parts = arg_list(self.krate, self.env, &ptr.generics);
                let fish = if parts.is_empty() { String::new() } else { format!("::<{}>", parts.join(", ")) };
                match &ptr.func {
                    FunIdOrTraitMethodRef::Fun(id) => {
                        let name = self.krate.fun_decls.get(*id).map(|d| d.meta.name.to_string()).unwrap_or_else(|| id.to_string());
                        format!("{name}{fish}")
                    }
                    FunIdOrTraitMethodRef::UnresolvedMethod(tid, m) => {
                        format!("{}::{}{}", trait_name(self.krate, *tid), m, fish)
                    }
                    FunIdOrTraitMethodRef::TraitMethod(tr, m) => {
                        let self_ty =
                            tr.args.types.first().map(|t| ty(self.krate, self.env, t)).unwrap_or_else(|| "()".into());
                        let mut rest = tr.args.clone();
                        if !rest.types.is_empty() {
                            rest.types.remove(0);
                        }
                        format!(
                            "<{} as {}{} by {}>::{}{}",
                            self_ty,
                            trait_name(self.krate, tr.trait_id),
                            angle_args(self.krate, self.env, &rest),
                            trait_ref(self.krate, self.env, &tr.kind),
                            m,
                            fish
                        )
                    }
                }
            }
        }
    }

    pub fn call(&self, call: &Call) -> String {
        format!("{} = call {}({})", self.place(&call.dest), self.callee(&call.func), self.operands(&call.args))
    }

    pub fn terminator(&self, t: &TerminatorKind) -> String {
        match t {
            TerminatorKind::Goto(b) => format!("goto {b};"),
            TerminatorKind::SwitchInt { discr, cases, otherwise } => {
                let mut arms: Vec<String> = cases.iter().map(|c| format!("{} => {}", c.value.value, c.target)).collect();
                arms.push(format!("otherwise => {otherwise}"));
                format!("switchInt({}) -> [{}];", self.operand(discr), arms.join(", "))
            }
            TerminatorKind::Match { scrutinee, cases, otherwise } => {
                let ty = place_ty(self.krate, self.locals, scrutinee).ok();
                let mut arms: Vec<String> = cases
                    .iter()
                    .map(|c| format!("{} => {}", variant_name(self.krate, ty.as_ref(), c.variant), c.target))
                    .collect();
                if let Some(o) = otherwise {
                    arms.push(format!("_ => {o}"));
                }
                format!("match {} -> [{}];", self.place(scrutinee), arms.join(", "))
            }
            TerminatorKind::Assert { cond, expected, target } => {
                format!("assert({} == {}) -> {};", self.operand(cond), expected, target)
            }
            TerminatorKind::Call { call, target } => format!("{} -> {};", self.call(call), target),
            TerminatorKind::Return => "return;".into(),
            TerminatorKind::Abort(k) => format!("abort {};", abort_kind(*k)),
            TerminatorKind::Unreachable => "unreachable;".into(),
        }
    }
}

/// Replaces every span with a dummy and drops the file table, so that crates
/// parsed from different texts can be compared structurally.
pub fn erase_spans(krate: &mut TranslatedCrate) {
    krate.files = IndexVec::new();
    let d = Span::dummy();
    for t in krate.type_decls.iter_mut() {
        t.meta.span = d;
    }
    for t in krate.trait_decls.iter_mut() {
        t.meta.span = d;
    }
    for t in krate.trait_impls.iter_mut() {
        t.meta.span = d;
    }
    for f in krate.fun_decls.iter_mut() {
        f.meta.span = d;
        match &mut f.body {
            Body::Opaque => {}
            Body::Ullbc(b) => {
                b.span = d;
                for block in b.blocks.iter_mut() {
                    for s in &mut block.statements {
                        s.span = d;
                    }
                    block.terminator.span = d;
                }
            }
            Body::Llbc(b) => {
                b.span = d;
                erase_block(&mut b.body);
            }
        }
    }
}

fn erase_block(b: &mut Block) {
    b.span = Span::dummy();
    for s in &mut b.statements {
        s.span = Span::dummy();
        match &mut s.kind {
            llbc::StatementKind::Loop(body) => erase_block(body),
            llbc::StatementKind::Switch(sw) => {
                for inner in sw.blocks_mut() {
                    erase_block(inner);
                }
            }
            _ => {}
        }
    }
}
