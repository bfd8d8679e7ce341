//! Recursive-descent parser from tokens to the surface syntax tree.

use crate::ir::{AbortKind, FileId, Mutability, Span};

use super::ast::*;
use super::error::{FrontendError, FrontendErrorCode};
use super::lexer::{punct_text, tokenize, Tok, Token};

const TERMINATOR_KEYWORDS: [&str; 7] = ["goto", "switchInt", "match", "assert", "return", "abort", "unreachable"];

pub fn parse_file(file: FileId, text: &str) -> Result<SourceFile, FrontendError> {
    let raw = tokenize(file, text)?;
    let mut toks = Vec::with_capacity(raw.len());
    let mut comments = Vec::with_capacity(raw.len());
    let mut pending = Vec::new();
    for t in raw {
        match t.tok {
            Tok::Comment(text) => pending.push(text),
            _ => {
                toks.push(t);
                comments.push(std::mem::take(&mut pending));
            }
        }
    }
    let mut p = Parser { toks, comments, pos: 0 };
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(SourceFile { items })
}

struct Parser {
    toks: Vec<Token>,
    /// Comments immediately preceding each token.
    comments: Vec<Vec<String>>,
    pos: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn span_from(&self, start: Span) -> Span {
        start.merge(&self.prev_span())
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let mut e = FrontendError::new(
            FrontendErrorCode::SyntaxError,
            self.span(),
            format!("unexpected {}", self.peek()),
        );
        e.expected = expected.iter().map(|s| s.to_string()).collect();
        e
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[&format!("`{}`", punct_text(tok))]))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn int(&mut self) -> PResult<IntLit> {
        let start = self.span();
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(magnitude, suffix) => {
                self.bump();
                Ok(IntLit { negative, magnitude, suffix, span: self.span_from(start) })
            }
            _ => Err(self.error(&["integer literal"])),
        }
    }

    fn small_int(&mut self) -> PResult<u32> {
        let lit = self.int()?;
        if lit.negative || lit.suffix.is_some() || lit.magnitude > u32::MAX as u128 {
            return Err(FrontendError::new(FrontendErrorCode::SyntaxError, lit.span, "expected a small unsuffixed integer"));
        }
        Ok(lit.magnitude as u32)
    }

    fn lifetime(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lifetime(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["lifetime"])),
        }
    }

    /// Comma-separated list up to (and consuming) `close`.
    fn list<T>(&mut self, close: &Tok, mut f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        while self.peek() != close {
            out.push(f(self)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    fn attrs(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Attr(a) = self.peek().clone() {
            self.bump();
            out.push(a);
        }
        out
    }

    // Items

    fn item(&mut self) -> PResult<Item> {
        let start = self.span();
        let attrs = self.attrs();
        if self.eat_kw("type") {
            self.type_decl(attrs, start).map(Item::Type)
        } else if self.eat_kw("trait") {
            self.trait_decl(attrs, start).map(Item::Trait)
        } else if self.eat_kw("impl") {
            self.impl_decl(attrs, start).map(Item::Impl)
        } else if self.eat_kw("fn") {
            self.fun_decl(attrs, start).map(Item::Fun)
        } else {
            Err(self.error(&["`type`", "`trait`", "`impl`", "`fn`"]))
        }
    }

    /// `a::b::c`, stopping before `::<`.
    fn path(&mut self) -> PResult<Path> {
        let start = self.span();
        let mut segments = vec![self.ident()?.0];
        while self.peek() == &Tok::PathSep && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            segments.push(self.ident()?.0);
        }
        Ok(Path { segments, span: self.span_from(start) })
    }

    fn generics(&mut self) -> PResult<Generics> {
        let mut g = Generics::default();
        if !self.eat(&Tok::Lt) {
            return Ok(g);
        }
        self.list(&Tok::Gt, |p| {
            match p.peek().clone() {
                Tok::Lifetime(l) => {
                    p.bump();
                    g.regions.push(l);
                }
                Tok::Ident(kw) if kw == "const" => {
                    p.bump();
                    let name = p.ident()?.0;
                    p.expect(&Tok::Colon)?;
                    let kind = p.ident()?.0;
                    g.consts.push((name, kind));
                }
                Tok::Ident(_) => g.types.push(p.ident()?.0),
                _ => return Err(p.error(&["lifetime", "`const`", "identifier"])),
            }
            Ok(())
        })?;
        Ok(g)
    }

    fn where_clause(&mut self) -> PResult<Vec<WherePred>> {
        let mut preds = Vec::new();
        if !self.eat_kw("where") {
            return Ok(preds);
        }
        loop {
            if matches!(self.peek(), Tok::LBrace | Tok::Semi | Tok::Eq | Tok::Eof) {
                break;
            }
            if let Tok::Lifetime(a) = self.peek().clone() {
                self.bump();
                self.expect(&Tok::Colon)?;
                loop {
                    preds.push(WherePred::RegionOutlives(a.clone(), self.lifetime()?));
                    if !self.eat(&Tok::Plus) {
                        break;
                    }
                }
            } else {
                let ty = self.ty()?;
                if self.eat(&Tok::Eq) {
                    preds.push(WherePred::Eq(ty, self.ty()?));
                } else {
                    self.expect(&Tok::Colon)?;
                    loop {
                        if let Tok::Lifetime(r) = self.peek().clone() {
                            self.bump();
                            preds.push(WherePred::TypeOutlives(ty.clone(), r));
                        } else {
                            preds.push(WherePred::Trait(ty.clone(), self.trait_bound()?));
                        }
                        if !self.eat(&Tok::Plus) {
                            break;
                        }
                    }
                }
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(preds)
    }

    fn trait_bound(&mut self) -> PResult<TraitBound> {
        let path = self.path()?;
        let args = self.generic_args_opt()?;
        Ok(TraitBound { path, args })
    }

    fn bounds(&mut self) -> PResult<Vec<TraitBound>> {
        let mut out = vec![self.trait_bound()?];
        while self.eat(&Tok::Plus) {
            out.push(self.trait_bound()?);
        }
        Ok(out)
    }

    fn type_decl(&mut self, attrs: Vec<String>, start: Span) -> PResult<TypeDecl> {
        let name = self.path()?;
        let generics = self.generics()?;
        let preds = self.where_clause()?;
        self.expect(&Tok::Eq)?;
        let kind = if self.eat_kw("struct") {
            self.expect(&Tok::LParen)?;
            let fields = self.list(&Tok::RParen, |p| p.ty())?;
            self.eat(&Tok::Semi);
            TypeDeclKind::Struct(fields)
        } else if self.eat_kw("enum") {
            self.expect(&Tok::LBrace)?;
            let variants = self.list(&Tok::RBrace, |p| {
                let vstart = p.span();
                let name = p.ident()?.0;
                let fields = if p.eat(&Tok::LParen) { p.list(&Tok::RParen, |p| p.ty())? } else { Vec::new() };
                p.expect(&Tok::Eq)?;
                let discriminant = p.int()?;
                Ok(Variant { name, fields, discriminant, span: p.span_from(vstart) })
            })?;
            self.eat(&Tok::Semi);
            TypeDeclKind::Enum(variants)
        } else if self.eat_kw("opaque") {
            self.expect(&Tok::Semi)?;
            TypeDeclKind::Opaque
        } else {
            return Err(self.error(&["`struct`", "`enum`", "`opaque`"]));
        };
        Ok(TypeDecl { attrs, name, generics, preds, kind, span: self.span_from(start) })
    }

    fn signature(&mut self) -> PResult<Signature> {
        let generics = self.generics()?;
        self.expect(&Tok::LParen)?;
        let params = self.list(&Tok::RParen, |p| {
            let (name, span) = p.ident()?;
            p.expect(&Tok::Colon)?;
            let ty = p.ty()?;
            Ok(Param { name, ty, span: span.merge(&p.prev_span()) })
        })?;
        let output = if self.eat(&Tok::Arrow) { Some(self.ty()?) } else { None };
        let preds = self.where_clause()?;
        Ok(Signature { generics, params, output, preds })
    }

    fn trait_decl(&mut self, attrs: Vec<String>, start: Span) -> PResult<TraitDecl> {
        let name = self.path()?;
        let generics = self.generics()?;
        let parents = if self.eat(&Tok::Colon) { self.bounds()? } else { Vec::new() };
        self.expect(&Tok::LBrace)?;
        let mut assoc_types = Vec::new();
        let mut methods = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let istart = self.span();
            if self.eat_kw("type") {
                let name = self.ident()?.0;
                let bounds = if self.eat(&Tok::Colon) { self.bounds()? } else { Vec::new() };
                self.expect(&Tok::Semi)?;
                assoc_types.push(AssocTypeDecl { name, bounds, span: self.span_from(istart) });
            } else if self.eat_kw("fn") {
                let name = self.ident()?.0;
                let sig = self.signature()?;
                self.expect(&Tok::Semi)?;
                methods.push(MethodDecl { name, sig, span: self.span_from(istart) });
            } else {
                return Err(self.error(&["`type`", "`fn`", "`}`"]));
            }
        }
        Ok(TraitDecl { attrs, name, generics, parents, assoc_types, methods, span: self.span_from(start) })
    }

    fn trait_ref_list(&mut self) -> PResult<Vec<TraitRef>> {
        self.expect(&Tok::LBracket)?;
        self.list(&Tok::RBracket, |p| p.trait_ref())
    }

    fn impl_decl(&mut self, attrs: Vec<String>, start: Span) -> PResult<ImplDecl> {
        let name = self.path()?;
        let generics = self.generics()?;
        self.expect(&Tok::Colon)?;
        let trait_bound = self.trait_bound()?;
        self.expect_kw("for")?;
        let self_ty = self.ty()?;
        let preds = self.where_clause()?;
        self.expect(&Tok::LBrace)?;
        let mut parents = None;
        let mut assoc_types = Vec::new();
        let mut methods = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let istart = self.span();
            if self.eat_kw("type") {
                let name = self.ident()?.0;
                self.expect(&Tok::Eq)?;
                let ty = self.ty()?;
                let bound_refs = if self.eat_kw("with") { Some(self.trait_ref_list()?) } else { None };
                self.expect(&Tok::Semi)?;
                assoc_types.push(ImplAssocType { name, ty, bound_refs, span: self.span_from(istart) });
            } else if self.eat_kw("fn") {
                let name = self.ident()?.0;
                self.expect(&Tok::Eq)?;
                let target = self.path()?;
                self.expect(&Tok::Semi)?;
                methods.push((name, target));
            } else if self.eat_kw("parents") {
                parents = Some(self.trait_ref_list()?);
                self.expect(&Tok::Semi)?;
            } else {
                return Err(self.error(&["`type`", "`fn`", "`parents`", "`}`"]));
            }
        }
        Ok(ImplDecl {
            attrs,
            name,
            generics,
            trait_bound,
            self_ty,
            preds,
            parents,
            assoc_types,
            methods,
            span: self.span_from(start),
        })
    }

    fn fun_decl(&mut self, attrs: Vec<String>, start: Span) -> PResult<FunDecl> {
        let name = self.path()?;
        let sig = self.signature()?;
        let body = if self.eat(&Tok::Semi) { None } else { Some(self.body()?) };
        Ok(FunDecl { attrs, name, sig, body, span: self.span_from(start) })
    }

    // Bodies

    fn body(&mut self) -> PResult<Body> {
        let start = self.expect(&Tok::LBrace)?;
        let mut lets = Vec::new();
        while self.is_kw("let") {
            let lstart = self.bump().span;
            let name = self.ident()?.0;
            self.expect(&Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(&Tok::Semi)?;
            lets.push(LetDecl { name, ty, span: self.span_from(lstart) });
        }
        let mut blocks = Vec::new();
        while !self.eat(&Tok::RBrace) {
            blocks.push(self.basic_block()?);
        }
        Ok(Body { lets, blocks, span: self.span_from(start) })
    }

    fn block_label(&mut self) -> PResult<BlockLabel> {
        match self.peek().clone() {
            Tok::Ident(s) if s.starts_with("bb") && s.len() > 2 && s[2..].bytes().all(|b| b.is_ascii_digit()) => {
                let span = self.bump().span;
                let index = s[2..].parse().map_err(|_| {
                    FrontendError::new(FrontendErrorCode::SyntaxError, span, "block number too large")
                })?;
                Ok(BlockLabel { index, span })
            }
            _ => Err(self.error(&["block label `bbN`"])),
        }
    }

    fn basic_block(&mut self) -> PResult<BasicBlock> {
        let label = self.block_label()?;
        self.expect(&Tok::Colon)?;
        self.expect(&Tok::LBrace)?;
        let mut statements = Vec::new();
        loop {
            let comments = self.comments[self.pos].clone();
            let start = self.span();
            if matches!(self.peek(), Tok::Ident(s) if TERMINATOR_KEYWORDS.contains(&s.as_str())) {
                let kind = self.terminator_kind()?;
                let terminator = Terminator { span: self.span_from(start), comments, kind };
                self.eat(&Tok::Semi);
                self.expect(&Tok::RBrace)?;
                return Ok(BasicBlock { label, statements, terminator });
            }
            let attrs = self.attrs();
            if self.eat_kw("nop") {
                statements.push(Statement { span: self.span_from(start), comments, attrs, kind: StatementKind::Nop });
            } else if self.eat_kw("drop") {
                let place = self.place()?;
                statements.push(Statement {
                    span: self.span_from(start),
                    comments,
                    attrs,
                    kind: StatementKind::Drop(place),
                });
            } else {
                let dest = self.place()?;
                self.expect(&Tok::Eq)?;
                if self.eat_kw("call") {
                    if !attrs.is_empty() {
                        return Err(FrontendError::new(
                            FrontendErrorCode::SyntaxError,
                            start,
                            "attributes are not allowed on call terminators",
                        ));
                    }
                    let callee = self.callee()?;
                    self.expect(&Tok::LParen)?;
                    let args = self.list(&Tok::RParen, |p| p.operand())?;
                    self.expect(&Tok::Arrow)?;
                    let target = self.block_label()?;
                    let terminator = Terminator {
                        span: self.span_from(start),
                        comments,
                        kind: TerminatorKind::Call { dest, callee, args, target },
                    };
                    self.eat(&Tok::Semi);
                    self.expect(&Tok::RBrace)?;
                    return Ok(BasicBlock { label, statements, terminator });
                }
                let rv = self.rvalue()?;
                statements.push(Statement {
                    span: self.span_from(start),
                    comments,
                    attrs,
                    kind: StatementKind::Assign(dest, rv),
                });
            }
            self.expect(&Tok::Semi)?;
        }
    }

    fn terminator_kind(&mut self) -> PResult<TerminatorKind> {
        let (kw, _) = self.ident()?;
        Ok(match kw.as_str() {
            "goto" => TerminatorKind::Goto(self.block_label()?),
            "return" => TerminatorKind::Return,
            "unreachable" => TerminatorKind::Unreachable,
            "abort" => {
                if self.eat_kw("panic") {
                    TerminatorKind::Abort(AbortKind::Panic)
                } else if self.eat_kw("ub") {
                    TerminatorKind::Abort(AbortKind::UndefinedBehavior)
                } else {
                    return Err(self.error(&["`panic`", "`ub`"]));
                }
            }
            "switchInt" => {
                self.expect(&Tok::LParen)?;
                let discr = self.operand()?;
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Arrow)?;
                self.expect(&Tok::LBracket)?;
                let mut cases = Vec::new();
                let mut otherwise = None;
                while !self.eat(&Tok::RBracket) {
                    if self.eat_kw("otherwise") {
                        self.expect(&Tok::FatArrow)?;
                        otherwise = Some(self.block_label()?);
                    } else {
                        let value = self.int()?;
                        self.expect(&Tok::FatArrow)?;
                        cases.push((value, self.block_label()?));
                    }
                    if !self.eat(&Tok::Comma) {
                        self.expect(&Tok::RBracket)?;
                        break;
                    }
                }
                let otherwise = otherwise.ok_or_else(|| self.error(&["`otherwise` case"]))?;
                TerminatorKind::SwitchInt(discr, cases, otherwise)
            }
            "match" => {
                let scrutinee = self.place()?;
                self.expect(&Tok::Arrow)?;
                self.expect(&Tok::LBracket)?;
                let mut cases = Vec::new();
                let mut otherwise = None;
                while !self.eat(&Tok::RBracket) {
                    let (name, _) = self.ident()?;
                    self.expect(&Tok::FatArrow)?;
                    let target = self.block_label()?;
                    if name == "_" {
                        otherwise = Some(target);
                    } else {
                        cases.push((name, target));
                    }
                    if !self.eat(&Tok::Comma) {
                        self.expect(&Tok::RBracket)?;
                        break;
                    }
                }
                TerminatorKind::Match(scrutinee, cases, otherwise)
            }
            "assert" => {
                self.expect(&Tok::LParen)?;
                let cond = self.operand()?;
                self.expect(&Tok::EqEq)?;
                let expected = if self.eat_kw("true") {
                    true
                } else if self.eat_kw("false") {
                    false
                } else {
                    return Err(self.error(&["`true`", "`false`"]));
                };
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Arrow)?;
                TerminatorKind::Assert(cond, expected, self.block_label()?)
            }
            _ => unreachable!("checked by caller"),
        })
    }

    fn callee(&mut self) -> PResult<Callee> {
        if self.eat(&Tok::Lt) {
            let self_ty = self.ty()?;
            self.expect_kw("as")?;
            let bound = self.trait_bound()?;
            self.expect_kw("by")?;
            let tref = self.trait_ref()?;
            self.expect(&Tok::Gt)?;
            self.expect(&Tok::PathSep)?;
            let method = self.ident()?.0;
            let generics = self.turbofish()?;
            return Ok(Callee::TraitMethod { tref, bound, self_ty, method, generics });
        }
        if self.eat(&Tok::LParen) {
            let place = self.place()?;
            self.expect(&Tok::RParen)?;
            return Ok(Callee::Ptr(place));
        }
        let path = self.path()?;
        let generics = self.turbofish()?;
        Ok(Callee::Path(path, generics))
    }

    fn turbofish(&mut self) -> PResult<Vec<GenericArg>> {
        if self.peek() == &Tok::PathSep && self.peek_at(1) == &Tok::Lt {
            self.bump();
            self.bump();
            self.list(&Tok::Gt, |p| p.generic_arg())
        } else {
            Ok(Vec::new())
        }
    }

    fn rvalue(&mut self) -> PResult<Rvalue> {
        let start = self.span();
        if self.eat_kw("use") {
            return Ok(Rvalue::Use(self.operand()?));
        }
        if self.eat_kw("discriminant") {
            self.expect(&Tok::LParen)?;
            let place = self.place()?;
            self.expect(&Tok::RParen)?;
            return Ok(Rvalue::Discriminant(place));
        }
        if self.eat(&Tok::Amp) {
            let m = if self.eat_kw("mut") { Mutability::Mut } else { Mutability::Shared };
            return Ok(Rvalue::Ref(self.place()?, m));
        }
        if self.eat_kw("adt") {
            let (path, args, variant) = self.adt_head()?;
            self.expect(&Tok::LParen)?;
            let ops = self.list(&Tok::RParen, |p| p.operand())?;
            return Ok(Rvalue::Adt(path, args, variant, ops));
        }
        if self.eat(&Tok::LParen) {
            return Ok(Rvalue::Tuple(self.list(&Tok::RParen, |p| p.operand())?));
        }
        if self.eat_kw("array") {
            self.expect(&Tok::Lt)?;
            let ty = self.ty()?;
            self.expect(&Tok::Gt)?;
            self.expect(&Tok::LBracket)?;
            return Ok(Rvalue::Array(ty, self.list(&Tok::RBracket, |p| p.operand())?));
        }
        let (name, _) = self.ident()?;
        let cast = if name == "Cast" {
            self.expect(&Tok::Lt)?;
            let k = self.ident()?.0;
            self.expect(&Tok::Gt)?;
            Some(k)
        } else {
            None
        };
        self.expect(&Tok::LParen)?;
        let a = self.operand()?;
        if self.eat(&Tok::Comma) {
            let b = self.operand()?;
            self.expect(&Tok::RParen)?;
            Ok(Rvalue::BinOp(name, a, b, self.span_from(start)))
        } else {
            self.expect(&Tok::RParen)?;
            Ok(Rvalue::UnOp(name, cast, a, self.span_from(start)))
        }
    }

    /// `Path<args>::Variant`, with the variant possibly folded into the path.
    fn adt_head(&mut self) -> PResult<(Path, Vec<GenericArg>, Option<String>)> {
        let path = self.path()?;
        let args = self.generic_args_opt()?;
        let variant = if self.eat(&Tok::PathSep) { Some(self.ident()?.0) } else { None };
        Ok((path, args, variant))
    }

    fn operand(&mut self) -> PResult<Operand> {
        if self.eat_kw("move") {
            Ok(Operand::Move(self.place()?))
        } else if self.eat_kw("copy") {
            Ok(Operand::Copy(self.place()?))
        } else if self.eat_kw("const") {
            Ok(Operand::Const(self.constant()?))
        } else {
            Err(self.error(&["`move`", "`copy`", "`const`"]))
        }
    }

    fn constant(&mut self) -> PResult<Constant> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(..) | Tok::Minus => Ok(Constant::Int(self.int()?)),
            Tok::LParen => {
                self.bump();
                let fields = self.list(&Tok::RParen, |p| p.constant())?;
                Ok(Constant::Tuple(fields, self.span_from(start)))
            }
            Tok::Ident(kw) => match kw.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Constant::Bool(kw == "true", start))
                }
                "adt" => {
                    self.bump();
                    let (path, args, variant) = self.adt_head()?;
                    self.expect(&Tok::LParen)?;
                    let fields = self.list(&Tok::RParen, |p| p.constant())?;
                    Ok(Constant::Adt(path, args, variant, fields))
                }
                "array" => {
                    self.bump();
                    self.expect(&Tok::Lt)?;
                    let ty = self.ty()?;
                    self.expect(&Tok::Gt)?;
                    self.expect(&Tok::LBracket)?;
                    let fields = self.list(&Tok::RBracket, |p| p.constant())?;
                    Ok(Constant::Array(ty, fields, self.span_from(start)))
                }
                "raw" => {
                    self.bump();
                    self.expect(&Tok::Lt)?;
                    let ty = self.ty()?;
                    self.expect(&Tok::Gt)?;
                    self.expect(&Tok::LParen)?;
                    let hex = match self.peek().clone() {
                        Tok::Str(s) => {
                            self.bump();
                            s
                        }
                        _ => return Err(self.error(&["hex string"])),
                    };
                    self.expect(&Tok::RParen)?;
                    Ok(Constant::Raw(ty, hex, self.span_from(start)))
                }
                _ => Err(self.error(&["constant"])),
            },
            _ => Err(self.error(&["constant"])),
        }
    }

    fn place(&mut self) -> PResult<Place> {
        let start = self.span();
        if self.eat(&Tok::Star) {
            let mut inner = self.place()?;
            inner.projection.push(Projection::Deref);
            inner.span = self.span_from(start);
            return Ok(inner);
        }
        let mut place = if self.eat(&Tok::LParen) {
            let inner = self.place()?;
            self.expect(&Tok::RParen)?;
            inner
        } else {
            let (base, _) = self.ident()?;
            Place { base, projection: Vec::new(), span: start }
        };
        loop {
            if self.peek() == &Tok::Dot {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(s) if s == "as" => {
                        self.bump();
                        let v = self.ident()?.0;
                        place.projection.push(Projection::Downcast(v));
                    }
                    Tok::Ident(s) if s.starts_with('f') && s.len() > 1 && s[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        self.bump();
                        place.projection.push(Projection::Field(s[1..].parse().unwrap_or(u32::MAX)));
                    }
                    Tok::Int(n, None) => {
                        self.bump();
                        place.projection.push(Projection::Field(n.min(u32::MAX as u128) as u32));
                    }
                    _ => return Err(self.error(&["field `fN`", "`as`"])),
                }
            } else if self.peek() == &Tok::LBracket {
                self.bump();
                let op = self.operand()?;
                self.expect(&Tok::RBracket)?;
                place.projection.push(Projection::Index(Box::new(op)));
            } else {
                break;
            }
        }
        place.span = self.span_from(start);
        Ok(place)
    }

    // Types

    fn generic_args_opt(&mut self) -> PResult<Vec<GenericArg>> {
        if self.eat(&Tok::Lt) {
            self.list(&Tok::Gt, |p| p.generic_arg())
        } else {
            Ok(Vec::new())
        }
    }

    fn generic_arg(&mut self) -> PResult<GenericArg> {
        match self.peek().clone() {
            Tok::Lifetime(l) => {
                self.bump();
                Ok(GenericArg::Region(l))
            }
            Tok::At => Ok(GenericArg::TraitRef(self.trait_ref()?)),
            Tok::Int(..) | Tok::Minus => Ok(GenericArg::Const(self.int()?)),
            _ => Ok(GenericArg::Ty(self.ty()?)),
        }
    }

    pub fn ty(&mut self) -> PResult<Ty> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Amp => {
                self.bump();
                let region = match self.peek().clone() {
                    Tok::Lifetime(l) => {
                        self.bump();
                        Some(l)
                    }
                    _ => None,
                };
                let m = if self.eat_kw("mut") { Mutability::Mut } else { Mutability::Shared };
                let inner = self.ty()?;
                Ok(Ty::Ref(region, Box::new(inner), m, self.span_from(start)))
            }
            Tok::LParen => {
                self.bump();
                let mut tys = Vec::new();
                let mut trailing_comma = false;
                while self.peek() != &Tok::RParen {
                    tys.push(self.ty()?);
                    trailing_comma = self.eat(&Tok::Comma);
                    if !trailing_comma {
                        break;
                    }
                }
                self.expect(&Tok::RParen)?;
                if tys.len() == 1 && !trailing_comma {
                    Ok(tys.pop().expect("one element"))
                } else {
                    Ok(Ty::Tuple(tys, self.span_from(start)))
                }
            }
            Tok::LBracket => {
                self.bump();
                let elem = self.ty()?;
                self.expect(&Tok::Semi)?;
                let len = self.generic_arg()?;
                self.expect(&Tok::RBracket)?;
                Ok(Ty::Array(Box::new(elem), Box::new(len), self.span_from(start)))
            }
            Tok::Lt => {
                self.bump();
                let tref = self.trait_ref()?;
                self.expect(&Tok::Gt)?;
                self.expect(&Tok::PathSep)?;
                let name = self.ident()?.0;
                Ok(Ty::Assoc(tref, name, self.span_from(start)))
            }
            Tok::Ident(_) => {
                let path = self.path()?;
                let args = self.generic_args_opt()?;
                Ok(Ty::Path(path, args))
            }
            _ => Err(self.error(&["type"])),
        }
    }

    fn trait_ref(&mut self) -> PResult<TraitRef> {
        let start = self.expect(&Tok::At)?;
        let (kw, kw_span) = self.ident()?;
        match kw.as_str() {
            "self" => Ok(TraitRef::SelfRef(self.span_from(start))),
            "parent" => {
                self.expect(&Tok::LParen)?;
                let base = self.trait_ref()?;
                self.expect(&Tok::Comma)?;
                let k = self.small_int()?;
                self.expect(&Tok::RParen)?;
                Ok(TraitRef::Parent(Box::new(base), k, self.span_from(start)))
            }
            "item" => {
                self.expect(&Tok::LParen)?;
                let base = self.trait_ref()?;
                self.expect(&Tok::Comma)?;
                let name = self.ident()?.0;
                self.expect(&Tok::Comma)?;
                let k = self.small_int()?;
                self.expect(&Tok::RParen)?;
                Ok(TraitRef::Item(Box::new(base), name, k, self.span_from(start)))
            }
            "impl" => {
                let path = self.path()?;
                let args = self.generic_args_opt()?;
                Ok(TraitRef::Impl(path, args))
            }
            "unknown" => {
                self.expect(&Tok::LParen)?;
                let msg = match self.peek().clone() {
                    Tok::Str(s) => {
                        self.bump();
                        s
                    }
                    _ => return Err(self.error(&["string"])),
                };
                self.expect(&Tok::RParen)?;
                Ok(TraitRef::Unknown(msg, self.span_from(start)))
            }
            c if c.starts_with('c') && c.len() > 1 && c[1..].bytes().all(|b| b.is_ascii_digit()) => {
                let n = c[1..].parse().map_err(|_| {
                    FrontendError::new(FrontendErrorCode::SyntaxError, kw_span, "clause number too large")
                })?;
                Ok(TraitRef::Clause(n, self.span_from(start)))
            }
            _ => Err(FrontendError {
                code: FrontendErrorCode::SyntaxError,
                span: kw_span,
                message: format!("unknown trait reference form `@{kw}`"),
                expected: ["`@cN`", "`@self`", "`@parent`", "`@item`", "`@impl`", "`@unknown`"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> SourceFile {
        parse_file(FileId(0), text).unwrap()
    }

    #[test]
    fn minimal_function() {
        let f = parse("fn id<T>(x: T) -> T { bb0: { ret = use move x; return } }");
        let Item::Fun(fun) = &f.items[0] else { panic!() };
        assert_eq!(fun.sig.generics.types, vec!["T".to_string()]);
        let body = fun.body.as_ref().unwrap();
        assert_eq!(body.blocks.len(), 1);
        assert_eq!(body.blocks[0].statements.len(), 1);
        assert_eq!(body.blocks[0].terminator.kind, TerminatorKind::Return);
    }

    #[test]
    fn comments_attach_to_next_statement() {
        let f = parse("fn f() { bb0: {\n // first\n ret = use const (); // trailing\n return } }");
        let Item::Fun(fun) = &f.items[0] else { panic!() };
        let bb = &fun.body.as_ref().unwrap().blocks[0];
        assert_eq!(bb.statements[0].comments, vec!["first".to_string()]);
        assert_eq!(bb.terminator.comments, vec!["trailing".to_string()]);
    }

    #[test]
    fn syntax_error_lists_expected_tokens() {
        let e = parse_file(FileId(0), "fn f( { }").unwrap_err();
        assert_eq!(e.code, FrontendErrorCode::SyntaxError);
        assert!(!e.expected.is_empty());
    }

    #[test]
    fn places_and_projections() {
        let f = parse("fn f() { bb0: { (*x).f0 = use copy y.as Some.f1[copy i]; return } }");
        let Item::Fun(fun) = &f.items[0] else { panic!() };
        let StatementKind::Assign(dest, Rvalue::Use(Operand::Copy(src))) =
            &fun.body.as_ref().unwrap().blocks[0].statements[0].kind
        else {
            panic!()
        };
        assert_eq!(dest.projection, vec![Projection::Deref, Projection::Field(0)]);
        assert_eq!(src.projection.len(), 3);
    }
}
