//! Name resolution: surface syntax to a ULLBC crate.

use std::collections::{BTreeMap, HashMap};

use crate::ir::ullbc::{self, BlockData, Local, Locals, MatchCase, SwitchCase, TerminatorKind, UllbcBody};
use crate::ir::*;
use crate::ir::typing::{array_len, operand_ty, place_ty, LENGTH_KIND};
use crate::ir::validate::validate_crate;

use super::ast;
use super::error::{FrontendError, FrontendErrorCode, FrontendErrors};

type LResult<T> = Result<T, FrontendError>;

fn err(code: FrontendErrorCode, span: Span, msg: impl Into<String>) -> FrontendError {
    FrontendError::new(code, span, msg)
}

/// Parameter counts of a declaration, known before anything is lowered.
#[derive(Debug, Clone, Default)]
struct Counts {
    regions: usize,
    types: usize,
    consts: Vec<ScalarKind>,
    clauses: usize,
}

impl Counts {
    fn from_generics(g: &ast::Generics, preds: &[ast::WherePred]) -> Counts {
        Counts {
            regions: g.regions.len(),
            types: g.types.len(),
            consts: g.consts.iter().map(|(_, k)| ScalarKind::from_name(k).unwrap_or(ScalarKind::U64)).collect(),
            clauses: preds.iter().filter(|p| matches!(p, ast::WherePred::Trait(..))).count(),
        }
    }

    fn concat(&self, other: &Counts) -> Counts {
        Counts {
            regions: self.regions + other.regions,
            types: self.types + other.types,
            consts: self.consts.iter().chain(other.consts.iter()).copied().collect(),
            clauses: other.clauses,
        }
    }
}

struct TraitInfo {
    counts: Counts,
    parents: Vec<String>,
    /// Associated type names with their bound counts.
    assoc: Vec<(String, usize)>,
    methods: BTreeMap<String, Counts>,
}

/// Names bound by one binder level.
#[derive(Default)]
struct Level {
    regions: Vec<String>,
    types: Vec<String>,
    consts: Vec<(String, ScalarKind)>,
    /// For each where-clause: the bounded type's name (if a bare name) and the trait.
    clause_heads: Vec<(Option<String>, Option<TraitDeclId>)>,
    /// Set inside trait declarations: the trait being declared.
    in_trait: Option<TraitDeclId>,
}

struct Scope<'a> {
    levels: Vec<&'a Level>,
}

struct Names {
    types: HashMap<String, TypeDeclId>,
    traits: HashMap<String, TraitDeclId>,
    impls: HashMap<String, TraitImplId>,
    funs: HashMap<String, FunDeclId>,
    type_counts: Vec<Counts>,
    traits_info: Vec<TraitInfo>,
    impl_counts: Vec<Counts>,
    fun_counts: Vec<Counts>,
}

pub fn lower_crate(crate_name: &str, files: &[(String, ast::SourceFile)]) -> Result<TranslatedCrate, FrontendErrors> {
    let mut krate = TranslatedCrate::new(crate_name);
    let mut errors = Vec::new();
    let mut types = Vec::new();
    let mut traits = Vec::new();
    let mut impls = Vec::new();
    let mut funs = Vec::new();
    for (name, file) in files {
        krate.files.push(FileInfo { name: name.clone() });
        for item in &file.items {
            match item {
                ast::Item::Type(d) => types.push(d),
                ast::Item::Trait(d) => traits.push(d),
                ast::Item::Impl(d) => impls.push(d),
                ast::Item::Fun(d) => funs.push(d),
            }
        }
    }

    let mut names = Names {
        types: HashMap::new(),
        traits: HashMap::new(),
        impls: HashMap::new(),
        funs: HashMap::new(),
        type_counts: Vec::new(),
        traits_info: Vec::new(),
        impl_counts: Vec::new(),
        fun_counts: Vec::new(),
    };
    let register = |map: &mut HashMap<String, u32>, path: &ast::Path, next: u32, errors: &mut Vec<FrontendError>| {
        let key = path.text();
        if map.contains_key(&key) {
            errors.push(err(FrontendErrorCode::DuplicateName, path.span, format!("`{key}` is declared twice")));
        } else {
            map.insert(key, next);
        }
    };
    let mut tmp: HashMap<String, u32> = HashMap::new();
    for (i, d) in types.iter().enumerate() {
        register(&mut tmp, &d.name, i as u32, &mut errors);
        names.type_counts.push(Counts::from_generics(&d.generics, &d.preds));
    }
    names.types = tmp.drain().map(|(k, v)| (k, TypeDeclId(v))).collect();
    for (i, d) in traits.iter().enumerate() {
        register(&mut tmp, &d.name, i as u32, &mut errors);
        let mut counts = Counts::from_generics(&d.generics, &[]);
        counts.types += 1;
        names.traits_info.push(TraitInfo {
            counts,
            parents: d.parents.iter().map(|b| b.path.text()).collect(),
            assoc: d.assoc_types.iter().map(|a| (a.name.clone(), a.bounds.len())).collect(),
            methods: d
                .methods
                .iter()
                .map(|m| (m.name.clone(), Counts::from_generics(&m.sig.generics, &m.sig.preds)))
                .collect(),
        });
    }
    names.traits = tmp.drain().map(|(k, v)| (k, TraitDeclId(v))).collect();
    for (i, d) in impls.iter().enumerate() {
        register(&mut tmp, &d.name, i as u32, &mut errors);
        names.impl_counts.push(Counts::from_generics(&d.generics, &d.preds));
    }
    names.impls = tmp.drain().map(|(k, v)| (k, TraitImplId(v))).collect();
    for (i, d) in funs.iter().enumerate() {
        register(&mut tmp, &d.name, i as u32, &mut errors);
        names.fun_counts.push(Counts::from_generics(&d.sig.generics, &d.sig.preds));
    }
    names.funs = tmp.drain().map(|(k, v)| (k, FunDeclId(v))).collect();
    if !errors.is_empty() {
        return Err(FrontendErrors(errors));
    }

    // A failed declaration leaves a placeholder so later ids stay aligned.
    let mut cx = Lowerer { names: &names, krate: &mut krate };
    for (i, d) in types.iter().enumerate() {
        let id = TypeDeclId(i as u32);
        if let Err(e) = cx.type_decl(id, d) {
            errors.push(e);
            cx.krate.type_decls.push(TypeDecl {
                id,
                meta: meta(&d.name, d.span, &d.attrs),
                generics: GenericParams::empty(),
                kind: TypeDeclKind::Opaque,
            });
        }
    }
    for (i, d) in traits.iter().enumerate() {
        let id = TraitDeclId(i as u32);
        if let Err(e) = cx.trait_decl(id, d) {
            errors.push(e);
            cx.krate.trait_decls.push(TraitDecl {
                id,
                meta: meta(&d.name, d.span, &d.attrs),
                generics: GenericParams::empty(),
                parent_clauses: Vec::new(),
                assoc_types: Vec::new(),
                methods: Vec::new(),
            });
        }
    }
    for (i, d) in impls.iter().enumerate() {
        if let Err(e) = cx.impl_decl(TraitImplId(i as u32), d) {
            errors.push(e);
        }
    }
    for (i, d) in funs.iter().enumerate() {
        let id = FunDeclId(i as u32);
        if let Err(e) = cx.fun_decl(id, d) {
            errors.push(e);
            if cx.krate.fun_decls.len() == i {
                cx.krate.fun_decls.push(FunDecl {
                    id,
                    meta: meta(&d.name, d.span, &d.attrs),
                    signature: FunSig { generics: GenericParams::empty(), inputs: Vec::new(), output: Ty::unit() },
                    body: Body::Opaque,
                });
            }
        }
    }
    if !errors.is_empty() {
        return Err(FrontendErrors(errors));
    }
    let diags = validate_crate(&krate);
    if !diags.is_empty() {
        return Err(FrontendErrors(
            diags
                .into_iter()
                .map(|d| {
                    let code = match d.code {
                        DiagCode::ArityMismatch => FrontendErrorCode::ArityMismatch,
                        DiagCode::UnresolvedId => FrontendErrorCode::UnknownName,
                        _ => FrontendErrorCode::Invalid,
                    };
                    err(code, d.span.unwrap_or_else(Span::dummy), format!("[{}] {}", d.code, d.message))
                })
                .collect(),
        ));
    }
    Ok(krate)
}

struct Lowerer<'a> {
    names: &'a Names,
    krate: &'a mut TranslatedCrate,
}

fn meta(path: &ast::Path, span: Span, attrs: &[String]) -> ItemMeta {
    ItemMeta { name: Name(path.segments.clone()), span, attributes: attrs.to_vec() }
}

fn scalar_kind(name: &str, span: Span) -> LResult<ScalarKind> {
    ScalarKind::from_name(name)
        .ok_or_else(|| err(FrontendErrorCode::UnknownName, span, format!("`{name}` is not a scalar type")))
}

fn level_of(g: &ast::Generics, span: Span) -> LResult<Level> {
    let mut consts = Vec::new();
    for (n, k) in &g.consts {
        consts.push((n.clone(), scalar_kind(k, span)?));
    }
    Ok(Level { regions: g.regions.clone(), types: g.types.clone(), consts, clause_heads: Vec::new(), in_trait: None })
}

impl<'a> Lowerer<'a> {
    fn trait_id(&self, path: &ast::Path) -> LResult<TraitDeclId> {
        self.names
            .traits
            .get(&path.text())
            .copied()
            .ok_or_else(|| err(FrontendErrorCode::UnknownName, path.span, format!("unknown trait `{}`", path.text())))
    }

    fn fill_clause_heads(&self, level: &mut Level, preds: &[ast::WherePred]) {
        for p in preds {
            if let ast::WherePred::Trait(ty, bound) = p {
                let head = match ty {
                    ast::Ty::Path(path, args) if path.segments.len() == 1 && args.is_empty() => {
                        Some(path.segments[0].clone())
                    }
                    _ => None,
                };
                level.clause_heads.push((head, self.names.traits.get(&bound.path.text()).copied()));
            }
        }
    }

    /// Builds the generic parameters of a binder whose names are `scope.levels[0]`.
    fn generic_params(&self, scope: &Scope<'_>, g: &ast::Generics, preds: &[ast::WherePred], span: Span) -> LResult<GenericParams> {
        let mut params = GenericParams {
            regions: g.regions.clone(),
            types: g.types.iter().enumerate().map(|(i, n)| TypeVarDecl { index: i as u32, name: n.clone() }).collect(),
            ..GenericParams::default()
        };
        for (i, (n, k)) in g.consts.iter().enumerate() {
            params.const_generics.push(ConstGenericVar { index: i as u32, name: n.clone(), ty: scalar_kind(k, span)? });
        }
        self.lower_preds(scope, preds, &mut params)?;
        Ok(params)
    }

    fn lower_preds(&self, scope: &Scope<'_>, preds: &[ast::WherePred], params: &mut GenericParams) -> LResult<()> {
        for p in preds {
            match p {
                ast::WherePred::Trait(ty, bound) => {
                    let self_ty = self.ty(scope, ty)?;
                    let (trait_id, args) = self.trait_bound(scope, self_ty, bound)?;
                    let clause_id = params.trait_clauses.next_id();
                    params.trait_clauses.push(TraitClause { clause_id, trait_id, args });
                }
                ast::WherePred::TypeOutlives(ty, r) => {
                    params.types_outlive.push(TypeOutlives { ty: self.ty(scope, ty)?, region: Region(r.clone()) })
                }
                ast::WherePred::RegionOutlives(a, b) => params
                    .regions_outlive
                    .push(RegionOutlives { longer: Region(a.clone()), shorter: Region(b.clone()) }),
                ast::WherePred::Eq(lhs, rhs) => match self.ty(scope, lhs)? {
                    Ty::AssocType(tref, name) => params.trait_type_constraints.push(TraitTypeConstraint {
                        trait_ref: *tref,
                        name,
                        ty: self.ty(scope, rhs)?,
                    }),
                    _ => {
                        return Err(err(
                            FrontendErrorCode::SyntaxError,
                            lhs.span(),
                            "the left side of a type equality must be an associated type",
                        ))
                    }
                },
            }
        }
        Ok(())
    }

    /// `self_ty: Trait<args>` as a trait id and full arguments.
    fn trait_bound(&self, scope: &Scope<'_>, self_ty: Ty, bound: &ast::TraitBound) -> LResult<(TraitDeclId, GenericArgs)> {
        let trait_id = self.trait_id(&bound.path)?;
        let info = &self.names.traits_info[trait_id.0 as usize];
        let mut rest = info.counts.clone();
        rest.types -= 1;
        let mut args = self.generic_args(scope, &bound.args, &rest, bound.path.span, &bound.path.text())?;
        args.types.insert(0, self_ty);
        Ok((trait_id, args))
    }

    fn generic_args(
        &self,
        scope: &Scope<'_>,
        args: &[ast::GenericArg],
        counts: &Counts,
        span: Span,
        what: &str,
    ) -> LResult<GenericArgs> {
        let mut out = GenericArgs::default();
        for a in args {
            match a {
                ast::GenericArg::Region(r) => out.regions.push(Region(r.clone())),
                ast::GenericArg::TraitRef(t) => out.trait_refs.push(self.trait_ref(scope, t)?),
                ast::GenericArg::Const(lit) => {
                    let kind = match &lit.suffix {
                        Some(s) => scalar_kind(s, lit.span)?,
                        None => counts.consts.get(out.const_generics.len()).copied().unwrap_or(LENGTH_KIND),
                    };
                    out.const_generics.push(ConstGeneric::Value(int_value(kind, lit)?));
                }
                ast::GenericArg::Ty(ty) => match self.const_var(scope, ty) {
                    Some(v) => out.const_generics.push(ConstGeneric::Var(v)),
                    None => out.types.push(self.ty(scope, ty)?),
                },
            }
        }
        if out.regions.is_empty() {
            out.regions = vec![Region::erased(); counts.regions];
        }
        if out.trait_refs.is_empty() {
            out.trait_refs = vec![TraitRefKind::pending(); counts.clauses];
        }
        let checks = [
            ("regions", counts.regions, out.regions.len()),
            ("types", counts.types, out.types.len()),
            ("const generics", counts.consts.len(), out.const_generics.len()),
            ("trait refs", counts.clauses, out.trait_refs.len()),
        ];
        for (component, expected, actual) in checks {
            if expected != actual {
                return Err(err(
                    FrontendErrorCode::ArityMismatch,
                    span,
                    format!("`{what}` expects {expected} {component}, got {actual}"),
                ));
            }
        }
        Ok(out)
    }

    fn const_var(&self, scope: &Scope<'_>, ty: &ast::Ty) -> Option<BoundVar> {
        let ast::Ty::Path(path, args) = ty else { return None };
        if path.segments.len() != 1 || !args.is_empty() {
            return None;
        }
        let name = &path.segments[0];
        for (depth, level) in scope.levels.iter().enumerate() {
            if level.types.contains(name) {
                return None;
            }
            if let Some(i) = level.consts.iter().position(|(n, _)| n == name) {
                return Some(BoundVar::new(depth as u32, i as u32));
            }
        }
        None
    }

    fn type_var(&self, scope: &Scope<'_>, name: &str) -> Option<BoundVar> {
        for (depth, level) in scope.levels.iter().enumerate() {
            if let Some(i) = level.types.iter().position(|n| n == name) {
                return Some(BoundVar::new(depth as u32, i as u32));
            }
        }
        None
    }

    /// Resolves `T::Name` to the first where-clause on `T` whose trait declares `Name`.
    fn assoc_sugar(&self, scope: &Scope<'_>, head: &str, item: &str, span: Span) -> LResult<TraitRefKind> {
        let declares = |t: TraitDeclId| self.names.traits_info[t.0 as usize].assoc.iter().any(|(n, _)| n == item);
        for level in &scope.levels {
            if level.types.iter().any(|n| n == head) {
                if let (Some(trait_id), true) = (level.in_trait, head == "Self") {
                    if declares(trait_id) {
                        return Ok(TraitRefKind::SelfId);
                    }
                    let info = &self.names.traits_info[trait_id.0 as usize];
                    for (k, parent) in info.parents.iter().enumerate() {
                        if let Some(&pid) = self.names.traits.get(parent) {
                            if declares(pid) {
                                return Ok(TraitRefKind::ParentClause(Box::new(TraitRefKind::SelfId), k as u32));
                            }
                        }
                    }
                }
                for (i, (h, t)) in level.clause_heads.iter().enumerate() {
                    if h.as_deref() == Some(head) && t.is_some_and(declares) {
                        return Ok(TraitRefKind::Clause(TraitClauseId(i as u32)));
                    }
                }
                break;
            }
        }
        Err(err(FrontendErrorCode::UnknownName, span, format!("no clause on `{head}` provides `{item}`")))
    }

    fn ty(&self, scope: &Scope<'_>, ty: &ast::Ty) -> LResult<Ty> {
        match ty {
            ast::Ty::Path(path, args) => {
                let text = path.text();
                if path.segments.len() == 1 && args.is_empty() {
                    let name = &path.segments[0];
                    if name == "bool" {
                        return Ok(Ty::Bool);
                    }
                    if let Some(k) = ScalarKind::from_name(name) {
                        return Ok(Ty::Scalar(k));
                    }
                    if let Some(v) = self.type_var(scope, name) {
                        return Ok(Ty::TypeVar(v));
                    }
                }
                if let Some(&id) = self.names.types.get(&text) {
                    let counts = &self.names.type_counts[id.0 as usize];
                    return Ok(Ty::Adt(id, self.generic_args(scope, args, counts, path.span, &text)?));
                }
                if path.segments.len() == 2 && args.is_empty() && self.type_var(scope, &path.segments[0]).is_some() {
                    let tref = self.assoc_sugar(scope, &path.segments[0], &path.segments[1], path.span)?;
                    return Ok(Ty::AssocType(Box::new(tref), path.segments[1].clone()));
                }
                Err(err(FrontendErrorCode::UnknownName, path.span, format!("unknown type `{text}`")))
            }
            ast::Ty::Ref(r, inner, m, _) => Ok(Ty::Ref(
                r.as_ref().map(|r| Region(r.clone())).unwrap_or_else(Region::erased),
                Box::new(self.ty(scope, inner)?),
                *m,
            )),
            ast::Ty::Tuple(tys, _) => Ok(Ty::Tuple(tys.iter().map(|t| self.ty(scope, t)).collect::<LResult<_>>()?)),
            ast::Ty::Array(elem, len, span) => {
                let len = match &**len {
                    ast::GenericArg::Const(lit) => {
                        let kind = match &lit.suffix {
                            Some(s) => scalar_kind(s, lit.span)?,
                            None => LENGTH_KIND,
                        };
                        ConstGeneric::Value(int_value(kind, lit)?)
                    }
                    ast::GenericArg::Ty(t) => ConstGeneric::Var(self.const_var(scope, t).ok_or_else(|| {
                        err(FrontendErrorCode::UnknownName, t.span(), "array length must be a literal or const generic")
                    })?),
                    _ => return Err(err(FrontendErrorCode::SyntaxError, *span, "bad array length")),
                };
                Ok(Ty::Array(Box::new(self.ty(scope, elem)?), len))
            }
            ast::Ty::Assoc(tref, name, _) => Ok(Ty::AssocType(Box::new(self.trait_ref(scope, tref)?), name.clone())),
        }
    }

    fn trait_ref(&self, scope: &Scope<'_>, tref: &ast::TraitRef) -> LResult<TraitRefKind> {
        Ok(match tref {
            ast::TraitRef::Clause(n, _) => TraitRefKind::Clause(TraitClauseId(*n)),
            ast::TraitRef::SelfRef(_) => TraitRefKind::SelfId,
            ast::TraitRef::Parent(base, k, _) => TraitRefKind::ParentClause(Box::new(self.trait_ref(scope, base)?), *k),
            ast::TraitRef::Item(base, name, k, _) => {
                TraitRefKind::ItemClause(Box::new(self.trait_ref(scope, base)?), name.clone(), *k)
            }
            ast::TraitRef::Impl(path, args) => {
                let id = self.names.impls.get(&path.text()).copied().ok_or_else(|| {
                    err(FrontendErrorCode::UnknownName, path.span, format!("unknown impl `{}`", path.text()))
                })?;
                let counts = &self.names.impl_counts[id.0 as usize];
                TraitRefKind::TraitImpl(id, self.generic_args(scope, args, counts, path.span, &path.text())?)
            }
            ast::TraitRef::Unknown(msg, _) => TraitRefKind::Unknown(msg.clone()),
        })
    }

    fn type_decl(&mut self, id: TypeDeclId, d: &ast::TypeDecl) -> LResult<()> {
        let mut level = level_of(&d.generics, d.span)?;
        self.fill_clause_heads(&mut level, &d.preds);
        let scope = Scope { levels: vec![&level] };
        let generics = self.generic_params(&scope, &d.generics, &d.preds, d.span)?;
        let kind = match &d.kind {
            ast::TypeDeclKind::Struct(fields) => {
                TypeDeclKind::Struct(fields.iter().map(|t| self.ty(&scope, t)).collect::<LResult<_>>()?)
            }
            ast::TypeDeclKind::Enum(vs) => {
                let mut out = Vec::new();
                for v in vs {
                    if out.iter().any(|o: &Variant| o.name == v.name) {
                        return Err(err(FrontendErrorCode::DuplicateName, v.span, format!("duplicate variant `{}`", v.name)));
                    }
                    out.push(Variant {
                        name: v.name.clone(),
                        discriminant: v.discriminant.value(),
                        fields: v.fields.iter().map(|t| self.ty(&scope, t)).collect::<LResult<_>>()?,
                    });
                }
                TypeDeclKind::Enum(out)
            }
            ast::TypeDeclKind::Opaque => TypeDeclKind::Opaque,
        };
        self.krate.type_decls.push(TypeDecl { id, meta: meta(&d.name, d.span, &d.attrs), generics, kind });
        Ok(())
    }

    fn trait_decl(&mut self, id: TraitDeclId, d: &ast::TraitDecl) -> LResult<()> {
        let mut level = level_of(&d.generics, d.span)?;
        level.types.insert(0, "Self".to_string());
        level.in_trait = Some(id);
        let scope = Scope { levels: vec![&level] };
        let mut generics = self.generic_params(&scope, &ast::Generics::default(), &[], d.span)?;
        generics.regions = level.regions.clone();
        generics.types = level.types.iter().enumerate().map(|(i, n)| TypeVarDecl { index: i as u32, name: n.clone() }).collect();
        generics.const_generics = level
            .consts
            .iter()
            .enumerate()
            .map(|(i, (n, k))| ConstGenericVar { index: i as u32, name: n.clone(), ty: *k })
            .collect();
        let self_ty = Ty::var(0);
        let mut parent_clauses = Vec::new();
        for (k, b) in d.parents.iter().enumerate() {
            let (trait_id, args) = self.trait_bound(&scope, self_ty.clone(), b)?;
            parent_clauses.push(TraitClause { clause_id: TraitClauseId(k as u32), trait_id, args });
        }
        let mut assoc_types = Vec::new();
        for a in &d.assoc_types {
            if assoc_types.iter().any(|o: &AssocTypeDecl| o.name == a.name) {
                return Err(err(FrontendErrorCode::DuplicateName, a.span, format!("duplicate associated type `{}`", a.name)));
            }
            let item_ty = Ty::AssocType(Box::new(TraitRefKind::SelfId), a.name.clone());
            let mut bounds = Vec::new();
            for (k, b) in a.bounds.iter().enumerate() {
                let (trait_id, args) = self.trait_bound(&scope, item_ty.clone(), b)?;
                bounds.push(TraitClause { clause_id: TraitClauseId(k as u32), trait_id, args });
            }
            assoc_types.push(AssocTypeDecl { name: a.name.clone(), bounds });
        }
        let mut methods = Vec::new();
        for m in &d.methods {
            if methods.iter().any(|o: &TraitMethodDecl| o.name == m.name) {
                return Err(err(FrontendErrorCode::DuplicateName, m.span, format!("duplicate method `{}`", m.name)));
            }
            let mut mlevel = level_of(&m.sig.generics, m.span)?;
            self.fill_clause_heads(&mut mlevel, &m.sig.preds);
            let mscope = Scope { levels: vec![&mlevel, &level] };
            let signature = self.signature(&mscope, &m.sig, m.span)?;
            methods.push(TraitMethodDecl { name: m.name.clone(), signature });
        }
        self.krate.trait_decls.push(TraitDecl {
            id,
            meta: meta(&d.name, d.span, &d.attrs),
            generics,
            parent_clauses,
            assoc_types,
            methods,
        });
        Ok(())
    }

    fn signature(&self, scope: &Scope<'_>, sig: &ast::Signature, span: Span) -> LResult<FunSig> {
        let generics = self.generic_params(scope, &sig.generics, &sig.preds, span)?;
        let inputs = sig.params.iter().map(|p| self.ty(scope, &p.ty)).collect::<LResult<_>>()?;
        let output = match &sig.output {
            Some(t) => self.ty(scope, t)?,
            None => Ty::unit(),
        };
        Ok(FunSig { generics, inputs, output })
    }

    fn impl_decl(&mut self, id: TraitImplId, d: &ast::ImplDecl) -> LResult<()> {
        let mut level = level_of(&d.generics, d.span)?;
        self.fill_clause_heads(&mut level, &d.preds);
        let scope = Scope { levels: vec![&level] };
        let generics = self.generic_params(&scope, &d.generics, &d.preds, d.span)?;
        let self_ty = self.ty(&scope, &d.self_ty)?;
        let (trait_id, trait_args) = self.trait_bound(&scope, self_ty, &d.trait_bound)?;
        let info = &self.names.traits_info[trait_id.0 as usize];
        let parent_trait_refs = match &d.parents {
            Some(refs) => refs.iter().map(|r| self.trait_ref(&scope, r)).collect::<LResult<_>>()?,
            None => vec![TraitRefKind::pending(); info.parents.len()],
        };
        let mut assoc_types = Vec::new();
        for a in &d.assoc_types {
            let bound_count = info.assoc.iter().find(|(n, _)| *n == a.name).map(|(_, c)| *c).unwrap_or(0);
            let bound_refs = match &a.bound_refs {
                Some(refs) => refs.iter().map(|r| self.trait_ref(&scope, r)).collect::<LResult<_>>()?,
                None => vec![TraitRefKind::pending(); bound_count],
            };
            assoc_types.push(ImplAssocType { name: a.name.clone(), ty: self.ty(&scope, &a.ty)?, bound_refs });
        }
        let mut methods = Vec::new();
        for (name, path) in &d.methods {
            let fun_id = self.names.funs.get(&path.text()).copied().ok_or_else(|| {
                err(FrontendErrorCode::UnknownName, path.span, format!("unknown function `{}`", path.text()))
            })?;
            methods.push(ImplMethod { name: name.clone(), fun_id });
        }
        self.krate.trait_impls.push(TraitImpl {
            id,
            meta: meta(&d.name, d.span, &d.attrs),
            generics,
            trait_id,
            trait_args,
            parent_trait_refs,
            assoc_types,
            methods,
        });
        Ok(())
    }

    fn fun_decl(&mut self, id: FunDeclId, d: &ast::FunDecl) -> LResult<()> {
        let mut level = level_of(&d.sig.generics, d.span)?;
        self.fill_clause_heads(&mut level, &d.sig.preds);
        let scope = Scope { levels: vec![&level] };
        let signature = self.signature(&scope, &d.sig, d.span)?;
        let meta = meta(&d.name, d.span, &d.attrs);
        // Pushed first so that body lowering sees the signature (for recursive calls).
        self.krate.fun_decls.push(FunDecl { id, meta: meta.clone(), signature: signature.clone(), body: Body::Opaque });
        let body = match &d.body {
            Some(b) if !meta.is_opaque() => Body::Ullbc(self.body(&scope, &d.sig, &signature, b)?),
            _ => Body::Opaque,
        };
        self.krate.fun_decls[id].body = body;
        Ok(())
    }

    fn body(&self, scope: &Scope<'_>, sig: &ast::Signature, fsig: &FunSig, b: &ast::Body) -> LResult<UllbcBody> {
        let mut vars: IndexVec<LocalId, Local> = IndexVec::new();
        vars.push(Local { index: LocalId(0), name: "ret".into(), ty: fsig.output.clone() });
        let mut by_name: HashMap<String, LocalId> = HashMap::new();
        by_name.insert("ret".into(), LocalId(0));
        let mut declare = |name: &str, ty: Ty, span: Span, vars: &mut IndexVec<LocalId, Local>| -> LResult<()> {
            if by_name.contains_key(name) {
                return Err(err(FrontendErrorCode::DuplicateName, span, format!("local `{name}` is declared twice")));
            }
            let index = vars.next_id();
            by_name.insert(name.to_string(), index);
            vars.push(Local { index, name: name.to_string(), ty });
            Ok(())
        };
        for (p, ty) in sig.params.iter().zip(&fsig.inputs) {
            declare(&p.name, ty.clone(), p.span, &mut vars)?;
        }
        for l in &b.lets {
            let ty = self.ty(scope, &l.ty)?;
            declare(&l.name, ty, l.span, &mut vars)?;
        }
        let locals = Locals { arg_count: fsig.inputs.len() as u32, vars };
        let mut labels: HashMap<u32, BlockId> = HashMap::new();
        for (i, bb) in b.blocks.iter().enumerate() {
            if labels.insert(bb.label.index, BlockId(i as u32)).is_some() {
                return Err(err(
                    FrontendErrorCode::DuplicateName,
                    bb.label.span,
                    format!("block bb{} is defined twice", bb.label.index),
                ));
            }
        }
        if b.blocks.is_empty() {
            return Err(err(FrontendErrorCode::SyntaxError, b.span, "a body needs at least one block"));
        }
        let bcx = BodyCx { lw: self, scope, locals: &locals, by_name: &by_name, labels: &labels };
        let mut blocks = IndexVec::new();
        for bb in &b.blocks {
            let mut statements = Vec::new();
            for st in &bb.statements {
                let kind = match &st.kind {
                    ast::StatementKind::Assign(p, rv) => ullbc::StatementKind::Assign(bcx.place(p)?, bcx.rvalue(rv)?),
                    ast::StatementKind::Drop(p) => ullbc::StatementKind::Drop(bcx.place(p)?),
                    ast::StatementKind::Nop => ullbc::StatementKind::Nop,
                };
                statements.push(ullbc::Statement {
                    span: st.span,
                    comments: st.comments.clone(),
                    attributes: st.attrs.clone(),
                    kind,
                });
            }
            let t = &bb.terminator;
            let kind = bcx.terminator(&t.kind)?;
            blocks.push(BlockData {
                statements,
                terminator: ullbc::Terminator { span: t.span, comments: t.comments.clone(), kind },
            });
        }
        Ok(UllbcBody { span: b.span, locals, blocks })
    }
}

fn int_value(kind: ScalarKind, lit: &ast::IntLit) -> LResult<ScalarValue> {
    if let Some(s) = &lit.suffix {
        if s != kind.name() {
            return Err(err(
                FrontendErrorCode::SyntaxError,
                lit.span,
                format!("literal suffix `{s}` does not match the expected type `{}`", kind.name()),
            ));
        }
    }
    let value = lit.value();
    ScalarValue::new(kind, value)
        .map_err(|e| err(FrontendErrorCode::SyntaxError, lit.span, e.to_string()))
}

struct BodyCx<'a, 'b> {
    lw: &'a Lowerer<'b>,
    scope: &'a Scope<'a>,
    locals: &'a Locals,
    by_name: &'a HashMap<String, LocalId>,
    labels: &'a HashMap<u32, BlockId>,
}

impl BodyCx<'_, '_> {
    fn krate(&self) -> &TranslatedCrate {
        self.lw.krate
    }

    fn label(&self, l: &ast::BlockLabel) -> LResult<BlockId> {
        self.labels
            .get(&l.index)
            .copied()
            .ok_or_else(|| err(FrontendErrorCode::UnknownBlock, l.span, format!("unknown block bb{}", l.index)))
    }

    fn place(&self, p: &ast::Place) -> LResult<Place> {
        let local = self
            .by_name
            .get(&p.base)
            .copied()
            .ok_or_else(|| err(FrontendErrorCode::UnknownName, p.span, format!("unknown local `{}`", p.base)))?;
        let mut place = Place::local(local);
        for proj in &p.projection {
            let elem = match proj {
                ast::Projection::Field(n) => ProjectionElem::Field(FieldId(*n)),
                ast::Projection::Deref => ProjectionElem::Deref,
                ast::Projection::Index(op) => ProjectionElem::Index(Box::new(self.operand(op)?)),
                ast::Projection::Downcast(name) => {
                    let ty = place_ty(self.krate(), self.locals, &place)
                        .map_err(|e| err(FrontendErrorCode::Invalid, p.span, e.to_string()))?;
                    ProjectionElem::Downcast(self.variant_of(&ty, name, p.span)?)
                }
            };
            place.projection.push(elem);
        }
        Ok(place)
    }

    fn variant_of(&self, ty: &Ty, name: &str, span: Span) -> LResult<VariantId> {
        let Ty::Adt(id, _) = ty else {
            return Err(err(FrontendErrorCode::Invalid, span, format!("`{name}`: not an enum type")));
        };
        let decl = &self.krate().type_decls[*id];
        decl.variants()
            .and_then(|vs| vs.iter().position(|v| v.name == name))
            .map(|i| VariantId(i as u32))
            .ok_or_else(|| err(FrontendErrorCode::UnknownName, span, format!("`{}` has no variant `{name}`", decl.meta.name)))
    }

    fn operand(&self, op: &ast::Operand) -> LResult<Operand> {
        Ok(match op {
            ast::Operand::Copy(p) => Operand::Copy(self.place(p)?),
            ast::Operand::Move(p) => Operand::Move(self.place(p)?),
            ast::Operand::Const(c) => Operand::Const(self.constant(c)?),
        })
    }

    /// Resolves `adt Path<args>::Variant`.
    fn adt(
        &self,
        path: &ast::Path,
        args: &[ast::GenericArg],
        variant: &Option<String>,
    ) -> LResult<(TypeDeclId, GenericArgs, Option<VariantId>)> {
        let (type_path, variant_name) = match variant {
            Some(v) => (path.clone(), Some(v.clone())),
            None if self.lw.names.types.contains_key(&path.text()) => (path.clone(), None),
            None if path.segments.len() > 1 => {
                let mut p = path.clone();
                let v = p.segments.pop();
                (p, v)
            }
            None => (path.clone(), None),
        };
        let id = self.lw.names.types.get(&type_path.text()).copied().ok_or_else(|| {
            err(FrontendErrorCode::UnknownName, path.span, format!("unknown type `{}`", type_path.text()))
        })?;
        let counts = &self.lw.names.type_counts[id.0 as usize];
        let gargs = self.lw.generic_args(self.scope, args, counts, path.span, &type_path.text())?;
        let ty = Ty::Adt(id, gargs.clone());
        let variant = match variant_name {
            Some(v) => Some(self.variant_of(&ty, &v, path.span)?),
            None => None,
        };
        Ok((id, gargs, variant))
    }

    fn constant(&self, c: &ast::Constant) -> LResult<ConstantValue> {
        Ok(match c {
            ast::Constant::Int(lit) => {
                let Some(suffix) = &lit.suffix else {
                    return Err(err(FrontendErrorCode::SyntaxError, lit.span, "integer constants need a type suffix"));
                };
                ConstantValue::scalar(int_value(scalar_kind(suffix, lit.span)?, lit)?)
            }
            ast::Constant::Bool(b, _) => ConstantValue::bool(*b),
            ast::Constant::Tuple(fields, _) => {
                let fields: Vec<ConstantValue> = fields.iter().map(|f| self.constant(f)).collect::<LResult<_>>()?;
                ConstantValue {
                    ty: Ty::Tuple(fields.iter().map(|f| f.ty.clone()).collect()),
                    kind: ConstantKind::Adt(None, fields),
                }
            }
            ast::Constant::Adt(path, args, variant, fields) => {
                let (id, gargs, variant) = self.adt(path, args, variant)?;
                let fields = fields.iter().map(|f| self.constant(f)).collect::<LResult<_>>()?;
                ConstantValue { ty: Ty::Adt(id, gargs), kind: ConstantKind::Adt(variant, fields) }
            }
            ast::Constant::Array(ty, fields, _) => {
                let elem = self.lw.ty(self.scope, ty)?;
                let fields: Vec<ConstantValue> = fields.iter().map(|f| self.constant(f)).collect::<LResult<_>>()?;
                ConstantValue { ty: Ty::Array(Box::new(elem), array_len(fields.len())), kind: ConstantKind::Adt(None, fields) }
            }
            ast::Constant::Raw(ty, hex, span) => {
                let bytes = from_hex(hex)
                    .ok_or_else(|| err(FrontendErrorCode::SyntaxError, *span, format!("invalid hex string {hex:?}")))?;
                ConstantValue { ty: self.lw.ty(self.scope, ty)?, kind: ConstantKind::Raw(bytes) }
            }
        })
    }

    fn rvalue(&self, rv: &ast::Rvalue) -> LResult<Rvalue> {
        Ok(match rv {
            ast::Rvalue::Use(op) => Rvalue::Use(self.operand(op)?),
            ast::Rvalue::BinOp(name, a, b, span) => {
                let op = BinOp::from_name(name)
                    .ok_or_else(|| err(FrontendErrorCode::UnknownName, *span, format!("unknown binary operator `{name}`")))?;
                Rvalue::BinOp(op, self.operand(a)?, self.operand(b)?)
            }
            ast::Rvalue::UnOp(name, cast, a, span) => {
                let op = match (name.as_str(), cast) {
                    ("Not", None) => UnOp::Not,
                    ("Neg", None) => UnOp::Neg,
                    ("Cast", Some(k)) => UnOp::Cast(scalar_kind(k, *span)?),
                    _ => return Err(err(FrontendErrorCode::UnknownName, *span, format!("unknown unary operator `{name}`"))),
                };
                Rvalue::UnOp(op, self.operand(a)?)
            }
            ast::Rvalue::Discriminant(p) => Rvalue::Discriminant(self.place(p)?),
            ast::Rvalue::Ref(p, m) => Rvalue::Ref(self.place(p)?, *m),
            ast::Rvalue::Adt(path, args, variant, ops) => {
                let (id, gargs, variant) = self.adt(path, args, variant)?;
                Rvalue::Aggregate(
                    AggregateKind::Adt(id, variant, gargs),
                    ops.iter().map(|o| self.operand(o)).collect::<LResult<_>>()?,
                )
            }
            ast::Rvalue::Tuple(ops) => {
                Rvalue::Aggregate(AggregateKind::Tuple, ops.iter().map(|o| self.operand(o)).collect::<LResult<_>>()?)
            }
            ast::Rvalue::Array(ty, ops) => Rvalue::Aggregate(
                AggregateKind::Array(self.lw.ty(self.scope, ty)?),
                ops.iter().map(|o| self.operand(o)).collect::<LResult<_>>()?,
            ),
        })
    }

    fn terminator(&self, t: &ast::TerminatorKind) -> LResult<TerminatorKind> {
        Ok(match t {
            ast::TerminatorKind::Goto(l) => TerminatorKind::Goto(self.label(l)?),
            ast::TerminatorKind::Return => TerminatorKind::Return,
            ast::TerminatorKind::Unreachable => TerminatorKind::Unreachable,
            ast::TerminatorKind::Abort(k) => TerminatorKind::Abort(*k),
            ast::TerminatorKind::SwitchInt(discr, cases, otherwise) => {
                let discr = self.operand(discr)?;
                let dty = operand_ty(self.krate(), self.locals, &discr)
                    .map_err(|e| err(FrontendErrorCode::Invalid, Span::dummy(), e.to_string()))?;
                let kind = match dty {
                    Ty::Scalar(k) => k,
                    Ty::Bool => ScalarKind::U8,
                    other => {
                        let span = cases.first().map(|c| c.0.span).unwrap_or(otherwise.span);
                        return Err(err(FrontendErrorCode::Invalid, span, format!("cannot switch on {other:?}")));
                    }
                };
                let mut out = Vec::new();
                for (lit, l) in cases {
                    out.push(SwitchCase { value: int_value(kind, lit)?, target: self.label(l)? });
                }
                TerminatorKind::SwitchInt { discr, cases: out, otherwise: self.label(otherwise)? }
            }
            ast::TerminatorKind::Match(p, cases, otherwise) => {
                let scrutinee = self.place(p)?;
                let ty = place_ty(self.krate(), self.locals, &scrutinee)
                    .map_err(|e| err(FrontendErrorCode::Invalid, p.span, e.to_string()))?;
                let mut out = Vec::new();
                for (name, l) in cases {
                    out.push(MatchCase { variant: self.variant_of(&ty, name, p.span)?, target: self.label(l)? });
                }
                let otherwise = otherwise.as_ref().map(|l| self.label(l)).transpose()?;
                TerminatorKind::Match { scrutinee, cases: out, otherwise }
            }
            ast::TerminatorKind::Assert(cond, expected, target) => {
                TerminatorKind::Assert { cond: self.operand(cond)?, expected: *expected, target: self.label(target)? }
            }
            ast::TerminatorKind::Call { dest, callee, args, target } => {
                let func = self.callee(callee)?;
                TerminatorKind::Call {
                    call: Call {
                        func,
                        args: args.iter().map(|a| self.operand(a)).collect::<LResult<_>>()?,
                        dest: self.place(dest)?,
                    },
                    target: self.label(target)?,
                }
            }
        })
    }

    fn callee(&self, c: &ast::Callee) -> LResult<FnOperand> {
        let names = self.lw.names;
        Ok(match c {
            ast::Callee::Ptr(p) => FnOperand::Move(self.place(p)?),
            ast::Callee::Path(path, generics) => {
                let text = path.text();
                if let Some(&id) = names.funs.get(&text) {
                    let counts = &names.fun_counts[id.0 as usize];
                    let generics = self.lw.generic_args(self.scope, generics, counts, path.span, &text)?;
                    FnOperand::Regular(FnPtr { func: FunIdOrTraitMethodRef::Fun(id), generics })
                } else {
                    let mut trait_path = path.clone();
                    let method = trait_path.segments.pop().unwrap_or_default();
                    let trait_id = (!trait_path.segments.is_empty())
                        .then(|| names.traits.get(&trait_path.text()).copied())
                        .flatten()
                        .ok_or_else(|| err(FrontendErrorCode::UnknownName, path.span, format!("unknown function `{text}`")))?;
                    let info = &names.traits_info[trait_id.0 as usize];
                    let mcounts = info.methods.get(&method).ok_or_else(|| {
                        err(FrontendErrorCode::UnknownName, path.span, format!("trait `{}` has no method `{method}`", trait_path.text()))
                    })?;
                    let counts = info.counts.concat(mcounts);
                    let generics = self.lw.generic_args(self.scope, generics, &counts, path.span, &text)?;
                    FnOperand::Regular(FnPtr { func: FunIdOrTraitMethodRef::UnresolvedMethod(trait_id, method), generics })
                }
            }
            ast::Callee::TraitMethod { tref, bound, self_ty, method, generics } => {
                let self_ty = self.lw.ty(self.scope, self_ty)?;
                let (trait_id, args) = self.lw.trait_bound(self.scope, self_ty, bound)?;
                let kind = self.lw.trait_ref(self.scope, tref)?;
                let info = &names.traits_info[trait_id.0 as usize];
                let mcounts = info.methods.get(method).ok_or_else(|| {
                    err(FrontendErrorCode::UnknownName, bound.path.span, format!("trait `{}` has no method `{method}`", bound.path.text()))
                })?;
                let generics = self.lw.generic_args(self.scope, generics, mcounts, bound.path.span, method)?;
                FnOperand::Regular(FnPtr {
                    func: FunIdOrTraitMethodRef::TraitMethod(TraitRef { kind, trait_id, args }, method.clone()),
                    generics,
                })
            }
        })
    }
}
