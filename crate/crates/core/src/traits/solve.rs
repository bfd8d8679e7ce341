use crate::frontend::{print_ty, Env};
use crate::ir::subst::{Subst, Substitution};
use crate::ir::{
    ConstGeneric, DiagCode, GenericArgs, GenericParams, Region, TraitDeclId, TraitImplId, TraitRefKind,
    TranslatedCrate, Ty,
};

use super::elaborate::{elaborate_implied_clauses, strip_refs, KnownClause, MAX_CLAUSE_DEPTH};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("no instance of {goal}")]
    NoInstance { goal: String },
    #[error("ambiguous instance of {goal}: candidates {}", candidates.join(", "))]
    Ambiguous { goal: String, candidates: Vec<String> },
}

impl ResolveError {
    pub fn code(&self) -> DiagCode {
        match self {
            ResolveError::NoInstance { .. } => DiagCode::NoInstance,
            ResolveError::Ambiguous { .. } => DiagCode::AmbiguousInstance,
        }
    }
}

/// The local clauses (with everything they imply) and the crate's impls.
pub struct TraitEnv<'a> {
    pub krate: &'a TranslatedCrate,
    pub params: &'a GenericParams,
    pub closure: Vec<KnownClause>,
}

impl<'a> TraitEnv<'a> {
    pub fn new(krate: &'a TranslatedCrate, params: &'a GenericParams) -> TraitEnv<'a> {
        let (closure, _) = elaborate_implied_clauses(params, krate);
        TraitEnv { krate, params, closure }
    }

    fn describe(&self, trait_id: TraitDeclId, args: &GenericArgs) -> String {
        let name = self.krate.trait_decls.get(trait_id).map(|d| d.meta.name.to_string()).unwrap_or_else(|| trait_id.to_string());
        let env = Env::new(self.params);
        let tys: Vec<_> = args.types.iter().map(|t| print_ty(self.krate, env, t)).collect();
        match tys.split_first() {
            Some((s, [])) => format!("{s}: {name}"),
            Some((s, rest)) => format!("{s}: {name}<{}>", rest.join(", ")),
            None => name,
        }
    }
}

enum Found {
    None,
    One(TraitRefKind),
    Many(Vec<String>),
}

/// Finds a proof that `args` (self type first) implement `trait_id`.
///
/// A matching local clause wins outright. Otherwise every impl whose head
/// matches and whose where-clauses can be discharged is a candidate; exactly
/// one must remain. A goal already being solved further up is not retried.
pub fn resolve_trait_ref(env: &TraitEnv<'_>, trait_id: TraitDeclId, args: &GenericArgs) -> Result<TraitRefKind, ResolveError> {
    let mut stack = Vec::new();
    match solve(env, trait_id, &strip_refs(args), &mut stack) {
        Found::One(r) => Ok(r),
        Found::None => Err(ResolveError::NoInstance { goal: env.describe(trait_id, args) }),
        Found::Many(candidates) => Err(ResolveError::Ambiguous { goal: env.describe(trait_id, args), candidates }),
    }
}

fn solve(env: &TraitEnv<'_>, trait_id: TraitDeclId, goal: &GenericArgs, stack: &mut Vec<(TraitDeclId, GenericArgs)>) -> Found {
    if let Some(k) = env.closure.iter().find(|k| k.trait_id == trait_id && strip_refs(&k.args) == *goal) {
        return Found::One(k.path.clone());
    }
    if stack.len() >= MAX_CLAUSE_DEPTH || stack.iter().any(|(t, a)| *t == trait_id && a == goal) {
        return Found::None;
    }
    stack.push((trait_id, goal.clone()));
    let mut hits = Vec::new();
    let mut ambiguous = false;
    for imp in env.krate.trait_impls.iter().filter(|i| i.trait_id == trait_id) {
        let Some(inst) = match_head(&imp.generics, &imp.trait_args, goal) else { continue };
        let mut refs = Vec::with_capacity(imp.generics.trait_clauses.len());
        let mut failed = false;
        let mut unsure = false;
        for clause in imp.generics.trait_clauses.iter() {
            let Ok(sub) = clause.args.subst(&Substitution::new(&inst)) else {
                failed = true;
                break;
            };
            match solve(env, clause.trait_id, &strip_refs(&sub), stack) {
                Found::One(r) => refs.push(r),
                Found::None => {
                    failed = true;
                    break;
                }
                Found::Many(_) => {
                    unsure = true;
                    refs.push(TraitRefKind::Unknown("ambiguous".into()));
                }
            }
        }
        if !failed {
            ambiguous |= unsure;
            hits.push((imp.id, GenericArgs { trait_refs: refs, ..inst }));
        }
    }
    stack.pop();
    let name = |id: TraitImplId| env.krate.trait_impls.get(id).map(|i| i.meta.name.to_string()).unwrap_or_else(|| id.to_string());
    match hits.len() {
        0 => Found::None,
        1 if !ambiguous => {
            let (id, args) = hits.pop().expect("one hit");
            Found::One(TraitRefKind::TraitImpl(id, args))
        }
        _ => Found::Many(hits.iter().map(|(id, _)| name(*id)).collect()),
    }
}

/// Binds the impl's variables so that its head equals `goal`.
fn match_head(params: &GenericParams, head: &GenericArgs, goal: &GenericArgs) -> Option<GenericArgs> {
    if head.types.len() != goal.types.len() || head.const_generics.len() != goal.const_generics.len() {
        return None;
    }
    let mut m = Matcher { tys: vec![None; params.types.len()], consts: vec![None; params.const_generics.len()] };
    for (p, g) in head.types.iter().zip(&goal.types) {
        if !m.ty(p, g) {
            return None;
        }
    }
    for (p, g) in head.const_generics.iter().zip(&goal.const_generics) {
        if !m.cg(p, g) {
            return None;
        }
    }
    Some(GenericArgs {
        regions: vec![Region::erased(); params.regions.len()],
        types: m.tys.into_iter().collect::<Option<_>>()?,
        const_generics: m.consts.into_iter().collect::<Option<_>>()?,
        trait_refs: vec![TraitRefKind::pending(); params.trait_clauses.len()],
    })
}

struct Matcher {
    tys: Vec<Option<Ty>>,
    consts: Vec<Option<ConstGeneric>>,
}

impl Matcher {
    fn ty(&mut self, p: &Ty, g: &Ty) -> bool {
        match (p, g) {
            (Ty::TypeVar(v), _) if v.depth == 0 => match self.tys.get_mut(v.index as usize) {
                Some(slot @ None) => {
                    *slot = Some(g.clone());
                    true
                }
                Some(Some(bound)) => bound == g,
                None => false,
            },
            (Ty::Adt(a, pa), Ty::Adt(b, ga)) => a == b && self.args(pa, ga),
            (Ty::Ref(_, pt, pm), Ty::Ref(_, gt, gm)) => pm == gm && self.ty(pt, gt),
            (Ty::Tuple(ps), Ty::Tuple(gs)) => ps.len() == gs.len() && ps.iter().zip(gs).all(|(p, g)| self.ty(p, g)),
            (Ty::Array(pt, pl), Ty::Array(gt, gl)) => self.ty(pt, gt) && self.cg(pl, gl),
            _ => p == g,
        }
    }

    fn args(&mut self, p: &GenericArgs, g: &GenericArgs) -> bool {
        p.types.len() == g.types.len()
            && p.const_generics.len() == g.const_generics.len()
            && p.types.iter().zip(&g.types).all(|(p, g)| self.ty(p, g))
            && p.const_generics.iter().zip(&g.const_generics).all(|(p, g)| self.cg(p, g))
    }

    fn cg(&mut self, p: &ConstGeneric, g: &ConstGeneric) -> bool {
        match p {
            ConstGeneric::Var(v) if v.depth == 0 => match self.consts.get_mut(v.index as usize) {
                Some(slot @ None) => {
                    *slot = Some(g.clone());
                    true
                }
                Some(Some(bound)) => bound == g,
                None => false,
            },
            _ => p == g,
        }
    }
}
