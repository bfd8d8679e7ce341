//! Random trait environments and brute-force oracles for clause elaboration,
//! instance resolution and associated type normalization.

use std::collections::BTreeSet;
use std::fmt::Write;

use charon_lite::ir::subst::{substitute, Subst, Substitution};
use charon_lite::ir::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Generates a crate with up to 6 traits `Tr0..`, the type constructors
/// `Box<X>` and `Pair<X, Y>`, up to 6 impls and a function
/// `fn env<P, Q>() where ..;` whose clauses form the local environment.
/// Supertraits and associated type bounds only point to lower-numbered
/// traits, so hierarchies are acyclic.
pub fn random_trait_env(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(1..=6);
    let mut out = String::from("type Box<X> = opaque;\ntype Pair<X, Y> = opaque;\n");
    let mut assoc = vec![false; n];
    for i in 0..n {
        let mut parents: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.35)).collect();
        parents.truncate(2);
        let _ = write!(out, "trait Tr{i}");
        if !parents.is_empty() {
            let ps: Vec<_> = parents.iter().map(|p| format!("Tr{p}")).collect();
            let _ = write!(out, ": {}", ps.join(" + "));
        }
        out.push_str(" {\n");
        if rng.gen_bool(0.35) {
            assoc[i] = true;
            if i > 0 && rng.gen_bool(0.7) {
                let _ = writeln!(out, "    type A: Tr{};", rng.gen_range(0..i));
            } else {
                out.push_str("    type A;\n");
            }
        }
        out.push_str("}\n");
    }
    let m = rng.gen_range(0..=6);
    for k in 0..m {
        let t = rng.gen_range(0..n);
        let head = pattern(rng, 2);
        let vars: Vec<&str> = ["X", "Y"].into_iter().filter(|v| mentions(&head, v)).collect();
        let generics = if vars.is_empty() { String::new() } else { format!("<{}>", vars.join(", ")) };
        let mut preds = Vec::new();
        for v in &vars {
            for _ in 0..rng.gen_range(0..=1) {
                preds.push(format!("{v}: Tr{}", rng.gen_range(0..n)));
            }
        }
        let wh = if preds.is_empty() { String::new() } else { format!(" where {}", preds.join(", ")) };
        let _ = write!(out, "impl I{k}{generics}: Tr{t} for {head}{wh} {{");
        if assoc[t] {
            out.push_str(" type A = u8;");
        }
        out.push_str(" }\n");
    }
    let mut preds = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let v = ["P", "Q"].choose(rng).unwrap();
        preds.push(format!("{v}: Tr{}", rng.gen_range(0..n)));
    }
    let wh = if preds.is_empty() { String::new() } else { format!(" where {}", preds.join(", ")) };
    let _ = writeln!(out, "fn env<P, Q>(){wh};");
    out
}

fn mentions(ty: &str, v: &str) -> bool {
    ty.split(|c: char| !c.is_alphanumeric()).any(|w| w == v)
}

fn pattern(rng: &mut impl Rng, depth: u32) -> String {
    let leaves = ["u8", "bool", "X", "Y"];
    if depth == 0 || rng.gen_bool(0.45) {
        return leaves.choose(rng).unwrap().to_string();
    }
    if rng.gen_bool(0.5) {
        format!("Box<{}>", pattern(rng, depth - 1))
    } else {
        format!("Pair<{}, {}>", pattern(rng, depth - 1), pattern(rng, depth - 1))
    }
}

/// A random goal type over the environment's variables `P` (0) and `Q` (1).
pub fn random_goal_ty(rng: &mut impl Rng, krate: &TranslatedCrate, depth: u32) -> Ty {
    if depth == 0 || rng.gen_bool(0.45) {
        return match rng.gen_range(0..4) {
            0 => Ty::Scalar(ScalarKind::U8),
            1 => Ty::Bool,
            k => Ty::var(k - 2),
        };
    }
    let b = krate.type_by_name("Box").unwrap().id;
    let p = krate.type_by_name("Pair").unwrap().id;
    if rng.gen_bool(0.5) {
        Ty::Adt(b, GenericArgs::from_types(vec![random_goal_ty(rng, krate, depth - 1)]))
    } else {
        Ty::Adt(p, GenericArgs::from_types(vec![random_goal_ty(rng, krate, depth - 1), random_goal_ty(rng, krate, depth - 1)]))
    }
}

/// The instance a derivation proves, recomputed from the declarations.
/// `None` when some step does not check.
pub fn replay(krate: &TranslatedCrate, params: &GenericParams, r: &TraitRefKind) -> Option<(TraitDeclId, GenericArgs)> {
    match r {
        TraitRefKind::Clause(c) => {
            let c = params.trait_clauses.get(*c)?;
            Some((c.trait_id, bare(&c.args)))
        }
        TraitRefKind::ParentClause(base, i) => {
            let (t, args) = replay(krate, params, base)?;
            let p = krate.trait_decls.get(t)?.parent_clauses.get(*i as usize)?;
            let s = Substitution { args: &args, self_ref: Some(base), target: 0 };
            Some((p.trait_id, bare(&p.args.subst(&s).ok()?)))
        }
        TraitRefKind::ItemClause(base, name, i) => {
            let (t, args) = replay(krate, params, base)?;
            let b = krate.trait_decls.get(t)?.assoc_type(name)?.bounds.get(*i as usize)?;
            let s = Substitution { args: &args, self_ref: Some(base), target: 0 };
            Some((b.trait_id, bare(&b.args.subst(&s).ok()?)))
        }
        TraitRefKind::TraitImpl(id, args) => {
            let imp = krate.trait_impls.get(*id)?;
            if args.types.len() != imp.generics.types.len() || args.trait_refs.len() != imp.generics.trait_clauses.len() {
                return None;
            }
            for (clause, proof) in imp.generics.trait_clauses.iter().zip(&args.trait_refs) {
                let want = bare(&clause.args.subst(&Substitution::new(args)).ok()?);
                if replay(krate, params, proof)? != (clause.trait_id, want) {
                    return None;
                }
            }
            Some((imp.trait_id, bare(&imp.trait_args.subst(&Substitution::new(args)).ok()?)))
        }
        TraitRefKind::SelfId | TraitRefKind::Unknown(_) => None,
    }
}

fn bare(a: &GenericArgs) -> GenericArgs {
    GenericArgs { regions: Vec::new(), types: a.types.clone(), const_generics: a.const_generics.clone(), trait_refs: Vec::new() }
}

/// Every (path, instance) reachable from the declared clauses by any
/// sequence of parent / associated-type-bound steps, up to `max_depth`.
pub fn saturate(krate: &TranslatedCrate, params: &GenericParams, max_depth: usize) -> Vec<(TraitRefKind, TraitDeclId, GenericArgs)> {
    let mut all: Vec<(TraitRefKind, TraitDeclId, GenericArgs)> = params
        .trait_clauses
        .iter()
        .map(|c| (TraitRefKind::Clause(c.clause_id), c.trait_id, bare(&c.args)))
        .collect();
    let mut seen: BTreeSet<TraitRefKind> = all.iter().map(|e| e.0.clone()).collect();
    loop {
        let mut new = Vec::new();
        for (path, t, _) in &all {
            if path.depth() >= max_depth {
                continue;
            }
            let Some(decl) = krate.trait_decls.get(*t) else { continue };
            let mut steps: Vec<TraitRefKind> =
                (0..decl.parent_clauses.len()).map(|i| TraitRefKind::ParentClause(Box::new(path.clone()), i as u32)).collect();
            for a in &decl.assoc_types {
                for j in 0..a.bounds.len() {
                    steps.push(TraitRefKind::ItemClause(Box::new(path.clone()), a.name.clone(), j as u32));
                }
            }
            for s in steps {
                if seen.contains(&s) {
                    continue;
                }
                if let Some((t, args)) = replay(krate, params, &s) {
                    seen.insert(s.clone());
                    new.push((s, t, args));
                }
            }
        }
        if new.is_empty() {
            return all;
        }
        all.extend(new);
    }
}

/// `args` with every proof inside an associated type replaced by the
/// instance it proves, so that instances reached along different paths
/// compare equal.
pub fn canonical(krate: &TranslatedCrate, params: &GenericParams, args: &GenericArgs) -> GenericArgs {
    GenericArgs {
        regions: Vec::new(),
        types: args.types.iter().map(|t| canonical_ty(krate, params, t)).collect(),
        const_generics: args.const_generics.clone(),
        trait_refs: Vec::new(),
    }
}

fn canonical_ty(krate: &TranslatedCrate, params: &GenericParams, t: &Ty) -> Ty {
    match t {
        Ty::AssocType(r, name) => {
            let key = match replay(krate, params, r) {
                Some((id, a)) => format!("{id}{:?}", canonical(krate, params, &a).types),
                None => format!("{r:?}"),
            };
            Ty::AssocType(Box::new(TraitRefKind::Unknown(key)), name.clone())
        }
        Ty::Adt(id, a) => Ty::Adt(*id, canonical(krate, params, a)),
        Ty::Ref(r, t, m) => Ty::Ref(r.clone(), Box::new(canonical_ty(krate, params, t)), *m),
        Ty::Tuple(ts) => Ty::Tuple(ts.iter().map(|t| canonical_ty(krate, params, t)).collect()),
        Ty::Array(t, n) => Ty::Array(Box::new(canonical_ty(krate, params, t)), n.clone()),
        _ => t.clone(),
    }
}

/// What the exhaustive search finds for a goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivations {
    /// The goal is a known local clause; any of these paths proves it.
    Clause(Vec<TraitRefKind>),
    /// Impl-based derivations, at most two kept.
    Impls(Vec<TraitRefKind>),
}

impl Derivations {
    fn count(&self) -> usize {
        match self {
            Derivations::Clause(_) => 1,
            Derivations::Impls(v) => v.len(),
        }
    }

    fn some(&self) -> Vec<TraitRefKind> {
        match self {
            Derivations::Clause(v) => vec![v[0].clone()],
            Derivations::Impls(v) => v.clone(),
        }
    }
}

/// Enumerates derivations of `trait_id(args)` without repeating a goal along
/// a branch. Impl variables are matched by trying every subterm of the goal
/// rather than by unification.
pub fn derive_all(
    krate: &TranslatedCrate,
    known: &[(TraitRefKind, TraitDeclId, GenericArgs)],
    trait_id: TraitDeclId,
    args: &GenericArgs,
    stack: &mut Vec<(TraitDeclId, GenericArgs)>,
) -> Derivations {
    let args = bare(args);
    let hits: Vec<_> = known.iter().filter(|(_, t, a)| *t == trait_id && *a == args).map(|(p, ..)| p.clone()).collect();
    if !hits.is_empty() {
        return Derivations::Clause(hits);
    }
    if stack.contains(&(trait_id, args.clone())) {
        return Derivations::Impls(Vec::new());
    }
    stack.push((trait_id, args.clone()));
    let mut subterms = Vec::new();
    for t in &args.types {
        collect_subterms(t, &mut subterms);
    }
    let mut out = Vec::new();
    for imp in krate.trait_impls.iter().filter(|i| i.trait_id == trait_id) {
        let nvars = imp.generics.types.len();
        let mut choice = vec![0usize; nvars];
        'assign: loop {
            let inst = GenericArgs::from_types(choice.iter().map(|&c| subterms[c].clone()).collect());
            let head: Option<Vec<Ty>> = imp.trait_args.types.iter().map(|t| substitute(t, &inst).ok()).collect();
            if head.as_ref() == Some(&args.types) {
                let mut partial: Vec<Vec<TraitRefKind>> = vec![Vec::new()];
                for clause in imp.generics.trait_clauses.iter() {
                    let Ok(sub) = clause.args.subst(&Substitution::new(&inst)) else {
                        partial.clear();
                        break;
                    };
                    let d = derive_all(krate, known, clause.trait_id, &sub, stack);
                    let mut next = Vec::new();
                    for p in &partial {
                        for r in d.some() {
                            let mut p = p.clone();
                            p.push(r);
                            next.push(p);
                        }
                    }
                    if d.count() > 1 {
                        next.extend(partial.iter().cloned().map(|mut p| {
                            p.push(TraitRefKind::Unknown("second".into()));
                            p
                        }));
                    }
                    next.truncate(2);
                    partial = next;
                }
                for refs in partial {
                    out.push(TraitRefKind::TraitImpl(imp.id, GenericArgs { trait_refs: refs, ..inst.clone() }));
                }
            }
            for slot in choice.iter_mut() {
                *slot += 1;
                if *slot < subterms.len() {
                    continue 'assign;
                }
                *slot = 0;
            }
            break;
        }
    }
    stack.pop();
    out.truncate(2);
    Derivations::Impls(out)
}

fn collect_subterms(t: &Ty, out: &mut Vec<Ty>) {
    if !out.contains(t) {
        out.push(t.clone());
    }
    if let Ty::Adt(_, a) = t {
        for t in &a.types {
            collect_subterms(t, out);
        }
    }
}

/// Rewrites the first associated type redex found anywhere in the tree,
/// restarting from the root each time. `None` past `cap` rewrites.
pub fn rewrite_to_normal(krate: &TranslatedCrate, params: &GenericParams, ty: &Ty, cap: usize) -> Option<Ty> {
    let mut cur = ty.clone();
    for _ in 0..=cap {
        match rewrite_once(krate, params, &cur) {
            Some(next) => cur = next,
            None => return Some(cur),
        }
    }
    None
}

fn redex(krate: &TranslatedCrate, params: &GenericParams, r: &TraitRefKind, name: &str) -> Option<Ty> {
    for c in &params.trait_type_constraints {
        if c.trait_ref == *r && c.name == name {
            return Some(c.ty.clone());
        }
    }
    if let TraitRefKind::TraitImpl(id, args) = r {
        let a = krate.trait_impls.get(*id)?.assoc_types.iter().find(|a| a.name == name)?;
        return substitute(&a.ty, args).ok();
    }
    None
}

fn rewrite_once(krate: &TranslatedCrate, params: &GenericParams, ty: &Ty) -> Option<Ty> {
    match ty {
        Ty::AssocType(r, name) => {
            if let Some(r2) = rewrite_ref(krate, params, r) {
                return Some(Ty::AssocType(Box::new(r2), name.clone()));
            }
            redex(krate, params, r, name)
        }
        Ty::Adt(id, a) => rewrite_args(krate, params, a).map(|a| Ty::Adt(*id, a)),
        Ty::Ref(r, t, m) => rewrite_once(krate, params, t).map(|t| Ty::Ref(r.clone(), Box::new(t), *m)),
        Ty::Tuple(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if let Some(t) = rewrite_once(krate, params, t) {
                    let mut ts = ts.clone();
                    ts[i] = t;
                    return Some(Ty::Tuple(ts));
                }
            }
            None
        }
        Ty::Array(t, n) => rewrite_once(krate, params, t).map(|t| Ty::Array(Box::new(t), n.clone())),
        _ => None,
    }
}

fn rewrite_args(krate: &TranslatedCrate, params: &GenericParams, a: &GenericArgs) -> Option<GenericArgs> {
    for (i, t) in a.types.iter().enumerate() {
        if let Some(t) = rewrite_once(krate, params, t) {
            let mut a = a.clone();
            a.types[i] = t;
            return Some(a);
        }
    }
    for (i, r) in a.trait_refs.iter().enumerate() {
        if let Some(r) = rewrite_ref(krate, params, r) {
            let mut a = a.clone();
            a.trait_refs[i] = r;
            return Some(a);
        }
    }
    None
}

fn rewrite_ref(krate: &TranslatedCrate, params: &GenericParams, r: &TraitRefKind) -> Option<TraitRefKind> {
    match r {
        TraitRefKind::TraitImpl(id, a) => rewrite_args(krate, params, a).map(|a| TraitRefKind::TraitImpl(*id, a)),
        TraitRefKind::ParentClause(b, i) => rewrite_ref(krate, params, b).map(|b| TraitRefKind::ParentClause(Box::new(b), *i)),
        TraitRefKind::ItemClause(b, n, i) => {
            rewrite_ref(krate, params, b).map(|b| TraitRefKind::ItemClause(Box::new(b), n.clone(), *i))
        }
        _ => None,
    }
}
