use charon_lite::frontend::parse_str;
use charon_lite::ir::ullbc::TerminatorKind;
use charon_lite::ir::*;
use charon_lite::traits::*;

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn first_call(k: &TranslatedCrate, fun: &str) -> FnPtr {
    let body = k.fun_by_name(fun).unwrap().body.as_ullbc().unwrap();
    for b in body.blocks.iter() {
        if let TerminatorKind::Call { call: Call { func: FnOperand::Regular(p), .. }, .. } = &b.terminator.kind {
            return p.clone();
        }
    }
    panic!("no call in {fun}")
}

#[test]
fn clone_vec_resolves_through_impl_and_clause() {
    let k = parse_str("clone_vec", &corpus("clone_vec.mirl")).unwrap();
    let (k, diags) = resolve_calls(k);
    assert!(diags.is_empty(), "{diags:?}");
    let ptr = first_call(&k, "clone_vec");
    let imp = k.impl_by_name("CloneVec").unwrap().id;
    let FunIdOrTraitMethodRef::TraitMethod(tref, name) = &ptr.func else { panic!("{ptr:?}") };
    assert_eq!(name, "clone");
    assert_eq!(
        tref.kind,
        TraitRefKind::TraitImpl(
            imp,
            GenericArgs { types: vec![Ty::var(0)], trait_refs: vec![TraitRefKind::Clause(TraitClauseId(0))], ..GenericArgs::default() }
        )
    );
    assert!(ptr.generics.types.is_empty());
}

#[test]
fn h_truncates_to_method_generics() {
    let k = parse_str("h", &corpus("h.mirl")).unwrap();
    let (k, diags) = resolve_calls(k);
    assert!(diags.is_empty(), "{diags:?}");
    let ptr = first_call(&k, "h");
    let FunIdOrTraitMethodRef::TraitMethod(tref, _) = &ptr.func else { panic!() };
    assert_eq!(tref.kind, TraitRefKind::Clause(TraitClauseId(0)));
    assert_eq!(tref.args.types, vec![Ty::var(0), Ty::var(1)]);
    assert_eq!(ptr.generics.types, vec![Ty::var(2)]);
    let g = first_call(&k, "g");
    assert!(matches!(g.func, FunIdOrTraitMethodRef::Fun(_)));
    assert_eq!(g.generics.types, vec![Ty::var(0)]);
}

#[test]
fn parent_clause_is_implied() {
    let k = parse_str("t", "trait PartialEq {}\ntrait Ord: PartialEq {}\nfn f<T>() where T: Ord;").unwrap();
    let g = &k.fun_by_name("f").unwrap().signature.generics;
    let (closure, diags) = elaborate_implied_clauses(g, &k);
    assert!(diags.is_empty());
    let eq = k.trait_by_name("PartialEq").unwrap().id;
    let hit = closure.iter().find(|c| c.trait_id == eq).unwrap();
    assert_eq!(hit.path, TraitRefKind::ParentClause(Box::new(TraitRefKind::Clause(TraitClauseId(0))), 0));
    assert_eq!(hit.args.types, vec![Ty::var(0)]);
}

#[test]
fn item_clause_is_implied() {
    let text = "trait Iterator {}\ntrait IntoIterator { type IntoIter: Iterator; }\nfn f<I>() where I: IntoIterator;";
    let k = parse_str("t", text).unwrap();
    let g = &k.fun_by_name("f").unwrap().signature.generics;
    let (closure, _) = elaborate_implied_clauses(g, &k);
    let it = k.trait_by_name("Iterator").unwrap().id;
    let c0 = TraitRefKind::Clause(TraitClauseId(0));
    let hit = closure.iter().find(|c| c.trait_id == it).unwrap();
    assert_eq!(hit.path, TraitRefKind::ItemClause(Box::new(c0.clone()), "IntoIter".into(), 0));
    assert_eq!(hit.args.types, vec![Ty::AssocType(Box::new(c0), "IntoIter".into())]);
}

#[test]
fn runaway_elaboration_is_cut() {
    let k = parse_str("t", "trait Deep { type A: Deep; }\nfn f<T>() where T: Deep;").unwrap();
    let g = &k.fun_by_name("f").unwrap().signature.generics;
    let (closure, diags) = elaborate_implied_clauses(g, &k);
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagCode::ClauseDepthExceeded);
    assert_eq!(closure.len(), MAX_CLAUSE_DEPTH);
}

#[test]
fn direct_clause_hit() {
    let k = parse_str("t", "trait Clone {}\nfn f<T>() where T: Clone;").unwrap();
    let g = &k.fun_by_name("f").unwrap().signature.generics;
    let env = TraitEnv::new(&k, g);
    let r = resolve_trait_ref(&env, TraitDeclId(0), &GenericArgs::from_types(vec![Ty::var(0)])).unwrap();
    assert_eq!(r, TraitRefKind::Clause(TraitClauseId(0)));
}

#[test]
fn overlapping_impls_are_ambiguous() {
    let text = "type Box<X> = opaque;\ntrait C {}\nimpl A<X>: C for Box<X> {}\nimpl B: C for Box<u8> {}\nfn f();";
    let k = parse_str("t", text).unwrap();
    let g = &k.fun_by_name("f").unwrap().signature.generics;
    let env = TraitEnv::new(&k, g);
    let b = k.type_by_name("Box").unwrap().id;
    let goal = GenericArgs::from_types(vec![Ty::Adt(b, GenericArgs::from_types(vec![Ty::Scalar(ScalarKind::U8)]))]);
    let e = resolve_trait_ref(&env, TraitDeclId(0), &goal).unwrap_err();
    assert_eq!(e.code(), DiagCode::AmbiguousInstance);
    let ResolveError::Ambiguous { candidates, .. } = e else { panic!() };
    assert_eq!(candidates, vec!["A".to_string(), "B".to_string()]);
    let goal = GenericArgs::from_types(vec![Ty::Bool]);
    assert_eq!(resolve_trait_ref(&env, TraitDeclId(0), &goal).unwrap_err().code(), DiagCode::NoInstance);
}

#[test]
fn unsatisfiable_method_call_is_reported_and_kept() {
    let text = "trait Show { fn show(x: &Self); }\nfn f(x: &bool) {\n    let r: ();\n    bb0: {\n        r = call Show::show::<bool>(copy x) -> bb1;\n    }\n    bb1: {\n        ret = use const ();\n        return;\n    }\n}\n";
    let k = parse_str("t", text).unwrap();
    let (k, diags) = resolve_calls(k);
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagCode::NoInstance);
    assert!(diags[0].span.is_some());
    let ptr = first_call(&k, "f");
    let FunIdOrTraitMethodRef::TraitMethod(tref, _) = &ptr.func else { panic!() };
    assert!(matches!(tref.kind, TraitRefKind::Unknown(_)));
}

#[test]
fn split_examples() {
    let k = parse_str("h", &corpus("h.mirl")).unwrap();
    let tr = &k.trait_by_name("Trait").unwrap().generics;
    let full = GenericArgs::from_types(vec![Ty::var(0), Ty::var(1), Ty::var(2)]);
    let (c, m) = split_method_generics(&full, tr).unwrap();
    assert_eq!(c.types, vec![Ty::var(0), Ty::var(1)]);
    assert_eq!(m.types, vec![Ty::var(2)]);
    let (c, m) = split_method_generics(&full, &GenericParams::empty()).unwrap();
    assert!(c.types.is_empty());
    assert_eq!(m, full);
    let short = GenericArgs::from_types(vec![Ty::Bool]);
    assert_eq!(split_method_generics(&short, tr).unwrap_err().expected, 2);
}

#[test]
fn constraint_normalizes() {
    let k = parse_str("t", "type Vec<T> = opaque;\ntrait Iter { type Item; }\nfn f<T>() where T: Iter;").unwrap();
    let mut g = k.fun_by_name("f").unwrap().signature.generics.clone();
    let item = Ty::AssocType(Box::new(TraitRefKind::Clause(TraitClauseId(0))), "Item".into());
    g.trait_type_constraints.push(TraitTypeConstraint {
        trait_ref: TraitRefKind::Clause(TraitClauseId(0)),
        name: "Item".into(),
        ty: Ty::Scalar(ScalarKind::U32),
    });
    assert_eq!(normalize_assoc_types(&item, &g, &k).unwrap(), Ty::Scalar(ScalarKind::U32));
    let v = k.type_by_name("Vec").unwrap().id;
    let vi = Ty::Adt(v, GenericArgs::from_types(vec![item.clone()]));
    assert_eq!(
        normalize_assoc_types(&vi, &g, &k).unwrap(),
        Ty::Adt(v, GenericArgs::from_types(vec![Ty::Scalar(ScalarKind::U32)]))
    );
    assert_eq!(normalize_assoc_types(&Ty::Bool, &g, &k).unwrap(), Ty::Bool);
    // T::Item = Vec<T::Item> never settles
    g.trait_type_constraints[0].ty = vi;
    assert_eq!(normalize_assoc_types(&item, &g, &k).unwrap_err().code, DiagCode::NormalizationDiverged);
}

mod random {
    use super::*;
    use charon_lite_testkit::traits::*;
    use charon_lite_testkit::rng;
    use rand::Rng;
    use std::collections::BTreeSet;

    fn env_of(seed: u64) -> (TranslatedCrate, rand::rngs::StdRng) {
        let mut r = rng(seed);
        let text = random_trait_env(&mut r);
        (parse_str("env", &text).unwrap_or_else(|e| panic!("{e}\n{text}")), r)
    }

    #[test]
    fn elaboration_matches_saturation() {
        let mut implied = 0;
        for seed in 0..300 {
            let (k, _) = env_of(seed);
            let g = &k.fun_by_name("env").unwrap().signature.generics;
            let (closure, diags) = elaborate_implied_clauses(g, &k);
            assert!(diags.is_empty());
            for c in &closure {
                let (t, a) = replay(&k, g, &c.path).expect("closure path replays");
                assert_eq!((t, a.types), (c.trait_id, c.args.types.clone()));
            }
            let got: BTreeSet<_> = closure.iter().map(|c| (c.trait_id, canonical(&k, g, &c.args))).collect();
            let want: BTreeSet<_> = saturate(&k, g, 16).into_iter().map(|(_, t, a)| (t, canonical(&k, g, &a))).collect();
            assert_eq!(got, want, "seed {seed}");
            implied += closure.iter().filter(|c| !matches!(c.path, TraitRefKind::Clause(_))).count();
        }
        assert!(implied > 100, "{implied}");
    }

    #[test]
    fn solver_agrees_with_exhaustive_search() {
        let (mut solved, mut ambiguous, mut none) = (0, 0, 0);
        for seed in 0..300 {
            let (k, mut r) = env_of(1000 + seed);
            let g = &k.fun_by_name("env").unwrap().signature.generics;
            let env = TraitEnv::new(&k, g);
            let known = saturate(&k, g, 16);
            for _ in 0..3 {
                let t = TraitDeclId(r.gen_range(0..k.trait_decls.len()) as u32);
                let goal = GenericArgs::from_types(vec![random_goal_ty(&mut r, &k, 2)]);
                let oracle = derive_all(&k, &known, t, &goal, &mut Vec::new());
                let got = resolve_trait_ref(&env, t, &goal);
                match (&oracle, &got) {
                    (Derivations::Clause(paths), Ok(p)) => {
                        assert!(paths.contains(p));
                        solved += 1;
                    }
                    (Derivations::Impls(ds), Ok(p)) if ds.len() == 1 => {
                        assert_eq!(replay(&k, g, p).unwrap(), (t, goal.clone()));
                        assert_eq!(&ds[0], p, "seed {seed}");
                        solved += 1;
                    }
                    (Derivations::Impls(ds), Err(ResolveError::NoInstance { .. })) if ds.is_empty() => none += 1,
                    (Derivations::Impls(ds), Err(ResolveError::Ambiguous { .. })) if ds.len() > 1 => ambiguous += 1,
                    _ => panic!("seed {seed}: oracle {oracle:?} solver {got:?}"),
                }
            }
        }
        assert!(solved > 100 && none > 100 && ambiguous > 5, "{solved} {none} {ambiguous}");
    }

    #[test]
    fn split_inverts_concat() {
        let mut r = rng(7);
        for _ in 0..200 {
            let mk = |r: &mut rand::rngs::StdRng, n: usize| (0..n).map(|i| Ty::var(r.gen_range(0..4) + i as u32)).collect::<Vec<_>>();
            let (na, nb) = (r.gen_range(0..4), r.gen_range(0..4));
            let a = GenericArgs::from_types(mk(&mut r, na));
            let b = GenericArgs::from_types(mk(&mut r, nb));
            let mut params = GenericParams::empty();
            for i in 0..na {
                params.types.push(TypeVarDecl { index: i as u32, name: format!("T{i}") });
            }
            let full = GenericArgs::from_types(a.types.iter().chain(&b.types).cloned().collect());
            assert_eq!(split_method_generics(&full, &params).unwrap(), (a, b));
        }
    }

    fn assoc(c: u32) -> Ty {
        Ty::AssocType(Box::new(TraitRefKind::Clause(TraitClauseId(c))), "A".into())
    }

    fn random_ty(r: &mut rand::rngs::StdRng, k: &TranslatedCrate, depth: u32, clauses: u32) -> Ty {
        if depth > 0 && r.gen_bool(0.3) {
            let b = k.type_by_name("Box").unwrap().id;
            return Ty::Adt(b, GenericArgs::from_types(vec![random_ty(r, k, depth - 1, clauses)]));
        }
        if depth > 0 && r.gen_bool(0.2) {
            return Ty::Tuple((0..2).map(|_| random_ty(r, k, depth - 1, clauses)).collect());
        }
        match r.gen_range(0..3) {
            0 if clauses > 0 => assoc(r.gen_range(0..clauses)),
            1 => Ty::var(0),
            _ => Ty::Bool,
        }
    }

    #[test]
    fn normalization_matches_rewriter() {
        let k = parse_str("t", "type Box<X> = opaque;\ntrait T { type A; }\nfn f<P>() where P: T, P: T, P: T, P: T;").unwrap();
        let mut r = rng(11);
        let mut changed = 0;
        for _ in 0..300 {
            let mut g = k.fun_by_name("f").unwrap().signature.generics.clone();
            // clause i may only be equated to types mentioning later clauses
            for i in 0..4u32 {
                if r.gen_bool(0.6) {
                    let ty = match random_ty(&mut r, &k, 2, 4 - i - 1) {
                        Ty::AssocType(b, n) => match &*b {
                            TraitRefKind::Clause(c) => Ty::AssocType(Box::new(TraitRefKind::Clause(TraitClauseId(c.0 + i + 1))), n),
                            _ => unreachable!(),
                        },
                        t => shift_clauses(&t, i + 1),
                    };
                    g.trait_type_constraints.push(TraitTypeConstraint { trait_ref: TraitRefKind::Clause(TraitClauseId(i)), name: "A".into(), ty });
                }
            }
            let ty = random_ty(&mut r, &k, 3, 4);
            let got = normalize_assoc_types(&ty, &g, &k).unwrap();
            assert_eq!(Some(got.clone()), rewrite_to_normal(&k, &g, &ty, MAX_REWRITES));
            assert_eq!(normalize_assoc_types(&got, &g, &k).unwrap(), got);
            changed += (got != ty) as usize;
        }
        assert!(changed > 50, "{changed}");
    }

    fn shift_clauses(t: &Ty, by: u32) -> Ty {
        match t {
            Ty::AssocType(b, n) => match &**b {
                TraitRefKind::Clause(c) => Ty::AssocType(Box::new(TraitRefKind::Clause(TraitClauseId(c.0 + by))), n.clone()),
                _ => t.clone(),
            },
            Ty::Adt(id, a) => Ty::Adt(*id, GenericArgs::from_types(a.types.iter().map(|t| shift_clauses(t, by)).collect())),
            Ty::Tuple(ts) => Ty::Tuple(ts.iter().map(|t| shift_clauses(t, by)).collect()),
            _ => t.clone(),
        }
    }
}
