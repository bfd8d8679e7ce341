use std::collections::{BTreeMap, BTreeSet};

use charon_lite::frontend::{parse_str, pretty_print};
use charon_lite::interp::{interp_fun, Value};
use charon_lite::ir::ullbc::{StatementKind, TerminatorKind};
use charon_lite::ir::*;
use charon_lite::passes::*;
use charon_lite_testkit::graphs::brute_sccs;
use charon_lite_testkit::programs::{random_program, ProgramShape};
use charon_lite_testkit::rng;
use rand::Rng;

const FUEL: u64 = 20_000;

fn body_of<'a>(k: &'a TranslatedCrate, name: &str) -> &'a ullbc::UllbcBody {
    k.fun_by_name(name).unwrap().body.as_ullbc().unwrap()
}

fn statement_count(b: &ullbc::UllbcBody) -> usize {
    b.blocks.iter().map(|b| b.statements.len()).sum()
}

#[test]
fn checked_add_is_fused() {
    let text = "fn add(a: u32, b: u32) -> u32 {
        let t: (u32, bool);
        let x: u32;
        bb0: { t = CheckedAdd(copy a, copy b); assert(copy t.f1 == false) -> bb1; }
        bb1: { x = use copy t.f0; ret = use copy x; return; }
    }";
    let mut k = parse_str("fuse", text).unwrap();
    let Body::Ullbc(b) = &mut k.fun_decls[FunDeclId(0)].body else { panic!() };
    assert!(fuse_checked_arith(b));
    assert_eq!(b.blocks.len(), 1);
    let first = &b.blocks[BlockId(0)].statements[0];
    assert!(matches!(&first.kind, StatementKind::Assign(p, Rvalue::BinOp(BinOp::Add, _, _)) if b.locals.vars[p.local].name == "x"));
    assert!(b.locals.by_name("t").is_none());
    assert!(!fuse_checked_arith(b));
}

#[test]
fn panic_calls_become_aborts() {
    let text = "fn core::panicking::panic();
    fn f(c: bool) -> u8 {
        let u: ();
        bb0: { switchInt(copy c) -> [0 => bb1, otherwise => bb2]; }
        bb1: { u = call core::panicking::panic() -> bb3; }
        bb3: { unreachable; }
        bb2: { ret = use const 1u8; return; }
    }";
    let k = parse_str("p", text).unwrap();
    let panics: Vec<String> = DEFAULT_PANIC_FNS.iter().map(|s| s.to_string()).collect();
    let mut b = body_of(&k, "f").clone();
    assert!(unify_panics(&k, &panics, &mut b));
    assert_eq!(b.blocks.len(), 3);
    assert!(matches!(b.blocks[BlockId(1)].terminator.kind, TerminatorKind::Abort(AbortKind::Panic)));
    assert!(!unify_panics(&k, &panics, &mut b));
}

const OPTION: &str = "type Option<T> = enum { None = 0, Some(T) = 1 };
fn get(o: Option<u32>) -> u32 {
    let d: i64;
    bb0: { d = discriminant(o); switchInt(copy d) -> [0 => bb1, 1 => bb2, otherwise => bb3]; }
    bb1: { ret = use const 0u32; return; }
    bb2: { ret = use copy o.as Some.f0; return; }
    bb3: { unreachable; }
}";

#[test]
fn discriminant_switch_becomes_match() {
    let k = parse_str("m", OPTION).unwrap();
    let mut b = body_of(&k, "get").clone();
    assert!(reconstruct_matches(&k, &mut b).unwrap());
    let TerminatorKind::Match { cases, otherwise, .. } = &b.blocks[BlockId(0)].terminator.kind else {
        panic!("{:?}", b.blocks[BlockId(0)].terminator)
    };
    assert_eq!(cases.len(), 2);
    assert_eq!(*otherwise, None);
    assert_eq!(statement_count(&b), 2);
    assert!(b.locals.by_name("d").is_none());
    assert!(!reconstruct_matches(&k, &mut b).unwrap());
}

#[test]
fn unknown_discriminant_is_reported() {
    let k = parse_str("m", &OPTION.replace("1 => bb2", "9 => bb2")).unwrap();
    let mut b = body_of(&k, "get").clone();
    let before = b.clone();
    let d = reconstruct_matches(&k, &mut b).unwrap_err();
    assert_eq!(d.code, DiagCode::BadDiscriminant);
    assert!(d.span.is_some());
    assert_eq!(b, before);
}

#[test]
fn decoding_examples() {
    let k = parse_str("c", "type Option<T> = enum { None = 0, Some(T) = 1 };").unwrap();
    let c = decode_constant(&k, &Ty::Scalar(ScalarKind::U32), &[0x2A, 0, 0, 0]).unwrap();
    assert_eq!(c, ConstantValue::scalar(ScalarValue::wrapping(ScalarKind::U32, 42)));
    let opt = Ty::Adt(TypeDeclId(0), GenericArgs::from_types(vec![Ty::Scalar(ScalarKind::U32)]));
    let c = decode_constant(&k, &opt, &[0x01, 0x2A, 0, 0, 0]).unwrap();
    assert_eq!(c.kind, ConstantKind::Adt(Some(VariantId(1)), vec![ConstantValue::scalar(ScalarValue::wrapping(ScalarKind::U32, 42))]));
    assert_eq!(encode_constant(&c).unwrap(), vec![1, 0x2A, 0, 0, 0]);
    assert!(decode_constant(&k, &opt, &[0x07, 0, 0, 0, 0]).is_err());
    assert!(decode_constant(&k, &Ty::Scalar(ScalarKind::U32), &[1, 2, 3]).is_err());
    assert!(decode_constant(&k, &Ty::Bool, &[2]).is_err());
}

#[test]
fn undecodable_constant_makes_body_opaque() {
    let text = "fn good() -> u32 { bb0: { ret = use const raw<u32>(\"2A000000\"); return; } }
    fn bad() -> u32 { bb0: { ret = use const raw<u32>(\"2A00\"); return; } }";
    let k = parse_str("r", text).unwrap();
    let (k, d) = run_pipeline(k, &PassConfig::default());
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].code, DiagCode::DecodeError);
    assert_eq!(d[0].item.as_deref(), Some("bad"));
    assert!(k.fun_by_name("bad").unwrap().body.is_opaque());
    let good = body_of(&k, "good");
    assert!(pretty_print(&k).contains("ret = use const 42u32;"), "{good:?}");
}

#[test]
fn mutual_recursion_forms_one_group() {
    let text = "fn even(n: u32) -> bool { let r: bool; bb0: { r = call odd(copy n) -> bb1; } bb1: { ret = use copy r; return; } }
    fn odd(n: u32) -> bool { let r: bool; bb0: { r = call even(copy n) -> bb1; } bb1: { ret = use copy r; return; } }
    fn a() { bb0: { ret = use const (); return; } }
    fn b() { bb0: { ret = use const (); return; } }";
    let (k, _) = run_pipeline(parse_str("g", text).unwrap(), &PassConfig::default());
    let groups = &k.decl_groups;
    assert_eq!(groups.len(), 3);
    assert_eq!(groups[0], DeclGroup::Recursive(vec![AnyDeclId::Fun(FunDeclId(0)), AnyDeclId::Fun(FunDeclId(1))]));
    assert_eq!(groups[1], DeclGroup::NonRecursive(AnyDeclId::Fun(FunDeclId(2))));
    assert_eq!(groups[2], DeclGroup::NonRecursive(AnyDeclId::Fun(FunDeclId(3))));
}

#[test]
fn sccs_match_brute_force() {
    let mut r = rng(10);
    for _ in 0..200 {
        let n = r.gen_range(1..10);
        let nodes: Vec<AnyDeclId> = (0..n).map(|i| AnyDeclId::Fun(FunDeclId(i as u32))).collect();
        let mut succ = vec![Vec::new(); n];
        let mut graph: BTreeMap<AnyDeclId, BTreeSet<AnyDeclId>> = BTreeMap::new();
        for u in 0..n {
            for _ in 0..r.gen_range(0..3) {
                let v = r.gen_range(0..n);
                succ[u].push(v);
                graph.entry(nodes[u]).or_default().insert(nodes[v]);
            }
        }
        let ours: BTreeSet<Vec<AnyDeclId>> = sccs(&nodes, &graph).into_iter().collect();
        let brute: BTreeSet<Vec<AnyDeclId>> =
            brute_sccs(&succ).into_iter().map(|c| c.into_iter().map(|i| nodes[i]).collect()).collect();
        assert_eq!(ours, brute);
        // Every dependency points into the same or an earlier group.
        let groups = decl_groups_of(&nodes, &graph);
        let pos: BTreeMap<AnyDeclId, usize> =
            groups.iter().enumerate().flat_map(|(i, g)| g.members().iter().map(move |m| (*m, i))).collect();
        for (u, vs) in &graph {
            for v in vs {
                assert!(pos[v] <= pos[u]);
            }
        }
    }
}

fn i32v(x: i32) -> Value {
    Value::Scalar(ScalarValue::wrapping(ScalarKind::I32, x as i128))
}

#[test]
fn each_pass_preserves_semantics_and_is_idempotent() {
    let mut r = rng(11);
    let single = |f: fn(&mut PassConfig)| {
        let mut c = PassConfig::none();
        f(&mut c);
        c
    };
    let configs = [
        single(|c| c.unify_panics = true),
        single(|c| c.fuse_checked_arith = true),
        single(|c| c.reconstruct_matches = true),
        single(|c| c.decode_constants = true),
        PassConfig::default(),
    ];
    let mut changed = [0usize; 5];
    for _ in 0..40 {
        let text = random_program(&mut r, ProgramShape::with_patterns());
        let k = parse_str("gen", &text).unwrap();
        let f = k.fun_by_name("f").unwrap().id;
        for (i, config) in configs.iter().enumerate() {
            let (once, d) = run_pipeline(k.clone(), config);
            assert!(d.is_empty());
            changed[i] += (once.fun_decls[f] != k.fun_decls[f]) as usize;
            let (twice, _) = run_pipeline(once.clone(), config);
            assert_eq!(once, twice, "{config:?}\n{text}");
            for _ in 0..5 {
                let args = vec![i32v(r.gen_range(-50..50)), i32v(r.gen_range(-50..50))];
                let a = interp_fun(&k, f, args.clone(), FUEL);
                let b = interp_fun(&once, f, args.clone(), FUEL);
                assert!(a.is_ok(), "{a:?}");
                assert_eq!(a, b, "{config:?} on {args:?}\n{text}");
            }
        }
    }
    assert!(changed.iter().all(|&c| c >= 5), "{changed:?}");
}
