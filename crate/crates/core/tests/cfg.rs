use std::collections::BTreeSet;

use charon_lite::cfg::dom::dominators;
use charon_lite::cfg::{find_loops, restructure, restructure_crate, validate_llbc, PostDominators};
use charon_lite::frontend::parse_str;
use charon_lite::interp::{interp_fun, Outcome, Value};
use charon_lite::ir::llbc::{StatementKind, Switch};
use charon_lite::ir::*;
use charon_lite::passes::{run_pipeline, PassConfig};
use charon_lite_testkit::graphs::{brute_idoms, brute_irreducible, brute_loops, random_cfg};
use charon_lite_testkit::programs::{random_program, ProgramShape};
use charon_lite_testkit::rng;
use rand::Rng;

const FUEL: u64 = 20_000;

fn i32v(x: i32) -> Value {
    Value::Scalar(ScalarValue::wrapping(ScalarKind::I32, x as i128))
}

#[test]
fn dominators_match_brute_force() {
    let mut r = rng(1);
    for _ in 0..300 {
        let n = r.gen_range(1..=12);
        let g = random_cfg(&mut r, n);
        assert_eq!(dominators(&g, 0), brute_idoms(&g), "{g:?}");
    }
}

#[test]
fn loops_match_brute_force() {
    let mut r = rng(2);
    let mut reducible = 0;
    for _ in 0..400 {
        let n = r.gen_range(1..=8);
        let g = random_cfg(&mut r, n);
        let found = find_loops(&g, &dominators(&g, 0));
        assert_eq!(found.is_err(), brute_irreducible(&g), "{g:?}");
        if let Ok(forest) = found {
            reducible += 1;
            let mut ours: Vec<(usize, BTreeSet<usize>)> =
                forest.loops.iter().map(|l| (l.header, l.body.clone())).collect();
            ours.sort();
            assert_eq!(ours, brute_loops(&g), "{g:?}");
            for l in &forest.loops {
                if let Some(p) = l.parent {
                    assert!(forest.loops[p].body.is_superset(&l.body));
                }
            }
        }
    }
    assert!(reducible > 100);
}

#[test]
fn post_dominators_of_diamond() {
    let g = vec![vec![1, 2], vec![3], vec![3], vec![]];
    let pd = PostDominators::from_succ(&g);
    assert_eq!(pd.ipdom(0), Some(3));
    assert_eq!(pd.ipdom(3), None);
}

const DIAMOND: &str = "
fn max(a: i32, b: i32) -> i32 {
    let c: bool;
    let m: i32;
    bb0: {
        c = Lt(copy a, copy b);
        switchInt(copy c) -> [0 => bb2, otherwise => bb1];
    }
    bb1: {
        m = use copy b;
        goto bb3;
    }
    bb2: {
        m = use copy a;
        goto bb3;
    }
    bb3: {
        ret = use copy m;
        return;
    }
}
";

#[test]
fn diamond_becomes_if_then_tail() {
    let k = parse_str("d", DIAMOND).unwrap();
    let body = k.fun_decls[FunDeclId(0)].body.as_ullbc().unwrap();
    let l = restructure(&k, body).unwrap();
    let kinds: Vec<&StatementKind> = l.body.statements.iter().map(|s| &s.kind).collect();
    assert!(matches!(kinds[0], StatementKind::Assign(..)));
    assert!(matches!(kinds[1], StatementKind::Switch(Switch::If(..))));
    assert!(matches!(kinds[2], StatementKind::Assign(..)));
    assert!(matches!(kinds[3], StatementKind::Return));
    let mut loops = 0;
    l.body.visit_statements(&mut |s| loops += matches!(s.kind, StatementKind::Loop(_)) as usize);
    assert_eq!(loops, 0);
    assert!(validate_llbc(&l).is_empty());
}

#[test]
fn irreducible_body_is_rejected() {
    let text = "
fn f(c: bool) {
    bb0: { switchInt(copy c) -> [0 => bb1, otherwise => bb2]; }
    bb1: { goto bb2; }
    bb2: { goto bb1; }
}";
    let k = parse_str("irr", text).unwrap();
    let body = k.fun_decls[FunDeclId(0)].body.as_ullbc().unwrap();
    assert_eq!(restructure(&k, body).unwrap_err().code, DiagCode::IrreducibleCfg);
    let (k, d) = restructure_crate(k);
    assert!(k.fun_decls[FunDeclId(0)].body.is_opaque());
    assert_eq!(d.len(), 1);
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn interpreter_examples() {
    let k = parse_str("seven", "fn seven() -> u32 { bb0: { ret = use const 7u32; return; } }").unwrap();
    let seven = ScalarValue::wrapping(ScalarKind::U32, 7);
    assert_eq!(interp_fun(&k, FunDeclId(0), vec![], FUEL), Ok(Outcome::Returned(Value::Scalar(seven))));
    let (l, _) = restructure_crate(k);
    assert_eq!(interp_fun(&l, FunDeclId(0), vec![], FUEL), Ok(Outcome::Returned(Value::Scalar(seven))));

    let text = "fn inc(x: u8) -> u8 {
        let t: (u8, bool);
        bb0: { t = CheckedAdd(copy x, const 1u8); assert(copy t.f1 == false) -> bb1; }
        bb1: { ret = use copy t.f0; return; }
    }";
    let k = parse_str("inc", text).unwrap();
    let arg = vec![Value::Scalar(ScalarValue::wrapping(ScalarKind::U8, 255))];
    assert_eq!(interp_fun(&k, FunDeclId(0), arg.clone(), FUEL), Ok(Outcome::Aborted(AbortKind::Panic)));
    let (l, _) = restructure_crate(k);
    assert_eq!(interp_fun(&l, FunDeclId(0), arg, FUEL), Ok(Outcome::Aborted(AbortKind::Panic)));

    let k = parse_str("factorial", &corpus("factorial.mirl")).unwrap();
    let five = vec![Value::Scalar(ScalarValue::wrapping(ScalarKind::U32, 5))];
    let expect = Ok(Outcome::Returned(Value::Scalar(ScalarValue::wrapping(ScalarKind::U32, 120))));
    assert_eq!(interp_fun(&k, FunDeclId(0), five.clone(), FUEL), expect);
    let (l, _) = restructure_crate(k);
    assert_eq!(interp_fun(&l, FunDeclId(0), five, FUEL), expect);
}

#[test]
fn use_after_move_is_an_error() {
    let text = "fn f(x: (u8, u8)) -> (u8, u8) {
        let y: (u8, u8);
        bb0: { y = use move x; ret = use copy x; return; }
    }";
    let k = parse_str("m", text).unwrap();
    let arg = Value::Adt(None, vec![Value::Scalar(ScalarValue::wrapping(ScalarKind::U8, 1)); 2]);
    let r = interp_fun(&k, FunDeclId(0), vec![arg], FUEL);
    assert!(matches!(r, Err(charon_lite::interp::InterpError::UseAfterMove(_))), "{r:?}");
}

#[test]
fn random_programs_agree_after_restructuring() {
    let mut r = rng(3);
    for i in 0..60 {
        let text = random_program(&mut r, ProgramShape::default());
        let k = parse_str("gen", &text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        let f = k.fun_by_name("f").unwrap().id;
        let (l, d) = restructure_crate(k.clone());
        assert!(d.is_empty(), "{d:?}\n{text}");
        let lb = l.fun_decls[f].body.as_llbc().unwrap();
        assert!(validate_llbc(lb).is_empty(), "{text}");
        for _ in 0..20 {
            let args = vec![i32v(r.gen_range(-50..50)), i32v(r.gen_range(-50..50))];
            let a = interp_fun(&k, f, args.clone(), FUEL);
            let b = interp_fun(&l, f, args.clone(), FUEL);
            assert_eq!(a, b, "program {i} on {args:?}\n{text}");
            assert!(a.is_ok(), "{a:?}\n{text}");
        }
    }
}

#[test]
fn random_programs_survive_the_pipeline() {
    let mut r = rng(4);
    for _ in 0..60 {
        let text = random_program(&mut r, ProgramShape::with_patterns());
        let k = parse_str("gen", &text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        let f = k.fun_by_name("f").unwrap().id;
        let (p, d) = run_pipeline(k.clone(), &PassConfig::default());
        assert!(d.is_empty(), "{d:?}");
        for _ in 0..10 {
            let args = vec![i32v(r.gen_range(-50..50)), i32v(r.gen_range(-50..50))];
            // The original has raw constants, which the interpreter rejects.
            let b = interp_fun(&p, f, args.clone(), FUEL);
            assert!(b.is_ok(), "{b:?}\n{text}");
        }
    }
}
