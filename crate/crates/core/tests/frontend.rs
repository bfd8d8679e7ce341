use charon_lite::frontend::{erase_spans, parse_str, pretty_print, FrontendErrorCode};
use charon_lite::ir::ullbc::TerminatorKind;
use charon_lite::ir::*;

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn roundtrip(name: &str, text: &str) {
    let mut a = parse_str(name, text).unwrap_or_else(|e| panic!("{e}"));
    let printed = pretty_print(&a);
    let mut b = parse_str(name, &printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
    assert_eq!(printed, pretty_print(&b));
    erase_spans(&mut a);
    erase_spans(&mut b);
    assert_eq!(a, b, "{printed}");
}

#[test]
fn clone_vec_parses() {
    let k = parse_str("clone_vec", &corpus("clone_vec.mirl")).unwrap();
    assert_eq!(k.trait_decls.len(), 1);
    assert_eq!(k.trait_impls.len(), 1);
    let f = k.fun_by_name("clone_vec").unwrap();
    let body = f.body.as_ullbc().unwrap();
    let TerminatorKind::Call { call, .. } = &body.blocks[BlockId(0)].terminator.kind else { panic!() };
    let FnOperand::Regular(ptr) = &call.func else { panic!() };
    assert!(matches!(ptr.func, FunIdOrTraitMethodRef::UnresolvedMethod(TraitDeclId(0), ref m) if m == "clone"));
    assert_eq!(ptr.generics.types.len(), 1);
}

#[test]
fn corpus_round_trips() {
    for name in ["clone_vec.mirl", "h.mirl"] {
        roundtrip(name, &corpus(name));
    }
}

#[test]
fn unknown_block_is_reported() {
    let e = parse_str("t", "fn f() { bb0: { goto bb7; } }").unwrap_err();
    assert_eq!(e.codes(), vec![FrontendErrorCode::UnknownBlock]);
}

#[test]
fn unknown_local_is_reported() {
    let e = parse_str("t", "fn f() { bb0: { ret = use copy y; return; } }").unwrap_err();
    assert_eq!(e.codes(), vec![FrontendErrorCode::UnknownName]);
}

#[test]
fn duplicate_function() {
    let e = parse_str("t", "fn f();\nfn f();").unwrap_err();
    assert_eq!(e.codes(), vec![FrontendErrorCode::DuplicateName]);
}

#[test]
fn arity_is_checked() {
    let e = parse_str("t", "type P<A, B> = struct(A, B);\nfn f(x: P<u8>);").unwrap_err();
    assert_eq!(e.codes(), vec![FrontendErrorCode::ArityMismatch]);
}

#[test]
fn rich_program_round_trips() {
    let text = r#"
#[derive]
type Option<T> = enum { None = 0, Some(T) = 1 };
type Pair<'a, T, const N: u64> where T: Iter = struct(&'a T, [u8; N], <@c0>::Item);

trait Iter {
    type Item: Show;
    fn next(it: &mut Self) -> Option<<@self>::Item>;
}
trait Show {
    fn show(x: &Self) -> u32;
}
impl ShowU8: Show for u8 {
    fn show = show_u8;
}
impl Counter: Iter for u32 {
    type Item = u8 with [@impl ShowU8];
    fn next = counter_next;
}
fn show_u8(x: &u8) -> u32;
fn counter_next(it: &mut u32) -> Option<u8>;

fn sum<I>(it: &mut I) -> u32 where I: Iter, I::Item: Show {
    let acc: u32;
    let x: Option<I::Item>;
    let t: (u32, bool);
    let s: u32;
    let y: &I::Item;
    bb0: {
        acc = use const 0u32;
        goto bb1;
    }
    bb1: {
        x = call <I as Iter by @c0>::next(copy it) -> bb2;
    }
    bb2: {
        match x -> [None => bb4, Some => bb3];
    }
    bb3: {
        y = &x.as Some.f0;
        // show it
        s = call <I::Item as Show by @c1>::show(copy y) -> bb5;
    }
    bb5: {
        t = CheckedAdd(copy acc, copy s);
        assert(copy t.f1 == false) -> bb6;
    }
    bb6: {
        acc = use copy t.f0;
        goto bb1;
    }
    bb4: {
        ret = use move acc;
        return;
    }
}

fn consts(a: [u32; 3u64], i: u64) -> u32 {
    let o: Option<u8>;
    let b: bool;
    bb0: {
        o = adt Option<u8>::Some(const 7u8);
        o = use const adt Option<u8>::None();
        #[declassify]
        b = Lt(copy i, const 3u64);
        switchInt(copy b) -> [0 => bb2, otherwise => bb1];
    }
    bb1: {
        ret = use copy a[copy i];
        return;
    }
    bb2: {
        ret = Cast<u32>(const -1i8);
        abort panic;
    }
}
"#;
    roundtrip("rich", text);
    let k = parse_str("rich", text).unwrap();
    let sum = k.fun_by_name("sum").unwrap();
    assert_eq!(sum.signature.generics.trait_clauses.len(), 2);
    let c1 = &sum.signature.generics.trait_clauses[TraitClauseId(1)];
    assert_eq!(c1.args.types[0], Ty::AssocType(Box::new(TraitRefKind::Clause(TraitClauseId(0))), "Item".into()));
}
