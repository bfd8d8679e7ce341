use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use charon_lite::driver::translate;
use charon_lite::frontend::parse_crate;
use charon_lite::ir::ullbc::TerminatorKind;
use charon_lite::ir::Body;
use charon_lite::passes::PassConfig;
use charon_lite::serialize::{from_json, to_json, BodyKind};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charon-lite")).current_dir(root()).args(args).output().unwrap()
}

fn out_base(dir: &tempfile::TempDir) -> String {
    dir.path().join("out").display().to_string()
}

#[test]
fn happy_path_writes_llbc() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus/factorial.mirl", "-o", &out_base(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(dir.path().join("out.llbc.json")).unwrap();
    let (kind, k) = from_json(&bytes, false).unwrap();
    assert_eq!(kind, BodyKind::Llbc);
    assert!(matches!(k.fun_decls.iter().next().unwrap().body, Body::Llbc(_)));
}

fn switch_ints(json: &Path) -> usize {
    let (_, k) = from_json(&std::fs::read(json).unwrap(), false).unwrap();
    let body = k.fun_by_name("area").unwrap().body.as_ullbc().unwrap();
    body.blocks.iter().filter(|b| matches!(b.terminator.kind, TerminatorKind::SwitchInt { .. })).count()
}

#[test]
fn ullbc_keeps_switch_int_without_match_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus/shapes_enum.mirl", "--ullbc", "--no-pass", "match-reconstruction", "-o", &out_base(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join("out.ullbc.json");
    assert_eq!(switch_ints(&path), 1);
    let o = run(&["corpus/shapes_enum.mirl", "--ullbc", "-o", &out_base(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(switch_ints(&path), 0);
}

#[test]
fn each_no_pass_skips_exactly_that_pass() {
    let dir = tempfile::tempdir().unwrap();
    let base = out_base(&dir);
    let json_path = dir.path().join("out.ullbc.json");
    let passes: [(&str, fn(&mut PassConfig)); 5] = [
        ("panics", |c| c.unify_panics = false),
        ("checked-arith", |c| c.fuse_checked_arith = false),
        ("match-reconstruction", |c| c.reconstruct_matches = false),
        ("constants", |c| c.decode_constants = false),
        ("decl-groups", |c| c.compute_decl_groups = false),
    ];
    let mut fired = [false; 5];
    for rel in ["corpus/kitchen_sink.mirl", "corpus/factorial.mirl", "corpus/shapes_enum.mirl", "corpus/panics.mirl"] {
        let text = std::fs::read_to_string(root().join(rel)).unwrap();
        let krate = parse_crate(&[(rel.to_string(), text)]).unwrap();
        assert_eq!(run(&[rel, "--ullbc", "-o", &base]).status.code(), Some(0));
        let full = std::fs::read(&json_path).unwrap();
        for (i, (pass, disable)) in passes.iter().enumerate() {
            let o = run(&[rel, "--ullbc", "--no-pass", pass, "-o", &base]);
            assert_eq!(o.status.code(), Some(0), "{pass}: {}", String::from_utf8_lossy(&o.stderr));
            let mut config = PassConfig::default();
            disable(&mut config);
            let (want, _) = translate(krate.clone(), &config, BodyKind::Ullbc);
            let got = std::fs::read(&json_path).unwrap();
            assert_eq!(got, to_json(&want, BodyKind::Ullbc), "{rel} --no-pass {pass}");
            fired[i] |= got != full;
        }
    }
    assert_eq!(fired, [true; 5], "some --no-pass never changed the output");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(run(&["corpus/kitchen_sink.mirl", "-o", &out_base(dir)]).status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("out.llbc.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn taint_report_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus/ct/kyber_bad.mirl", "-o", &out_base(&dir), "--analyze", "taint", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 1);
    let o = run(&["corpus/ct/kyber_ok.mirl", "-o", &out_base(&dir), "--analyze", "taint"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("0 violation(s)"));
}

#[test]
fn fatal_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mirl");
    std::fs::write(&bad, "fn f( {").unwrap();
    let o = run(&[bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error["));
    assert_eq!(run(&["does/not/exist.mirl"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn json_inputs_honour_lenient() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["corpus/gcd.mirl", "-o", &out_base(&dir)]).status.code(), Some(0));
    let path = dir.path().join("out.llbc.json");
    let text = std::fs::read_to_string(&path).unwrap().replacen("\"crate_name\"", "\"colour\": 1,\n    \"crate_name\"", 1);
    let extra = dir.path().join("extra.llbc.json");
    std::fs::write(&extra, text).unwrap();
    let o = run(&[extra.to_str().unwrap(), "--print"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let o = run(&[extra.to_str().unwrap(), "--lenient", "--print"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("fn gcd"));
}

#[test]
fn panic_fn_flag_replaces_the_panic_set() {
    let dir = tempfile::tempdir().unwrap();
    let base = out_base(&dir);
    let o = run(&["corpus/panics.mirl", "--ullbc", "-o", &base, "--print"]);
    assert!(!String::from_utf8(o.stdout).unwrap().contains("call core::panicking::panic"));
    let o = run(&["corpus/panics.mirl", "--ullbc", "-o", &base, "--print", "--panic-fn", "my::panic"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("call core::panicking::panic"));
}

#[test]
fn interp_runs_both_interpreters() {
    let o = run(&["interp", "corpus/gcd.mirl", "gcd", "84", "36"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "ullbc: returned 12u64\nllbc:  returned 12u64\n");
    let o = run(&["interp", "corpus/collatz.mirl", "collatz", "27", "--fuel", "50"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("out of fuel"));
    assert_eq!(run(&["interp", "corpus/gcd.mirl", "gcd", "1"]).status.code(), Some(2));
    assert_eq!(run(&["interp", "corpus/gcd.mirl", "nope"]).status.code(), Some(2));
}

#[test]
fn poisoned_crate_still_produces_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus/poisoned/poisoned.mirl", "-o", &out_base(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.starts_with("corpus/poisoned/poisoned.mirl:23:9: error[irreducible-cfg]"), "{stderr}");
    let (_, k) = from_json(&std::fs::read(dir.path().join("out.llbc.json")).unwrap(), false).unwrap();
    assert_eq!(k.fun_decls.len(), 3);
}
