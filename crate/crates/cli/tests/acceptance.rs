//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//! Run with BLESS=1 to rewrite the golden files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use charon_lite::cfg::restructure_crate;
use charon_lite::driver::translate;
use charon_lite::frontend::{parse_crate, parse_str};
use charon_lite::interp::{interp_fun, DEFAULT_FUEL};
use charon_lite::ir::ullbc::{StatementKind, TerminatorKind, UllbcBody};
use charon_lite::ir::visit::ullbc_constants_mut;
use charon_lite::ir::*;
use charon_lite::passes::{decode_constant, encode_constant, run_pipeline, PassConfig};
use charon_lite::serialize::{from_json, to_json, BodyKind};
use charon_lite::traits::{resolve_calls, resolve_trait_ref, ResolveError, TraitEnv};
use charon_lite_testkit::programs::{random_program, ProgramShape};
use charon_lite_testkit::traits::{derive_all, random_goal_ty, random_trait_env, replay, saturate, Derivations};
use charon_lite_testkit::values::{random_args, random_const_ty, random_constant, CONSTANT_TYPES};
use charon_lite_testkit::rng;

const RANDOM_PROGRAMS: usize = 200;
const MAX_BLOCKS: usize = 12;
const INPUTS_PER_PROGRAM: usize = 20;
const MIN_CORPUS_PROGRAMS: usize = 25;
const TWIN_BUDGET: Duration = Duration::from_secs(60);
const SOLVER_INSTANCES: usize = 500;
const SOLVER_BUDGET: Duration = Duration::from_secs(30);
const RANDOM_CRATES: usize = 100;
const CONSTANT_PAIRS: usize = 500;
const MAX_CONSTANT_DEPTH: usize = 4;
const MIN_PLANTED: usize = 10;
/// Exit status of the CLI for a crate translated with diagnostics.
const EXIT_DIAGNOSTICS: i32 = 1;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("twin-interpreters", twin_interpreters),
        ("pass-soundness", pass_soundness),
        ("trait-reconstruction", trait_reconstruction),
        ("solver-vs-oracle", solver_vs_oracle),
        ("serialization", serialization),
        ("constant-round-trip", constant_round_trip),
        ("taint-planted-bugs", taint_planted_bugs),
        ("robustness", robustness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let res = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

/// Corpus files relative to the repository root, sorted, without the
/// deliberately broken ones.
fn corpus_files() -> Vec<String> {
    let mut out = Vec::new();
    for dir in ["corpus", "corpus/ct"] {
        for e in std::fs::read_dir(root().join(dir)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "mirl") {
                out.push(format!("{dir}/{}", p.file_name().unwrap().to_str().unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn golden_name(rel: &str) -> String {
    rel.trim_start_matches("corpus/").trim_end_matches(".mirl").replace('/', "_")
}

fn parse_rel(rel: &str) -> TranslatedCrate {
    let text = std::fs::read_to_string(root().join(rel)).unwrap();
    parse_crate(&[(rel.to_string(), text)]).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn i32v(x: i32) -> interp::Value {
    interp::Value::Scalar(ScalarValue::wrapping(ScalarKind::I32, x as i128))
}

use charon_lite::interp;

fn twin_interpreters() -> Result<String, String> {
    let start = Instant::now();
    let mut r = rng(0xacc1);
    let shape = ProgramShape { max_blocks: MAX_BLOCKS, ..ProgramShape::default() };
    let mut runs = 0;
    for i in 0..RANDOM_PROGRAMS {
        let text = random_program(&mut r, shape);
        let k = parse_str("gen", &text).map_err(|e| e.to_string())?;
        let f = k.fun_by_name("f").unwrap().id;
        let blocks = k.fun_decls[f].body.as_ullbc().unwrap().blocks.len();
        ensure(blocks <= MAX_BLOCKS, || format!("program {i} has {blocks} blocks"))?;
        let (l, d) = restructure_crate(k.clone());
        ensure(d.is_empty(), || format!("program {i}: {d:?}"))?;
        for _ in 0..INPUTS_PER_PROGRAM {
            let args = vec![i32v(r.gen_range(-50..50)), i32v(r.gen_range(-50..50))];
            let a = interp_fun(&k, f, args.clone(), DEFAULT_FUEL);
            let b = interp_fun(&l, f, args.clone(), DEFAULT_FUEL);
            ensure(a == b, || format!("program {i} on {args:?}: {a:?} vs {b:?}\n{text}"))?;
            runs += 1;
        }
    }
    let mut programs = 0;
    for rel in corpus_files() {
        let (u, d) = translate(parse_rel(&rel), &PassConfig::default(), BodyKind::Ullbc);
        ensure(d.is_empty(), || format!("{rel}: {d:?}"))?;
        let (l, d) = restructure_crate(u.clone());
        ensure(d.is_empty(), || format!("{rel}: {d:?}"))?;
        let mut ran = false;
        for f in u.fun_decls.iter().filter(|f| f.body.as_ullbc().is_some()) {
            for _ in 0..INPUTS_PER_PROGRAM {
                let Some(args) = random_args(&mut r, &u, f) else { break };
                let a = interp_fun(&u, f.id, args.clone(), DEFAULT_FUEL);
                let b = interp_fun(&l, f.id, args.clone(), DEFAULT_FUEL);
                ensure(a == b, || format!("{rel}::{} on {args:?}: {a:?} vs {b:?}", f.meta.name))?;
                ran = true;
                runs += 1;
            }
        }
        programs += usize::from(ran);
    }
    ensure(programs >= MIN_CORPUS_PROGRAMS, || format!("only {programs} runnable corpus programs"))?;
    let spent = start.elapsed();
    ensure(spent <= TWIN_BUDGET, || format!("took {spent:?}"))?;
    Ok(format!("{RANDOM_PROGRAMS} random + {programs} corpus programs, {runs} runs agree"))
}

fn has_raw(body: &UllbcBody) -> bool {
    let mut b = body.clone();
    let mut raw = false;
    ullbc_constants_mut(&mut b, &mut |c, _| raw |= c.contains_raw());
    raw
}

/// `switchInt` on a local that holds a discriminant.
fn discriminant_switches(body: &UllbcBody) -> usize {
    let mut discr = BTreeSet::new();
    for b in body.blocks.iter() {
        for s in &b.statements {
            if let StatementKind::Assign(p, Rvalue::Discriminant(_)) = &s.kind {
                discr.insert(p.local);
            }
        }
    }
    body.blocks
        .iter()
        .filter(|b| matches!(&b.terminator.kind, TerminatorKind::SwitchInt { discr: d, .. } if d.place().is_some_and(|p| discr.contains(&p.local))))
        .count()
}

fn pass_soundness() -> Result<String, String> {
    let single = |f: fn(&mut PassConfig)| {
        let mut c = PassConfig::none();
        f(&mut c);
        c
    };
    let configs = [
        ("panics", single(|c| c.unify_panics = true)),
        ("checked-arith", single(|c| c.fuse_checked_arith = true)),
        ("match-reconstruction", single(|c| c.reconstruct_matches = true)),
        ("constants", single(|c| c.decode_constants = true)),
        ("all", PassConfig::default()),
    ];
    let mut r = rng(0xacc2);
    let mut population: Vec<(String, TranslatedCrate)> = (0..RANDOM_PROGRAMS)
        .map(|i| {
            let text = random_program(&mut r, ProgramShape { max_blocks: MAX_BLOCKS, ..ProgramShape::with_patterns() });
            (format!("random {i}"), parse_str("gen", &text).unwrap())
        })
        .collect();
    population.extend(corpus_files().into_iter().map(|rel| (rel.clone(), parse_rel(&rel))));
    let mut changed = [0usize; 5];
    for (name, k) in &population {
        for (ci, (pass, config)) in configs.iter().enumerate() {
            let (once, d) = run_pipeline(k.clone(), config);
            ensure(d.is_empty(), || format!("{name} / {pass}: {d:?}"))?;
            let (twice, _) = run_pipeline(once.clone(), config);
            ensure(once == twice, || format!("{name}: {pass} is not idempotent"))?;
            changed[ci] += usize::from(once != *k);
            for f in k.fun_decls.iter().filter(|f| f.body.as_ullbc().is_some()) {
                for _ in 0..5 {
                    let Some(args) = random_args(&mut r, k, f) else { break };
                    let a = interp_fun(k, f.id, args.clone(), DEFAULT_FUEL);
                    let b = interp_fun(&once, f.id, args.clone(), DEFAULT_FUEL);
                    ensure(a == b, || format!("{name}::{} / {pass} on {args:?}: {a:?} vs {b:?}", f.meta.name))?;
                }
            }
            if *pass == "all" {
                for f in once.fun_decls.iter() {
                    let Some(b) = f.body.as_ullbc() else { continue };
                    ensure(!has_raw(b), || format!("{name}::{}: raw constant left", f.meta.name))?;
                    let n = discriminant_switches(b);
                    ensure(n == 0, || format!("{name}::{}: {n} discriminant switch(es) left", f.meta.name))?;
                }
            }
        }
    }
    ensure(changed.iter().all(|&c| c > 0), || format!("some pass never fired: {changed:?}"))?;
    Ok(format!("{} crates x 4 passes, rewrites per pass {:?}", population.len(), &changed[..4]))
}

fn first_call(k: &TranslatedCrate, fun: &str) -> Result<FnPtr, String> {
    let body = k.fun_by_name(fun).and_then(|f| f.body.as_ullbc()).ok_or(format!("no body for {fun}"))?;
    for b in body.blocks.iter() {
        if let TerminatorKind::Call { call: Call { func: FnOperand::Regular(p), .. }, .. } = &b.terminator.kind {
            return Ok(p.clone());
        }
    }
    Err(format!("no call in {fun}"))
}

fn trait_reconstruction() -> Result<String, String> {
    let (k, d) = resolve_calls(parse_rel("corpus/clone_vec.mirl"));
    ensure(d.is_empty(), || format!("{d:?}"))?;
    let ptr = first_call(&k, "clone_vec")?;
    let imp = k.impl_by_name("CloneVec").unwrap().id;
    let want = TraitRefKind::TraitImpl(
        imp,
        GenericArgs { types: vec![Ty::var(0)], trait_refs: vec![TraitRefKind::Clause(TraitClauseId(0))], ..GenericArgs::default() },
    );
    let FunIdOrTraitMethodRef::TraitMethod(tref, _) = &ptr.func else { return Err(format!("{ptr:?}")) };
    ensure(tref.kind == want, || format!("clone_vec resolved to {:?}", tref.kind))?;
    ensure(ptr.generics.types.is_empty(), || format!("clone_vec method generics {:?}", ptr.generics))?;

    let (k, d) = resolve_calls(parse_rel("corpus/h.mirl"));
    ensure(d.is_empty(), || format!("{d:?}"))?;
    let ptr = first_call(&k, "h")?;
    let FunIdOrTraitMethodRef::TraitMethod(tref, _) = &ptr.func else { return Err(format!("{ptr:?}")) };
    ensure(tref.kind == TraitRefKind::Clause(TraitClauseId(0)), || format!("h resolved to {:?}", tref.kind))?;
    ensure(tref.args.types == vec![Ty::var(0), Ty::var(1)], || format!("trait args {:?}", tref.args.types))?;
    ensure(ptr.generics.types == vec![Ty::var(2)], || format!("method generics {:?}", ptr.generics.types))?;
    Ok("CloneVec[Clause(T: Clone)] and [T, U, V] -> [V]".into())
}

fn solver_vs_oracle() -> Result<String, String> {
    let start = Instant::now();
    let (mut solved, mut ambiguous, mut none, mut instances) = (0, 0, 0, 0);
    let mut seed = 0;
    while instances < SOLVER_INSTANCES {
        let mut r = rng(0x5000 + seed);
        seed += 1;
        let text = random_trait_env(&mut r);
        let k = parse_str("env", &text).map_err(|e| format!("{e}\n{text}"))?;
        let g = &k.fun_by_name("env").unwrap().signature.generics;
        let env = TraitEnv::new(&k, g);
        let known = saturate(&k, g, 16);
        for _ in 0..3 {
            let t = TraitDeclId(r.gen_range(0..k.trait_decls.len()) as u32);
            let goal = GenericArgs::from_types(vec![random_goal_ty(&mut r, &k, 2)]);
            let oracle = derive_all(&k, &known, t, &goal, &mut Vec::new());
            let got = resolve_trait_ref(&env, t, &goal);
            let agree = match (&oracle, &got) {
                (Derivations::Clause(paths), Ok(p)) => paths.contains(p),
                (Derivations::Impls(ds), Ok(p)) if ds.len() == 1 => &ds[0] == p && replay(&k, g, p) == Some((t, goal.clone())),
                (Derivations::Impls(ds), Err(ResolveError::NoInstance { .. })) => ds.is_empty(),
                (Derivations::Impls(ds), Err(ResolveError::Ambiguous { .. })) => ds.len() > 1,
                _ => false,
            };
            ensure(agree, || format!("seed {}: oracle {oracle:?}, solver {got:?}", seed - 1))?;
            match got {
                Ok(_) => solved += 1,
                Err(ResolveError::NoInstance { .. }) => none += 1,
                Err(ResolveError::Ambiguous { .. }) => ambiguous += 1,
            }
            instances += 1;
        }
    }
    let spent = start.elapsed();
    ensure(spent <= SOLVER_BUDGET, || format!("took {spent:?}"))?;
    Ok(format!("{instances} goals: {solved} solved, {none} unsolvable, {ambiguous} ambiguous"))
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_charon-lite"));
    c.current_dir(root());
    c
}

/// Golden outputs of one corpus file: the JSON, the printed IR and, for
/// the taint corpus, the JSON report.
fn produce(rel: &str, out: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let name = golden_name(rel);
    let base = out.join(&name);
    let o = cli().arg(rel).arg("-o").arg(&base).arg("--print").output().map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("{rel}: {}", String::from_utf8_lossy(&o.stderr)))?;
    let json = std::fs::read(format!("{}.llbc.json", base.display())).map_err(|e| e.to_string())?;
    let mut files = vec![(format!("{name}.llbc.json"), json), (format!("{name}.llbc.txt"), o.stdout)];
    if rel.starts_with("corpus/ct/") {
        let o = cli().arg(rel).arg("-o").arg(&base).args(["--analyze", "taint", "--format", "json"]).output().map_err(|e| e.to_string())?;
        files.push((format!("{name}.taint.json"), o.stdout));
    }
    Ok(files)
}

fn serialization() -> Result<String, String> {
    let golden = root().join("tests/golden");
    let bless = std::env::var_os("BLESS").is_some();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut checked = 0;
    for rel in corpus_files() {
        let first = produce(&rel, a.path())?;
        let second = produce(&rel, b.path())?;
        ensure(first == second, || format!("{rel}: two runs differ"))?;
        for (name, bytes) in first {
            let path = golden.join(&name);
            if bless {
                std::fs::create_dir_all(&golden).unwrap();
                std::fs::write(&path, &bytes).unwrap();
            }
            let want = std::fs::read(&path).map_err(|e| format!("{}: {e} (run with BLESS=1)", path.display()))?;
            ensure(want == bytes, || format!("{name} differs from its golden"))?;
            checked += 1;
        }
    }
    let mut r = rng(0xacc5);
    for i in 0..RANDOM_CRATES {
        let text = if i % 2 == 0 {
            random_program(&mut r, ProgramShape::with_patterns())
        } else {
            random_trait_env(&mut r)
        };
        let k = parse_str("gen", &text).map_err(|e| e.to_string())?;
        for kind in [BodyKind::Ullbc, BodyKind::Llbc] {
            let (t, _) = translate(k.clone(), &PassConfig::default(), kind);
            let bytes = to_json(&t, kind);
            let (back_kind, back) = from_json(&bytes, false).map_err(|e| format!("random crate {i}: {e}"))?;
            ensure(back_kind == kind && back == t, || format!("random crate {i} does not round-trip as {kind:?}"))?;
            ensure(to_json(&back, kind) == bytes, || format!("random crate {i} re-serializes differently"))?;
        }
    }
    Ok(format!("{checked} golden files stable, {RANDOM_CRATES} random crates round-trip"))
}

fn const_depth(c: &ConstantValue) -> usize {
    match &c.kind {
        ConstantKind::Adt(_, fs) => 1 + fs.iter().map(const_depth).max().unwrap_or(0),
        _ => 1,
    }
}

fn constant_round_trip() -> Result<String, String> {
    let k = parse_str("consts", CONSTANT_TYPES).map_err(|e| e.to_string())?;
    let mut r = rng(0xacc6);
    let mut deepest = 0;
    for i in 0..CONSTANT_PAIRS {
        let ty = random_const_ty(&mut r, &k, MAX_CONSTANT_DEPTH);
        let (c, bytes) = random_constant(&mut r, &k, &ty);
        let depth = const_depth(&c);
        ensure(depth <= MAX_CONSTANT_DEPTH, || format!("pair {i} nests {depth} deep"))?;
        deepest = deepest.max(depth);
        let decoded = decode_constant(&k, &ty, &bytes).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(decoded == c, || format!("pair {i}: decoded {decoded:?}, want {c:?}"))?;
        let encoded = encode_constant(&c).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(encoded == bytes, || format!("pair {i}: encoded {encoded:?}, want {bytes:?}"))?;
    }
    Ok(format!("{CONSTANT_PAIRS} pairs exact, deepest {deepest}"))
}

fn taint_planted_bugs() -> Result<String, String> {
    let files = corpus_files();
    let bad: Vec<&String> = files.iter().filter(|f| f.ends_with("_bad.mirl")).collect();
    ensure(bad.len() >= MIN_PLANTED, || format!("only {} planted-bug programs", bad.len()))?;
    ensure(bad.iter().any(|f| f.contains("kyber")), || "no division pair".into())?;
    let run = |rel: &str| -> Result<(i32, Vec<u8>), String> {
        let dir = tempfile::tempdir().unwrap();
        let o = cli()
            .arg(rel)
            .arg("-o")
            .arg(dir.path().join("out"))
            .args(["--analyze", "taint", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        Ok((o.status.code().unwrap_or(-1), o.stdout))
    };
    for rel in &bad {
        let (code, out) = run(rel)?;
        let (code2, out2) = run(rel)?;
        ensure(out == out2 && code == code2, || format!("{rel}: report bytes differ between runs"))?;
        ensure(code == EXIT_DIAGNOSTICS, || format!("{rel}: exit {code}"))?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let n = v["violations"].as_array().map_or(0, Vec::len);
        ensure(n > 0, || format!("{rel}: planted bug not reported"))?;
        let fixed = rel.replace("_bad.mirl", "_ok.mirl");
        let (code, out) = run(&fixed)?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let n = v["violations"].as_array().map_or(usize::MAX, Vec::len);
        ensure(n == 0 && code == 0, || format!("{fixed}: {n} violation(s), exit {code}"))?;
    }
    Ok(format!("{} planted bugs found, {} fixed variants clean", bad.len(), bad.len()))
}

fn robustness() -> Result<String, String> {
    let rel = "corpus/poisoned/poisoned.mirl";
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("poisoned");
    let o = cli().arg(rel).arg("-o").arg(&base).output().map_err(|e| e.to_string())?;
    let code = o.status.code().unwrap_or(-1);
    ensure(code == EXIT_DIAGNOSTICS, || format!("exit {code}"))?;
    let stderr = String::from_utf8_lossy(&o.stderr);
    ensure(stderr.contains("irreducible-cfg") && stderr.contains(rel), || format!("diagnostic missing: {stderr}"))?;
    let bytes = std::fs::read(format!("{}.llbc.json", base.display())).map_err(|e| e.to_string())?;
    let (_, k) = from_json(&bytes, false).map_err(|e| format!("output does not load: {e}"))?;
    let src = parse_rel(rel);
    let names = |k: &TranslatedCrate| {
        let mut v: Vec<String> = k.type_decls.iter().map(|t| t.meta.name.to_string()).collect();
        v.extend(k.fun_decls.iter().map(|f| f.meta.name.to_string()));
        v
    };
    ensure(names(&k) == names(&src), || format!("declarations {:?} vs {:?}", names(&k), names(&src)))?;
    let mut translated = 0;
    for f in k.fun_decls.iter() {
        let poisoned = f.meta.name.to_string() == "tangled";
        ensure(poisoned == f.body.is_opaque(), || format!("`{}` has the wrong body kind", f.meta.name))?;
        translated += usize::from(!poisoned);
    }
    Ok(format!("exit 1, JSON loads, {translated} other functions translated"))
}
