use charon_lite::driver::translate;
use charon_lite::frontend::parse_str;
use charon_lite::ir::TranslatedCrate;
use charon_lite::passes::PassConfig;
use charon_lite::serialize::BodyKind;
use charon_lite::taint::{analyze_crate, MissingBody, Report, TaintConfig, ViolationKind};
use charon_lite_testkit::programs::{random_program, ProgramShape};
use charon_lite_testkit::taint::brute_force_violations;

/// (program, function, kind) for every planted bug.
const PLANTED: [(&str, &str, ViolationKind); 11] = [
    ("kyber", "compress", ViolationKind::Div),
    ("select", "select", ViolationKind::Branch),
    ("sbox", "sbox", ViolationKind::Index),
    ("memcmp", "verify", ViolationKind::Branch),
    ("fields", "f", ViolationKind::Branch),
    ("helper", "pick", ViolationKind::Branch),
    ("alias", "f", ViolationKind::Branch),
    ("declassify", "check", ViolationKind::Branch),
    ("loop", "walk", ViolationKind::Index),
    ("recursion", "go", ViolationKind::Div),
    ("enum", "f", ViolationKind::Branch),
];

fn load(text: &str) -> TranslatedCrate {
    let k = parse_str("t.mirl", text).unwrap_or_else(|e| panic!("{e}"));
    let (k, diags) = translate(k, &PassConfig::default(), BodyKind::Llbc);
    assert!(diags.is_empty(), "{diags:?}");
    k
}

fn ct(name: &str) -> TranslatedCrate {
    load(&std::fs::read_to_string(format!("{}/../../corpus/ct/{name}.mirl", env!("CARGO_MANIFEST_DIR"))).unwrap())
}

fn check_against_oracle(k: &TranslatedCrate, r: &Report, config: &TaintConfig) {
    let oracle = brute_force_violations(k, &config.variable_latency);
    for v in &r.violations {
        assert!(oracle.contains(&(v.span, v.kind)), "{v:?} not in {oracle:?}");
    }
}

#[test]
fn planted_bugs_are_found_and_fixes_are_clean() {
    let config = TaintConfig::default();
    for (name, fun, kind) in PLANTED {
        let bad = ct(&format!("{name}_bad"));
        let r = analyze_crate(&bad, &config);
        assert!(r.has(kind, fun), "{name}: {}", r.to_text());
        assert_eq!(r.violations.len(), 1, "{name}: {}", r.to_text());
        check_against_oracle(&bad, &r, &config);
        let ok = ct(&format!("{name}_ok"));
        let r = analyze_crate(&ok, &config);
        assert!(r.is_clean(), "{name}_ok: {}", r.to_text());
        check_against_oracle(&ok, &r, &config);
    }
}

#[test]
fn kyberslash_division_is_flagged_but_multiply_shift_is_not() {
    let r = analyze_crate(&ct("kyber_bad"), &TaintConfig::default());
    assert_eq!(r.violations[0].kind, ViolationKind::Div);
    assert!(r.violations[0].message.contains("Div"));
    assert!(analyze_crate(&ct("kyber_ok"), &TaintConfig::default()).violations.is_empty());
}

#[test]
fn division_check_follows_the_operator_list() {
    let config = TaintConfig { variable_latency: vec![], ..TaintConfig::default() };
    assert!(analyze_crate(&ct("kyber_bad"), &config).is_clean());
}

#[test]
fn flow_sensitivity_overwrites_secrets() {
    let k = load(
        "#[secret(k)]
fn f(k: u32) -> u32 {
    let x: u32;
    let c: bool;
    bb0: {
        x = use copy k;
        x = use const 3u32;
        c = Lt(copy x, const 2u32);
        switchInt(copy c) -> [0 => bb1, otherwise => bb2];
    }
    bb1: {
        ret = use copy k;
        return;
    }
    bb2: {
        ret = use const 0u32;
        return;
    }
}
",
    );
    let r = analyze_crate(&k, &TaintConfig::default());
    assert!(r.is_clean(), "{}", r.to_text());
    assert!(!brute_force_violations(&k, &[]).is_empty());
}

#[test]
fn missing_bodies() {
    let text = "fn ext(a: u32) -> u32;
#[secret(k)]
fn f(k: u32) -> u32 {
    let y: u32;
    let c: bool;
    bb0: {
        y = call ext(copy k) -> bb1;
    }
    bb1: {
        c = Eq(copy y, const 0u32);
        switchInt(copy c) -> [0 => bb2, otherwise => bb3];
    }
    bb2: {
        ret = use const 0u32;
        return;
    }
    bb3: {
        ret = use const 1u32;
        return;
    }
}
";
    let k = load(text);
    let r = analyze_crate(&k, &TaintConfig::default());
    assert!(r.has(ViolationKind::Branch, "f"), "{}", r.to_text());
    assert!(r.errors.is_empty());
    let strict = TaintConfig { missing_body: MissingBody::Error, ..TaintConfig::default() };
    let r = analyze_crate(&k, &strict);
    assert_eq!(r.errors.len(), 1);
    assert_eq!(r.errors[0].kind, ViolationKind::MissingBody);
    assert!(r.errors[0].message.contains("ext"));
}

#[test]
fn reports_are_deterministic() {
    for (name, ..) in PLANTED {
        let k = ct(&format!("{name}_bad"));
        let a = analyze_crate(&k, &TaintConfig::default());
        let b = analyze_crate(&ct(&format!("{name}_bad")), &TaintConfig::default());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
    }
}

#[test]
fn json_report_shape() {
    let r = analyze_crate(&ct("sbox_bad"), &TaintConfig::default());
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["violations"][0]["kind"], "index");
    assert_eq!(v["violations"][0]["function"], "sbox");
    assert_eq!(v["violations"][0]["span"]["start_line"], 7);
    assert_eq!(v["summaries"][0]["inputs"][1], "secret");
}

fn secret_variant(text: &str, names: &str) -> String {
    text.replace("\nfn f(", &format!("\n#[secret({names})]\nfn f("))
}

#[test]
fn random_programs_stay_within_the_oracle_and_are_monotone() {
    let mut rng = charon_lite_testkit::rng(0x7a1);
    let config = TaintConfig::default();
    let mut flagged = 0;
    for _ in 0..200 {
        let text = random_program(&mut rng, ProgramShape { unbounded_loops: false, ..ProgramShape::with_patterns() });
        let one = load(&secret_variant(&text, "x1"));
        let both = load(&secret_variant(&text, "x0, x1"));
        let r1 = analyze_crate(&one, &config);
        let r2 = analyze_crate(&both, &config);
        check_against_oracle(&one, &r1, &config);
        check_against_oracle(&both, &r2, &config);
        for v in &r1.violations {
            assert!(r2.violations.contains(v), "lost {v:?} when adding a secret\n{text}");
        }
        assert!(analyze_crate(&load(&text), &config).is_clean());
        flagged += usize::from(!r1.violations.is_empty());
    }
    assert!(flagged > 50, "{flagged}");
}
