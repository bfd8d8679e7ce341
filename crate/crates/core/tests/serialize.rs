use std::collections::BTreeSet;

use charon_lite::cfg::restructure_crate;
use charon_lite::frontend::{erase_spans, parse_str};
use charon_lite::ir::llbc::{Block, Statement, StatementKind};
use charon_lite::ir::*;
use charon_lite::passes::{run_pipeline, PassConfig};
use charon_lite::serialize::*;
use charon_lite::traits::resolve_calls;
use serde_json::Value;

fn root() -> String {
    format!("{}/../..", env!("CARGO_MANIFEST_DIR"))
}

fn sink() -> TranslatedCrate {
    let text = std::fs::read_to_string(format!("{}/corpus/kitchen_sink.mirl", root())).unwrap();
    parse_str("kitchen_sink", &text).unwrap()
}

fn ullbc_sink() -> TranslatedCrate {
    let config = PassConfig { compute_decl_groups: true, ..PassConfig::none() };
    run_pipeline(sink(), &config).0
}

fn llbc_sink() -> TranslatedCrate {
    let (k, _) = run_pipeline(sink(), &PassConfig::default());
    let (k, _) = resolve_calls(k);
    let (k, diags) = restructure_crate(k);
    assert!(diags.is_empty(), "{diags:?}");
    k
}

#[test]
fn empty_crate_matches_documented_example() {
    let doc = std::fs::read_to_string(format!("{}/docs/schema.md", root())).unwrap();
    let example = doc.rsplit("```json\n").next().unwrap().split("```").next().unwrap();
    let out = to_json(&TranslatedCrate::new("empty"), BodyKind::Llbc);
    assert_eq!(String::from_utf8(out).unwrap(), example);
}

#[test]
fn break_is_a_single_key_object() {
    let s = Statement { span: Span::dummy(), comments: vec![], attributes: vec![], kind: StatementKind::Break(0) };
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["kind"], serde_json::json!({"Break": 0}));
    let b = Block { span: Span::dummy(), statements: vec![s] };
    assert!(serde_json::to_string(&b).unwrap().contains(r#""kind":{"Break":0}"#));
}

#[test]
fn corpus_round_trips_and_is_deterministic() {
    for (k, kind) in [(ullbc_sink(), BodyKind::Ullbc), (llbc_sink(), BodyKind::Llbc)] {
        let a = to_json(&k, kind);
        assert_eq!(a, to_json(&k.clone(), kind));
        let (kind2, back) = from_json(&a, false).unwrap();
        assert_eq!(kind2, kind);
        assert_eq!(back, k);
        assert_eq!(to_json(&back, kind), a);
    }
}

#[test]
fn version_mismatch() {
    let mut v: Value = serde_json::from_slice(&to_json(&TranslatedCrate::new("e"), BodyKind::Llbc)).unwrap();
    v["format_version"] = Value::String("999".into());
    let e = from_json(v.to_string().as_bytes(), false).unwrap_err();
    assert_eq!(e.code(), "version-mismatch");
}

#[test]
fn truncated_file_is_malformed() {
    let bytes = to_json(&llbc_sink(), BodyKind::Llbc);
    let e = from_json(&bytes[..bytes.len() / 2], false).unwrap_err();
    assert_eq!(e.code(), "malformed-json");
}

#[test]
fn unknown_fields_rejected_unless_lenient() {
    let mut v: Value = serde_json::from_slice(&to_json(&llbc_sink(), BodyKind::Llbc)).unwrap();
    v["crate"]["fun_decls"][0]["meta"]["colour"] = Value::String("red".into());
    let bytes = v.to_string().into_bytes();
    let e = from_json(&bytes, false).unwrap_err();
    assert_eq!(e.code(), "schema-violation");
    assert!(e.to_string().contains("fun_decls"), "{e}");
    assert!(e.to_string().contains("colour"), "{e}");
    let (_, k) = from_json(&bytes, true).unwrap();
    assert_eq!(k, llbc_sink());
}

#[test]
fn schema_violation_has_path() {
    let mut v: Value = serde_json::from_slice(&to_json(&llbc_sink(), BodyKind::Llbc)).unwrap();
    v["crate"]["type_decls"][1]["kind"] = Value::String("Union".into());
    let e = from_json(v.to_string().as_bytes(), false).unwrap_err();
    let LoadError::SchemaViolation { path, .. } = &e else { panic!("{e}") };
    assert_eq!(path, "$.crate.type_decls[1].kind");
}

#[test]
fn body_kind_must_match_document() {
    let bytes = to_json(&ullbc_sink(), BodyKind::Llbc);
    assert_eq!(from_json(&bytes, false).unwrap_err().code(), "schema-violation");
}

#[test]
fn spans_survive() {
    let k = llbc_sink();
    let mut erased = k.clone();
    erase_spans(&mut erased);
    assert_ne!(k, erased);
    assert_eq!(from_json(&to_json(&k, BodyKind::Llbc), false).unwrap().1, k);
}

struct Rules {
    variants: BTreeSet<String>,
    unit_variants: BTreeSet<String>,
    fields: BTreeSet<String>,
}

fn schema_rules() -> Rules {
    let doc = std::fs::read_to_string(format!("{}/docs/schema.md", root())).unwrap();
    let mut seen = BTreeSet::new();
    let mut rules = Rules { variants: BTreeSet::new(), unit_variants: BTreeSet::new(), fields: BTreeSet::new() };
    for line in doc.lines().filter(|l| l.starts_with("| `")) {
        let cells: Vec<&str> = line.split(" | ").collect();
        let name = cells[0].trim_start_matches("| ").trim_matches('`');
        assert!(seen.insert(name.to_string()), "two rules for {name}");
        let enc = cells[1];
        if let Some((_, variant)) = name.split_once("::") {
            rules.variants.insert(variant.to_string());
            if enc.starts_with("`\"") {
                rules.unit_variants.insert(variant.to_string());
            } else {
                assert!(enc.starts_with(&format!("`{{\"{variant}\": ")), "{line}");
            }
        }
        let mut rest = enc;
        while let Some(i) = rest.find("\": ") {
            let key = rest[..i].rsplit('"').next().unwrap();
            if key.starts_with(|c: char| c.is_ascii_lowercase()) {
                rules.fields.insert(key.to_string());
            }
            rest = &rest[i + 3..];
        }
    }
    rules
}

fn walk(v: &Value, keys: &mut BTreeSet<String>, tags: &mut BTreeSet<String>, strings: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            if m.len() == 1 {
                let k = m.keys().next().unwrap();
                if k.starts_with(|c: char| c.is_ascii_uppercase()) {
                    tags.insert(k.clone());
                }
            }
            for (k, v) in m {
                keys.insert(k.clone());
                walk(v, keys, tags, strings);
            }
        }
        Value::Array(a) => a.iter().for_each(|v| walk(v, keys, tags, strings)),
        Value::String(s) => {
            strings.insert(s.clone());
        }
        _ => {}
    }
}

#[test]
fn schema_document_covers_every_encoding() {
    let rules = schema_rules();
    let (mut keys, mut tags, mut strings) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    for (k, kind) in [(ullbc_sink(), BodyKind::Ullbc), (llbc_sink(), BodyKind::Llbc)] {
        let v: Value = serde_json::from_slice(&to_json(&k, kind)).unwrap();
        walk(&v["crate"], &mut keys, &mut tags, &mut strings);
    }
    for k in &keys {
        assert!(rules.fields.contains(k) || rules.variants.contains(k), "undocumented key {k}");
    }
    for f in &rules.fields {
        assert!(keys.contains(f), "documented field {f} never produced");
    }
    for v in &rules.variants {
        let seen = if rules.unit_variants.contains(v) { strings.contains(v) } else { tags.contains(v) };
        assert!(seen, "variant {v} never produced");
    }
}
