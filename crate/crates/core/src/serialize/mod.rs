//! Versioned JSON encoding of a crate.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ir::{Body, TranslatedCrate};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Ullbc,
    Llbc,
}

impl BodyKind {
    pub fn extension(self) -> &'static str {
        match self {
            BodyKind::Ullbc => "ullbc.json",
            BodyKind::Llbc => "llbc.json",
        }
    }
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    format_version: &'a str,
    kind: BodyKind,
    #[serde(rename = "crate")]
    krate: &'a TranslatedCrate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("version-mismatch: expected format_version {FORMAT_VERSION:?}, found {found}")]
    VersionMismatch { found: String },
    #[error("malformed-json: {0}")]
    MalformedJson(String),
    #[error("schema-violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::VersionMismatch { .. } => "version-mismatch",
            LoadError::MalformedJson(_) => "malformed-json",
            LoadError::SchemaViolation { .. } => "schema-violation",
        }
    }
}

fn violation(path: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::SchemaViolation { path: path.into(), message: message.into() }
}

/// Pretty-printed with two-space indentation and a final newline. Field
/// order is declaration order, so the output only depends on the crate.
pub fn to_json(krate: &TranslatedCrate, kind: BodyKind) -> Vec<u8> {
    let doc = DocumentRef { format_version: FORMAT_VERSION, kind, krate };
    let mut out = serde_json::to_vec_pretty(&doc).expect("crates always serialize");
    out.push(b'\n');
    out
}

/// Decodes a document. Unknown fields are errors unless `lenient`.
pub fn from_json(bytes: &[u8], lenient: bool) -> Result<(BodyKind, TranslatedCrate), LoadError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| LoadError::MalformedJson(e.to_string()))?;
    let Value::Object(mut top) = value else {
        return Err(violation("$", "expected an object"));
    };
    match top.remove("format_version") {
        Some(Value::String(v)) if v == FORMAT_VERSION => {}
        Some(Value::String(v)) => return Err(LoadError::VersionMismatch { found: format!("{v:?}") }),
        Some(other) => return Err(LoadError::VersionMismatch { found: other.to_string() }),
        None => return Err(violation("$.format_version", "missing field")),
    }
    let kind: BodyKind = match top.remove("kind") {
        Some(v) => serde_json::from_value(v).map_err(|e| violation("$.kind", e.to_string()))?,
        None => return Err(violation("$.kind", "missing field")),
    };
    let Some(krate) = top.remove("crate") else {
        return Err(violation("$.crate", "missing field"));
    };
    if !lenient {
        if let Some(extra) = top.keys().next() {
            return Err(violation(format!("$.{extra}"), "unknown field"));
        }
    }
    let mut unknown = Vec::new();
    let mut track = |p: serde_ignored::Path<'_>| unknown.push(p.to_string());
    let de = serde_ignored::Deserializer::new(krate, &mut track);
    let krate: TranslatedCrate = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        violation(format!("$.crate.{path}"), e.into_inner().to_string())
    })?;
    if !lenient {
        if let Some(p) = unknown.first() {
            return Err(violation(format!("$.crate.{p}"), "unknown field"));
        }
    }
    for f in krate.fun_decls.iter() {
        let ok = match (&f.body, kind) {
            (Body::Opaque, _) | (Body::Ullbc(_), BodyKind::Ullbc) | (Body::Llbc(_), BodyKind::Llbc) => true,
            _ => false,
        };
        if !ok {
            return Err(violation(format!("$.crate.fun_decls[{}].body", f.id.0), format!("body does not match document kind {kind:?}")));
        }
    }
    Ok((kind, krate))
}
