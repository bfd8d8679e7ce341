use std::fmt;

use serde::{Deserialize, Serialize};

use super::meta::Span;

/// Machine-readable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagCode {
    UnresolvedId,
    ArityMismatch,
    OutOfRange,
    IllTypedPlace,
    DuplicateCase,
    BadConstant,
    BadDeclGroups,
    MissingImplItem,
    BadLoopDepth,
    BadSpan,
    NonDenseId,
    RawConstant,
    BadDiscriminant,
    DecodeError,
    IrreducibleCfg,
    MultiExitUnsupported,
    ClauseDepthExceeded,
    NoInstance,
    AmbiguousInstance,
    TruncationUnderflow,
    NormalizationDiverged,
    UnresolvedCall,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnresolvedId => "unresolved-id",
            DiagCode::ArityMismatch => "arity-mismatch",
            DiagCode::OutOfRange => "out-of-range",
            DiagCode::IllTypedPlace => "ill-typed-place",
            DiagCode::DuplicateCase => "duplicate-case",
            DiagCode::BadConstant => "bad-constant",
            DiagCode::BadDeclGroups => "bad-decl-groups",
            DiagCode::MissingImplItem => "missing-impl-item",
            DiagCode::BadLoopDepth => "bad-loop-depth",
            DiagCode::BadSpan => "bad-span",
            DiagCode::NonDenseId => "non-dense-id",
            DiagCode::RawConstant => "raw-constant",
            DiagCode::BadDiscriminant => "bad-discriminant",
            DiagCode::DecodeError => "decode-error",
            DiagCode::IrreducibleCfg => "irreducible-cfg",
            DiagCode::MultiExitUnsupported => "multi-exit-unsupported",
            DiagCode::ClauseDepthExceeded => "clause-depth-exceeded",
            DiagCode::NoInstance => "no-instance",
            DiagCode::AmbiguousInstance => "ambiguous-instance",
            DiagCode::TruncationUnderflow => "truncation-underflow",
            DiagCode::NormalizationDiverged => "normalization-diverged",
            DiagCode::UnresolvedCall => "unresolved-call",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub severity: Severity,
    pub span: Option<Span>,
    /// Name of the declaration the diagnostic is about, if any.
    pub item: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, span: Option<Span>, message: impl Into<String>) -> Diagnostic {
        Diagnostic { code, severity: Severity::Error, span, item: None, message: message.into() }
    }

    pub fn warning(code: DiagCode, span: Option<Span>, message: impl Into<String>) -> Diagnostic {
        Diagnostic { code, severity: Severity::Warning, span, item: None, message: message.into() }
    }

    pub fn with_span(mut self, span: Span) -> Diagnostic {
        self.span.get_or_insert(span);
        self
    }

    pub fn in_item(mut self, item: impl Into<String>) -> Diagnostic {
        self.item = Some(item.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}[{}]", self.code)?;
        if let Some(span) = &self.span {
            write!(f, " at {span}")?;
        }
        if let Some(item) = &self.item {
            write!(f, " in `{item}`")?;
        }
        write!(f, ": {}", self.message)
    }
}
