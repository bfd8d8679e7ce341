use std::fmt::Write as _;

use serde::Serialize;

use crate::ir::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Control flow depends on a secret.
    Branch,
    /// A memory offset depends on a secret.
    Index,
    /// A secret reaches a variable-latency arithmetic operator.
    Div,
    /// A call whose callee has no body to analyze.
    MissingBody,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Branch => "branch",
            ViolationKind::Index => "index",
            ViolationKind::Div => "div",
            ViolationKind::MissingBody => "missing-body",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub span: Span,
    pub kind: ViolationKind,
    pub function: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FnSummaryReport {
    pub function: String,
    pub inputs: Vec<String>,
    pub output: String,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
    pub errors: Vec<Violation>,
    pub summaries: Vec<FnSummaryReport>,
    #[serde(skip)]
    files: Vec<String>,
}

impl Report {
    pub(crate) fn new(violations: Vec<Violation>, errors: Vec<Violation>, summaries: Vec<FnSummaryReport>, files: Vec<String>) -> Report {
        Report { violations, errors, summaries, files }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }

    /// Whether some violation of `kind` lies in `function`.
    pub fn has(&self, kind: ViolationKind, function: &str) -> bool {
        self.violations.iter().any(|v| v.kind == kind && v.function == function)
    }

    fn location(&self, s: &Span) -> String {
        let file = self.files.get(s.file_id.0 as usize).map(String::as_str).unwrap_or("?");
        format!("{file}:{}:{}", s.start_line, s.start_col)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let _ = writeln!(out, "{}: {} in `{}`: {}", self.location(&v.span), v.kind.as_str(), v.function, v.message);
        }
        for v in &self.errors {
            let _ = writeln!(out, "{}: error: {} in `{}`: {}", self.location(&v.span), v.kind.as_str(), v.function, v.message);
        }
        let _ = writeln!(out, "{} violation(s), {} error(s)", self.violations.len(), self.errors.len());
        for s in &self.summaries {
            let _ = writeln!(out, "  {}({}) -> {} [{}]", s.function, s.inputs.join(", "), s.output, s.violations);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
