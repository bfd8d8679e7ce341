use std::fmt;

use crate::ir::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrontendErrorCode {
    LexError,
    SyntaxError,
    UnknownName,
    DuplicateName,
    UnknownBlock,
    ArityMismatch,
    /// The lowered crate failed validation.
    Invalid,
}

impl FrontendErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontendErrorCode::LexError => "lex-error",
            FrontendErrorCode::SyntaxError => "syntax-error",
            FrontendErrorCode::UnknownName => "unknown-name",
            FrontendErrorCode::DuplicateName => "duplicate-name",
            FrontendErrorCode::UnknownBlock => "unknown-block",
            FrontendErrorCode::ArityMismatch => "arity-mismatch",
            FrontendErrorCode::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct FrontendError {
    pub code: FrontendErrorCode,
    pub span: Span,
    pub message: String,
    /// Tokens that would have been accepted, for syntax errors.
    pub expected: Vec<String>,
}

impl FrontendError {
    pub fn new(code: FrontendErrorCode, span: Span, message: impl Into<String>) -> FrontendError {
        FrontendError { code, span, message: message.into(), expected: Vec::new() }
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}] at {}: {}", self.code.as_str(), self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

/// All errors found while parsing a crate, in source order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct FrontendErrors(pub Vec<FrontendError>);

impl FrontendErrors {
    pub fn codes(&self) -> Vec<FrontendErrorCode> {
        self.0.iter().map(|e| e.code).collect()
    }
}

impl fmt::Display for FrontendErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl From<FrontendError> for FrontendErrors {
    fn from(e: FrontendError) -> Self {
        FrontendErrors(vec![e])
    }
}
