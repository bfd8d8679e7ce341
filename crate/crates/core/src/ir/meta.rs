use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::FileId;

/// Source range, 1-based, inclusive start and exclusive end column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub file_id: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file_id: FileId, start: (u32, u32), end: (u32, u32)) -> Span {
        Span { file_id, start_line: start.0, start_col: start.1, end_line: end.0, end_col: end.1 }
    }

    /// Placeholder span used for synthesized code with no source origin.
    pub fn dummy() -> Span {
        Span::new(FileId(0), (1, 1), (1, 1))
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }

    pub fn is_well_formed(&self) -> bool {
        self.start_line >= 1 && self.start_col >= 1 && self.start() <= self.end()
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.file_id == other.file_id && self.start() <= other.start() && other.end() <= self.end()
    }

    pub fn merge(&self, other: &Span) -> Span {
        Span {
            file_id: self.file_id,
            start_line: self.start().min(other.start()).0,
            start_col: self.start().min(other.start()).1,
            end_line: self.end().max(other.end()).0,
            end_col: self.end().max(other.end()).1,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}-{}:{}", self.file_id, self.start_line, self.start_col, self.end_line, self.end_col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FileInfo {
    pub name: String,
}

/// A `::`-separated item path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(pub Vec<String>);

impl Name {
    pub fn parse(path: &str) -> Name {
        Name(path.split("::").map(str::to_string).collect())
    }

    pub fn last(&self) -> &str {
        self.0.last().map(String::as_str).unwrap_or("")
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("::"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItemMeta {
    pub name: Name,
    pub span: Span,
    /// Free-form `key::value` attributes.
    pub attributes: Vec<String>,
}

impl ItemMeta {
    pub fn has_attribute(&self, attr: &str) -> bool {
        self.attributes.iter().any(|a| a == attr)
    }

    pub fn is_opaque(&self) -> bool {
        self.has_attribute("charon::opaque")
    }
}
