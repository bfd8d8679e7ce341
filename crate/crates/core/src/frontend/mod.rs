//! The MIR-lite text format: lexer, parser, name resolution and printer.

pub mod ast;
mod error;
mod lexer;
mod lower;
mod parser;
mod printer;

pub use error::{FrontendError, FrontendErrorCode, FrontendErrors};
pub use parser::parse_file;
pub use printer::{erase_spans, pretty_print, print_fun, trait_ref as print_trait_ref, ty as print_ty, BodyPrinter, Env};

use crate::ir::{FileId, TranslatedCrate};

/// Parses and resolves a set of source files into one crate. The crate name
/// is taken from the first file's stem.
pub fn parse_crate(files: &[(String, String)]) -> Result<TranslatedCrate, FrontendErrors> {
    let name = files
        .first()
        .map(|(n, _)| crate_name_of(n))
        .unwrap_or_else(|| "krate".to_string());
    parse_crate_named(&name, files)
}

pub fn parse_crate_named(crate_name: &str, files: &[(String, String)]) -> Result<TranslatedCrate, FrontendErrors> {
    let mut parsed = Vec::with_capacity(files.len());
    let mut errors = Vec::new();
    for (i, (name, text)) in files.iter().enumerate() {
        match parse_file(FileId(i as u32), text) {
            Ok(f) => parsed.push((name.clone(), f)),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(FrontendErrors(errors));
    }
    lower::lower_crate(crate_name, &parsed)
}

/// Convenience for a single in-memory source.
pub fn parse_str(crate_name: &str, text: &str) -> Result<TranslatedCrate, FrontendErrors> {
    parse_crate_named(crate_name, &[(format!("{crate_name}.mirl"), text.to_string())])
}

fn crate_name_of(path: &str) -> String {
    std::path::Path::new(path)
        .file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.replace('-', "_"))
        .unwrap_or_else(|| "krate".to_string())
}
