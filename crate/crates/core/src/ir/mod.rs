//! The shared data model: crate container, types, generics, bodies.

pub mod deps;
pub mod diag;
pub mod expressions;
pub mod ids;
pub mod krate;
pub mod llbc;
pub mod meta;
pub mod subst;
pub mod types;
pub mod typing;
pub mod ullbc;
pub mod validate;
pub mod values;
pub mod visit;

pub use diag::{DiagCode, Diagnostic, Severity};
pub use expressions::*;
pub use ids::*;
pub use krate::*;
pub use meta::*;
pub use types::*;
pub use values::*;
