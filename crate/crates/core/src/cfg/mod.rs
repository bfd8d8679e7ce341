//! Control-flow analysis and structuring.

pub mod dom;
pub mod loops;
mod restructure;
mod validate;

pub use dom::{Dominators, PostDominators};
pub use loops::{find_loops, Irreducible, LoopForest, NaturalLoop};
pub use restructure::{restructure, restructure_crate, MAX_DUPLICATES};
pub use validate::validate_llbc;
