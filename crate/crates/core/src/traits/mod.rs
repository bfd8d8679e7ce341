//! Trait obligations: implied clauses, instance resolution, generic
//! truncation for method calls and associated type normalization.

mod calls;
mod elaborate;
mod normalize;
mod solve;
mod split;

pub use calls::{callee_params, resolve_body, resolve_calls, resolve_fn_ptr};
pub use elaborate::{elaborate_from, elaborate_implied_clauses, KnownClause, MAX_CLAUSE_DEPTH};
pub use normalize::{instantiate_method, normalize_args, normalize_assoc_types, MAX_REWRITES};
pub use solve::{resolve_trait_ref, ResolveError, TraitEnv};
pub use split::{split_method_generics, TruncationUnderflow};
