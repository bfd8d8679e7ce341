//! Cleanup passes over ULLBC bodies and the crate, run in a fixed order.

mod constants;
mod decl_groups;
mod fuse;
mod matches;
mod panics;
pub mod util;

use rayon::prelude::*;

use crate::ir::{Body, Diagnostic, FunDeclId, TranslatedCrate};

pub use constants::{decode_body, decode_constant, decode_constants, decode_nested, encode_constant, DecodeError, EncodeError};
pub use decl_groups::{compute_decl_groups, decl_groups_of, dependency_graph, sccs};
pub use fuse::fuse_checked_arith;
pub use matches::reconstruct_matches;
pub use panics::{is_panic_call, unify_panics, DEFAULT_PANIC_FNS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassConfig {
    pub unify_panics: bool,
    pub fuse_checked_arith: bool,
    pub reconstruct_matches: bool,
    pub decode_constants: bool,
    pub compute_decl_groups: bool,
    pub panic_fns: Vec<String>,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            unify_panics: true,
            fuse_checked_arith: true,
            reconstruct_matches: true,
            decode_constants: true,
            compute_decl_groups: true,
            panic_fns: DEFAULT_PANIC_FNS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PassConfig {
    pub fn none() -> PassConfig {
        PassConfig {
            unify_panics: false,
            fuse_checked_arith: false,
            reconstruct_matches: false,
            decode_constants: false,
            compute_decl_groups: false,
            ..PassConfig::default()
        }
    }
}

/// Runs the body-local passes on one function body.
fn body_passes(krate: &TranslatedCrate, config: &PassConfig, id: FunDeclId, body: &mut Body) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let Body::Ullbc(b) = body else { return diags };
    if config.unify_panics {
        unify_panics(krate, &config.panic_fns, b);
    }
    if config.fuse_checked_arith {
        fuse_checked_arith(b);
    }
    if config.reconstruct_matches {
        if let Err(d) = reconstruct_matches(krate, b) {
            diags.push(d.in_item(krate.fun_decls[id].meta.name.to_string()));
        }
    }
    diags
}

/// Runs the enabled passes in order: unify_panics, fuse_checked_arith,
/// reconstruct_matches, decode_constants, compute_decl_groups.
pub fn run_pipeline(mut krate: TranslatedCrate, config: &PassConfig) -> (TranslatedCrate, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    if config.unify_panics || config.fuse_checked_arith || config.reconstruct_matches {
        let bodies: Vec<(FunDeclId, Body)> = krate
            .fun_decls
            .iter_mut()
            .map(|f| (f.id, std::mem::replace(&mut f.body, Body::Opaque)))
            .collect();
        let shared = &krate;
        let done: Vec<(FunDeclId, Body, Vec<Diagnostic>)> = bodies
            .into_par_iter()
            .map(|(id, mut body)| {
                let d = body_passes(shared, config, id, &mut body);
                (id, body, d)
            })
            .collect();
        for (id, body, d) in done {
            krate.fun_decls[id].body = body;
            diags.extend(d);
        }
    }
    if config.decode_constants {
        diags.extend(decode_constants(&mut krate));
    }
    if config.compute_decl_groups {
        compute_decl_groups(&mut krate);
    }
    (krate, diags)
}
