use crate::cfg::restructure_crate;
use crate::ir::{Diagnostic, TranslatedCrate};
use crate::passes::{run_pipeline, PassConfig};
use crate::serialize::BodyKind;
use crate::traits::resolve_calls;

/// Cleanup passes, then trait resolution, then (for LLBC) restructuring.
pub fn translate(krate: TranslatedCrate, passes: &PassConfig, target: BodyKind) -> (TranslatedCrate, Vec<Diagnostic>) {
    let (krate, mut diags) = run_pipeline(krate, passes);
    let (krate, d) = resolve_calls(krate);
    diags.extend(d);
    if target == BodyKind::Ullbc {
        return (krate, diags);
    }
    let (krate, d) = restructure_crate(krate);
    diags.extend(d);
    (krate, diags)
}
