use crate::ir::{GenericArgs, GenericParams};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{component}: {actual} arguments given but the container alone takes {expected}")]
pub struct TruncationUnderflow {
    pub component: &'static str,
    pub expected: usize,
    pub actual: usize,
}

/// Splits call generics written for `container` followed by a method's own
/// into the container part and the method part.
pub fn split_method_generics(full: &GenericArgs, container: &GenericParams) -> Result<(GenericArgs, GenericArgs), TruncationUnderflow> {
    fn cut<T: Clone>(v: &[T], n: usize, component: &'static str) -> Result<(Vec<T>, Vec<T>), TruncationUnderflow> {
        if v.len() < n {
            return Err(TruncationUnderflow { component, expected: n, actual: v.len() });
        }
        Ok((v[..n].to_vec(), v[n..].to_vec()))
    }
    let (r0, r1) = cut(&full.regions, container.regions.len(), "regions")?;
    let (t0, t1) = cut(&full.types, container.types.len(), "types")?;
    let (c0, c1) = cut(&full.const_generics, container.const_generics.len(), "const generics")?;
    let (p0, p1) = cut(&full.trait_refs, container.trait_clauses.len(), "trait refs")?;
    Ok((
        GenericArgs { regions: r0, types: t0, const_generics: c0, trait_refs: p0 },
        GenericArgs { regions: r1, types: t1, const_generics: c1, trait_refs: p1 },
    ))
}
