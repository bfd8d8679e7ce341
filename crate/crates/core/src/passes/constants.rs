//! Constant layout: scalars little-endian at their natural width, `bool` as
//! one byte, struct and tuple fields concatenated without padding, enums as a
//! one-byte variant index followed by that variant's fields.

use rayon::prelude::*;

use crate::ir::subst::substitute;
use crate::ir::visit::{llbc_constants_mut, ullbc_constants_mut};
use crate::ir::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("expected {expected} bytes, found {actual}")]
    Length { expected: usize, actual: usize },
    #[error("invalid enum tag {tag} for `{ty}` ({variants} variants)")]
    InvalidTag { tag: u8, ty: String, variants: usize },
    #[error("invalid bool byte {0:#04x}")]
    InvalidBool(u8),
    #[error("type {0} has no constant layout")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("{value} does not fit in {kind}")]
    OutOfRange { value: i128, kind: &'static str },
    #[error("raw constants cannot be encoded")]
    Raw,
    #[error("variant index {0} does not fit in a tag byte")]
    Tag(u32),
    #[error("constant of type {0:?} is malformed")]
    Malformed(Ty),
}

pub fn encode_constant(value: &ConstantValue) -> Result<Vec<u8>, EncodeError> {
    let mut out = Vec::new();
    encode_into(value, &mut out)?;
    Ok(out)
}

fn encode_into(value: &ConstantValue, out: &mut Vec<u8>) -> Result<(), EncodeError> {
    match &value.kind {
        ConstantKind::Scalar(v) => {
            if !v.in_range() {
                return Err(EncodeError::OutOfRange { value: v.value, kind: v.kind.name() });
            }
            out.extend(v.to_le_bytes());
        }
        ConstantKind::Bool(b) => out.push(u8::from(*b)),
        ConstantKind::Adt(variant, fields) => {
            if let Some(v) = variant {
                out.push(u8::try_from(v.0).map_err(|_| EncodeError::Tag(v.0))?);
            } else if matches!(value.ty, Ty::Scalar(_) | Ty::Bool) {
                return Err(EncodeError::Malformed(value.ty.clone()));
            }
            for f in fields {
                encode_into(f, out)?;
            }
        }
        ConstantKind::Raw(_) => return Err(EncodeError::Raw),
    }
    Ok(())
}

/// Decodes `bytes` as a value of type `ty`; all bytes must be consumed.
pub fn decode_constant(krate: &TranslatedCrate, ty: &Ty, bytes: &[u8]) -> Result<ConstantValue, DecodeError> {
    let mut pos = 0;
    let value = decode_at(krate, ty, bytes, &mut pos)?;
    if pos != bytes.len() {
        return Err(DecodeError::Length { expected: pos, actual: bytes.len() });
    }
    Ok(value)
}

fn take<'b>(bytes: &'b [u8], pos: &mut usize, n: usize) -> Result<&'b [u8], DecodeError> {
    if *pos + n > bytes.len() {
        return Err(DecodeError::Length { expected: *pos + n, actual: bytes.len() });
    }
    let s = &bytes[*pos..*pos + n];
    *pos += n;
    Ok(s)
}

fn unsupported(ty: &Ty) -> DecodeError {
    DecodeError::Unsupported(format!("{ty:?}"))
}

fn decode_fields(
    krate: &TranslatedCrate,
    tys: &[Ty],
    args: Option<&GenericArgs>,
    bytes: &[u8],
    pos: &mut usize,
) -> Result<Vec<ConstantValue>, DecodeError> {
    tys.iter()
        .map(|t| {
            let t = match args {
                Some(a) => substitute(t, a).map_err(|_| unsupported(t))?,
                None => t.clone(),
            };
            decode_at(krate, &t, bytes, pos)
        })
        .collect()
}

fn decode_at(krate: &TranslatedCrate, ty: &Ty, bytes: &[u8], pos: &mut usize) -> Result<ConstantValue, DecodeError> {
    let kind = match ty {
        Ty::Scalar(k) => {
            let s = take(bytes, pos, k.bytes())?;
            ConstantKind::Scalar(ScalarValue::from_le_bytes(*k, s).ok_or_else(|| unsupported(ty))?)
        }
        Ty::Bool => match take(bytes, pos, 1)?[0] {
            0 => ConstantKind::Bool(false),
            1 => ConstantKind::Bool(true),
            b => return Err(DecodeError::InvalidBool(b)),
        },
        Ty::Tuple(tys) => ConstantKind::Adt(None, decode_fields(krate, tys, None, bytes, pos)?),
        Ty::Array(elem, ConstGeneric::Value(n)) => {
            let n = usize::try_from(n.value).map_err(|_| unsupported(ty))?;
            let tys = vec![(**elem).clone(); n];
            ConstantKind::Adt(None, decode_fields(krate, &tys, None, bytes, pos)?)
        }
        Ty::Adt(id, args) => {
            let decl = krate.type_decls.get(*id).ok_or_else(|| unsupported(ty))?;
            match &decl.kind {
                TypeDeclKind::Struct(fields) => ConstantKind::Adt(None, decode_fields(krate, fields, Some(args), bytes, pos)?),
                TypeDeclKind::Enum(variants) => {
                    let tag = take(bytes, pos, 1)?[0];
                    let variant = variants.get(tag as usize).ok_or_else(|| DecodeError::InvalidTag {
                        tag,
                        ty: decl.meta.name.to_string(),
                        variants: variants.len(),
                    })?;
                    let fields = decode_fields(krate, &variant.fields, Some(args), bytes, pos)?;
                    ConstantKind::Adt(Some(VariantId(tag as u32)), fields)
                }
                TypeDeclKind::Opaque => return Err(unsupported(ty)),
            }
        }
        _ => return Err(unsupported(ty)),
    };
    Ok(ConstantValue { ty: ty.clone(), kind })
}

/// Decodes every raw constant nested in `c`.
pub fn decode_nested(krate: &TranslatedCrate, c: &mut ConstantValue) -> Result<(), DecodeError> {
    match &mut c.kind {
        ConstantKind::Raw(bytes) => {
            *c = decode_constant(krate, &c.ty, bytes)?;
        }
        ConstantKind::Adt(_, fields) => {
            for f in fields {
                decode_nested(krate, f)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Decodes the raw constants of one body. On failure the body is left as is
/// and the first error is returned.
pub fn decode_body(krate: &TranslatedCrate, body: &mut Body) -> Result<bool, Diagnostic> {
    let mut work = body.clone();
    let mut changed = false;
    let mut error = None;
    let mut on_const = |c: &mut ConstantValue, span: Span| {
        if error.is_some() || !c.contains_raw() {
            return;
        }
        match decode_nested(krate, c) {
            Ok(()) => changed = true,
            Err(e) => error = Some(Diagnostic::error(DiagCode::DecodeError, Some(span), e.to_string())),
        }
    };
    match &mut work {
        Body::Ullbc(b) => ullbc_constants_mut(b, &mut on_const),
        Body::Llbc(b) => llbc_constants_mut(&mut b.body, &mut on_const),
        Body::Opaque => {}
    }
    if let Some(e) = error {
        return Err(e);
    }
    *body = work;
    Ok(changed)
}

/// Decodes all raw constants in the crate. A body with an undecodable constant
/// is replaced by an opaque body and reported.
pub fn decode_constants(krate: &mut TranslatedCrate) -> Vec<Diagnostic> {
    let bodies: Vec<(FunDeclId, Body)> = krate
        .fun_decls
        .iter_mut()
        .map(|f| (f.id, std::mem::replace(&mut f.body, Body::Opaque)))
        .collect();
    let shared: &TranslatedCrate = krate;
    let results: Vec<(FunDeclId, Body, Option<Diagnostic>)> = bodies
        .into_par_iter()
        .map(|(id, mut body)| match decode_body(shared, &mut body) {
            Ok(_) => (id, body, None),
            Err(d) => (id, Body::Opaque, Some(d.in_item(shared.fun_decls[id].meta.name.to_string()))),
        })
        .collect();
    let mut diags = Vec::new();
    for (id, body, diag) in results {
        krate.fun_decls[id].body = body;
        diags.extend(diag);
    }
    diags
}
