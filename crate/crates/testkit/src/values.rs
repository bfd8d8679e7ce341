//! Random interpreter inputs for arbitrary corpus functions.

use charon_lite::interp::Value;
use charon_lite::ir::subst::substitute;
use charon_lite::ir::{
    ConstGeneric, ConstantKind, ConstantValue, FunDecl, GenericArgs, ScalarValue, TranslatedCrate, Ty, TypeDeclKind,
    VariantId,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random value of `ty`, or `None` for references, generics and opaque
/// types. Scalars are mostly small so loops and checks take both branches.
pub fn random_value(rng: &mut impl Rng, krate: &TranslatedCrate, ty: &Ty) -> Option<Value> {
    Some(match ty {
        Ty::Bool => Value::Bool(rng.gen()),
        Ty::Scalar(k) => {
            let v = if rng.gen_bool(0.8) { rng.gen_range(-4..40) } else { rng.gen::<i64>() as i128 };
            let v = if k.is_signed() { v } else { v.abs() };
            Value::Scalar(ScalarValue::wrapping(*k, v))
        }
        Ty::Tuple(tys) => Value::Adt(None, tys.iter().map(|t| random_value(rng, krate, t)).collect::<Option<_>>()?),
        Ty::Array(t, ConstGeneric::Value(n)) if n.value <= 64 => {
            Value::Array((0..n.value).map(|_| random_value(rng, krate, t)).collect::<Option<_>>()?)
        }
        Ty::Adt(id, args) if args.is_empty() => match &krate.type_decls.get(*id)?.kind {
            TypeDeclKind::Struct(fs) => Value::Adt(None, fs.iter().map(|t| random_value(rng, krate, t)).collect::<Option<_>>()?),
            TypeDeclKind::Enum(vs) if !vs.is_empty() => {
                let v = rng.gen_range(0..vs.len());
                let fields = vs[v].fields.iter().map(|t| random_value(rng, krate, t)).collect::<Option<_>>()?;
                Value::Adt(Some(VariantId(v as u32)), fields)
            }
            _ => return None,
        },
        _ => return None,
    })
}

/// Random arguments for `f`, when every parameter type is supported.
pub fn random_args(rng: &mut impl Rng, krate: &TranslatedCrate, f: &FunDecl) -> Option<Vec<Value>> {
    if !f.signature.generics.is_empty() {
        return None;
    }
    f.signature.inputs.iter().map(|t| random_value(rng, krate, t)).collect()
}

/// Type declarations used by [`random_constant`].
pub const CONSTANT_TYPES: &str = "type Opt<T> = enum { None = 0, Some(T) = 1 };
type Rec = struct(u16, bool, Opt<i8>);
type Tag = enum { A = 0, B(i8, u32) = 3, C(bool) = 9 };
";

/// A random type of nesting depth at most `depth` over [`CONSTANT_TYPES`].
pub fn random_const_ty(rng: &mut impl Rng, krate: &TranslatedCrate, depth: usize) -> Ty {
    let by_name = |n: &str| krate.type_decls.iter().find(|t| t.meta.name.last() == n).map(|t| t.id).unwrap();
    let pick = if depth <= 1 { rng.gen_range(0..3) } else { rng.gen_range(0..8) };
    match pick {
        0 | 1 => Ty::Scalar(*charon_lite::ir::ScalarKind::ALL.choose(rng).unwrap()),
        2 => Ty::Bool,
        3 => Ty::Tuple((0..rng.gen_range(0..4)).map(|_| random_const_ty(rng, krate, depth - 1)).collect()),
        4 => {
            let n = ScalarValue::wrapping(charon_lite::ir::ScalarKind::U64, rng.gen_range(0..4));
            Ty::Array(Box::new(random_const_ty(rng, krate, depth - 1)), ConstGeneric::Value(n))
        }
        5 => Ty::Adt(by_name("Opt"), GenericArgs::from_types(vec![random_const_ty(rng, krate, depth - 1)])),
        6 if depth >= 3 => Ty::Adt(by_name("Rec"), GenericArgs::empty()),
        _ => Ty::Adt(by_name("Tag"), GenericArgs::empty()),
    }
}

/// A random constant of type `ty` with its byte encoding, written out
/// independently of the library's encoder.
pub fn random_constant(rng: &mut impl Rng, krate: &TranslatedCrate, ty: &Ty) -> (ConstantValue, Vec<u8>) {
    let mut bytes = Vec::new();
    let kind = match ty {
        Ty::Scalar(k) => {
            let v = ScalarValue::wrapping(*k, rng.gen::<i128>());
            let n = k.bytes();
            bytes.extend_from_slice(&v.value.to_le_bytes()[..n]);
            ConstantKind::Scalar(v)
        }
        Ty::Bool => {
            let b: bool = rng.gen();
            bytes.push(b as u8);
            ConstantKind::Bool(b)
        }
        Ty::Tuple(tys) => ConstantKind::Adt(None, fields(rng, krate, tys, &mut bytes)),
        Ty::Array(t, ConstGeneric::Value(n)) => {
            let tys = vec![(**t).clone(); n.value as usize];
            ConstantKind::Adt(None, fields(rng, krate, &tys, &mut bytes))
        }
        Ty::Adt(id, args) => {
            let inst = |t: &Ty| substitute(t, args).unwrap();
            match &krate.type_decls[*id].kind {
                TypeDeclKind::Struct(fs) => {
                    let tys: Vec<Ty> = fs.iter().map(inst).collect();
                    ConstantKind::Adt(None, fields(rng, krate, &tys, &mut bytes))
                }
                TypeDeclKind::Enum(vs) => {
                    let v = rng.gen_range(0..vs.len());
                    bytes.push(v as u8);
                    let tys: Vec<Ty> = vs[v].fields.iter().map(inst).collect();
                    ConstantKind::Adt(Some(VariantId(v as u32)), fields(rng, krate, &tys, &mut bytes))
                }
                TypeDeclKind::Opaque => unreachable!("no opaque constant types"),
            }
        }
        _ => unreachable!("no constant of type {ty:?}"),
    };
    (ConstantValue { ty: ty.clone(), kind }, bytes)
}

fn fields(rng: &mut impl Rng, krate: &TranslatedCrate, tys: &[Ty], bytes: &mut Vec<u8>) -> Vec<ConstantValue> {
    tys.iter()
        .map(|t| {
            let (c, b) = random_constant(rng, krate, t);
            bytes.extend(b);
            c
        })
        .collect()
}
