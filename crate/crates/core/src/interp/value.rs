use std::fmt;

use crate::ir::{ConstantKind, ConstantValue, LocalId, ScalarValue, Ty, VariantId};

/// Points at a sub-value of a local in some stack frame.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pointer {
    pub frame: usize,
    pub local: LocalId,
    pub path: Vec<usize>,
}

/// Runtime values. Tuples, structs and enums are all `Adt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Scalar(ScalarValue),
    Bool(bool),
    Adt(Option<VariantId>, Vec<Value>),
    Array(Vec<Value>),
    Ref(Pointer),
    /// The value was moved out.
    Moved,
}

impl Value {
    pub fn unit() -> Value {
        Value::Adt(None, Vec::new())
    }

    pub fn contains_moved(&self) -> bool {
        match self {
            Value::Moved => true,
            Value::Adt(_, fs) | Value::Array(fs) => fs.iter().any(Value::contains_moved),
            _ => false,
        }
    }

    /// Raw constants are read directly when they have a scalar or bool type;
    /// other Raw constants give `None`.
    pub fn from_constant(c: &ConstantValue) -> Option<Value> {
        Some(match &c.kind {
            ConstantKind::Scalar(s) => Value::Scalar(*s),
            ConstantKind::Bool(b) => Value::Bool(*b),
            ConstantKind::Adt(v, fields) => {
                let vals = fields.iter().map(Value::from_constant).collect::<Option<Vec<_>>>()?;
                if matches!(c.ty, Ty::Array(..)) {
                    Value::Array(vals)
                } else {
                    Value::Adt(*v, vals)
                }
            }
            ConstantKind::Raw(bytes) => match &c.ty {
                Ty::Scalar(k) => Value::Scalar(ScalarValue::from_le_bytes(*k, bytes)?),
                Ty::Bool => match bytes.as_slice() {
                    [0] => Value::Bool(false),
                    [1] => Value::Bool(true),
                    _ => return None,
                },
                _ => return None,
            },
        })
    }
}

impl From<&ConstantValue> for Value {
    fn from(c: &ConstantValue) -> Value {
        Value::from_constant(c).unwrap_or(Value::Moved)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, vs: &[Value]| -> fmt::Result {
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        };
        match self {
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Adt(None, vs) => {
                f.write_str("(")?;
                list(f, vs)?;
                f.write_str(")")
            }
            Value::Adt(Some(v), vs) => {
                write!(f, "{v}(")?;
                list(f, vs)?;
                f.write_str(")")
            }
            Value::Array(vs) => {
                f.write_str("[")?;
                list(f, vs)?;
                f.write_str("]")
            }
            Value::Ref(p) => {
                write!(f, "&{}", p.local)?;
                for i in &p.path {
                    write!(f, ".{i}")?;
                }
                Ok(())
            }
            Value::Moved => f.write_str("<moved>"),
        }
    }
}
