//! Scalar values and structured constants.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::VariantId;
use super::types::{ScalarKind, Ty};

/// An integer tagged with its scalar kind. The value is stored as a signed
/// 128-bit integer, which covers every supported kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScalarValue {
    pub kind: ScalarKind,
    #[serde(with = "i128_string")]
    pub value: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{value} does not fit in {}", kind.name())]
pub struct ScalarOutOfRange {
    pub kind: ScalarKind,
    pub value: i128,
}

impl ScalarValue {
    pub fn new(kind: ScalarKind, value: i128) -> Result<ScalarValue, ScalarOutOfRange> {
        if kind.contains(value) {
            Ok(ScalarValue { kind, value })
        } else {
            Err(ScalarOutOfRange { kind, value })
        }
    }

    pub fn wrapping(kind: ScalarKind, value: i128) -> ScalarValue {
        ScalarValue { kind, value: kind.wrap(value) }
    }

    pub fn in_range(self) -> bool {
        self.kind.contains(self.value)
    }

    /// Little-endian two's-complement bytes at the kind's natural width.
    pub fn to_le_bytes(self) -> Vec<u8> {
        let raw = (self.value as u128).to_le_bytes();
        raw[..self.kind.bytes()].to_vec()
    }

    pub fn from_le_bytes(kind: ScalarKind, bytes: &[u8]) -> Option<ScalarValue> {
        if bytes.len() != kind.bytes() {
            return None;
        }
        let mut raw = [0u8; 16];
        raw[..bytes.len()].copy_from_slice(bytes);
        Some(ScalarValue::wrapping(kind, u128::from_le_bytes(raw) as i128))
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, self.kind.name())
    }
}

pub(crate) mod i128_string {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<i128>()
            .map_err(|_| D::Error::custom(format!("invalid decimal integer {text:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstantValue {
    pub ty: Ty,
    pub kind: ConstantKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstantKind {
    Scalar(ScalarValue),
    Bool(bool),
    /// Structs, enums (with a variant), tuples and arrays.
    Adt(Option<VariantId>, Vec<ConstantValue>),
    /// Compiled bytes, present only before constant decoding.
    Raw(#[serde(with = "hex_bytes")] Vec<u8>),
}

pub(crate) mod hex_bytes {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_hex(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        super::from_hex(&text).ok_or_else(|| D::Error::custom(format!("invalid hex {text:?}")))
    }
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02X}")).collect()
}

pub fn from_hex(text: &str) -> Option<Vec<u8>> {
    if text.len() % 2 != 0 || !text.is_ascii() {
        return None;
    }
    (0..text.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&text[i..i + 2], 16).ok())
        .collect()
}

impl ConstantValue {
    pub fn scalar(value: ScalarValue) -> ConstantValue {
        ConstantValue { ty: Ty::Scalar(value.kind), kind: ConstantKind::Scalar(value) }
    }

    pub fn bool(b: bool) -> ConstantValue {
        ConstantValue { ty: Ty::Bool, kind: ConstantKind::Bool(b) }
    }

    pub fn unit() -> ConstantValue {
        ConstantValue { ty: Ty::unit(), kind: ConstantKind::Adt(None, Vec::new()) }
    }

    pub fn contains_raw(&self) -> bool {
        match &self.kind {
            ConstantKind::Raw(_) => true,
            ConstantKind::Adt(_, fields) => fields.iter().any(|f| f.contains_raw()),
            ConstantKind::Scalar(_) | ConstantKind::Bool(_) => false,
        }
    }
}
