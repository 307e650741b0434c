//! Serde glue for reals that may be infinite.
//!
//! JSON has no literal for infinity, so bounds are written as the strings
//! `"inf"` / `"-inf"`. Finite values stay plain JSON numbers and use the
//! shortest round-trip decimal representation.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Str(String),
}

pub(crate) fn parse_str(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        other => other.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

pub fn serialize<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        ser.serialize_str("inf")
    } else if *v == f64::NEG_INFINITY {
        ser.serialize_str("-inf")
    } else {
        ser.serialize_f64(*v)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    match Repr::deserialize(de)? {
        Repr::Num(v) => Ok(v),
        Repr::Str(s) => {
            parse_str(&s).ok_or_else(|| de::Error::custom(format!("not a real number: {s:?}")))
        }
    }
}

/// Same encoding for a `[lo, hi]` pair.
pub mod pair {
    use super::Repr;
    use serde::de::{self, Deserializer};
    use serde::ser::{SerializeTuple, Serializer};
    use serde::Deserialize;

    struct Ext(f64);

    impl serde::Serialize for Ext {
        fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
            super::serialize(&self.0, ser)
        }
    }

    pub fn serialize<S: Serializer>(v: &(f64, f64), ser: S) -> Result<S::Ok, S::Error> {
        let mut t = ser.serialize_tuple(2)?;
        t.serialize_element(&Ext(v.0))?;
        t.serialize_element(&Ext(v.1))?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<(f64, f64), D::Error> {
        let (a, b) = <(Repr, Repr)>::deserialize(de)?;
        let conv = |r: Repr| match r {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => super::parse_str(&s)
                .ok_or_else(|| de::Error::custom(format!("not a real number: {s:?}"))),
        };
        Ok((conv(a)?, conv(b)?))
    }
}
