//! Serializes exact rationals as `"p/q"` strings (`"p"` for integers).

use num_rational::BigRational;
use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
    let text = String::deserialize(d)?;
    crate::rational::parse(&text).map_err(de::Error::custom)
}
