use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Widest entity space that is ever enumerated exhaustively.
pub const WIDTH_CAP: usize = 20;

/// Ordered binary features `F_1 … F_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSpace {
    names: Vec<String>,
}

impl FeatureSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::FeatureSpace(
                "at least one feature is required".into(),
            ));
        }
        if names.len() > 64 {
            return Err(Error::FeatureSpace(format!(
                "{} features, at most 64",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::FeatureSpace("empty feature name".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::FeatureSpace(format!("duplicate feature `{n}`")));
            }
        }
        Ok(Self { names })
    }

    /// Features named `F1 … Fn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("F{i}")))
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn check(&self, e: &Entity) -> Result<()> {
        check_width(self.width(), e)
    }

    /// All `2^n` entities in counting order, `F1` as the lowest bit.
    pub fn entities(&self) -> Result<impl Iterator<Item = Entity>> {
        all_entities(self.width())
    }
}

pub(crate) fn check_width(expected: usize, e: &Entity) -> Result<()> {
    if e.width() != expected {
        return Err(Error::WidthMismatch {
            expected,
            found: e.width(),
        });
    }
    Ok(())
}

pub(crate) fn check_cap(width: usize) -> Result<()> {
    if width > WIDTH_CAP {
        return Err(Error::WidthCap {
            width,
            cap: WIDTH_CAP,
        });
    }
    Ok(())
}

pub fn all_entities(width: usize) -> Result<impl Iterator<Item = Entity>> {
    check_cap(width)?;
    Ok((0..1u64 << width).map(move |bits| Entity { bits, width }))
}

/// A binary feature vector. Bit `i` holds the value of feature `i`; the
/// text form lists `F1` first, so `"011"` has `F1 = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity {
    pub(super) bits: u64,
    pub(super) width: usize,
}

impl Entity {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width == 0 || width > 64 || (width < 64 && bits >> width != 0) {
            return Err(Error::InvalidParameter(format!(
                "bits {bits:#x} do not fit width {width}"
            )));
        }
        Ok(Self { bits, width })
    }

    pub fn from_values(values: &[bool]) -> Result<Self> {
        let bits = values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (u64::from(v) << i));
        Self::new(bits, values.len())
    }

    /// Parses `"011"`-style text, one character per feature.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!(
                    "entity `{text}` must consist of 0 and 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(&values)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits & (1 << i) != 0
    }

    pub fn with(&self, i: usize, v: bool) -> Self {
        let bits = if v {
            self.bits | 1 << i
        } else {
            self.bits & !(1 << i)
        };
        Self { bits, ..*self }
    }

    pub fn flip(&self, i: usize) -> Self {
        Self {
            bits: self.bits ^ 1 << i,
            ..*self
        }
    }

    /// True when both entities carry the same values on the features in `mask`.
    pub fn agrees_on(&self, other: &Entity, mask: u64) -> bool {
        (self.bits ^ other.bits) & mask == 0
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Entity({self})")
    }
}

impl Serialize for Entity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Entity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Entity::parse(&text).map_err(serde::de::Error::custom)
    }
}
