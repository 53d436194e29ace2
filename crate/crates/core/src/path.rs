//! Deterministic infinite binary paths.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitString;

/// A computable point of Cantor space: bit(i) is total and deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PathSpec {
    Zeros,
    Ones,
    /// Periodic repetition of a nonempty word, e.g. 010101... for "01".
    Cycle(BitString),
    /// A finite word followed by zeros.
    WordThenZeros(BitString),
}

impl PathSpec {
    pub fn bit(&self, i: usize) -> bool {
        match self {
            PathSpec::Zeros => false,
            PathSpec::Ones => true,
            PathSpec::Cycle(w) => w.bit(i % w.len()),
            PathSpec::WordThenZeros(w) => i < w.len() && w.bit(i),
        }
    }

    pub fn prefix(&self, depth: usize) -> BitString {
        let mut p = BitString::empty();
        for i in 0..depth {
            p = p.child(self.bit(i));
        }
        p
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSpec::Zeros => f.write_str("zeros"),
            PathSpec::Ones => f.write_str("ones"),
            PathSpec::Cycle(w) => write!(f, "cycle:{w}"),
            PathSpec::WordThenZeros(w) => write!(f, "word:{w}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid path spec {0:?}, expected zeros|ones|cycle:BITS|word:BITS")]
pub struct ParsePathError(String);

impl FromStr for PathSpec {
    type Err = ParsePathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_bits = |b: &str| b.parse::<BitString>().map_err(|_| ParsePathError(s.into()));
        match s {
            "zeros" => Ok(PathSpec::Zeros),
            "ones" => Ok(PathSpec::Ones),
            _ => {
                if let Some(w) = s.strip_prefix("cycle:") {
                    let w = parse_bits(w)?;
                    if w.is_empty() {
                        return Err(ParsePathError(s.into()));
                    }
                    Ok(PathSpec::Cycle(w))
                } else if let Some(w) = s.strip_prefix("word:") {
                    Ok(PathSpec::WordThenZeros(parse_bits(w)?))
                } else if s.chars().all(|c| c == '0' || c == '1') && !s.is_empty() {
                    Ok(PathSpec::WordThenZeros(parse_bits(s)?))
                } else {
                    Err(ParsePathError(s.into()))
                }
            }
        }
    }
}

impl Serialize for PathSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PathSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}
