//! Finite binary strings and dyadic rectangles.
//!
//! A `BitString` a of length k names the cylinder of all infinite binary
//! sequences extending a, identified with the half-open dyadic interval
//! [j·2^-k, (j+1)·2^-k) where j is a read as a binary numeral. Boundary
//! points belong to the cylinder whose left endpoint they are.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::rat::Rat;

/// Maximum supported cylinder depth; everything here packs into a u64.
pub const MAX_DEPTH: usize = 60;

/// A finite binary string (possibly empty), i.e. a dyadic cylinder.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    len: u8,
    // Value of the string read as a binary numeral; high bits are zero.
    bits: u64,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { len: 0, bits: 0 }
    }

    /// The cylinder at `depth` with left-to-right index `index`.
    pub fn from_index(depth: usize, index: u64) -> Self {
        assert!(depth <= MAX_DEPTH, "depth {depth} exceeds MAX_DEPTH");
        assert!(index < (1u64 << depth), "index out of range at depth {depth}");
        BitString {
            len: depth as u8,
            bits: index,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitString::empty();
        for &b in bits {
            s = s.child(b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index among the 2^len cylinders of this depth, left to right.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn child(&self, one: bool) -> Self {
        assert!(self.len() < MAX_DEPTH, "depth exceeds MAX_DEPTH");
        BitString {
            len: self.len + 1,
            bits: (self.bits << 1) | u64::from(one),
        }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.len == 0 {
            None
        } else {
            Some(BitString {
                len: self.len - 1,
                bits: self.bits >> 1,
            })
        }
    }

    pub fn last(&self) -> Option<bool> {
        if self.len == 0 {
            None
        } else {
            Some(self.bits & 1 == 1)
        }
    }

    pub fn sibling(&self) -> Option<Self> {
        if self.len == 0 {
            None
        } else {
            Some(BitString {
                len: self.len,
                bits: self.bits ^ 1,
            })
        }
    }

    pub fn truncated(&self, depth: usize) -> Self {
        assert!(depth <= self.len());
        BitString {
            len: depth as u8,
            bits: self.bits >> (self.len() - depth),
        }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && other.bits >> (other.len() - self.len()) == self.bits
    }

    /// The two cylinders overlap iff one extends the other.
    pub fn compatible(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Extend with zero bits up to `depth`.
    pub fn padded_zero(&self, depth: usize) -> Self {
        assert!(depth >= self.len() && depth <= MAX_DEPTH);
        BitString {
            len: depth as u8,
            bits: self.bits << (depth - self.len()),
        }
    }

    pub fn concat(&self, suffix: &BitString) -> Self {
        assert!(self.len() + suffix.len() <= MAX_DEPTH);
        BitString {
            len: self.len + suffix.len,
            bits: (self.bits << suffix.len()) | suffix.bits,
        }
    }

    /// Left endpoint of the dyadic interval, as an exact rational.
    pub fn left_endpoint(&self) -> Rat {
        Rat::from_big(num::BigRational::new(
            num::BigInt::from(self.bits),
            num::BigInt::from(1u64) << self.len(),
        ))
    }

    /// Interval width 2^-len.
    pub fn width(&self) -> Rat {
        Rat::pow2(-(self.len() as i64))
    }

    pub fn ancestors(&self) -> impl Iterator<Item = BitString> + '_ {
        (0..=self.len()).map(|d| self.truncated(d))
    }

    /// All cylinders of the given depth, left to right.
    pub fn all_at_depth(depth: usize) -> impl Iterator<Item = BitString> {
        assert!(depth <= MAX_DEPTH);
        (0..(1u64 << depth)).map(move |i| BitString::from_index(depth, i))
    }
}

// Tree order: prefixes come before their extensions, and at the first
// differing bit 0 sorts before 1.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len().min(other.len());
        let a = self.bits >> (self.len() - common);
        let b = other.bits >> (other.len() - common);
        a.cmp(&b).then_with(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid bit string {0:?}")]
pub struct ParseBitsError(String);

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = if s == "*" || s == "e" { "" } else { s };
        if body.len() > MAX_DEPTH {
            return Err(ParseBitsError(s.to_string()));
        }
        let mut out = BitString::empty();
        for c in body.chars() {
            match c {
                '0' => out = out.child(false),
                '1' => out = out.child(true),
                _ => return Err(ParseBitsError(s.to_string())),
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A dyadic rectangle [a1] x [a2] in the product of two binary Cantor
/// spaces. (empty, empty) is the full square.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub a1: BitString,
    pub a2: BitString,
}

impl Rect {
    pub fn new(a1: BitString, a2: BitString) -> Self {
        Rect { a1, a2 }
    }

    pub fn full() -> Self {
        Rect {
            a1: BitString::empty(),
            a2: BitString::empty(),
        }
    }

    /// Vertical stripe [a1] x Omega2.
    pub fn stripe(a1: BitString) -> Self {
        Rect {
            a1,
            a2: BitString::empty(),
        }
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.a1.compatible(&other.a1) && self.a2.compatible(&other.a2)
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.a1.is_prefix_of(&other.a1) && self.a2.is_prefix_of(&other.a2)
    }

    /// Intersection of two overlapping rectangles (the deeper prefix wins
    /// coordinatewise).
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        if !self.intersects(other) {
            return None;
        }
        let a1 = if self.a1.len() >= other.a1.len() {
            self.a1
        } else {
            other.a1
        };
        let a2 = if self.a2.len() >= other.a2.len() {
            self.a2
        } else {
            other.a2
        };
        Some(Rect { a1, a2 })
    }

    /// Uniform (Lebesgue) mass of the rectangle.
    pub fn area(&self) -> Rat {
        Rat::pow2(-((self.a1.len() + self.a2.len()) as i64))
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p1 = if self.a1.is_empty() {
            "*".to_string()
        } else {
            self.a1.to_string()
        };
        let p2 = if self.a2.is_empty() {
            "*".to_string()
        } else {
            self.a2.to_string()
        };
        write!(f, "{p1}x{p2}")
    }
}

impl fmt::Debug for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rectangle {0:?}, expected e.g. \"01x1\" or \"[01]x*\"")]
pub struct ParseRectError(String);

impl FromStr for Rect {
    type Err = ParseRectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = s.trim();
        let (p1, p2) = raw
            .split_once('x')
            .ok_or_else(|| ParseRectError(raw.to_string()))?;
        let strip = |p: &str| p.trim().trim_start_matches('[').trim_end_matches(']').to_string();
        let a1 = strip(p1)
            .parse()
            .map_err(|_| ParseRectError(raw.to_string()))?;
        let a2 = strip(p2)
            .parse()
            .map_err(|_| ParseRectError(raw.to_string()))?;
        Ok(Rect { a1, a2 })
    }
}

impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}
