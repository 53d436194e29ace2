//! Canonical finite unions of dyadic rectangles.
//!
//! A `BasicSet` stores pairwise disjoint rectangles in a unique normal
//! form, so structural equality is set equality. Canonicalization refines
//! the input to its common grid (which also flattens overlaps), then
//! alternates two exhaustive merge phases until neither applies: phase A
//! merges coordinate-2 sibling pairs within each column, phase B merges
//! coordinate-1 sibling pairs within each row. The fixed phase order is
//! the tie-break between competing merges, and the fixpoint has no
//! mergeable sibling pair in either coordinate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::bits::{BitString, Rect};

/// Canonical disjoint union of dyadic rectangles.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BasicSet {
    rects: Vec<Rect>,
}

impl BasicSet {
    pub fn empty() -> Self {
        BasicSet { rects: Vec::new() }
    }

    /// The full product space.
    pub fn full() -> Self {
        BasicSet {
            rects: vec![Rect::full()],
        }
    }

    pub fn from_rects<I: IntoIterator<Item = Rect>>(rects: I) -> Self {
        canonicalize(rects)
    }

    /// 1D set on the second factor, embedded as rectangles Omega1 x [b].
    pub fn from_cylinders2<I: IntoIterator<Item = BitString>>(cyls: I) -> Self {
        canonicalize(cyls.into_iter().map(|b| Rect::new(BitString::empty(), b)))
    }

    /// 1D set on the first factor, embedded as rectangles [b] x Omega2.
    pub fn from_cylinders1<I: IntoIterator<Item = BitString>>(cyls: I) -> Self {
        canonicalize(cyls.into_iter().map(Rect::stripe))
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rects.len() == 1 && self.rects[0] == Rect::full()
    }

    /// Maximum cylinder depths (coordinate 1, coordinate 2).
    pub fn depth(&self) -> (usize, usize) {
        let d1 = self.rects.iter().map(|r| r.a1.len()).max().unwrap_or(0);
        let d2 = self.rects.iter().map(|r| r.a2.len()).max().unwrap_or(0);
        (d1, d2)
    }

    pub fn union(&self, other: &BasicSet) -> BasicSet {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        self.binary_op(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &BasicSet) -> BasicSet {
        if self.is_empty() || other.is_empty() {
            return BasicSet::empty();
        }
        self.binary_op(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &BasicSet) -> BasicSet {
        if self.is_empty() || other.is_empty() {
            return self.clone();
        }
        self.binary_op(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> BasicSet {
        BasicSet::full().difference(self)
    }

    pub fn is_subset_of(&self, other: &BasicSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &BasicSet) -> bool {
        self.intersect(other).is_empty()
    }

    fn binary_op(&self, other: &BasicSet, op: impl Fn(u64, u64) -> u64) -> BasicSet {
        let (a1, a2) = self.depth();
        let (b1, b2) = other.depth();
        let d1 = a1.max(b1);
        let d2 = a2.max(b2);
        let ga = Grid::from_set(self, d1, d2);
        let gb = Grid::from_set(other, d1, d2);
        let words: Vec<u64> = ga
            .words
            .iter()
            .zip(&gb.words)
            .map(|(&x, &y)| op(x, y))
            .collect();
        let g = Grid {
            d1,
            d2,
            words: mask_tail(words, 1usize << (d1 + d2)),
        };
        BasicSet {
            rects: merge_cells(g.cells()),
        }
    }

    /// Whether a cell at least as deep as the set in both coordinates
    /// lies inside the set.
    pub fn contains_cell(&self, cell: &Rect) -> bool {
        let (d1, d2) = self.depth();
        assert!(
            cell.a1.len() >= d1 && cell.a2.len() >= d2,
            "cell shallower than the set"
        );
        self.rects.iter().any(|r| r.contains(cell))
    }

    /// Section over a coordinate-1 prefix.
    ///
    /// When every path extending `prefix` sees the same fiber, returns
    /// that fiber (a 1D set on the second factor) and `true`. Otherwise
    /// returns the fiber along the leftmost path under `prefix` and
    /// `false`.
    pub fn section(&self, prefix: &BitString) -> (BasicSet, bool) {
        let (d1, _) = self.depth();
        if prefix.len() >= d1 {
            let cyls: Vec<BitString> = self
                .rects
                .iter()
                .filter(|r| r.a1.is_prefix_of(prefix))
                .map(|r| r.a2)
                .collect();
            return (BasicSet::from_cylinders2(cyls), true);
        }
        let leftmost = self.section_at_full_depth(&prefix.padded_zero(d1));
        let mut stable = true;
        for i in 1..(1u64 << (d1 - prefix.len())) {
            let e = prefix.concat(&BitString::from_index(d1 - prefix.len(), i));
            if self.section_at_full_depth(&e) != leftmost {
                stable = false;
                break;
            }
        }
        (leftmost, stable)
    }

    fn section_at_full_depth(&self, path: &BitString) -> BasicSet {
        let cyls: Vec<BitString> = self
            .rects
            .iter()
            .filter(|r| r.a1.is_prefix_of(path))
            .map(|r| r.a2)
            .collect();
        BasicSet::from_cylinders2(cyls)
    }

    /// Refine to disjoint cells at exactly the given depths.
    pub fn cells_at(&self, d1: usize, d2: usize) -> Vec<Rect> {
        let (s1, s2) = self.depth();
        assert!(d1 >= s1 && d2 >= s2, "requested grid coarser than the set");
        Grid::from_set(self, d1, d2).cells()
    }
}

impl fmt::Display for BasicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rects.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.rects.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for BasicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for BasicSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rects.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasicSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rects: Vec<Rect> = Deserialize::deserialize(d)?;
        Ok(BasicSet::from_rects(rects))
    }
}

fn canonicalize<I: IntoIterator<Item = Rect>>(rects: I) -> BasicSet {
    let input: Vec<Rect> = rects.into_iter().collect();
    if input.is_empty() {
        return BasicSet::empty();
    }
    let d1 = input.iter().map(|r| r.a1.len()).max().unwrap();
    let d2 = input.iter().map(|r| r.a2.len()).max().unwrap();
    let mut grid = Grid::new(d1, d2);
    for r in &input {
        grid.fill_rect(r);
    }
    BasicSet {
        rects: merge_cells(grid.cells()),
    }
}

/// Alternating exhaustive sibling-merge phases over disjoint rectangles.
fn merge_cells(cells: Vec<Rect>) -> Vec<Rect> {
    let mut rects: BTreeSet<Rect> = cells.into_iter().collect();
    loop {
        let merged_a = merge_phase(&mut rects, /*coord2=*/ true);
        let merged_b = merge_phase(&mut rects, /*coord2=*/ false);
        if !merged_a && !merged_b {
            break;
        }
    }
    rects.into_iter().collect()
}

// One exhaustive phase: merge sibling pairs along one coordinate (the
// other coordinate held fixed), cascading to newly created parents.
fn merge_phase(rects: &mut BTreeSet<Rect>, coord2: bool) -> bool {
    let mut groups: BTreeMap<BitString, BTreeSet<BitString>> = BTreeMap::new();
    for r in rects.iter() {
        let (key, val) = if coord2 { (r.a1, r.a2) } else { (r.a2, r.a1) };
        groups.entry(key).or_default().insert(val);
    }
    let mut changed = false;
    for set in groups.values_mut() {
        changed |= merge_cylinders(set);
    }
    if changed {
        rects.clear();
        for (key, set) in groups {
            for val in set {
                let r = if coord2 {
                    Rect::new(key, val)
                } else {
                    Rect::new(val, key)
                };
                rects.insert(r);
            }
        }
    }
    changed
}

// 1D cylinder-set reduction: replace sibling pairs by their parent until
// none remain. Confluent, so the fixpoint is unique.
fn merge_cylinders(set: &mut BTreeSet<BitString>) -> bool {
    let mut work: Vec<BitString> = set.iter().copied().collect();
    let mut changed = false;
    while let Some(b) = work.pop() {
        if !set.contains(&b) {
            continue;
        }
        let Some(sib) = b.sibling() else { continue };
        if set.contains(&sib) {
            set.remove(&b);
            set.remove(&sib);
            let parent = b.parent().unwrap();
            set.insert(parent);
            work.push(parent);
            changed = true;
        }
    }
    changed
}

// Dense bit grid over the 2^(d1+d2) cells at a fixed pair of depths.
struct Grid {
    d1: usize,
    d2: usize,
    words: Vec<u64>,
}

fn mask_tail(mut words: Vec<u64>, total_bits: usize) -> Vec<u64> {
    let rem = total_bits % 64;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
    words
}

impl Grid {
    fn new(d1: usize, d2: usize) -> Self {
        assert!(d1 + d2 <= 40, "grid would exceed 2^40 cells");
        let bits = 1usize << (d1 + d2);
        Grid {
            d1,
            d2,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn from_set(set: &BasicSet, d1: usize, d2: usize) -> Self {
        let mut g = Grid::new(d1, d2);
        for r in &set.rects {
            g.fill_rect(r);
        }
        g
    }

    fn fill_rect(&mut self, r: &Rect) {
        let span1 = self.d1 - r.a1.len();
        let span2 = self.d2 - r.a2.len();
        let i1_lo = r.a1.index() << span1;
        let i2_lo = r.a2.index() << span2;
        for i1 in i1_lo..i1_lo + (1u64 << span1) {
            let base = (i1 << self.d2) + i2_lo;
            self.set_range(base, base + (1u64 << span2));
        }
    }

    fn set_range(&mut self, lo: u64, hi: u64) {
        let (lo, hi) = (lo as usize, hi as usize);
        let mut i = lo;
        while i < hi {
            let w = i / 64;
            let start = i - w * 64;
            let stop = (hi - w * 64).min(64);
            let mask = if stop == 64 {
                !0u64 << start
            } else {
                ((1u64 << stop) - 1) & (!0u64 << start)
            };
            self.words[w] |= mask;
            i = w * 64 + stop;
        }
    }

    fn cells(&self) -> Vec<Rect> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let idx = (w * 64 + b) as u64;
                let i1 = idx >> self.d2;
                let i2 = idx & ((1u64 << self.d2) - 1);
                out.push(Rect::new(
                    BitString::from_index(self.d1, i1),
                    BitString::from_index(self.d2, i2),
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(spec: &[&str]) -> BasicSet {
        BasicSet::from_rects(spec.iter().map(|s| s.parse::<Rect>().unwrap()))
    }

    #[test]
    fn halves_merge_to_full() {
        let s = set(&["0x*", "1x*"]);
        assert!(s.is_full());
        let s = set(&["*x0", "*x1"]);
        assert!(s.is_full());
    }

    #[test]
    fn quarters_merge_to_full() {
        let s = set(&["0x0", "1x0", "0x1", "1x1"]);
        assert!(s.is_full());
    }

    #[test]
    fn overlap_is_flattened() {
        let s = set(&["0x*", "00x1"]);
        assert_eq!(s, set(&["0x*"]));
        let t = set(&["0x*", "0x*"]);
        assert_eq!(t, set(&["0x*"]));
    }

    #[test]
    fn l_shape_prefers_coordinate2_merge() {
        // Cells 0x0, 0x1, 1x0: phase A merges the left column first.
        let s = set(&["0x0", "0x1", "1x0"]);
        assert_eq!(s.rects(), &["0x*".parse().unwrap(), "1x0".parse().unwrap()]);
    }

    #[test]
    fn order_insensitive() {
        let a = set(&["0x0", "1x1", "00x1"]);
        let b = set(&["00x1", "1x1", "0x0"]);
        assert_eq!(a, b);
    }

    #[test]
    fn refinement_insensitive() {
        let a = set(&["0x*"]);
        let b = set(&["00x0", "00x1", "01x*"]);
        assert_eq!(a, b);
    }

    #[test]
    fn set_ops() {
        let a = set(&["0x*"]);
        let b = set(&["*x1"]);
        assert_eq!(a.intersect(&b), set(&["0x1"]));
        assert_eq!(a.union(&b), set(&["0x*", "1x1"]));
        assert_eq!(a.difference(&b), set(&["0x0"]));
        assert_eq!(a.union(&a.complement()), BasicSet::full());
        assert!(a.intersect(&b).is_subset_of(&a));
        assert!(set(&["0x1"]).is_disjoint_from(&set(&["1x*"])));
    }

    #[test]
    fn section_stability() {
        // Example: U = {00 x 1}, prefix 0 is not stable; sections under
        // 00 and 01 differ.
        let u = set(&["00x1"]);
        let p0: BitString = "0".parse().unwrap();
        let (sec, stable) = u.section(&p0);
        assert!(!stable);
        assert_eq!(sec, set(&["*x1"]));
        let p00: BitString = "00".parse().unwrap();
        let (sec, stable) = u.section(&p00);
        assert!(stable);
        assert_eq!(sec, set(&["*x1"]));
        let p1: BitString = "1".parse().unwrap();
        let (sec, stable) = u.section(&p1);
        assert!(stable);
        assert!(sec.is_empty());
    }

    #[test]
    fn contains_cell_checks() {
        let s = set(&["0x1", "10x*"]);
        assert!(s.contains_cell(&"00x1".parse().unwrap()));
        assert!(s.contains_cell(&"10x0".parse().unwrap()));
        assert!(!s.contains_cell(&"11x1".parse().unwrap()));
    }
}
