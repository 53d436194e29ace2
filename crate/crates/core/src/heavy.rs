//! Heavy-interval enumeration, section bounds along paths, and the
//! discard-below transform.

use serde::Serialize;

use crate::bits::{BitString, Rect};
use crate::measures::{cond_interval, set_mass, Measure, MeasureError};
use crate::path::PathSpec;
use crate::rat::{Rat, RatInterval};
use crate::sets::BasicSet;

/// Whether P(U ∩ (I×Ω₂)) > 2^-n · P₁(I), strictly.
pub fn is_heavy(
    p: &dyn Measure,
    u: &BasicSet,
    n: u32,
    interval: &BitString,
) -> Result<bool, MeasureError> {
    let stripe = BasicSet::from_cylinders1(vec![*interval]);
    let restricted = u.intersect(&stripe);
    let mass = set_mass(p, &restricted)?;
    let marginal = p.mass(&Rect::new(*interval, BitString::empty()))?;
    Ok(mass > Rat::pow2(-(n as i64)) * marginal)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeavyScan {
    pub n: u32,
    pub heavy: Vec<BitString>,
    pub union_measure: Rat,
    pub bound: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<BitString>,
}

impl HeavyScan {
    pub fn bound_value(&self) -> Rat {
        Rat::pow2(-(self.n as i64))
    }

    pub fn set(&self) -> BasicSet {
        BasicSet::from_cylinders1(self.heavy.clone())
    }
}

/// Top-down scan for maximal heavy intervals: an interval is heavy iff
/// P(U ∩ (I×Ω₂)) > 2^-n · P₁(I), strictly. Children of heavy intervals
/// are not scanned, so the reported list is an antichain and no strict
/// ancestor of a reported interval is heavy. Zero-marginal intervals
/// cannot be heavy and their subtrees are skipped.
///
/// `ok` records the measure bound: whenever P(U) ≤ 2^-2n, the union of
/// heavy intervals has marginal mass at most 2^-n.
pub fn enumerate_heavy(
    p: &dyn Measure,
    u: &BasicSet,
    n: u32,
    maxdepth: usize,
) -> Result<HeavyScan, MeasureError> {
    let threshold = Rat::pow2(-(n as i64));
    let mut heavy = Vec::new();
    let mut skipped = Vec::new();
    let mut union_measure = Rat::zero();
    // Restricting U once per node keeps the per-level work proportional
    // to what survives under that interval.
    let mut stack: Vec<(BitString, BasicSet)> = vec![(BitString::empty(), u.clone())];
    while let Some((interval, rest)) = stack.pop() {
        let marginal = p.mass(&Rect::new(interval, BitString::empty()))?;
        if marginal.is_zero() {
            skipped.push(interval);
            continue;
        }
        let mass = set_mass(p, &rest)?;
        if mass > &threshold * &marginal {
            union_measure += marginal;
            heavy.push(interval);
            continue;
        }
        if interval.len() < maxdepth {
            for bit in [false, true] {
                let child = interval.child(bit);
                let stripe = BasicSet::from_cylinders1(vec![child]);
                stack.push((child, rest.intersect(&stripe)));
            }
        }
    }
    heavy.sort();
    skipped.sort();
    let total = set_mass(p, u)?;
    let applies = total <= Rat::pow2(-2 * n as i64);
    let ok = !applies || union_measure <= threshold;
    Ok(HeavyScan {
        n,
        heavy,
        union_measure,
        bound: format!("2^-{n}"),
        ok,
        skipped,
    })
}

/// Outcome of a section bound check along a path.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SectionCheck {
    /// The path runs through a heavy interval, so the bound is not
    /// claimed there.
    InsideHeavy { interval: BitString },
    Checked {
        prefix: BitString,
        section_stable: bool,
        section_mass: RatInterval,
        bound: Rat,
        ok: bool,
    },
}

impl SectionCheck {
    pub fn ok(&self) -> bool {
        match self {
            SectionCheck::InsideHeavy { .. } => false,
            SectionCheck::Checked { ok, .. } => *ok,
        }
    }
}

/// Conditional mass of the U-section along the path at the reached
/// depth, against the 2^-n bound. The enclosure's certain part must
/// stay at or below the bound; slack is whatever width the oracle left.
pub fn section_bound_check(
    p: &dyn Measure,
    u: &BasicSet,
    n: u32,
    path: &PathSpec,
    depth: usize,
) -> Result<SectionCheck, MeasureError> {
    let scan = enumerate_heavy(p, u, n, depth)?;
    let prefix = path.prefix(depth);
    if let Some(h) = scan.heavy.iter().find(|h| h.is_prefix_of(&prefix)) {
        return Ok(SectionCheck::InsideHeavy { interval: *h });
    }
    let (section, section_stable) = u.section(&prefix);
    let precision = Rat::pow2(-(depth as i64 + 4));
    let mut mass = RatInterval::point(Rat::zero());
    for r in section.rects() {
        debug_assert!(r.a1.is_empty());
        let iv = cond_interval(p, &prefix, &r.a2, &precision)?;
        mass = mass.add(&iv);
    }
    let bound = Rat::pow2(-(n as i64));
    let ok = *mass.lo() <= bound;
    Ok(SectionCheck::Checked {
        prefix,
        section_stable,
        section_mass: mass,
        bound,
        ok,
    })
}

// a_k rounded up to the grid the rect's y-extent lives on. Dyadic cut
// points round to themselves once the grid is at least their depth.
fn rounded_cut(a_k: &Rat, y_depth: usize) -> Rat {
    let depth = match a_k.dyadic_depth() {
        Some(d) => (d as usize).max(y_depth),
        None => y_depth.max(24),
    };
    a_k.ceil_to_grid(depth as u32)
}

/// Intersect each rectangle's y-extent with [â_k, 1), where k is the
/// rectangle's x-depth and â_k is a_k rounded up to the rectangle's
/// y-grid. Full-width rectangles (k = 0) are kept whole.
pub fn discard_below(u: &BasicSet, cfg: &crate::measures::SequenceConfig) -> Result<BasicSet, MeasureError> {
    let mut out: Vec<Rect> = Vec::new();
    for r in u.rects() {
        let k = r.a1.len();
        if k == 0 {
            out.push(r.clone());
            continue;
        }
        if k > cfg.len() {
            return Err(MeasureError::InsufficientSequenceTerms {
                needed: k,
                have: cfg.len(),
            });
        }
        let cut = rounded_cut(&cfg.term(k), r.a2.len());
        let grid = cut
            .dyadic_depth()
            .expect("rounded cut is dyadic")
            .max(r.a2.len() as u32);
        let lo = r.a2.left_endpoint();
        let hi = &lo + &r.a2.width();
        let start = if cut > lo { cut } else { lo };
        // [start, hi) as depth-`grid` cells; start and hi sit on the grid.
        let step = Rat::pow2(-(grid as i64));
        let mut left = start;
        while left < hi {
            let idx = left
                .grid_index(grid)
                .expect("grid-aligned endpoint");
            let idx: u64 = idx.try_into().expect("grid index fits");
            out.push(Rect::new(r.a1, BitString::from_index(grid as usize, idx)));
            left = &left + &step;
        }
    }
    Ok(BasicSet::from_rects(out))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub discarded: BasicSet,
    pub segments_mass: Rat,
    pub uniform_mass: Rat,
    pub ok: bool,
}

/// After discarding, the segments measure agrees with the uniform
/// measure on what remains, exactly.
pub fn discard_equivalence(
    u: &BasicSet,
    cfg: &crate::measures::SequenceConfig,
) -> Result<EquivalenceReport, MeasureError> {
    let discarded = discard_below(u, cfg)?;
    let p = crate::measures::SegmentsMeasure::new(cfg.clone());
    let segments_mass = set_mass(&p, &discarded)?;
    let uniform_mass = set_mass(&crate::measures::UniformMeasure, &discarded)?;
    let ok = segments_mass == uniform_mass;
    Ok(EquivalenceReport {
        discarded,
        segments_mass,
        uniform_mass,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{default_sequence, OscillatingMeasure, UniformMeasure};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(spec: &[&str]) -> BasicSet {
        BasicSet::from_rects(spec.iter().map(|s| s.parse::<Rect>().unwrap()))
    }

    #[test]
    fn quarter_square_is_heavy() {
        let u = set(&["00x*"]);
        let scan = enumerate_heavy(&UniformMeasure, &u, 1, 6).unwrap();
        assert_eq!(scan.heavy, vec![b("00")]);
        assert_eq!(scan.union_measure, Rat::new(1, 4));
        assert!(scan.ok);
    }

    #[test]
    fn strictness_blocks_exact_ratio() {
        // Fraction inside [00] is exactly 1/2 everywhere: not heavy.
        let u = set(&["00x0"]);
        let scan = enumerate_heavy(&UniformMeasure, &u, 1, 6).unwrap();
        assert!(scan.heavy.is_empty());
        assert!(scan.union_measure.is_zero());
        assert!(scan.ok);
    }

    #[test]
    fn empty_set_has_no_heavy_intervals() {
        let scan = enumerate_heavy(&UniformMeasure, &BasicSet::empty(), 2, 6).unwrap();
        assert!(scan.heavy.is_empty());
        assert!(scan.ok);
    }

    #[test]
    fn heavy_list_is_antichain_with_light_ancestors() {
        let u = set(&["00x*", "0100x1", "111x01"]);
        let scan = enumerate_heavy(&UniformMeasure, &u, 1, 6).unwrap();
        for h in &scan.heavy {
            for g in &scan.heavy {
                assert!(h == g || !h.is_prefix_of(g), "{h} contains {g}");
            }
            for d in 0..h.len() {
                let anc = h.truncated(d);
                assert!(!is_heavy(&UniformMeasure, &u, 1, &anc).unwrap());
            }
        }
    }

    #[test]
    fn monotone_under_inclusion() {
        let small = set(&["00x1"]);
        let big = set(&["00x*", "1x1"]);
        for d in 0..=4 {
            for i in 0..1u64 << d {
                let interval = BitString::from_index(d, i);
                if is_heavy(&OscillatingMeasure, &small, 2, &interval).unwrap() {
                    assert!(is_heavy(&OscillatingMeasure, &big, 2, &interval).unwrap());
                }
            }
        }
    }

    #[test]
    fn section_check_on_empty_section() {
        let u = set(&["00x0"]);
        let check = section_bound_check(&UniformMeasure, &u, 1, &PathSpec::Ones, 4).unwrap();
        match check {
            SectionCheck::Checked { section_mass, ok, .. } => {
                assert!(section_mass.is_point());
                assert!(section_mass.lo().is_zero());
                assert!(ok);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn section_check_reports_heavy_path() {
        let u = set(&["00x*"]);
        let check = section_bound_check(&UniformMeasure, &u, 1, &PathSpec::Zeros, 4).unwrap();
        assert!(matches!(check, SectionCheck::InsideHeavy { .. }));
    }

    #[test]
    fn discard_keeps_full_width() {
        let u = BasicSet::full();
        let cfg = default_sequence(4);
        assert_eq!(discard_below(&u, &cfg).unwrap(), u);
    }

    #[test]
    fn discard_halves_example() {
        let u = set(&["0x0"]);
        let cfg = default_sequence(4);
        let out = discard_below(&u, &cfg).unwrap();
        // y-extent [0,1/2) ∩ [1/4,1) = [1/4,1/2).
        assert_eq!(out, set(&["0x01"]));
    }

    #[test]
    fn discard_needs_enough_terms() {
        let u = set(&["000x*"]);
        let cfg = default_sequence(2);
        assert!(matches!(
            discard_below(&u, &cfg),
            Err(MeasureError::InsufficientSequenceTerms { needed: 3, have: 2 })
        ));
    }

    #[test]
    fn discard_equivalence_examples() {
        let cfg = default_sequence(6);
        for spec in [
            vec!["0x0"],
            vec!["*x*"],
            vec!["01x*", "1x10"],
            vec!["000110x010101"],
        ] {
            let u = set(&spec);
            let report = discard_equivalence(&u, &cfg).unwrap();
            assert!(report.ok, "{spec:?}: {report:?}");
        }
    }

    #[test]
    fn rounded_cut_respects_grid() {
        // 1/4 on a depth-1 grid stays 1/4 (its own depth is finer).
        assert_eq!(rounded_cut(&Rat::new(1, 4), 1), Rat::new(1, 4));
        // 5/16 on a depth-2 grid keeps depth 4.
        assert_eq!(rounded_cut(&Rat::new(5, 16), 2), Rat::new(5, 16));
        // Non-dyadic 1/3 rounds up on a deep grid.
        let r = rounded_cut(&Rat::new(1, 3), 2);
        assert!(r > Rat::new(1, 3));
        assert!(&r - &Rat::new(1, 3) <= Rat::pow2(-24));
        assert!(r.dyadic_depth().is_some());
    }
}
