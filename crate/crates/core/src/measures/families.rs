//! Built-in measure families.

use crate::bits::{BitString, Rect};
use crate::measures::{Measure, MeasureError, SeqMeasure};
use crate::path::PathSpec;
use crate::rat::{Rat, RatInterval};

fn exact(v: Rat) -> Result<RatInterval, MeasureError> {
    Ok(RatInterval::point(v))
}

// Cylinder endpoints fixed once so repeated band clips stay cheap.
struct BandClip {
    lo_edge: Rat,
    hi_edge: Rat,
}

impl BandClip {
    fn new(a2: &BitString) -> Self {
        let lo_edge = a2.left_endpoint();
        let hi_edge = &lo_edge + &a2.width();
        BandClip { lo_edge, hi_edge }
    }

    // Overlap length of the cylinder with the horizontal band [lo, hi).
    fn overlap(&self, lo: &Rat, hi: &Rat) -> Rat {
        let left = if lo > &self.lo_edge { lo } else { &self.lo_edge };
        let right = if hi < &self.hi_edge { hi } else { &self.hi_edge };
        if left < right {
            right - left
        } else {
            Rat::zero()
        }
    }
}

/// The uniform (Lebesgue) measure on the square.
pub struct UniformMeasure;

impl Measure for UniformMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        exact(rect.area())
    }
}

/// Uniform measure on one factor.
pub struct UniformSeq;

impl SeqMeasure for UniformSeq {
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError> {
        Ok(a.width())
    }
}

/// Bernoulli(p) coin measure on one factor.
pub struct BernoulliSeq {
    p: Rat,
}

impl BernoulliSeq {
    pub fn new(p: Rat) -> Result<Self, MeasureError> {
        if p.is_negative() || p > Rat::one() {
            return Err(MeasureError::InvalidConfig(format!(
                "bernoulli parameter {p} outside [0, 1]"
            )));
        }
        Ok(BernoulliSeq { p })
    }
}

impl SeqMeasure for BernoulliSeq {
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError> {
        let q = Rat::one() - &self.p;
        let mut m = Rat::one();
        for i in 0..a.len() {
            m = m * if a.bit(i) { &self.p } else { &q };
        }
        Ok(m)
    }
}

/// Dirac point mass at a computable path.
pub struct PointMassSeq {
    path: PathSpec,
}

impl PointMassSeq {
    pub fn new(path: PathSpec) -> Self {
        PointMassSeq { path }
    }
}

impl SeqMeasure for PointMassSeq {
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError> {
        for i in 0..a.len() {
            if a.bit(i) != self.path.bit(i) {
                return Ok(Rat::zero());
            }
        }
        Ok(Rat::one())
    }
}

/// Independent product of two factor measures.
pub struct ProductMeasure {
    p1: Box<dyn SeqMeasure>,
    p2: Box<dyn SeqMeasure>,
}

impl ProductMeasure {
    pub fn new(p1: Box<dyn SeqMeasure>, p2: Box<dyn SeqMeasure>) -> Self {
        ProductMeasure { p1, p2 }
    }
}

impl Measure for ProductMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        exact(self.p1.mass(&rect.a1)? * self.p2.mass(&rect.a2)?)
    }
}

/// The stripe measure whose conditional along 000... oscillates.
///
/// Stripe k (the x-interval [2^-k, 2^-k+1), i.e. the cylinder 0^{k-1}1)
/// carries mass 2^-k, placed with doubled density on the top half of the
/// second coordinate when k is odd and on the bottom half when k is even.
pub struct OscillatingMeasure;

impl OscillatingMeasure {
    // Tail sums over stripes of one parity beyond depth m:
    // sum of 2^-k over k > m with k of the given parity.
    fn parity_tail(m: usize, odd: bool) -> Rat {
        let mut k0 = m + 1;
        if (k0 % 2 == 1) != odd {
            k0 += 1;
        }
        Rat::pow2(-(k0 as i64)) * Rat::new(4, 3)
    }

    fn half_overlap(a2: &BitString, top: bool) -> Rat {
        if a2.is_empty() {
            Rat::new(1, 2)
        } else if a2.bit(0) == top {
            a2.width()
        } else {
            Rat::zero()
        }
    }
}

impl Measure for OscillatingMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        let a1 = &rect.a1;
        let first_one = (0..a1.len()).find(|&i| a1.bit(i));
        if let Some(i) = first_one {
            // [a1] sits inside stripe k = i + 1; density is 2 on the
            // active half, 0 on the other.
            let k = i + 1;
            let active = Self::half_overlap(&rect.a2, k % 2 == 1);
            return exact(a1.width() * Rat::from_int(2) * active);
        }
        // All-zero prefix of length m meets every stripe k > m.
        let m = a1.len();
        let top = Self::half_overlap(&rect.a2, true);
        let bottom = Self::half_overlap(&rect.a2, false);
        exact(
            Rat::from_int(2)
                * (top * Self::parity_tail(m, true) + bottom * Self::parity_tail(m, false)),
        )
    }
}

/// Strictly increasing rational cut points below a limit, shared by the
/// staircase and segments measures.
#[derive(Clone, Debug)]
pub struct SequenceConfig {
    a: Vec<Rat>,
    alpha: Rat,
}

impl SequenceConfig {
    pub fn new(a: Vec<Rat>, alpha: Rat) -> Result<Self, MeasureError> {
        if a.is_empty() {
            return Err(MeasureError::InvalidConfig("empty sequence".into()));
        }
        let mut prev = Rat::zero();
        for (i, v) in a.iter().enumerate() {
            if *v <= prev {
                return Err(MeasureError::InvalidConfig(format!(
                    "sequence not strictly increasing at index {i}"
                )));
            }
            if *v >= alpha {
                return Err(MeasureError::InvalidConfig(format!(
                    "sequence term {v} reaches the limit {alpha}"
                )));
            }
            prev = v.clone();
        }
        if alpha > Rat::one() || alpha <= Rat::zero() {
            return Err(MeasureError::InvalidConfig(format!(
                "limit {alpha} outside (0, 1]"
            )));
        }
        Ok(SequenceConfig { a, alpha })
    }

    pub fn terms(&self) -> &[Rat] {
        &self.a
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// a_k with a_0 = 0.
    pub fn term(&self, k: usize) -> Rat {
        if k == 0 {
            Rat::zero()
        } else {
            self.a[k - 1].clone()
        }
    }

    fn require(&self, needed: usize) -> Result<(), MeasureError> {
        if needed > self.a.len() {
            Err(MeasureError::InsufficientSequenceTerms {
                needed,
                have: self.a.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// The default cut points a_i = (1 - 4^-i) / 3 rising to 1/3.
pub fn default_sequence(len: usize) -> SequenceConfig {
    let third = Rat::new(1, 3);
    let a = (1..=len as i64)
        .map(|i| (Rat::one() - Rat::pow2(-2 * i)) * &third)
        .collect();
    SequenceConfig::new(a, third).unwrap()
}

/// The staircase measure: in the horizontal strip between a_{k-1} and
/// a_k the x-density is 0 on [0, 2^-k), 2 on [2^-k, 2^-k+1) and 1
/// beyond; above the limit the density is uniform.
///
/// A rectangle of x-width 2^-n is settled by the first n cut points:
/// strips finer than the rectangle contribute uniformly.
pub struct StaircaseMeasure {
    cfg: SequenceConfig,
}

impl StaircaseMeasure {
    pub fn new(cfg: SequenceConfig) -> Self {
        StaircaseMeasure { cfg }
    }

    pub fn config(&self) -> &SequenceConfig {
        &self.cfg
    }
}

impl Measure for StaircaseMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        let n = rect.a1.len();
        self.cfg.require(n)?;
        let j = rect.a1.index();
        let clip = BandClip::new(&rect.a2);
        let zero = Rat::zero();
        // Every band is scaled by the x-width, applied once at the end.
        let mut total = Rat::zero();
        let mut prev = &zero;
        for k in 1..=n {
            let cur = &self.cfg.a[k - 1];
            // Zone boundaries 2^-k and 2^-k+1 are multiples of 2^-n, so
            // the x-interval lies in a single density zone.
            let density: i64 = if j < (1u64 << (n - k)) {
                0
            } else if j < (1u64 << (n - k + 1)) {
                2
            } else {
                1
            };
            if density > 0 {
                let overlap = clip.overlap(prev, cur);
                if density == 2 {
                    total += &overlap;
                }
                total += overlap;
            }
            prev = cur;
        }
        total += clip.overlap(prev, &Rat::one());
        exact(total * rect.a1.width())
    }
}

/// The segments measure: level k splits mass a_k - a_{k-1} evenly over
/// 2^{k-1} vertical segments at x = j * 2^{1-k}, each uniform over the
/// band [a_{k-1}, a_k); above the limit the density is uniform.
pub struct SegmentsMeasure {
    cfg: SequenceConfig,
}

impl SegmentsMeasure {
    pub fn new(cfg: SequenceConfig) -> Self {
        SegmentsMeasure { cfg }
    }

    pub fn config(&self) -> &SequenceConfig {
        &self.cfg
    }
}

impl Measure for SegmentsMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        let n = rect.a1.len();
        self.cfg.require(n)?;
        let j = rect.a1.index();
        let clip = BandClip::new(&rect.a2);
        let zero = Rat::zero();
        let mut total = Rat::zero();
        let mut prev = &zero;
        for k in 1..=n {
            let cur = &self.cfg.a[k - 1];
            // The x-interval holds a level-k segment iff its left
            // endpoint is a multiple of the segment spacing 2^{1-k};
            // levels deeper than n contribute uniformly and are folded
            // into the band above a_n.
            if j & ((1u64 << (n - k + 1)) - 1) == 0 {
                total += clip.overlap(prev, cur) * Rat::pow2(-(k as i64 - 1));
            }
            prev = cur;
        }
        total += clip.overlap(prev, &Rat::one()) * rect.a1.width();
        exact(total)
    }
}

/// Composition of a first-coordinate measure with a finite kernel: a
/// fiber measure on the second coordinate for every depth-j cylinder.
pub struct KernelMeasure {
    p1: Box<dyn SeqMeasure>,
    depth: usize,
    fibers: Vec<Box<dyn SeqMeasure>>,
}

impl KernelMeasure {
    pub fn new(
        p1: Box<dyn SeqMeasure>,
        depth: usize,
        fibers: Vec<Box<dyn SeqMeasure>>,
    ) -> Result<Self, MeasureError> {
        if fibers.len() != 1 << depth {
            return Err(MeasureError::InvalidConfig(format!(
                "kernel at depth {depth} needs {} fibers, got {}",
                1 << depth,
                fibers.len()
            )));
        }
        Ok(KernelMeasure { p1, depth, fibers })
    }

    pub fn kernel_depth(&self) -> usize {
        self.depth
    }

    pub fn p1(&self) -> &dyn SeqMeasure {
        &*self.p1
    }

    /// Fiber measure over a cylinder at least as deep as the kernel.
    pub fn fiber(&self, w: &BitString) -> &dyn SeqMeasure {
        assert!(w.len() >= self.depth);
        &*self.fibers[w.truncated(self.depth).index() as usize]
    }
}

impl Measure for KernelMeasure {
    fn mass_enclosure(&self, rect: &Rect, _p: &Rat) -> Result<RatInterval, MeasureError> {
        if rect.a1.len() >= self.depth {
            let f = self.fiber(&rect.a1);
            return exact(self.p1.mass(&rect.a1)? * f.mass(&rect.a2)?);
        }
        let mut total = Rat::zero();
        let span = self.depth - rect.a1.len();
        for i in 0..(1u64 << span) {
            let w = rect.a1.concat(&BitString::from_index(span, i));
            total += self.p1.mass(&w)? * self.fibers[w.index() as usize].mass(&rect.a2)?;
        }
        exact(total)
    }
}

/// Wrapper that adds `delta` to the reported mass of exactly one cell,
/// deliberately violating additivity there. A validation test fixture.
pub struct PerturbedMeasure {
    inner: Box<dyn Measure>,
    cell: Rect,
    delta: Rat,
}

impl PerturbedMeasure {
    pub fn new(inner: Box<dyn Measure>, cell: Rect, delta: Rat) -> Self {
        PerturbedMeasure { inner, cell, delta }
    }
}

impl Measure for PerturbedMeasure {
    fn mass_enclosure(&self, rect: &Rect, p: &Rat) -> Result<RatInterval, MeasureError> {
        let enc = self.inner.mass_enclosure(rect, p)?;
        if *rect == self.cell {
            Ok(RatInterval::new(
                enc.lo() + &self.delta,
                enc.hi() + &self.delta,
            ))
        } else {
            Ok(enc)
        }
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }
}

/// Wrapper that widens an exact oracle's answers to the requested
/// precision, for exercising enclosure-handling paths.
pub struct ApproximateMeasure {
    inner: Box<dyn Measure>,
}

impl ApproximateMeasure {
    pub fn new(inner: Box<dyn Measure>) -> Self {
        assert!(inner.is_exact());
        ApproximateMeasure { inner }
    }
}

impl Measure for ApproximateMeasure {
    fn mass_enclosure(&self, rect: &Rect, p: &Rat) -> Result<RatInterval, MeasureError> {
        let enc = self.inner.mass_enclosure(rect, &Rat::zero())?;
        let half = p * &Rat::new(1, 2);
        let lo = (enc.lo() - &half).max(Rat::zero());
        let hi = (enc.hi() + &half).min(Rat::one());
        Ok(RatInterval::new(lo, hi))
    }

    fn is_exact(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{set_mass, validate};
    use crate::sets::BasicSet;

    fn r(s: &str) -> Rect {
        s.parse().unwrap()
    }

    #[test]
    fn oscillating_pinned_masses() {
        let p = OscillatingMeasure;
        assert_eq!(p.mass(&r("1x1")).unwrap(), Rat::new(1, 2));
        assert_eq!(p.mass(&r("0x1")).unwrap(), Rat::new(1, 6));
        assert_eq!(p.mass(&r("0x0")).unwrap(), Rat::new(1, 3));
        assert_eq!(p.mass(&r("*x1")).unwrap(), Rat::new(2, 3));
        assert_eq!(p.mass(&r("*x0")).unwrap(), Rat::new(1, 3));
        assert_eq!(p.mass(&Rect::full()).unwrap(), Rat::one());
        // Marginal on the first coordinate is uniform.
        assert_eq!(p.mass(&r("0x*")).unwrap(), Rat::new(1, 2));
        assert_eq!(p.mass(&r("01x*")).unwrap(), Rat::new(1, 4));
        assert_eq!(p.mass(&r("000x*")).unwrap(), Rat::new(1, 8));
    }

    #[test]
    fn staircase_pinned_masses() {
        let cfg =
            SequenceConfig::new(vec![Rat::new(1, 4), Rat::new(5, 16)], Rat::new(1, 3)).unwrap();
        let p = StaircaseMeasure::new(cfg);
        assert_eq!(p.mass(&r("1x*")).unwrap(), Rat::new(5, 8));
        assert_eq!(p.mass(&r("0x*")).unwrap(), Rat::new(3, 8));
        // The white block [0,1/2) x [0,1/4) is null.
        assert_eq!(p.mass(&r("0x00")).unwrap(), Rat::zero());
        assert_eq!(p.mass(&Rect::full()).unwrap(), Rat::one());
        let err = p.mass(&r("000x*")).unwrap_err();
        assert_eq!(
            err,
            MeasureError::InsufficientSequenceTerms { needed: 3, have: 2 }
        );
    }

    #[test]
    fn segments_pinned_masses() {
        let cfg =
            SequenceConfig::new(vec![Rat::new(1, 4), Rat::new(5, 16)], Rat::new(1, 3)).unwrap();
        let p = SegmentsMeasure::new(cfg);
        assert_eq!(p.mass(&r("0x*")).unwrap(), Rat::new(5, 8));
        assert_eq!(p.mass(&r("1x*")).unwrap(), Rat::new(3, 8));
        // No segment in [1/2, 1) below a_1.
        assert_eq!(p.mass(&r("1x00")).unwrap(), Rat::zero());
        assert_eq!(p.mass(&Rect::full()).unwrap(), Rat::one());
    }

    #[test]
    fn default_sequence_matches_pattern() {
        let cfg = default_sequence(3);
        assert_eq!(cfg.terms()[0], Rat::new(1, 4));
        assert_eq!(cfg.terms()[1], Rat::new(5, 16));
        assert_eq!(cfg.terms()[2], Rat::new(21, 64));
        assert_eq!(*cfg.alpha(), Rat::new(1, 3));
    }

    #[test]
    fn sequence_config_rejects_bad_input() {
        assert!(SequenceConfig::new(vec![], Rat::new(1, 3)).is_err());
        assert!(
            SequenceConfig::new(vec![Rat::new(1, 4), Rat::new(1, 4)], Rat::new(1, 3)).is_err()
        );
        assert!(SequenceConfig::new(vec![Rat::new(1, 2)], Rat::new(1, 3)).is_err());
    }

    #[test]
    fn kernel_composition() {
        let p = KernelMeasure::new(
            Box::new(UniformSeq),
            1,
            vec![
                Box::new(PointMassSeq::new(PathSpec::Zeros)),
                Box::new(UniformSeq),
            ],
        )
        .unwrap();
        assert_eq!(p.mass(&r("0x1")).unwrap(), Rat::zero());
        assert_eq!(p.mass(&r("0x0")).unwrap(), Rat::new(1, 2));
        assert_eq!(p.mass(&r("1x1")).unwrap(), Rat::new(1, 4));
        assert_eq!(p.mass(&r("*x0")).unwrap(), Rat::new(3, 4));
        assert_eq!(p.mass(&Rect::full()).unwrap(), Rat::one());
        let report = validate(&p, 5).unwrap();
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn example_families_validate_exactly() {
        let osc = OscillatingMeasure;
        assert!(validate(&osc, 5).unwrap().ok());
        let st = StaircaseMeasure::new(default_sequence(8));
        assert!(validate(&st, 5).unwrap().ok());
        let sg = SegmentsMeasure::new(default_sequence(8));
        assert!(validate(&sg, 5).unwrap().ok());
        let pr = ProductMeasure::new(
            Box::new(BernoulliSeq::new(Rat::new(1, 3)).unwrap()),
            Box::new(UniformSeq),
        );
        assert!(validate(&pr, 5).unwrap().ok());
    }

    #[test]
    fn set_mass_sums_rectangles() {
        let p = OscillatingMeasure;
        let u = BasicSet::from_rects(vec![r("1x1"), r("0x0")]);
        assert_eq!(set_mass(&p, &u).unwrap(), Rat::new(5, 6));
        assert_eq!(set_mass(&p, &BasicSet::full()).unwrap(), Rat::one());
        assert_eq!(set_mass(&p, &BasicSet::empty()).unwrap(), Rat::zero());
    }
}
