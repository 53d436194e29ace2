//! Measure oracles on the binary square and its factors.
//!
//! An oracle answers rectangle-mass queries with rational enclosures no
//! wider than the requested precision; exact oracles answer with
//! width-zero enclosures. All built-in families are exact.

mod families;
mod spec;

pub use families::{
    default_sequence, ApproximateMeasure, BernoulliSeq, KernelMeasure, OscillatingMeasure,
    PerturbedMeasure, PointMassSeq, ProductMeasure, SegmentsMeasure, SequenceConfig,
    StaircaseMeasure, UniformMeasure, UniformSeq,
};
pub use spec::{MeasureConfig, MeasureSpec, SeqSpec};

use serde::Serialize;

use crate::bits::{BitString, Rect};
use crate::rat::{Rat, RatInterval};
use crate::sets::BasicSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("insufficient sequence terms: rectangle needs {needed}, config has {have}")]
    InsufficientSequenceTerms { needed: usize, have: usize },
    #[error("zero-marginal stripe at prefix {prefix:?}")]
    ZeroMarginal { prefix: String },
    #[error("oracle is not exact; request an enclosure instead")]
    NotExact,
    #[error("approximate oracle needs a positive precision")]
    PrecisionRequired,
    #[error("invalid measure config: {0}")]
    InvalidConfig(String),
}

/// Measure oracle on the product of two binary Cantor spaces.
pub trait Measure: Send + Sync {
    /// Enclosure of the rectangle's mass, of width at most `precision`.
    /// Requests at finer precision return nested enclosures.
    fn mass_enclosure(&self, rect: &Rect, precision: &Rat)
        -> Result<RatInterval, MeasureError>;

    fn is_exact(&self) -> bool {
        true
    }

    /// Exact rectangle mass; only exact oracles answer.
    fn mass(&self, rect: &Rect) -> Result<Rat, MeasureError> {
        if !self.is_exact() {
            return Err(MeasureError::NotExact);
        }
        let enc = self.mass_enclosure(rect, &Rat::zero())?;
        debug_assert!(enc.is_point());
        Ok(enc.lo().clone())
    }
}

/// Measure oracle on a single binary Cantor space. All implementations
/// here are exact.
pub trait SeqMeasure: Send + Sync {
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError>;
}

impl Measure for Box<dyn Measure> {
    fn mass_enclosure(
        &self,
        rect: &Rect,
        precision: &Rat,
    ) -> Result<RatInterval, MeasureError> {
        (**self).mass_enclosure(rect, precision)
    }

    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }
}

impl SeqMeasure for Box<dyn SeqMeasure> {
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError> {
        (**self).mass(a)
    }
}

/// First-coordinate marginal of a product-space measure, viewed as a
/// measure on one factor.
pub struct MarginalSeq<'a, M: Measure + ?Sized>(pub &'a M);

impl<M: Measure + ?Sized> SeqMeasure for MarginalSeq<'_, M>
where
    M: Sync,
{
    fn mass(&self, a: &BitString) -> Result<Rat, MeasureError> {
        self.0.mass(&Rect::stripe(*a))
    }
}

/// Exact mass of a canonical basic set (sum over its disjoint rectangles).
pub fn set_mass<M: Measure + ?Sized>(p: &M, set: &BasicSet) -> Result<Rat, MeasureError> {
    let mut total = Rat::zero();
    for r in set.rects() {
        total += p.mass(r)?;
    }
    Ok(total)
}

/// Enclosure of a basic set's mass, of width at most `precision` when
/// positive (rectangle budgets split evenly).
pub fn set_mass_enclosure<M: Measure + ?Sized>(
    p: &M,
    set: &BasicSet,
    precision: &Rat,
) -> Result<RatInterval, MeasureError> {
    if set.is_empty() {
        return Ok(RatInterval::point(Rat::zero()));
    }
    let per_rect = if precision.is_zero() {
        Rat::zero()
    } else {
        precision / &Rat::from_int(set.rects().len() as i64)
    };
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for r in set.rects() {
        let enc = p.mass_enclosure(r, &per_rect)?;
        lo += enc.lo();
        hi += enc.hi();
    }
    Ok(RatInterval::new(lo, hi))
}

/// First-coordinate marginal mass of a cylinder, as an enclosure.
pub fn marginal<M: Measure + ?Sized>(
    p: &M,
    a1: &BitString,
    precision: &Rat,
) -> Result<RatInterval, MeasureError> {
    p.mass_enclosure(&Rect::stripe(*a1), precision)
}

/// Interval-conditioned probability P(a2 | a1) = P(a1 x a2) / P1(a1),
/// enclosed to the requested precision. Zero marginals are an error.
pub fn cond_interval<M: Measure + ?Sized>(
    p: &M,
    a1: &BitString,
    a2: &BitString,
    precision: &Rat,
) -> Result<RatInterval, MeasureError> {
    let rect = Rect::new(*a1, *a2);
    let stripe = Rect::stripe(*a1);
    if p.is_exact() {
        let den = p.mass(&stripe)?;
        if den.is_zero() {
            return Err(MeasureError::ZeroMarginal {
                prefix: a1.to_string(),
            });
        }
        let num = p.mass(&rect)?;
        return Ok(RatInterval::point(num / den));
    }
    if precision.is_zero() {
        return Err(MeasureError::PrecisionRequired);
    }
    let mut ask = precision * &Rat::new(1, 4);
    for _ in 0..64 {
        let den = p.mass_enclosure(&stripe, &ask)?;
        if den.hi().is_zero() {
            return Err(MeasureError::ZeroMarginal {
                prefix: a1.to_string(),
            });
        }
        let num = p.mass_enclosure(&rect, &ask)?;
        if let Some(ratio) = num.div(&den) {
            if ratio.width() <= *precision {
                return Ok(ratio);
            }
        }
        ask = ask * Rat::new(1, 2);
    }
    Err(MeasureError::ZeroMarginal {
        prefix: a1.to_string(),
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub rect: String,
    pub check: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub exact: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check normalization, nonnegativity, additivity in both coordinates,
/// and enclosure discipline over every rectangle with both depths at
/// most `depth`.
pub fn validate<M: Measure + ?Sized>(
    p: &M,
    depth: usize,
) -> Result<ValidationReport, MeasureError> {
    let exact = p.is_exact();
    let precision = Rat::pow2(-(2 * depth as i64 + 8));
    let mut violations = Vec::new();

    // One oracle call per rectangle; additivity checks read the table
    // instead of re-asking for children.
    let side = depth + 1;
    let mut table: Vec<Vec<RatInterval>> = Vec::with_capacity(side * side);
    for d1 in 0..=depth {
        for d2 in 0..=depth {
            let mut level = Vec::with_capacity(1usize << (d1 + d2));
            for i1 in 0..(1u64 << d1) {
                let a1 = BitString::from_index(d1, i1);
                for i2 in 0..(1u64 << d2) {
                    let r = Rect::new(a1, BitString::from_index(d2, i2));
                    level.push(p.mass_enclosure(&r, &precision)?);
                }
            }
            table.push(level);
        }
    }
    let cell = |d1: usize, d2: usize, i1: u64, i2: u64| -> &RatInterval {
        &table[d1 * side + d2][((i1 << d2) | i2) as usize]
    };

    let full = cell(0, 0, 0, 0);
    if !full.contains(&Rat::one()) {
        violations.push(Violation {
            rect: Rect::full().to_string(),
            check: "normalization".into(),
            expected: "1".into(),
            got: full.to_string(),
        });
    }

    for d1 in 0..=depth {
        for i1 in 0..(1u64 << d1) {
            let a1 = BitString::from_index(d1, i1);
            for d2 in 0..=depth {
                for i2 in 0..(1u64 << d2) {
                    let r = Rect::new(a1, BitString::from_index(d2, i2));
                    let enc = cell(d1, d2, i1, i2);
                    if enc.lo().is_negative() {
                        violations.push(Violation {
                            rect: r.to_string(),
                            check: "nonnegative".into(),
                            expected: ">= 0".into(),
                            got: enc.to_string(),
                        });
                    }
                    if exact && !enc.is_point() {
                        violations.push(Violation {
                            rect: r.to_string(),
                            check: "exact-width".into(),
                            expected: "width 0".into(),
                            got: enc.to_string(),
                        });
                    }
                    if d1 < depth {
                        let c0 = cell(d1 + 1, d2, i1 << 1, i2);
                        let c1 = cell(d1 + 1, d2, (i1 << 1) | 1, i2);
                        check_additive(&mut violations, &r, "additivity-coord1", enc, c0, c1);
                    }
                    if d2 < depth {
                        let c0 = cell(d1, d2 + 1, i1, i2 << 1);
                        let c1 = cell(d1, d2 + 1, i1, (i2 << 1) | 1);
                        check_additive(&mut violations, &r, "additivity-coord2", enc, c0, c1);
                    }
                }
            }
        }
    }

    // Nesting of enclosures under finer precision requests, sampled on
    // the shallow rectangles.
    let nest_depth = depth.min(3);
    let finer = &precision * &Rat::new(1, 4);
    for d1 in 0..=nest_depth {
        for i1 in 0..(1u64 << d1) {
            for d2 in 0..=nest_depth {
                for i2 in 0..(1u64 << d2) {
                    let r = Rect::new(
                        BitString::from_index(d1, i1),
                        BitString::from_index(d2, i2),
                    );
                    let coarse = cell(d1, d2, i1, i2);
                    let fine = p.mass_enclosure(&r, &finer)?;
                    if !coarse.contains_interval(&fine) {
                        violations.push(Violation {
                            rect: r.to_string(),
                            check: "enclosure-nesting".into(),
                            expected: format!("within {coarse}"),
                            got: fine.to_string(),
                        });
                    }
                }
            }
        }
    }

    Ok(ValidationReport {
        depth,
        exact,
        violations,
    })
}

fn check_additive(
    violations: &mut Vec<Violation>,
    rect: &Rect,
    check: &str,
    parent: &RatInterval,
    c0: &RatInterval,
    c1: &RatInterval,
) {
    let sum = c0.add(c1);
    if !parent.overlaps(&sum) {
        violations.push(Violation {
            rect: rect.to_string(),
            check: check.into(),
            expected: parent.to_string(),
            got: sum.to_string(),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_masses() {
        let p = UniformMeasure;
        assert_eq!(p.mass(&"0x*".parse().unwrap()).unwrap(), Rat::new(1, 2));
        assert_eq!(p.mass(&"01x1".parse().unwrap()).unwrap(), Rat::new(1, 8));
        assert_eq!(p.mass(&Rect::full()).unwrap(), Rat::one());
    }

    #[test]
    fn uniform_validates() {
        let report = validate(&UniformMeasure, 4).unwrap();
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn perturbed_breaks_additivity_at_parent() {
        let cell: Rect = "01x1".parse().unwrap();
        let p = PerturbedMeasure::new(Box::new(UniformMeasure), cell, Rat::new(1, 1024));
        let report = validate(&p, 3).unwrap();
        assert!(!report.ok());
        let rects: Vec<&str> = report.violations.iter().map(|v| v.rect.as_str()).collect();
        // Both coordinate parents of the corrupted cell notice.
        assert!(rects.contains(&"0x1"), "{rects:?}");
        assert!(rects.contains(&"01x*"), "{rects:?}");
    }

    #[test]
    fn cond_interval_exact_and_zero_marginal() {
        let p = UniformMeasure;
        let a1: BitString = "00".parse().unwrap();
        let a2: BitString = "1".parse().unwrap();
        let enc = cond_interval(&p, &a1, &a2, &Rat::zero()).unwrap();
        assert_eq!(enc, RatInterval::point(Rat::new(1, 2)));

        // Point-mass marginal on the ones path: the zeros stripe is null.
        let q = ProductMeasure::new(
            Box::new(PointMassSeq::new("ones".parse().unwrap())),
            Box::new(UniformSeq),
        );
        let err = cond_interval(&q, &a1, &a2, &Rat::zero()).unwrap_err();
        assert_eq!(
            err,
            MeasureError::ZeroMarginal {
                prefix: "00".into()
            }
        );
    }

    #[test]
    fn approximate_wrapper_validates_and_conditions() {
        let p = ApproximateMeasure::new(Box::new(UniformMeasure));
        assert!(!p.is_exact());
        assert!(p.mass(&Rect::full()).is_err());
        let report = validate(&p, 3).unwrap();
        assert!(report.ok(), "{:?}", report.violations);
        let a1: BitString = "0".parse().unwrap();
        let a2: BitString = "1".parse().unwrap();
        let prec = Rat::pow2(-10);
        let enc = cond_interval(&p, &a1, &a2, &prec).unwrap();
        assert!(enc.width() <= prec);
        assert!(enc.contains(&Rat::new(1, 2)));
        assert!(cond_interval(&p, &a1, &a2, &Rat::zero()).is_err());
    }
}
