//! Seeded generators for random sets, covers, and test functions. All
//! randomness flows through a caller-provided generator so every run is
//! reproducible from one seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitString, Rect};
use crate::cylfn::CylinderFn;
use crate::measures::{set_mass, Measure, MeasureError};
use crate::rat::Rat;
use crate::sets::BasicSet;
use crate::testcalc::{fiber_integral, CondTestFamily, ExpectationTest, Factor, make_test};
use crate::trimming::CoverSequence;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bitstring<R: Rng>(r: &mut R, len: usize) -> BitString {
    let mut b = BitString::empty();
    for _ in 0..len {
        b = b.child(r.gen_bool(0.5));
    }
    b
}

/// Random dyadic rational in [0, 1) with denominator 2^depth.
pub fn random_dyadic<R: Rng>(r: &mut R, depth: usize) -> Rat {
    let k = r.gen_range(0..1u64 << depth);
    Rat::new(k as i64, 1) * Rat::pow2(-(depth as i64))
}

pub fn random_rect<R: Rng>(r: &mut R, maxdepth: usize) -> Rect {
    let d1 = r.gen_range(0..=maxdepth);
    let d2 = r.gen_range(0..=maxdepth);
    Rect::new(random_bitstring(r, d1), random_bitstring(r, d2))
}

pub fn random_basic_set<R: Rng>(r: &mut R, maxdepth: usize, rects: usize) -> BasicSet {
    BasicSet::from_rects((0..rects).map(|_| random_rect(r, maxdepth)))
}

/// Random set built greedily so its mass stays at or below the bound:
/// candidate rectangles that would overflow are skipped.
pub fn random_set_with_mass_at_most<R: Rng>(
    r: &mut R,
    p: &dyn Measure,
    bound: &Rat,
    maxdepth: usize,
    candidates: usize,
) -> Result<BasicSet, MeasureError> {
    let mut acc = BasicSet::empty();
    let mut acc_mass = Rat::zero();
    for _ in 0..candidates {
        let rect = random_rect(r, maxdepth);
        let next = acc.union(&BasicSet::from_rects([rect]));
        let mass = set_mass(p, &next)?;
        if mass <= *bound {
            acc = next;
            acc_mass = mass;
        }
    }
    debug_assert!(acc_mass <= *bound);
    Ok(acc)
}

/// Random increasing cover sequence: each stage adds rectangles to the
/// previous one.
pub fn random_cover_sequence<R: Rng>(
    r: &mut R,
    stages: usize,
    maxdepth: usize,
    rects_per_stage: usize,
) -> CoverSequence {
    let mut sets = Vec::with_capacity(stages);
    let mut acc = BasicSet::empty();
    for _ in 0..stages {
        acc = acc.union(&random_basic_set(r, maxdepth, rects_per_stage));
        sets.push(acc.clone());
    }
    CoverSequence::new(sets).expect("accumulated covers increase")
}

/// Random step function with small dyadic values.
pub fn random_cylfn<R: Rng>(r: &mut R, depth: usize, max_value: u32) -> CylinderFn {
    let values = (0..1usize << depth)
        .map(|_| {
            let num = r.gen_range(0..=max_value) as i64;
            let den_pow = r.gen_range(0..=3) as i64;
            Rat::new(num, 1) * Rat::pow2(-den_pow)
        })
        .collect();
    CylinderFn::new(depth, values).expect("nonnegative values")
}

/// Random first-factor expectation test, normalized when necessary.
pub fn random_test1<R: Rng>(
    r: &mut R,
    p: &dyn Measure,
    depth: usize,
) -> Result<ExpectationTest, MeasureError> {
    make_test(random_cylfn(r, depth, 8), p, Factor::First)
}

/// Random conditional family: every fiber is scaled into compliance
/// with its own conditional integral. Zero-marginal prefixes keep their
/// raw fibers.
pub fn random_family<R: Rng>(
    r: &mut R,
    p: &dyn Measure,
    depth1: usize,
    depth2: usize,
    max_k: usize,
) -> Result<CondTestFamily, MeasureError> {
    let mut tables = Vec::with_capacity(max_k + 1);
    for _ in 0..=max_k {
        let mut row = Vec::with_capacity(1 << depth1);
        for i in 0..1u64 << depth1 {
            let prefix = BitString::from_index(depth1, i);
            let mut g = random_cylfn(r, depth2, 8);
            if let Some(iv) = fiber_integral(p, &prefix, &g)? {
                if iv > Rat::one() {
                    g = g.scale(&(Rat::one() / iv));
                }
            }
            row.push(g);
        }
        tables.push(row);
    }
    Ok(CondTestFamily::new(p, depth1, depth2, tables).expect("fibers normalized"))
}
