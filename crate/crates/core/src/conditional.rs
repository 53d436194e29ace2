//! Conditional probabilities along paths and the martingale machinery
//! behind their convergence behaviour.

use serde::Serialize;

use crate::bits::{BitString, Rect};
use crate::measures::{cond_interval, Measure, MeasureError, SeqMeasure};
use crate::path::PathSpec;
use crate::rat::{Rat, RatInterval};
use crate::sets::BasicSet;

/// A function on all cylinders up to a depth, with cells over a null set
/// left undefined. Level `d` stores the 2^d values in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Martingale {
    levels: Vec<Vec<Option<Rat>>>,
}

impl Martingale {
    pub fn from_levels(levels: Vec<Vec<Option<Rat>>>) -> Self {
        assert!(!levels.is_empty());
        for (d, level) in levels.iter().enumerate() {
            assert_eq!(level.len(), 1 << d, "level {d} has wrong width");
        }
        Martingale { levels }
    }

    pub fn from_fn(depth: usize, f: impl Fn(&BitString) -> Option<Rat>) -> Self {
        let levels = (0..=depth)
            .map(|d| {
                (0..1u64 << d)
                    .map(|i| f(&BitString::from_index(d, i)))
                    .collect()
            })
            .collect();
        Martingale { levels }
    }

    pub fn constant(depth: usize, v: Rat) -> Self {
        Martingale::from_fn(depth, |_| Some(v.clone()))
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn value(&self, a: &BitString) -> Option<&Rat> {
        self.levels[a.len()][a.index() as usize].as_ref()
    }

    pub fn root(&self) -> Option<&Rat> {
        self.levels[0][0].as_ref()
    }

    /// Overwrite one cell. Test fixture for breaking the identity.
    pub fn set(&mut self, a: &BitString, v: Option<Rat>) {
        self.levels[a.len()][a.index() as usize] = v;
    }

    pub fn cells(&self) -> impl Iterator<Item = (BitString, Option<&Rat>)> {
        self.levels.iter().enumerate().flat_map(|(d, level)| {
            level
                .iter()
                .enumerate()
                .map(move |(i, v)| (BitString::from_index(d, i as u64), v.as_ref()))
        })
    }
}

/// The conditional-probability martingale a1 -> P(a1 x a2) / P1(a1),
/// tabulated on all cells up to `depth`. Cells with zero marginal are
/// left undefined.
pub fn conditional_martingale(
    p: &dyn Measure,
    a2: &BitString,
    depth: usize,
) -> Result<Martingale, MeasureError> {
    let mut levels = Vec::with_capacity(depth + 1);
    for d in 0..=depth {
        let mut level = Vec::with_capacity(1 << d);
        for i in 0..1u64 << d {
            let a1 = BitString::from_index(d, i);
            let m1 = p.mass(&Rect::new(a1, BitString::empty()))?;
            if m1.is_zero() {
                level.push(None);
            } else {
                let num = p.mass(&Rect::new(a1, *a2))?;
                level.push(Some(num / m1));
            }
        }
        levels.push(level);
    }
    Ok(Martingale::from_levels(levels))
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingaleViolation {
    pub cell: BitString,
    pub lhs: Rat,
    pub rhs: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingaleReport {
    pub depth: usize,
    pub violations: Vec<MartingaleViolation>,
}

impl MartingaleReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the weighted identity P1(a) m(a) = P1(a0) m(a0) + P1(a1) m(a1)
/// on every internal cell. Undefined cells must sit over zero marginal,
/// where the identity holds vacuously.
pub fn martingale_check(
    m: &Martingale,
    p1: &dyn SeqMeasure,
) -> Result<MartingaleReport, MeasureError> {
    let mut violations = Vec::new();
    for d in 0..m.depth() {
        for i in 0..1u64 << d {
            let a = BitString::from_index(d, i);
            let weighted = |b: &BitString| -> Result<Rat, MeasureError> {
                let mass = p1.mass(b)?;
                Ok(match m.value(b) {
                    Some(v) => mass * v,
                    None => {
                        debug_assert!(mass.is_zero());
                        Rat::zero()
                    }
                })
            };
            let lhs = weighted(&a)?;
            let rhs = weighted(&a.child(false))? + weighted(&a.child(true))?;
            if lhs != rhs {
                violations.push(MartingaleViolation { cell: a, lhs, rhs });
            }
        }
    }
    Ok(MartingaleReport {
        depth: m.depth(),
        violations,
    })
}

/// Maximal cells where the martingale first reaches `c`, with their
/// exact total marginal mass. Undefined cells are skipped; they lie
/// over a null set.
#[derive(Clone, Debug, Serialize)]
pub struct ExceedSet {
    pub cells: Vec<BitString>,
    pub measure: Rat,
}

impl ExceedSet {
    pub fn set(&self) -> BasicSet {
        BasicSet::from_cylinders1(self.cells.clone())
    }
}

pub fn exceed_set(
    m: &Martingale,
    c: &Rat,
    p1: &dyn SeqMeasure,
) -> Result<ExceedSet, MeasureError> {
    assert!(*c > Rat::zero());
    let mut cells = Vec::new();
    let mut measure = Rat::zero();
    let mut stack = vec![BitString::empty()];
    while let Some(a) = stack.pop() {
        match m.value(&a) {
            None => continue,
            Some(v) if *v >= *c => {
                measure += p1.mass(&a)?;
                cells.push(a);
            }
            Some(_) => {
                if a.len() < m.depth() {
                    stack.push(a.child(true));
                    stack.push(a.child(false));
                }
            }
        }
    }
    cells.sort();
    Ok(ExceedSet { cells, measure })
}

/// Capital process that shadows `m`: idle until m drops below `u`, then
/// scales with m's relative moves until m rises above `v`, completing
/// one upcrossing, and idles again. Starts at 1.
#[derive(Clone, Debug)]
pub struct FollowerRun {
    pub capital: Martingale,
    /// Completed upcrossings per depth-d cell, index order.
    pub upcrossings: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FollowState {
    Idle,
    Active,
}

pub fn follower_martingale(m: &Martingale, u: &Rat, v: &Rat) -> FollowerRun {
    assert!(Rat::zero() < *u && u < v);
    let depth = m.depth();
    // Per-cell state after the transition at that cell: capital, mode,
    // completed upcrossings. Unknown m freezes the mode and carries
    // capital; such cells sit over a null set.
    let mut current: Vec<(Rat, FollowState, u32)> = vec![(Rat::one(), FollowState::Idle, 0)];
    let mut levels: Vec<Vec<Option<Rat>>> = Vec::with_capacity(depth + 1);

    let transition = |cell_m: Option<&Rat>, state: FollowState, ups: u32| match (cell_m, state) {
        (Some(x), FollowState::Idle) if x < u => (FollowState::Active, ups),
        (Some(x), FollowState::Active) if x > v => (FollowState::Idle, ups + 1),
        _ => (state, ups),
    };

    // Root transition.
    {
        let (s, k) = transition(m.root(), FollowState::Idle, 0);
        current[0].1 = s;
        current[0].2 = k;
    }
    levels.push(vec![Some(current[0].0.clone())]);

    for d in 0..depth {
        let mut next = Vec::with_capacity(1 << (d + 1));
        let mut level_vals = Vec::with_capacity(1 << (d + 1));
        for i in 0..1u64 << d {
            let a = BitString::from_index(d, i);
            let (cap, state, ups) = current[i as usize].clone();
            let parent_m = m.value(&a);
            for bit in [false, true] {
                let child = a.child(bit);
                let child_m = m.value(&child);
                // A martingale that hits 0 stays 0 on positive-marginal
                // cells, so there is no relative move to follow.
                let child_cap = match (state, parent_m, child_m) {
                    (FollowState::Active, Some(pm), Some(cm)) if !pm.is_zero() => {
                        &cap * cm / pm.clone()
                    }
                    _ => cap.clone(),
                };
                let (s, k) = transition(child_m, state, ups);
                level_vals.push(Some(child_cap.clone()));
                next.push((child_cap, s, k));
            }
        }
        levels.push(level_vals);
        current = next;
    }

    FollowerRun {
        capital: Martingale::from_levels(levels),
        upcrossings: current.into_iter().map(|(_, _, k)| k).collect(),
    }
}

/// Exact marginal mass of the depth-d cells with at least `n` completed
/// upcrossings.
pub fn upcrossing_measure(
    run: &FollowerRun,
    p1: &dyn SeqMeasure,
    n: u32,
) -> Result<Rat, MeasureError> {
    let depth = run.capital.depth();
    let mut total = Rat::zero();
    for (i, &k) in run.upcrossings.iter().enumerate() {
        if k >= n {
            total += p1.mass(&BitString::from_index(depth, i as u64))?;
        }
    }
    Ok(total)
}

/// Verdict over the trailing window of a conditional trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Converged { limit: RatInterval },
    Oscillating { low: RatInterval, high: RatInterval },
    Undecided,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "converged",
            Verdict::Oscillating { .. } => "oscillating",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTrace {
    pub values: Vec<(usize, RatInterval)>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct TraceConfig {
    pub maxdepth: usize,
    /// Trailing values consulted for the verdict.
    pub window: usize,
    /// Band width treated as "settled".
    pub tolerance: Rat,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            maxdepth: 12,
            window: 8,
            tolerance: Rat::new(1, 64),
        }
    }
}

/// Classify the trailing window: one narrow band is convergence, two
/// separated narrow bands each hit at least three times is oscillation,
/// anything else stays undecided.
pub fn verdict(values: &[(usize, RatInterval)], window: usize, tolerance: &Rat) -> Verdict {
    if values.is_empty() || values.len() < window.min(6) {
        return Verdict::Undecided;
    }
    let tail = &values[values.len().saturating_sub(window)..];
    let mut hull = tail[0].1.clone();
    for (_, iv) in &tail[1..] {
        hull = hull.hull(iv);
    }
    if hull.width() <= *tolerance {
        return Verdict::Converged { limit: hull };
    }
    // Split at the largest midpoint gap.
    let mut sorted: Vec<&RatInterval> = tail.iter().map(|(_, iv)| iv).collect();
    sorted.sort_by(|a, b| a.midpoint().cmp(&b.midpoint()));
    let mut split = 0;
    let mut best_gap = Rat::zero();
    for i in 1..sorted.len() {
        let gap = sorted[i].lo() - sorted[i - 1].hi();
        if split == 0 || gap > best_gap {
            best_gap = gap;
            split = i;
        }
    }
    let (lo_band, hi_band) = sorted.split_at(split);
    if lo_band.len() < 3 || hi_band.len() < 3 || best_gap <= Rat::zero() {
        return Verdict::Undecided;
    }
    let band_hull = |band: &[&RatInterval]| {
        let mut h = band[0].clone();
        for iv in &band[1..] {
            h = h.hull(iv);
        }
        h
    };
    let low = band_hull(lo_band);
    let high = band_hull(hi_band);
    if low.width() <= *tolerance && high.width() <= *tolerance {
        Verdict::Oscillating { low, high }
    } else {
        Verdict::Undecided
    }
}

/// Conditional probability of `a2` along the path, one value per prefix
/// depth 0..=maxdepth.
pub fn conditional_trace(
    p: &dyn Measure,
    path: &PathSpec,
    a2: &BitString,
    cfg: &TraceConfig,
) -> Result<ConvergenceTrace, MeasureError> {
    let precision = &cfg.tolerance * &Rat::new(1, 8);
    let mut values = Vec::with_capacity(cfg.maxdepth + 1);
    for d in 0..=cfg.maxdepth {
        let prefix = path.prefix(d);
        let iv = cond_interval(p, &prefix, a2, &precision)?;
        values.push((d, iv));
    }
    let verdict = verdict(&values, cfg.window, &cfg.tolerance);
    Ok(ConvergenceTrace { values, verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityRow {
    pub parent: BitString,
    pub parent_limit: RatInterval,
    pub child_sum: RatInterval,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityReport {
    pub rows: Vec<AdditivityRow>,
    /// Cells whose traces did not settle.
    pub undecided: Vec<BitString>,
}

impl AdditivityReport {
    pub fn ok(&self) -> bool {
        self.undecided.is_empty() && self.rows.iter().all(|r| r.ok)
    }
}

/// Check that limit(parent) = limit(child0) + limit(child1) along the
/// path, compared as enclosures: the parent band must meet the sum of
/// the child bands.
pub fn additivity_of_limits(
    p: &dyn Measure,
    path: &PathSpec,
    parents: &[BitString],
    cfg: &TraceConfig,
) -> Result<AdditivityReport, MeasureError> {
    let mut rows = Vec::new();
    let mut undecided = Vec::new();
    for parent in parents {
        let limit_of = |a2: &BitString| -> Result<Option<RatInterval>, MeasureError> {
            let trace = conditional_trace(p, path, a2, cfg)?;
            Ok(match trace.verdict {
                Verdict::Converged { limit } => Some(limit),
                _ => None,
            })
        };
        let lp = limit_of(parent)?;
        let l0 = limit_of(&parent.child(false))?;
        let l1 = limit_of(&parent.child(true))?;
        match (lp, l0, l1) {
            (Some(lp), Some(l0), Some(l1)) => {
                let child_sum = l0.add(&l1);
                let ok = lp.intersect(&child_sum).is_some();
                rows.push(AdditivityRow {
                    parent: *parent,
                    parent_limit: lp,
                    child_sum,
                    ok,
                });
            }
            _ => undecided.push(*parent),
        }
    }
    Ok(AdditivityReport { rows, undecided })
}
