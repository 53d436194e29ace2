//! Stripe trimming: oracle-bounded conditional enclosures, good-stripe
//! detection, the staged construction of nested stripe unions, and the
//! exact measure-bound ledger.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, Rect};
use crate::measures::{
    cond_interval, set_mass, set_mass_enclosure, Measure, MeasureConfig, MeasureError,
};
use crate::path::PathSpec;
use crate::rat::{Rat, RatInterval};
use crate::sets::BasicSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrimError {
    #[error("set not stable in stripe {0}")]
    NotStable(BitString),
    #[error("invalid trim config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A vertical stripe I×Ω₂, identified by its footprint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Stripe {
    pub interval: BitString,
}

impl Stripe {
    pub fn new(interval: BitString) -> Self {
        Stripe { interval }
    }

    pub fn root() -> Self {
        Stripe::new(BitString::empty())
    }

    pub fn level(&self) -> usize {
        self.interval.len()
    }

    pub fn set(&self) -> BasicSet {
        BasicSet::from_cylinders1(vec![self.interval])
    }

    /// Horizontal size: the marginal mass of the footprint.
    pub fn h(&self, p: &dyn Measure) -> Result<Rat, MeasureError> {
        p.mass(&Rect::new(self.interval, BitString::empty()))
    }
}

impl std::fmt::Display for Stripe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.interval.is_empty() {
            f.write_str("*")
        } else {
            write!(f, "{}", self.interval)
        }
    }
}

/// P(U∩S)/P(S) as an enclosure of width at most `precision`. Requires U
/// stable in S, so the quotient is the conditional mass of the section.
pub fn vertical_size(
    p: &dyn Measure,
    u: &BasicSet,
    s: &Stripe,
    precision: &Rat,
) -> Result<RatInterval, TrimError> {
    let (_, stable) = u.section(&s.interval);
    if !stable {
        return Err(TrimError::NotStable(s.interval));
    }
    let restricted = u.intersect(&s.set());
    let stripe_rect = Rect::new(s.interval, BitString::empty());
    if p.is_exact() {
        let den = p.mass(&stripe_rect)?;
        if den.is_zero() {
            return Err(MeasureError::ZeroMarginal {
                prefix: s.interval.to_string(),
            }
            .into());
        }
        let num = set_mass(p, &restricted)?;
        return Ok(RatInterval::point(num / den));
    }
    let mut q = precision * &Rat::new(1, 4);
    for _ in 0..64 {
        let den = p.mass_enclosure(&stripe_rect, &q)?;
        if den.hi().is_zero() {
            return Err(MeasureError::ZeroMarginal {
                prefix: s.interval.to_string(),
            }
            .into());
        }
        let num = set_mass_enclosure(p, &restricted, &q)?;
        if let Some(ratio) = num.div(&den) {
            let clamped = ratio
                .intersect(&RatInterval::new(Rat::zero(), Rat::one()))
                .unwrap_or_else(|| RatInterval::point(Rat::one()));
            if clamped.width() <= *precision {
                return Ok(clamped);
            }
        }
        q = q * Rat::new(1, 2);
    }
    Err(MeasureError::ZeroMarginal {
        prefix: s.interval.to_string(),
    }
    .into())
}

/// Enclosure schedule for oracle bounds: how much width is granted at
/// each footprint level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slowdown {
    None,
    #[default]
    Pow2,
}

impl Slowdown {
    fn widen(&self, iv: &RatInterval, level: usize) -> RatInterval {
        let widened = match self {
            Slowdown::None => iv.clone(),
            Slowdown::Pow2 => {
                let half = Rat::pow2(-(level as i64 + 1));
                RatInterval::new(iv.lo() - &half, iv.hi() + &half)
            }
        };
        widened
            .intersect(&RatInterval::new(Rat::zero(), Rat::one()))
            .expect("conditional bands meet the unit interval")
    }
}

/// Lower and upper bounds on the conditional mass of a second-factor
/// set, given a first-factor prefix. Bounds may only shrink as the
/// prefix extends.
pub trait GammaOracle: Send + Sync {
    fn bounds(&self, prefix: &BitString, v: &BasicSet) -> Result<RatInterval, MeasureError>;
}

type BoundsCache = Mutex<std::collections::BTreeMap<(BitString, Vec<Rect>), RatInterval>>;

// Fold widened per-level enclosures from the root down, intersecting to
// enforce nesting. A level whose band misses the running interval is
// skipped: the value freezes rather than turning empty.
fn fold_bounds(
    raw: &dyn Fn(&BitString) -> Result<RatInterval, MeasureError>,
    slowdown: Slowdown,
    prefix: &BitString,
    v: &BasicSet,
    cache: &BoundsCache,
) -> Result<RatInterval, MeasureError> {
    let key_rects: Vec<Rect> = v.rects().to_vec();
    let mut acc = RatInterval::new(Rat::zero(), Rat::one());
    let mut start = 0;
    {
        let map = cache.lock().unwrap();
        for l in (0..=prefix.len()).rev() {
            if let Some(hit) = map.get(&(prefix.truncated(l), key_rects.clone())) {
                acc = hit.clone();
                start = l + 1;
                break;
            }
        }
    }
    for l in start..=prefix.len() {
        let a = prefix.truncated(l);
        let band = slowdown.widen(&raw(&a)?, l);
        if let Some(next) = acc.intersect(&band) {
            acc = next;
        }
        cache
            .lock()
            .unwrap()
            .insert((a, key_rects.clone()), acc.clone());
    }
    Ok(acc)
}

fn conditional_set_mass(
    p: &dyn Measure,
    prefix: &BitString,
    v: &BasicSet,
) -> Result<RatInterval, MeasureError> {
    let precision = Rat::pow2(-(prefix.len() as i64 + 8));
    let mut total = RatInterval::point(Rat::zero());
    for r in v.rects() {
        total = total.add(&cond_interval(p, prefix, &r.a2, &precision)?);
    }
    Ok(total)
}

/// Bounds computed from the measure itself, widened per the slowdown
/// schedule. Zero-marginal prefixes inherit the parent interval.
pub struct HonestGamma {
    p: Arc<dyn Measure>,
    slowdown: Slowdown,
    cache: BoundsCache,
}

impl HonestGamma {
    pub fn new(p: Arc<dyn Measure>, slowdown: Slowdown) -> Self {
        HonestGamma {
            p,
            slowdown,
            cache: Mutex::new(Default::default()),
        }
    }
}

impl GammaOracle for HonestGamma {
    fn bounds(&self, prefix: &BitString, v: &BasicSet) -> Result<RatInterval, MeasureError> {
        let p = &*self.p;
        let raw = |a: &BitString| match conditional_set_mass(p, a, v) {
            Ok(iv) => Ok(iv),
            Err(MeasureError::ZeroMarginal { .. }) => {
                Ok(RatInterval::new(Rat::zero(), Rat::one()))
            }
            Err(e) => Err(e),
        };
        fold_bounds(&raw, self.slowdown, prefix, v, &self.cache)
    }
}

/// Bounds that are honest along one path and report a decoy measure's
/// conditionals everywhere else, still nested. Demonstrates that the
/// measure bounds cannot be fooled by a misbehaving oracle.
pub struct AdversarialGamma {
    p: Arc<dyn Measure>,
    decoy: Arc<dyn Measure>,
    path: PathSpec,
    slowdown: Slowdown,
    cache: BoundsCache,
}

impl AdversarialGamma {
    pub fn new(
        p: Arc<dyn Measure>,
        decoy: Arc<dyn Measure>,
        path: PathSpec,
        slowdown: Slowdown,
    ) -> Self {
        AdversarialGamma {
            p,
            decoy,
            path,
            slowdown,
            cache: Mutex::new(Default::default()),
        }
    }
}

impl GammaOracle for AdversarialGamma {
    fn bounds(&self, prefix: &BitString, v: &BasicSet) -> Result<RatInterval, MeasureError> {
        let raw = |a: &BitString| {
            let on_path = *a == self.path.prefix(a.len());
            let src: &dyn Measure = if on_path { &*self.p } else { &*self.decoy };
            match conditional_set_mass(src, a, v) {
                Ok(iv) => Ok(iv),
                Err(MeasureError::ZeroMarginal { .. }) => {
                    Ok(RatInterval::new(Rat::zero(), Rat::one()))
                }
                Err(e) => Err(e),
            }
        };
        fold_bounds(&raw, self.slowdown, prefix, v, &self.cache)
    }
}

/// Oracle description for config files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GammaSpec {
    Honest {
        #[serde(default)]
        slowdown: Slowdown,
    },
    Adversarial {
        path: PathSpec,
        decoy: MeasureConfig,
        #[serde(default)]
        slowdown: Slowdown,
    },
}

impl GammaSpec {
    pub fn build(&self, p: Arc<dyn Measure>) -> Result<Box<dyn GammaOracle>, MeasureError> {
        Ok(match self {
            GammaSpec::Honest { slowdown } => Box::new(HonestGamma::new(p, *slowdown)),
            GammaSpec::Adversarial {
                path,
                decoy,
                slowdown,
            } => Box::new(AdversarialGamma::new(
                p,
                Arc::from(decoy.build()?),
                path.clone(),
                *slowdown,
            )),
        })
    }
}

/// Why a stripe failed, with the four numbers when they were computed.
#[derive(Clone, Debug, Serialize)]
pub struct Goodness {
    pub good: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<RatInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertical: Option<RatInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Goodness {
    fn bad(reason: &str) -> Self {
        Goodness {
            good: false,
            gamma: None,
            vertical: None,
            spread: None,
            reason: Some(reason.to_string()),
        }
    }
}

/// A stripe is good for U when U is stable in it, the oracle bounds and
/// the true vertical size all fit in one interval of length delta, and
/// the vertical upper bound stays strictly below epsilon.
pub fn is_good(
    p: &dyn Measure,
    gamma: &dyn GammaOracle,
    u: &BasicSet,
    s: &Stripe,
    delta: &Rat,
    epsilon: &Rat,
) -> Result<Goodness, MeasureError> {
    let (section, stable) = u.section(&s.interval);
    if !stable {
        return Ok(Goodness::bad("not stable"));
    }
    let precision = Rat::pow2(-(s.level() as i64));
    let vertical = match vertical_size(p, u, s, &precision) {
        Ok(iv) => iv,
        Err(TrimError::Measure(MeasureError::ZeroMarginal { .. })) => {
            return Ok(Goodness::bad("zero-marginal stripe"));
        }
        Err(TrimError::Measure(e)) => return Err(e),
        Err(TrimError::NotStable(_)) | Err(TrimError::InvalidConfig(_)) => unreachable!(),
    };
    // The vertical threshold is cheap to refute; only survivors pay for
    // the oracle walk.
    if *vertical.hi() >= *epsilon {
        return Ok(Goodness {
            good: false,
            gamma: None,
            vertical: Some(vertical),
            spread: None,
            reason: Some("vertical size reaches epsilon".to_string()),
        });
    }
    let g = gamma.bounds(&s.interval, &section)?;
    let lo = g.lo().clone().min(vertical.lo().clone());
    let hi = g.hi().clone().max(vertical.hi().clone());
    let spread = hi - lo;
    let good = spread <= *delta;
    Ok(Goodness {
        good,
        gamma: Some(g),
        vertical: Some(vertical),
        spread: Some(spread),
        reason: if good {
            None
        } else {
            Some("spread exceeds delta".to_string())
        },
    })
}

/// Increasing sequence of basic sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CoverSequence {
    sets: Vec<BasicSet>,
}

impl CoverSequence {
    pub fn new(sets: Vec<BasicSet>) -> Result<Self, TrimError> {
        for w in sets.windows(2) {
            if !w[0].is_subset_of(&w[1]) {
                return Err(TrimError::InvalidConfig(
                    "cover sequence not increasing".into(),
                ));
            }
        }
        Ok(CoverSequence { sets })
    }

    pub fn sets(&self) -> &[BasicSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// U_k, 1-based.
    pub fn get(&self, k: usize) -> &BasicSet {
        &self.sets[k - 1]
    }
}

impl<'de> Deserialize<'de> for CoverSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let sets: Vec<BasicSet> = Deserialize::deserialize(d)?;
        CoverSequence::new(sets).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TrimConfig {
    pub epsilon: Rat,
    pub deltas: Vec<Rat>,
    pub maxdepth: usize,
}

impl TrimConfig {
    pub fn new(epsilon: Rat, deltas: Vec<Rat>, maxdepth: usize) -> Result<Self, TrimError> {
        if epsilon <= Rat::zero() || epsilon > Rat::one() {
            return Err(TrimError::InvalidConfig(format!(
                "epsilon {epsilon} outside (0, 1]"
            )));
        }
        let mut sum = Rat::zero();
        let mut prev: Option<&Rat> = None;
        for d in &deltas {
            if *d <= Rat::zero() {
                return Err(TrimError::InvalidConfig(format!("delta {d} not positive")));
            }
            if let Some(p) = prev {
                if d >= p {
                    return Err(TrimError::InvalidConfig(
                        "deltas not strictly decreasing".into(),
                    ));
                }
            }
            sum += d.clone();
            prev = Some(d);
        }
        if sum >= epsilon {
            return Err(TrimError::InvalidConfig(format!(
                "delta sum {sum} reaches epsilon {epsilon}"
            )));
        }
        Ok(TrimConfig {
            epsilon,
            deltas,
            maxdepth,
        })
    }

    /// Geometric schedule delta_i = epsilon * 2^-(i+1); the sum stays
    /// below epsilon for any stage count.
    pub fn with_default_deltas(epsilon: Rat, stages: usize, maxdepth: usize) -> Self {
        let deltas = (1..=stages as i64)
            .map(|i| &epsilon * &Rat::pow2(-i - 1))
            .collect();
        TrimConfig::new(epsilon, deltas, maxdepth).expect("geometric schedule is valid")
    }

    /// delta_k, 1-based.
    pub fn delta(&self, k: usize) -> &Rat {
        &self.deltas[k - 1]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Maximal good stripes, in footprint order.
    pub stripes: Vec<BitString>,
    /// Their union.
    pub g: BasicSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrimResult {
    pub stages: Vec<StageRecord>,
    /// Trimmed sets, one per stage.
    pub u_hat: Vec<BasicSet>,
    pub covers: CoverSequence,
    pub cfg: TrimConfig,
}

impl TrimResult {
    /// G_k, 1-based.
    pub fn g(&self, k: usize) -> &BasicSet {
        &self.stages[k - 1].g
    }

    /// Û_k, 1-based.
    pub fn u_hat(&self, k: usize) -> &BasicSet {
        &self.u_hat[k - 1]
    }
}

// Breadth-first scan, left child first, reporting maximal good stripes.
// Zero-marginal subtrees cannot contain good stripes and are pruned
// when that is cheap to see.
fn scan_stage(
    p: &dyn Measure,
    gamma: &dyn GammaOracle,
    roots: &[BitString],
    check: &dyn Fn(&Stripe) -> Result<bool, MeasureError>,
    maxdepth: usize,
) -> Result<Vec<BitString>, MeasureError> {
    let mut good = Vec::new();
    let mut queue: std::collections::VecDeque<BitString> = roots.iter().copied().collect();
    let _ = gamma;
    while let Some(i) = queue.pop_front() {
        let s = Stripe::new(i);
        if p.is_exact() && s.h(p)?.is_zero() {
            continue;
        }
        if check(&s)? {
            good.push(i);
        } else if i.len() < maxdepth {
            queue.push_back(i.child(false));
            queue.push_back(i.child(true));
        }
    }
    good.sort();
    Ok(good)
}

/// Staged construction: stage 1 collects maximal good stripes for U₁;
/// stage k searches inside the stage-(k-1) stripes, starting at each
/// stripe itself, for stripes good for both U_{k-1} (with delta_{k-1})
/// and U_k (with delta_k). The trimmed set keeps U_i on G_i\G_{i+1} and
/// U_k on G_k.
pub fn trim(
    p: &dyn Measure,
    gamma: &dyn GammaOracle,
    covers: &CoverSequence,
    cfg: &TrimConfig,
) -> Result<TrimResult, TrimError> {
    let stages_wanted = covers.len();
    if cfg.deltas.len() < stages_wanted {
        return Err(TrimError::InvalidConfig(format!(
            "{} deltas for {} stages",
            cfg.deltas.len(),
            stages_wanted
        )));
    }
    let mut stages: Vec<StageRecord> = Vec::with_capacity(stages_wanted);
    for k in 1..=stages_wanted {
        let roots: Vec<BitString> = if k == 1 {
            vec![BitString::empty()]
        } else {
            stages[k - 2].stripes.clone()
        };
        let check = |s: &Stripe| -> Result<bool, MeasureError> {
            if k >= 2 {
                let prev = is_good(p, gamma, covers.get(k - 1), s, cfg.delta(k - 1), &cfg.epsilon)?;
                if !prev.good {
                    return Ok(false);
                }
            }
            Ok(is_good(p, gamma, covers.get(k), s, cfg.delta(k), &cfg.epsilon)?.good)
        };
        let stripes = scan_stage(p, gamma, &roots, &check, cfg.maxdepth)?;
        let g = BasicSet::from_cylinders1(stripes.clone());
        stages.push(StageRecord { stage: k, stripes, g });
    }

    let mut u_hat = Vec::with_capacity(stages_wanted);
    for k in 1..=stages_wanted {
        let mut acc = covers.get(k).intersect(&stages[k - 1].g);
        for i in 1..k {
            let band = stages[i - 1].g.difference(&stages[i].g);
            acc = acc.union(&covers.get(i).intersect(&band));
        }
        u_hat.push(acc);
    }

    Ok(TrimResult {
        stages,
        u_hat,
        covers: covers.clone(),
        cfg: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerRow {
    pub stage: usize,
    pub set: String,
    pub measure: Rat,
    pub bound: Rat,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub rows: Vec<LedgerRow>,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Exact measure bounds every run must satisfy, oracle honesty or not:
/// trimmed mass inside each stage stays below epsilon of the stage
/// union, what a stage strips from the previous one is controlled by
/// the delta schedule, and the final trimmed set is small outright.
pub fn verify_bounds(
    result: &TrimResult,
    p: &dyn Measure,
) -> Result<BoundReport, MeasureError> {
    let cfg = &result.cfg;
    let covers = &result.covers;
    let mut rows = Vec::new();
    let mut row = |stage: usize, set: String, measure: Rat, bound: Rat| {
        let ok = measure <= bound;
        rows.push(LedgerRow {
            stage,
            set,
            measure,
            bound,
            ok,
        });
    };

    let k_last = covers.len();
    for i in 1..=k_last {
        let g_i = result.g(i);
        let mass = set_mass(p, &covers.get(i).intersect(g_i))?;
        let bound = &cfg.epsilon * &set_mass(p, g_i)?;
        row(i, format!("U{i}&G{i}"), mass, bound);
    }
    for i in 2..=k_last {
        let band = result.g(i - 1).difference(result.g(i));
        let mass = set_mass(p, &covers.get(i - 1).intersect(&band))?;
        let bound = &cfg.epsilon * &set_mass(p, &band)?
            + Rat::from_int(2) * cfg.delta(i - 1) * set_mass(p, result.g(i))?;
        row(i, format!("U{}&(G{}\\G{i})", i - 1, i - 1), mass, bound);
    }
    let mut delta_sum = Rat::zero();
    for k in 1..=k_last {
        let mass = set_mass(p, result.u_hat(k))?;
        let bound = &cfg.epsilon + &(Rat::from_int(2) * &delta_sum);
        row(k, format!("Uhat{k}"), mass, bound);
        delta_sum += cfg.delta(k).clone();
    }
    if k_last >= 1 {
        let mass = set_mass(p, result.u_hat(k_last))?;
        row(
            k_last,
            format!("Uhat{k_last}:cap"),
            mass,
            Rat::from_int(3) * &cfg.epsilon,
        );
        // Per-stripe control: inside each maximal stripe of the last
        // completed selection, the trimmed set is small relative to the
        // stripe's horizontal size.
        let anchor = if k_last >= 2 { k_last - 1 } else { k_last };
        let slack = if k_last >= 2 {
            &cfg.epsilon + &(Rat::from_int(2) * cfg.delta(k_last - 1))
        } else {
            cfg.epsilon.clone()
        };
        for interval in &result.stages[anchor - 1].stripes {
            let s = Stripe::new(*interval);
            let mass = set_mass(p, &result.u_hat(k_last).intersect(&s.set()))?;
            let bound = &slack * &s.h(p)?;
            row(anchor, format!("Uhat{k_last}&S[{s}]"), mass, bound);
        }
    }
    Ok(BoundReport { rows })
}

/// Where a point of the cover ended up after trimming.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverageOutcome {
    /// The point is not in U_k at its finite depth, so nothing is
    /// claimed.
    NotInCover,
    Covered {
        cell: Rect,
    },
    /// In the cover but not in the trimmed set: no good stripe reached
    /// the point within maxdepth.
    DepthExhausted {
        /// Exact conditional section size along the first path at
        /// maxdepth, when the marginal allows one.
        section_size: Option<RatInterval>,
    },
}

impl CoverageOutcome {
    pub fn covered(&self) -> bool {
        matches!(self, CoverageOutcome::Covered { .. })
    }
}

fn cell_holds_point(b: &BitString, path: &PathSpec) -> bool {
    (0..b.len()).all(|i| b.bit(i) == path.bit(i))
}

fn point_cell(set: &BasicSet, path1: &PathSpec, path2: &PathSpec) -> Option<Rect> {
    set.rects()
        .iter()
        .find(|r| cell_holds_point(&r.a1, path1) && cell_holds_point(&r.a2, path2))
        .cloned()
}

/// Check whether a point of U_k survived into Û_k.
pub fn coverage_check(
    result: &TrimResult,
    p: &dyn Measure,
    path1: &PathSpec,
    path2: &PathSpec,
    k: usize,
) -> Result<CoverageOutcome, MeasureError> {
    let u_k = result.covers.get(k);
    if point_cell(u_k, path1, path2).is_none() {
        return Ok(CoverageOutcome::NotInCover);
    }
    if let Some(cell) = point_cell(result.u_hat(k), path1, path2) {
        return Ok(CoverageOutcome::Covered { cell });
    }
    let prefix = path1.prefix(result.cfg.maxdepth);
    let section_size = match vertical_size(
        p,
        u_k,
        &Stripe::new(prefix),
        &Rat::pow2(-(result.cfg.maxdepth as i64)),
    ) {
        Ok(iv) => Some(iv),
        Err(_) => None,
    };
    Ok(CoverageOutcome::DepthExhausted { section_size })
}
