//! Expectation-bounded tests at finite depth: integrals, normalization,
//! the product and power-sum compositions, fiber-wise ratio trimming,
//! and finite-set deficiency against pluggable prefix-free codes.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{BitString, Rect};
use crate::cylfn::{CylFnError, CylinderFn, ProductFn};
use crate::measures::{Measure, MeasureError};
use crate::rat::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestError {
    #[error("family table row {k} has {got} fibers, expected {expected}")]
    WrongTable { k: usize, expected: usize, got: usize },
    #[error("fiber depth mismatch at row {k}, prefix {prefix}: {got} vs {expected}")]
    FiberDepth {
        k: usize,
        prefix: String,
        expected: usize,
        got: usize,
    },
    #[error("conditional integral {integral} exceeds 1 at prefix {prefix}, k={k}")]
    NotATest {
        prefix: String,
        k: usize,
        integral: String,
    },
    #[error("family needs at least one row")]
    EmptyFamily,
    #[error("element {0} not in the set")]
    NotInSet(String),
    #[error("code lengths violate the Kraft inequality: total {0}")]
    KraftViolation(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    CylFn(#[from] CylFnError),
}

/// Which factor a one-coordinate function lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    First,
    Second,
}

fn cell_rect(factor: Factor, cell: BitString) -> Rect {
    match factor {
        Factor::First => Rect::new(cell, BitString::empty()),
        Factor::Second => Rect::new(BitString::empty(), cell),
    }
}

/// Exact integral of a one-factor step function against the matching
/// marginal.
pub fn integral1(
    f: &CylinderFn,
    p: &dyn Measure,
    factor: Factor,
) -> Result<Rat, MeasureError> {
    if !p.is_exact() {
        return Err(MeasureError::NotExact);
    }
    let mut total = Rat::zero();
    for (cell, v) in f.cells() {
        if v.is_zero() {
            continue;
        }
        total += v * &p.mass(&cell_rect(factor, cell))?;
    }
    Ok(total)
}

/// Exact integral of a product-space step function.
pub fn integral(f: &ProductFn, p: &dyn Measure) -> Result<Rat, MeasureError> {
    if !p.is_exact() {
        return Err(MeasureError::NotExact);
    }
    let mut total = Rat::zero();
    for (cell, v) in f.cells() {
        if v.is_zero() {
            continue;
        }
        total += v * &p.mass(&cell)?;
    }
    Ok(total)
}

/// A step function whose integral is known to be at most 1.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectationTest {
    f: CylinderFn,
    pub factor: Factor,
    /// Integral of the stored function.
    pub integral: Rat,
    /// Whether normalization had to scale the input down.
    pub scaled: bool,
}

impl ExpectationTest {
    pub fn f(&self) -> &CylinderFn {
        &self.f
    }
}

/// Turn any nonnegative step function into a test: functions whose
/// integral already fits are kept verbatim, larger ones are scaled by
/// the reciprocal of their integral.
pub fn make_test(
    f: CylinderFn,
    p: &dyn Measure,
    factor: Factor,
) -> Result<ExpectationTest, MeasureError> {
    let raw = integral1(&f, p, factor)?;
    if raw <= Rat::one() {
        return Ok(ExpectationTest {
            f,
            factor,
            integral: raw,
            scaled: false,
        });
    }
    let f = f.scale(&(Rat::one() / raw));
    Ok(ExpectationTest {
        f,
        factor,
        integral: Rat::one(),
        scaled: true,
    })
}

/// Product-space counterpart of [`ExpectationTest`].
#[derive(Clone, Debug, Serialize)]
pub struct ProductTest {
    f: ProductFn,
    pub integral: Rat,
    pub scaled: bool,
}

impl ProductTest {
    pub fn f(&self) -> &ProductFn {
        &self.f
    }
}

pub fn make_product_test(f: ProductFn, p: &dyn Measure) -> Result<ProductTest, MeasureError> {
    let raw = integral(&f, p)?;
    if raw <= Rat::one() {
        return Ok(ProductTest {
            f,
            integral: raw,
            scaled: false,
        });
    }
    let scale = Rat::one() / raw;
    let values = f.values().iter().map(|v| v * &scale).collect();
    let f = ProductFn::new(f.depth1(), f.depth2(), values).expect("scaling keeps sign");
    Ok(ProductTest {
        f,
        integral: Rat::one(),
        scaled: true,
    })
}

/// Integral of a second-factor step function against the conditional
/// measure given a first-factor prefix. None when the prefix carries no
/// marginal mass.
pub fn fiber_integral(
    p: &dyn Measure,
    prefix: &BitString,
    g: &CylinderFn,
) -> Result<Option<Rat>, MeasureError> {
    if !p.is_exact() {
        return Err(MeasureError::NotExact);
    }
    let den = p.mass(&Rect::stripe(*prefix))?;
    if den.is_zero() {
        return Ok(None);
    }
    let mut num = Rat::zero();
    for (cell, v) in g.cells() {
        if v.is_zero() {
            continue;
        }
        num += v * &p.mass(&Rect::new(*prefix, cell))?;
    }
    Ok(Some(num / den))
}

/// A family of second-factor tests, one per first-factor prefix and
/// integer parameter: every fiber integrates to at most 1 under the
/// conditional measure of its prefix, verified exactly at construction.
/// Zero-marginal prefixes carry no conditional measure and are exempt.
#[derive(Clone, Debug, Serialize)]
pub struct CondTestFamily {
    depth1: usize,
    depth2: usize,
    /// tables[k][prefix index] = fiber for parameter k.
    tables: Vec<Vec<CylinderFn>>,
}

impl CondTestFamily {
    pub fn new(
        p: &dyn Measure,
        depth1: usize,
        depth2: usize,
        tables: Vec<Vec<CylinderFn>>,
    ) -> Result<Self, TestError> {
        if tables.is_empty() {
            return Err(TestError::EmptyFamily);
        }
        for (k, row) in tables.iter().enumerate() {
            if row.len() != 1 << depth1 {
                return Err(TestError::WrongTable {
                    k,
                    expected: 1 << depth1,
                    got: row.len(),
                });
            }
            for (i, g) in row.iter().enumerate() {
                let prefix = BitString::from_index(depth1, i as u64);
                if g.depth() != depth2 {
                    return Err(TestError::FiberDepth {
                        k,
                        prefix: prefix.to_string(),
                        expected: depth2,
                        got: g.depth(),
                    });
                }
                if let Some(iv) = fiber_integral(p, &prefix, g)? {
                    if iv > Rat::one() {
                        return Err(TestError::NotATest {
                            prefix: prefix.to_string(),
                            k,
                            integral: iv.to_string(),
                        });
                    }
                }
            }
        }
        Ok(CondTestFamily {
            depth1,
            depth2,
            tables,
        })
    }

    /// The all-ones family: each fiber integrates to exactly 1 under
    /// any conditional probability measure.
    pub fn constant_one(depth1: usize, depth2: usize, max_k: usize) -> Self {
        let row: Vec<CylinderFn> = (0..1usize << depth1)
            .map(|_| CylinderFn::constant(depth2, Rat::one()))
            .collect();
        CondTestFamily {
            depth1,
            depth2,
            tables: vec![row; max_k + 1],
        }
    }

    pub fn depth1(&self) -> usize {
        self.depth1
    }

    pub fn depth2(&self) -> usize {
        self.depth2
    }

    pub fn max_k(&self) -> usize {
        self.tables.len() - 1
    }

    /// Fiber for a prefix at least as deep as the family grid.
    pub fn member(&self, prefix: &BitString, k: usize) -> &CylinderFn {
        assert!(k < self.tables.len(), "parameter above max_k");
        let idx = prefix.truncated(self.depth1).index() as usize;
        &self.tables[k][idx]
    }
}

/// Largest power of two not exceeding the value, as an exponent.
pub fn floor_log2(v: &Rat) -> i64 {
    assert!(*v > Rat::zero(), "floor_log2 needs a positive value");
    let two = Rat::from_int(2);
    let half = Rat::new(1, 2);
    let mut c = 0i64;
    let mut x = v.clone();
    while x >= two {
        x = x * &half;
        c += 1;
    }
    while x < Rat::one() {
        x = x * &two;
        c -= 1;
    }
    c
}

/// Per-cell floor of log2 of a test's values; zero cells carry no
/// finite exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyField {
    depth: usize,
    values: Vec<Option<i64>>,
}

impl DeficiencyField {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[Option<i64>] {
        &self.values
    }

    pub fn at(&self, cell: &BitString) -> Option<i64> {
        self.values[cell.truncated(self.depth).index() as usize]
    }
}

pub fn deficiency(t: &ExpectationTest) -> DeficiencyField {
    DeficiencyField {
        depth: t.f.depth(),
        values: t
            .f
            .values()
            .iter()
            .map(|v| if v.is_zero() { None } else { Some(floor_log2(v)) })
            .collect(),
    }
}

fn clamped_k(d: Option<i64>, max_k: usize) -> usize {
    d.map_or(0, |v| v.clamp(0, max_k as i64) as usize)
}

/// T(a, b) = t1(a) * fam(b | a, k) with k the clamped deficiency of t1
/// at a. The integral against any product oracle whose conditionals the
/// family respects stays at most the integral of t1.
pub fn product_construction(t1: &ExpectationTest, fam: &CondTestFamily) -> ProductFn {
    assert_eq!(t1.factor, Factor::First, "first-factor test required");
    let d1 = t1.f.depth().max(fam.depth1());
    let d2 = fam.depth2();
    let def = deficiency(t1);
    let mut values = Vec::with_capacity(1 << (d1 + d2));
    for i1 in 0..1u64 << d1 {
        let a = BitString::from_index(d1, i1);
        let t1v = t1.f.at_deeper(&a);
        let k = clamped_k(def.at(&a), fam.max_k());
        let fiber = fam.member(&a, k);
        for v in fiber.values() {
            values.push(t1v * v);
        }
    }
    ProductFn::new(d1, d2, values).expect("products of nonnegatives")
}

/// T'(a, b) = sum of 2^k * fam(b | a, k) over k below the deficiency of
/// t1 at a (and within the family range). Each fiber sum stays below
/// 2^d <= t1(a), so the integral never exceeds the integral of t1.
pub fn sum_construction(t1: &ExpectationTest, fam: &CondTestFamily) -> ProductFn {
    assert_eq!(t1.factor, Factor::First, "first-factor test required");
    let d1 = t1.f.depth().max(fam.depth1());
    let d2 = fam.depth2();
    let def = deficiency(t1);
    let mut values = Vec::with_capacity(1 << (d1 + d2));
    for i1 in 0..1u64 << d1 {
        let a = BitString::from_index(d1, i1);
        let top = def.at(&a).unwrap_or(0).min(fam.max_k() as i64 + 1);
        let mut fiber = vec![Rat::zero(); 1 << d2];
        let mut k = 0i64;
        while k < top {
            let weight = Rat::pow2(k);
            for (slot, v) in fiber.iter_mut().zip(fam.member(&a, k as usize).values()) {
                *slot += &weight * v;
            }
            k += 1;
        }
        values.extend(fiber);
    }
    ProductFn::new(d1, d2, values).expect("sums of nonnegatives")
}

/// One fiber-trimmed family member: each first-factor fiber of tP is
/// divided by 2^(d+c); fibers whose conditional integral already fits
/// are kept bit-exact, the rest are capped by their own integral.
#[derive(Clone, Debug, Serialize)]
pub struct RatioTrim {
    pub depth1: usize,
    pub fibers: Vec<CylinderFn>,
    /// Per fiber: true when trimming left it untouched.
    pub untouched: Vec<bool>,
}

impl RatioTrim {
    pub fn fiber(&self, prefix: &BitString) -> &CylinderFn {
        &self.fibers[prefix.truncated(self.depth1).index() as usize]
    }

    pub fn all_untouched(&self) -> bool {
        self.untouched.iter().all(|&u| u)
    }
}

pub fn ratio_trim(
    tp: &ProductTest,
    d: i64,
    c: i64,
    p: &dyn Measure,
) -> Result<RatioTrim, MeasureError> {
    let depth1 = tp.f.depth1();
    let scale = Rat::pow2(-(d + c));
    let mut fibers = Vec::with_capacity(1 << depth1);
    let mut untouched = Vec::with_capacity(1 << depth1);
    for i1 in 0..1u64 << depth1 {
        let prefix = BitString::from_index(depth1, i1);
        let g = tp.f.fiber(i1).scale(&scale);
        let iv = fiber_integral(p, &prefix, &g)?;
        match iv {
            Some(iv) if iv > Rat::one() => {
                fibers.push(g.scale(&(Rat::one() / iv)));
                untouched.push(false);
            }
            _ => {
                fibers.push(g);
                untouched.push(true);
            }
        }
    }
    Ok(RatioTrim {
        depth1,
        fibers,
        untouched,
    })
}

/// Recheck a trim against its contract: an untouched fiber is the
/// scaled original verbatim, a touched fiber was over the line and now
/// integrates to exactly one. Returns one description per breach.
pub fn ratio_trim_violations(
    tp: &ProductTest,
    rt: &RatioTrim,
    d: i64,
    c: i64,
    p: &dyn Measure,
) -> Result<Vec<String>, MeasureError> {
    let mut out = Vec::new();
    let scale = Rat::pow2(-(d + c));
    for i1 in 0..1u64 << rt.depth1 {
        let prefix = BitString::from_index(rt.depth1, i1);
        let g = tp.f.fiber(i1).scale(&scale);
        let over = matches!(
            fiber_integral(p, &prefix, &g)?,
            Some(iv) if iv > Rat::one()
        );
        let trimmed = &rt.fibers[i1 as usize];
        if rt.untouched[i1 as usize] {
            if over {
                out.push(format!("fiber {prefix} marked untouched above the line"));
            }
            if trimmed.values() != g.values() {
                out.push(format!("fiber {prefix} marked untouched but rewritten"));
            }
        } else {
            if !over {
                out.push(format!("fiber {prefix} trimmed without need"));
            }
            let got = fiber_integral(p, &prefix, trimmed)?;
            if got != Some(Rat::one()) {
                let shown = got.map_or("none".to_string(), |v| v.to_string());
                out.push(format!("fiber {prefix} trimmed to integral {shown}, not 1"));
            }
        }
    }
    Ok(out)
}

/// Smallest integer c for which ratio trimming with this d touches no
/// fiber. None when every fiber is untouched for all c (zero function).
pub fn smallest_untrimming_c(
    tp: &ProductTest,
    d: i64,
    p: &dyn Measure,
) -> Result<Option<i64>, MeasureError> {
    let depth1 = tp.f.depth1();
    let mut best: Option<i64> = None;
    for i1 in 0..1u64 << depth1 {
        let prefix = BitString::from_index(depth1, i1);
        let g = tp.f.fiber(i1);
        if let Some(iv) = fiber_integral(p, &prefix, &g)? {
            if iv.is_zero() {
                continue;
            }
            // Need 2^(d+c) >= iv, i.e. c >= ceil(log2 iv) - d.
            let mut e = floor_log2(&iv);
            if Rat::pow2(e) != iv {
                e += 1;
            }
            let need = e - d;
            best = Some(best.map_or(need, |b: i64| b.max(need)));
        }
    }
    Ok(best)
}

/// Prefix-free code-length assignment for the elements of a finite set.
pub trait CodeLengthProvider {
    fn codelen(&self, x: &BitString, a: &[BitString]) -> u32;
}

/// Fixed-length code: every element costs the same ceil(log2 |A|) bits.
pub struct UniformCode;

impl CodeLengthProvider for UniformCode {
    fn codelen(&self, _x: &BitString, a: &[BitString]) -> u32 {
        let n = a.len() as u64;
        let mut bits = 0u32;
        while (1u64 << bits) < n {
            bits += 1;
        }
        bits
    }
}

/// Rank-based code: elements are sorted and the rank is encoded with
/// an Elias-gamma length, so early elements get short codes.
pub struct EnumerationCode;

impl CodeLengthProvider for EnumerationCode {
    fn codelen(&self, x: &BitString, a: &[BitString]) -> u32 {
        let mut sorted: Vec<&BitString> = a.iter().collect();
        sorted.sort();
        let rank = sorted.iter().position(|y| **y == *x).expect("x in A") as u64;
        let n = rank + 1;
        let bitlen = 64 - n.leading_zeros();
        2 * bitlen - 1
    }
}

/// Deficiency of an element within a finite set, carried in exact form:
/// weight = 2^deficiency = |A| * 2^(-codelen).
#[derive(Clone, Debug, Serialize)]
pub struct FiniteDeficiency {
    pub set_size: u64,
    pub codelen: u32,
    pub weight: Rat,
}

impl FiniteDeficiency {
    /// log2 |A| - codelen, in floating point for display.
    pub fn approx_bits(&self) -> f64 {
        (self.set_size as f64).log2() - self.codelen as f64
    }

    pub fn positive(&self) -> bool {
        self.weight > Rat::one()
    }
}

/// Verifies the provider's Kraft inequality over the whole set, then
/// returns the element's deficiency.
pub fn finite_deficiency(
    x: &BitString,
    a: &[BitString],
    code: &dyn CodeLengthProvider,
) -> Result<FiniteDeficiency, TestError> {
    if !a.contains(x) {
        return Err(TestError::NotInSet(x.to_string()));
    }
    let mut kraft = Rat::zero();
    for y in a {
        kraft += Rat::pow2(-(code.codelen(y, a) as i64));
    }
    if kraft > Rat::one() {
        return Err(TestError::KraftViolation(kraft.to_string()));
    }
    let codelen = code.codelen(x, a);
    let weight = Rat::from_int(a.len() as i64) * Rat::pow2(-(codelen as i64));
    Ok(FiniteDeficiency {
        set_size: a.len() as u64,
        codelen,
        weight,
    })
}

/// One row of the construction ledger.
#[derive(Clone, Debug, Serialize)]
pub struct TestLedgerRow {
    pub construction: String,
    pub integral: Rat,
    pub bound: Rat,
    pub ok: bool,
}

impl TestLedgerRow {
    pub fn new(construction: &str, integral: Rat, bound: Rat) -> Self {
        let ok = integral <= bound;
        TestLedgerRow {
            construction: construction.to_string(),
            integral,
            bound,
            ok,
        }
    }
}
