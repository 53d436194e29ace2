//! Independent mass oracles for the example measures, derived directly
//! from their density definitions. These deliberately avoid the library
//! mass formulas: stripes are summed by parity with explicit geometric
//! tails, staircase densities are integrated cell by cell on a fixed
//! depth-12 grid, and segment counts come from enumerating segment
//! positions one by one.

use cantorlab_core::bits::{BitString, Rect};
use cantorlab_core::rat::Rat;

/// Dyadic interval [lo, lo + 2^-len) of a cylinder.
pub fn cyl_bounds(b: &BitString) -> (Rat, Rat) {
    let len = b.len() as i64;
    let lo = Rat::from_int(b.index() as i64) * Rat::pow2(-len);
    let hi = &lo + &Rat::pow2(-len);
    (lo, hi)
}

fn lam(b: &BitString) -> Rat {
    Rat::pow2(-(b.len() as i64))
}

/// Length of [b] ∩ [lo, hi).
fn overlap(b: &BitString, lo: &Rat, hi: &Rat) -> Rat {
    let (blo, bhi) = cyl_bounds(b);
    let l = if &blo > lo { blo } else { lo.clone() };
    let h = if &bhi < hi { bhi } else { hi.clone() };
    if h > l {
        h - l
    } else {
        Rat::zero()
    }
}

/// Length of [a2] ∩ (top or bottom half of the unit interval).
fn half_overlap(a2: &BitString, top: bool) -> Rat {
    if a2.is_empty() {
        Rat::new(1, 2)
    } else if a2.bit(0) == top {
        lam(a2)
    } else {
        Rat::zero()
    }
}

/// Mass oracle for the oscillating measure: stripe k (footprint
/// [0^{k-1}1], mass 2^-k) puts everything on the top half of the second
/// factor when k is odd, the bottom half when k is even, at density 2.
/// A first factor of all zeros meets every deeper stripe; the two
/// parity tails are closed geometric sums.
pub fn oscillating_oracle(rect: &Rect) -> Rat {
    let a1 = &rect.a1;
    if let Some(j) = (0..a1.len()).find(|&i| a1.bit(i)) {
        let k = j + 1;
        return lam(a1) * Rat::from_int(2) * half_overlap(&rect.a2, k % 2 == 1);
    }
    let n = a1.len() as i64;
    let first_odd = if (n + 1) % 2 == 1 { n + 1 } else { n + 2 };
    let first_even = first_odd + if first_odd == n + 1 { 1 } else { -1 };
    let odd_sum = Rat::pow2(-first_odd) * Rat::new(4, 3);
    let even_sum = Rat::pow2(-first_even) * Rat::new(4, 3);
    Rat::from_int(2)
        * (half_overlap(&rect.a2, true) * odd_sum + half_overlap(&rect.a2, false) * even_sum)
}

/// Mass oracle for the staircase measure by brute-force integration on
/// a depth-12 y-grid: every grid cell is assigned its strip's density
/// profile and the profile is integrated over the x-interval. Exact
/// when every sequence term lies on the depth-12 grid.
pub fn staircase_grid_oracle(terms: &[Rat], rect: &Rect) -> Rat {
    const GRID: usize = 12;
    assert!(rect.a2.len() <= GRID);
    let cell = Rat::pow2(-(GRID as i64));
    let (x_lo, x_hi) = cyl_bounds(&rect.a1);
    let y_first = rect.a2.index() << (GRID - rect.a2.len());
    let y_count = 1u64 << (GRID - rect.a2.len());
    let clip = |lo: &Rat, hi: &Rat| -> Rat {
        let l = if lo > &x_lo { lo.clone() } else { x_lo.clone() };
        let h = if hi < &x_hi { hi.clone() } else { x_hi.clone() };
        if h > l {
            h - l
        } else {
            Rat::zero()
        }
    };
    let mut total = Rat::zero();
    for idx in y_first..y_first + y_count {
        let y = Rat::from_int(idx as i64) * &cell;
        let strip = terms.iter().position(|a| y < *a);
        let x_mass = match strip {
            None => clip(&Rat::zero(), &Rat::one()),
            Some(i) => {
                let k = (i + 1) as i64;
                Rat::from_int(2) * clip(&Rat::pow2(-k), &Rat::pow2(1 - k))
                    + clip(&Rat::pow2(1 - k), &Rat::one())
            }
        };
        total += x_mass * &cell;
    }
    total
}

/// Mass oracle for the segments measure by enumerating the segment
/// positions of every listed level and testing each against the
/// x-interval; mass above the last listed term is uniform. Exact for
/// rectangles no finer in x than the number of terms.
pub fn segments_count_oracle(terms: &[Rat], rect: &Rect) -> Rat {
    assert!(rect.a1.len() <= terms.len());
    let (x_lo, x_hi) = cyl_bounds(&rect.a1);
    let mut total = Rat::zero();
    let mut prev = Rat::zero();
    for (i, a_k) in terms.iter().enumerate() {
        let k = (i + 1) as i64;
        let band = overlap(&rect.a2, &prev, a_k);
        if !band.is_zero() {
            let spacing = Rat::pow2(1 - k);
            let mut count = 0i64;
            for j in 0..1u64 << (k - 1) {
                let x = Rat::from_int(j as i64) * &spacing;
                if x >= x_lo && x < x_hi {
                    count += 1;
                }
            }
            total += Rat::from_int(count) * band * Rat::pow2(1 - k);
        }
        prev = a_k.clone();
    }
    total + lam(&rect.a1) * overlap(&rect.a2, &prev, &Rat::one())
}

/// Mass oracle for a product of a Bernoulli(p) first factor and a
/// uniform second factor, from the literal product of factor masses.
pub fn bernoulli_product_oracle(p: &Rat, rect: &Rect) -> Rat {
    let mut m1 = Rat::one();
    for i in 0..rect.a1.len() {
        m1 = m1
            * if rect.a1.bit(i) {
                p.clone()
            } else {
                Rat::one() - p.clone()
            };
    }
    m1 * lam(&rect.a2)
}

/// Every rectangle with both depths at most `maxdepth`.
pub fn all_rects(maxdepth: usize) -> Vec<Rect> {
    let mut cyls = Vec::new();
    for d in 0..=maxdepth {
        for i in 0..1u64 << d {
            cyls.push(BitString::from_index(d, i));
        }
    }
    let mut rects = Vec::new();
    for a1 in &cyls {
        for a2 in &cyls {
            rects.push(Rect::new(*a1, *a2));
        }
    }
    rects
}
