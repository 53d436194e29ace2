//! Exact-arithmetic toolkit for conditional measures on the binary square.
//!
//! Everything here works at finite depth with rational arithmetic: points
//! of the square are pairs of infinite binary sequences, observable events
//! are finite unions of dyadic rectangles, and measures answer mass
//! queries with exact rationals or rational enclosures. On top of that
//! sit conditional-measure traces, martingale checks, heavy-section
//! scans, the stripe-trimming construction, and test-composition
//! calculations, each with machine-checked bound ledgers.

pub mod bits;
pub mod conditional;
pub mod cylfn;
pub mod heavy;
pub mod measures;
pub mod path;
pub mod rat;
pub mod sampling;
pub mod sets;
pub mod testcalc;
pub mod trimming;

pub use bits::{BitString, Rect, MAX_DEPTH};
pub use cylfn::{CylFnError, CylinderFn, ProductFn};
pub use path::PathSpec;
pub use rat::{Rat, RatInterval};
pub use sets::BasicSet;
