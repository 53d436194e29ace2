//! Step functions that are constant on cylinders of a fixed depth.

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Rect};
use crate::rat::Rat;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CylFnError {
    #[error("refinement depth {requested} is below the function depth {depth}")]
    RefineBelowDepth { requested: usize, depth: usize },
    #[error("negative value at cell {0}")]
    NegativeValue(String),
    #[error("value table has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
}

/// Nonnegative step function on one Cantor factor, constant on depth-d
/// cylinders. Values are indexed by cylinder order left to right.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CylinderFn {
    depth: usize,
    values: Vec<Rat>,
}

impl CylinderFn {
    pub fn new(depth: usize, values: Vec<Rat>) -> Result<Self, CylFnError> {
        let expected = 1usize << depth;
        if values.len() != expected {
            return Err(CylFnError::WrongLength {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(Rat::is_negative) {
            return Err(CylFnError::NegativeValue(
                BitString::from_index(depth, i as u64).to_string(),
            ));
        }
        Ok(CylinderFn { depth, values })
    }

    pub fn constant(depth: usize, v: Rat) -> Self {
        assert!(!v.is_negative());
        CylinderFn {
            depth,
            values: vec![v; 1 << depth],
        }
    }

    /// Scaled indicator of a single cylinder.
    pub fn indicator(cell: &BitString, scale: Rat) -> Self {
        let mut values = vec![Rat::zero(); 1 << cell.len()];
        values[cell.index() as usize] = scale;
        CylinderFn {
            depth: cell.len(),
            values,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn at(&self, cell: &BitString) -> &Rat {
        assert_eq!(cell.len(), self.depth, "cell depth mismatch");
        &self.values[cell.index() as usize]
    }

    /// Value on any cylinder at least as deep as the function.
    pub fn at_deeper(&self, cell: &BitString) -> &Rat {
        assert!(cell.len() >= self.depth, "cell shallower than function");
        &self.values[cell.truncated(self.depth).index() as usize]
    }

    /// Re-express at a finer depth; rejects depths below the current one.
    pub fn refine(&self, depth: usize) -> Result<CylinderFn, CylFnError> {
        if depth < self.depth {
            return Err(CylFnError::RefineBelowDepth {
                requested: depth,
                depth: self.depth,
            });
        }
        let span = depth - self.depth;
        let mut values = Vec::with_capacity(1 << depth);
        for v in &self.values {
            for _ in 0..(1usize << span) {
                values.push(v.clone());
            }
        }
        Ok(CylinderFn { depth, values })
    }

    pub fn scale(&self, factor: &Rat) -> CylinderFn {
        assert!(!factor.is_negative());
        CylinderFn {
            depth: self.depth,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &CylinderFn) -> CylinderFn {
        let d = self.depth.max(other.depth);
        let a = self.refine(d).unwrap();
        let b = other.refine(d).unwrap();
        CylinderFn {
            depth: d,
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (BitString, &Rat)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (BitString::from_index(self.depth, i as u64), v))
    }
}

/// Nonnegative step function on the product space, constant on cells
/// [a1] x [a2] with |a1| = depth1 and |a2| = depth2.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ProductFn {
    depth1: usize,
    depth2: usize,
    values: Vec<Rat>,
}

impl ProductFn {
    pub fn new(depth1: usize, depth2: usize, values: Vec<Rat>) -> Result<Self, CylFnError> {
        let expected = 1usize << (depth1 + depth2);
        if values.len() != expected {
            return Err(CylFnError::WrongLength {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(Rat::is_negative) {
            let i1 = (i >> depth2) as u64;
            let i2 = (i & ((1 << depth2) - 1)) as u64;
            let cell = Rect::new(
                BitString::from_index(depth1, i1),
                BitString::from_index(depth2, i2),
            );
            return Err(CylFnError::NegativeValue(cell.to_string()));
        }
        Ok(ProductFn {
            depth1,
            depth2,
            values,
        })
    }

    pub fn zero(depth1: usize, depth2: usize) -> Self {
        ProductFn {
            depth1,
            depth2,
            values: vec![Rat::zero(); 1 << (depth1 + depth2)],
        }
    }

    pub fn depth1(&self) -> usize {
        self.depth1
    }

    pub fn depth2(&self) -> usize {
        self.depth2
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn at(&self, i1: u64, i2: u64) -> &Rat {
        &self.values[((i1 << self.depth2) | i2) as usize]
    }

    pub fn at_cell(&self, cell: &Rect) -> &Rat {
        assert!(cell.a1.len() == self.depth1 && cell.a2.len() == self.depth2);
        self.at(cell.a1.index(), cell.a2.index())
    }

    /// The fiber function over one coordinate-1 cell.
    pub fn fiber(&self, i1: u64) -> CylinderFn {
        let lo = (i1 << self.depth2) as usize;
        CylinderFn::new(
            self.depth2,
            self.values[lo..lo + (1 << self.depth2)].to_vec(),
        )
        .unwrap()
    }

    pub fn refine(&self, depth1: usize, depth2: usize) -> Result<ProductFn, CylFnError> {
        if depth1 < self.depth1 {
            return Err(CylFnError::RefineBelowDepth {
                requested: depth1,
                depth: self.depth1,
            });
        }
        if depth2 < self.depth2 {
            return Err(CylFnError::RefineBelowDepth {
                requested: depth2,
                depth: self.depth2,
            });
        }
        let s1 = depth1 - self.depth1;
        let s2 = depth2 - self.depth2;
        let mut values = vec![Rat::zero(); 1 << (depth1 + depth2)];
        for i1 in 0..(1u64 << depth1) {
            for i2 in 0..(1u64 << depth2) {
                let v = self.at(i1 >> s1, i2 >> s2).clone();
                values[((i1 << depth2) | i2) as usize] = v;
            }
        }
        Ok(ProductFn {
            depth1,
            depth2,
            values,
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = (Rect, &Rat)> {
        self.values.iter().enumerate().map(|(i, v)| {
            let i1 = (i >> self.depth2) as u64;
            let i2 = (i & ((1 << self.depth2) - 1)) as u64;
            (
                Rect::new(
                    BitString::from_index(self.depth1, i1),
                    BitString::from_index(self.depth2, i2),
                ),
                v,
            )
        })
    }
}
