//! JSON descriptions of measures, for config files and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Rect;
use crate::measures::families::{
    default_sequence, BernoulliSeq, KernelMeasure, OscillatingMeasure, PerturbedMeasure,
    PointMassSeq, ProductMeasure, SegmentsMeasure, SequenceConfig, StaircaseMeasure,
    UniformMeasure, UniformSeq,
};
use crate::measures::{Measure, MeasureError, SeqMeasure};
use crate::path::PathSpec;
use crate::rat::Rat;

/// One-coordinate measure description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeqSpec {
    Uniform,
    Bernoulli { p: Rat },
    Point { path: PathSpec },
}

impl SeqSpec {
    pub fn build(&self) -> Result<Box<dyn SeqMeasure>, MeasureError> {
        Ok(match self {
            SeqSpec::Uniform => Box::new(UniformSeq),
            SeqSpec::Bernoulli { p } => Box::new(BernoulliSeq::new(p.clone())?),
            SeqSpec::Point { path } => Box::new(PointMassSeq::new(path.clone())),
        })
    }
}

/// Product-space measure description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Uniform,
    Product {
        left: SeqSpec,
        right: SeqSpec,
    },
    Oscillating,
    Staircase {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seq: Option<Vec<Rat>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Rat>,
    },
    Segments {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seq: Option<Vec<Rat>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Rat>,
    },
    Kernel {
        p1: SeqSpec,
        depth: usize,
        /// Fiber measure per depth-`depth` first-coordinate cylinder.
        fibers: BTreeMap<String, SeqSpec>,
    },
}

fn sequence_from(
    seq: &Option<Vec<Rat>>,
    alpha: &Option<Rat>,
) -> Result<SequenceConfig, MeasureError> {
    match (seq, alpha) {
        (None, None) => Ok(default_sequence(12)),
        (Some(a), Some(al)) => SequenceConfig::new(a.clone(), al.clone()),
        _ => Err(MeasureError::InvalidConfig(
            "seq and alpha must be given together".into(),
        )),
    }
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Box<dyn Measure>, MeasureError> {
        Ok(match self {
            MeasureSpec::Uniform => Box::new(UniformMeasure),
            MeasureSpec::Product { left, right } => {
                Box::new(ProductMeasure::new(left.build()?, right.build()?))
            }
            MeasureSpec::Oscillating => Box::new(OscillatingMeasure),
            MeasureSpec::Staircase { seq, alpha } => {
                Box::new(StaircaseMeasure::new(sequence_from(seq, alpha)?))
            }
            MeasureSpec::Segments { seq, alpha } => {
                Box::new(SegmentsMeasure::new(sequence_from(seq, alpha)?))
            }
            MeasureSpec::Kernel { p1, depth, fibers } => {
                let mut table: Vec<Option<Box<dyn SeqMeasure>>> =
                    (0..1usize << depth).map(|_| None).collect();
                for (w, f) in fibers {
                    let bs: crate::bits::BitString = w
                        .parse()
                        .map_err(|e| MeasureError::InvalidConfig(format!("fiber key {w}: {e}")))?;
                    if bs.len() != *depth {
                        return Err(MeasureError::InvalidConfig(format!(
                            "fiber key {w} is not at depth {depth}"
                        )));
                    }
                    table[bs.index() as usize] = Some(f.build()?);
                }
                let fibers = table
                    .into_iter()
                    .enumerate()
                    .map(|(i, f)| {
                        f.ok_or_else(|| {
                            MeasureError::InvalidConfig(format!(
                                "missing fiber for cylinder {}",
                                crate::bits::BitString::from_index(*depth, i as u64)
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Box::new(KernelMeasure::new(p1.build()?, *depth, fibers)?)
            }
        })
    }

    /// Short label for file names and reports.
    pub fn label(&self) -> &'static str {
        match self {
            MeasureSpec::Uniform => "uniform",
            MeasureSpec::Product { .. } => "product",
            MeasureSpec::Oscillating => "oscillating",
            MeasureSpec::Staircase { .. } => "staircase",
            MeasureSpec::Segments { .. } => "segments",
            MeasureSpec::Kernel { .. } => "kernel",
        }
    }
}

/// Deliberate single-cell defect, usable from config files to exercise
/// validation failure paths.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Corruption {
    pub rect: Rect,
    pub delta: Rat,
}

/// A measure description plus optional corruption.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MeasureConfig {
    #[serde(flatten)]
    pub measure: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt: Option<Corruption>,
}

impl MeasureConfig {
    pub fn build(&self) -> Result<Box<dyn Measure>, MeasureError> {
        let inner = self.measure.build()?;
        Ok(match &self.corrupt {
            None => inner,
            Some(c) => Box::new(PerturbedMeasure::new(inner, c.rect.clone(), c.delta.clone())),
        })
    }
}

impl From<MeasureSpec> for MeasureConfig {
    fn from(measure: MeasureSpec) -> Self {
        MeasureConfig {
            measure,
            corrupt: None,
        }
    }
}
