//! Classification metrics over confusion counts, and metric-optimal selection
//! from a Pareto front.
//!
//! Every built-in metric is monotone in the error counts: lowering either
//! `fp` or `fn` (with class totals fixed) never makes the value worse. That is
//! what makes a front point optimal for any of them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::{BiPair, ParetoFront};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("pair ({mp}, {mn}) exceeds class totals ({n_pos}, {n_neg})")]
    PairExceedsTotals { mp: u32, mn: u32, n_pos: u32, n_neg: u32 },
    #[error("cannot select from an empty front")]
    EmptyFront,
    #[error("unknown metric {0:?} (expected accuracy, misclass, weighted:<wp>:<wn>, f1, mcc, fowlkes)")]
    UnknownMetric(String),
    #[error("invalid weights in {0:?}: expected two finite non-negative numbers")]
    InvalidWeights(String),
}

/// Confusion-matrix counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricCounts {
    pub tp: u32,
    pub tn: u32,
    pub fp: u32,
    #[serde(rename = "fn")]
    pub fn_: u32,
}

impl MetricCounts {
    /// Counts for a classifier with bi-misclassification `p` on a dataset with
    /// the given class totals.
    pub fn from_pair(p: BiPair, n_pos: u32, n_neg: u32) -> Result<Self, MetricError> {
        if p.mp > n_pos || p.mn > n_neg {
            return Err(MetricError::PairExceedsTotals { mp: p.mp, mn: p.mn, n_pos, n_neg });
        }
        Ok(MetricCounts { tp: n_pos - p.mp, tn: n_neg - p.mn, fp: p.mn, fn_: p.mp })
    }
}

pub fn counts_from_pair(p: BiPair, n_pos: u32, n_neg: u32) -> Result<MetricCounts, MetricError> {
    MetricCounts::from_pair(p, n_pos, n_neg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Accuracy,
    Misclassifications,
    /// `w_p * fp + w_n * fn`.
    Weighted { w_p: f64, w_n: f64 },
    F1,
    Mcc,
    FowlkesMallows,
}

impl MetricKind {
    pub const BUILT_IN: [MetricKind; 6] = [
        MetricKind::Accuracy,
        MetricKind::Misclassifications,
        MetricKind::Weighted { w_p: 2.0, w_n: 1.0 },
        MetricKind::F1,
        MetricKind::Mcc,
        MetricKind::FowlkesMallows,
    ];

    pub fn direction(self) -> Direction {
        match self {
            MetricKind::Misclassifications | MetricKind::Weighted { .. } => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }

    /// Whether `a` is strictly preferable to `b` under this metric.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self.direction() {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    /// The metric value; degenerate denominators evaluate to 0.
    pub fn value(self, c: MetricCounts) -> f64 {
        let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
        match self {
            MetricKind::Accuracy => {
                let total = tp + tn + fp + fn_;
                if total == 0.0 {
                    0.0
                } else {
                    (tp + tn) / total
                }
            }
            MetricKind::Misclassifications => fp + fn_,
            MetricKind::Weighted { w_p, w_n } => w_p * fp + w_n * fn_,
            MetricKind::F1 => {
                if c.tp == 0 {
                    0.0
                } else {
                    tp / (tp + 0.5 * (fp + fn_))
                }
            }
            MetricKind::Mcc => {
                let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
                if den == 0.0 {
                    0.0
                } else {
                    (tp * tn - fp * fn_) / den.sqrt()
                }
            }
            MetricKind::FowlkesMallows => {
                let den = (tp + fp) * (tp + fn_);
                if den == 0.0 {
                    0.0
                } else {
                    (tp * tp / den).sqrt()
                }
            }
        }
    }
}

pub fn metric_value(kind: MetricKind, c: MetricCounts) -> f64 {
    kind.value(c)
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Accuracy => f.write_str("accuracy"),
            MetricKind::Misclassifications => f.write_str("misclass"),
            MetricKind::Weighted { w_p, w_n } => write!(f, "weighted:{w_p}:{w_n}"),
            MetricKind::F1 => f.write_str("f1"),
            MetricKind::Mcc => f.write_str("mcc"),
            MetricKind::FowlkesMallows => f.write_str("fowlkes"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accuracy" => Ok(MetricKind::Accuracy),
            "misclass" => Ok(MetricKind::Misclassifications),
            "f1" => Ok(MetricKind::F1),
            "mcc" => Ok(MetricKind::Mcc),
            "fowlkes" => Ok(MetricKind::FowlkesMallows),
            _ => {
                let Some(rest) = s.strip_prefix("weighted:") else {
                    return Err(MetricError::UnknownMetric(s.to_string()));
                };
                let parsed: Vec<Option<f64>> = rest.split(':').map(|t| t.parse::<f64>().ok()).collect();
                match parsed.as_slice() {
                    [Some(w_p), Some(w_n)] if w_p.is_finite() && w_n.is_finite() && *w_p >= 0.0 && *w_n >= 0.0 => {
                        Ok(MetricKind::Weighted { w_p: *w_p, w_n: *w_n })
                    }
                    _ => Err(MetricError::InvalidWeights(s.to_string())),
                }
            }
        }
    }
}

/// The front point with the best metric value. Ties go to the smaller `mp`,
/// then the smaller `mn`, which is the front's own order.
pub fn select_best(front: &ParetoFront, kind: MetricKind, n_pos: u32, n_neg: u32) -> Result<(BiPair, f64), MetricError> {
    let mut best: Option<(BiPair, f64)> = None;
    for p in front.iter() {
        let v = kind.value(MetricCounts::from_pair(p, n_pos, n_neg)?);
        if best.is_none_or(|(_, bv)| kind.better(v, bv)) {
            best = Some((p, v));
        }
    }
    best.ok_or(MetricError::EmptyFront)
}
