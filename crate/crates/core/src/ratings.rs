//! Rating vectors, their normalization conventions and tie-aware rank labels.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// How a rating vector is scaled. Ratings from every method in this crate are
/// only defined up to a positive multiple.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Normalization {
    /// The named item has rating exactly 1. `ref:` with an empty label means
    /// the last item.
    Reference(String),
    /// The last item has rating 1.
    #[default]
    LastItem,
    SumToOne,
    GeometricMeanOne,
    /// Left on the scale the method produces (Wei-Kendall limit, RPI).
    Natural,
}

impl Normalization {
    /// Rescales `values` in place. `values` must be positive.
    pub fn apply(&self, items: &[String], values: &mut [f64]) -> Result<()> {
        let divisor = match self {
            Normalization::Reference(label) => {
                let k = items
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| Error::invalid(format!("unknown reference item {label:?}")))?;
                values[k]
            }
            Normalization::LastItem => *values
                .last()
                .ok_or_else(|| Error::invalid("empty rating vector"))?,
            Normalization::SumToOne => values.iter().sum(),
            Normalization::GeometricMeanOne => {
                (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
            }
            Normalization::Natural => 1.0,
        };
        if !(divisor.is_finite() && divisor > 0.0) {
            return Err(Error::invalid(format!(
                "cannot normalize by nonpositive divisor {divisor}"
            )));
        }
        for v in values.iter_mut() {
            *v /= divisor;
        }
        // exact 1 for the reference entry despite rounding
        match self {
            Normalization::Reference(label) => {
                if let Some(k) = items.iter().position(|l| l == label) {
                    values[k] = 1.0;
                }
            }
            Normalization::LastItem => {
                if let Some(last) = values.last_mut() {
                    *last = 1.0;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Replaces `LastItem` with an explicit reference to `items`' last label.
    pub fn resolve(&self, items: &[String]) -> Normalization {
        match self {
            Normalization::LastItem => {
                Normalization::Reference(items.last().cloned().unwrap_or_default())
            }
            other => other.clone(),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::Reference(l) => write!(f, "ref:{l}"),
            Normalization::LastItem => f.write_str("ref:last"),
            Normalization::SumToOne => f.write_str("sum1"),
            Normalization::GeometricMeanOne => f.write_str("geomean1"),
            Normalization::Natural => f.write_str("natural"),
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum1" => Ok(Normalization::SumToOne),
            "geomean1" => Ok(Normalization::GeometricMeanOne),
            "natural" => Ok(Normalization::Natural),
            "ref:last" | "ref:" | "last" => Ok(Normalization::LastItem),
            other => match other.strip_prefix("ref:") {
                Some(label) => Ok(Normalization::Reference(label.to_string())),
                None => Err(Error::invalid(format!(
                    "unknown normalization {other:?} (expected ref:<label>, sum1 or geomean1)"
                ))),
            },
        }
    }
}

impl Serialize for Normalization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Positive strengths for labelled items under a declared normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingVector {
    pub items: Vec<String>,
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl RatingVector {
    /// Normalizes `values` and wraps them. `LastItem` is stored resolved to the
    /// actual label.
    pub fn new(
        items: Vec<String>,
        mut values: Vec<f64>,
        normalization: &Normalization,
    ) -> Result<Self> {
        if items.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: items.len(),
                actual: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!(
                "rating {v} is not positive and finite"
            )));
        }
        normalization.apply(&items, &mut values)?;
        Ok(Self {
            normalization: normalization.resolve(&items),
            items,
            values,
        })
    }

    /// Uniform ratings (all 1) under the last-item convention.
    pub fn uniform(items: Vec<String>) -> Self {
        let n = items.len();
        Self {
            normalization: Normalization::LastItem.resolve(&items),
            items,
            values: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn renormalized(&self, normalization: &Normalization) -> Result<Self> {
        Self::new(self.items.clone(), self.values.clone(), normalization)
    }

    /// Multiplies every value by `c > 0`; the normalization label is dropped to
    /// `Natural` since it no longer holds.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            items: self.items.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            normalization: Normalization::Natural,
        }
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.ln()).collect()
    }

    pub fn ranks(&self, tie_tol: f64) -> Vec<RankLabel> {
        rank_labels(&self.values, tie_tol)
    }
}

/// Competition-style rank (`1`, `1=`, `3`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankLabel {
    pub position: usize,
    pub tied: bool,
}

impl fmt::Display for RankLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tied {
            write!(f, "{}=", self.position)
        } else {
            write!(f, "{}", self.position)
        }
    }
}

impl Serialize for RankLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Ranks `values` descending. Values within `tie_tol` (relative to
/// `max(1, |v|)`) of the first member of a group share its position.
pub fn rank_labels(values: &[f64], tie_tol: f64) -> Vec<RankLabel> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut out = vec![
        RankLabel {
            position: 0,
            tied: false
        };
        values.len()
    ];
    let mut start = 0;
    while start < order.len() {
        let lead = values[order[start]];
        let mut end = start + 1;
        while end < order.len() {
            let v = values[order[end]];
            if (lead - v).abs() <= tie_tol * lead.abs().max(v.abs()).max(1.0) {
                end += 1;
            } else {
                break;
            }
        }
        let tied = end - start > 1;
        for &k in &order[start..end] {
            out[k] = RankLabel {
                position: start + 1,
                tied,
            };
        }
        start = end;
    }
    out
}
