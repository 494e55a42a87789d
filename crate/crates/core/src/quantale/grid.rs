//! Distribution functions sampled on an arithmetic threshold grid.
//!
//! A profile lists the values at thresholds `0, h, 2h, …, Nh` followed by a
//! saturation point standing for `∞`. Threshold sums are clamped to the
//! saturation point, which keeps index addition associative.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{format_rational, parse_rational, Rational};

use super::QuantaleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridTensor {
    /// Pointwise minimum.
    Min,
    /// Sup-convolution of products over threshold sums.
    Conv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub step: Rational,
    pub steps: usize,
    pub tensor: GridTensor,
}

impl Grid {
    pub fn new(step: Rational, steps: usize, tensor: GridTensor) -> Result<Self, QuantaleError> {
        if step <= Rational::zero() {
            return Err(QuantaleError::Descriptor(format!(
                "grid step must be positive, got {}",
                format_rational(&step)
            )));
        }
        if steps < 1 {
            return Err(QuantaleError::Descriptor("grid needs N >= 1".into()));
        }
        Ok(Grid {
            step,
            steps,
            tensor,
        })
    }

    /// Number of profile entries, including the saturation point.
    pub fn len(&self) -> usize {
        self.steps + 2
    }

    pub fn saturation(&self) -> usize {
        self.steps + 1
    }

    /// Threshold values; `None` marks the saturation point.
    pub fn thresholds(&self) -> Vec<Option<Rational>> {
        (0..=self.steps)
            .map(|i| Some(&self.step * Rational::from_integer((i as i64).into())))
            .chain(std::iter::once(None))
            .collect()
    }

    pub fn constant(&self, v: Rational) -> Arc<[Rational]> {
        vec![v; self.len()].into()
    }

    pub fn combine(&self, a: &[Rational], b: &[Rational]) -> Arc<[Rational]> {
        match self.tensor {
            GridTensor::Min => a.iter().zip(b).map(|(x, y)| x.min(y).clone()).collect(),
            GridTensor::Conv => {
                let sat = self.saturation();
                (0..self.len())
                    .map(|k| {
                        let mut best = Rational::zero();
                        for (i, x) in a.iter().enumerate() {
                            for (j, y) in b.iter().enumerate() {
                                if (i + j).min(sat) <= k {
                                    let p = x * y;
                                    if p > best {
                                        best = p;
                                    }
                                }
                            }
                        }
                        best
                    })
                    .collect()
            }
        }
    }

    pub fn check(&self, values: &[Rational]) -> Result<(), QuantaleError> {
        if values.len() != self.len() {
            return Err(QuantaleError::Value(format!(
                "grid profile needs {} entries, got {}",
                self.len(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| *v < Rational::zero() || *v > Rational::one())
        {
            return Err(QuantaleError::Value(
                "profile values must lie in [0,1]".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(QuantaleError::Value("profile must be nondecreasing".into()));
        }
        Ok(())
    }

    pub fn parse(&self, s: &str) -> Result<Arc<[Rational]>, QuantaleError> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| QuantaleError::Value(format!("expected `[v0, v1, …]`, got `{s}`")))?;
        let values = body
            .split(',')
            .map(|t| parse_rational(t).map_err(|e| QuantaleError::Value(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.check(&values)?;
        Ok(values.into())
    }

    pub fn format(values: &[Rational]) -> String {
        let parts: Vec<String> = values.iter().map(format_rational).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// A validated grid profile, for callers that want a typed handle instead of
/// a bare quantale value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridDistribution {
    pub grid: Grid,
    pub values: Arc<[Rational]>,
}

impl GridDistribution {
    pub fn new(grid: Grid, values: Vec<Rational>) -> Result<Self, QuantaleError> {
        grid.check(&values)?;
        Ok(GridDistribution {
            grid,
            values: values.into(),
        })
    }

    pub fn value_at(&self, index: usize) -> &Rational {
        &self.values[index]
    }
}
