//! Empirical quantiles and Lorenz / generalized Lorenz ordinates of a
//! single sample.
//!
//! Quantiles use the left-continuous inverse of the empirical CDF,
//! `inf{x : F_n(x) >= t}`, i.e. the order statistic `x_(m)` with
//! `m = ceil(n t)` clamped to `[1, n]`. No interpolation is done: the
//! truncation indicators `x <= psi_t` downstream rely on `psi_t` being an
//! observed value. At `t = 0` the clamp returns the sample minimum.

use serde::{Deserialize, Serialize};

use crate::error::{check_t, Error, Result};

/// One group's observations together with a sorted copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
    }

    /// Observations in their original order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Arithmetic mean, summed in ascending order; independent of input order.
    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    /// Concatenation of two samples (`self` first).
    pub fn pooled(&self, other: &Sample) -> Self {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::new(values).expect("concatenation of valid samples is valid")
    }

    /// Number of observations `<= threshold`.
    fn count_at_most(&self, threshold: f64) -> usize {
        self.sorted.partition_point(|&v| v <= threshold)
    }
}

/// Sum taken in ascending order; identical for any permutation of `v`.
pub(crate) fn ordered_sum(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.values
    }
}

/// Strictly increasing evaluation points in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TGrid(Vec<f64>);

impl TGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid);
        }
        for &t in &points {
            check_t(t)?;
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid);
        }
        Ok(Self(points))
    }

    /// `count` equally spaced points `1/count, 2/count, ..., 1`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGrid);
        }
        Self::new((1..=count).map(|i| i as f64 / count as f64).collect())
    }

    /// `0.1, 0.2, ..., 0.9`, the grid of the simulation tables.
    pub fn deciles() -> Self {
        Self((1..=9).map(|i| i as f64 / 10.0).collect())
    }

    /// `0.0, 0.2, ..., 1.0`, the grid used for data applications.
    pub fn application() -> Self {
        Self((0..=5).map(|i| i as f64 / 5.0).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for TGrid {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<TGrid> for Vec<f64> {
    fn from(g: TGrid) -> Self {
        g.0
    }
}

pub fn empirical_quantile(s: &Sample, t: f64) -> Result<f64> {
    check_t(t)?;
    let n = s.len();
    let m = ((n as f64) * t).ceil() as usize;
    Ok(s.sorted[m.clamp(1, n) - 1])
}

/// Plug-in generalized Lorenz ordinate `(1/n) sum x_i I(x_i <= psi_t)`.
pub fn gl_ordinate(s: &Sample, t: f64) -> Result<f64> {
    let psi = empirical_quantile(s, t)?;
    let k = s.count_at_most(psi);
    Ok(s.sorted[..k].iter().sum::<f64>() / s.len() as f64)
}

pub fn lorenz_ordinate(s: &Sample, t: f64) -> Result<f64> {
    let mean = s.mean();
    if mean <= 0.0 {
        return Err(Error::NonPositiveMean);
    }
    Ok(gl_ordinate(s, t)? / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub lorenz: f64,
    pub gl: f64,
}

pub fn curve_table(s: &Sample, grid: &TGrid) -> Result<Vec<CurvePoint>> {
    grid.points()
        .iter()
        .map(|&t| {
            Ok(CurvePoint {
                t,
                lorenz: lorenz_ordinate(s, t)?,
                gl: gl_ordinate(s, t)?,
            })
        })
        .collect()
}
