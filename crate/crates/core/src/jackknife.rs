//! Two-sample kernel, U-statistic of degree (1,1), and jackknife
//! pseudo-values on the merged sample `Z = (X_1..X_n1, Y_1..Y_n2)`.
//!
//! The kernel `h(x, y) = x I(x <= psi_x) - y I(y <= psi_y)` is separable, so
//! the U-statistic is a difference of truncated means and every
//! leave-one-out statistic is available from the two truncated sums. The
//! truncation thresholds are computed once on the full samples and held
//! fixed across deletions.

use serde::{Deserialize, Serialize};

use crate::curves::{empirical_quantile, ordered_sum, Sample};
use crate::error::{check_t, Error, Result};

/// How the truncation thresholds `psi_t` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileMode {
    /// Per-sample thresholds, with pseudo-values corrected for the
    /// sampling variability of the estimated quantiles.
    #[default]
    Adjusted,
    /// Each group is truncated at its own empirical quantile; thresholds
    /// are treated as known.
    PerSample,
    /// Both groups are truncated at the quantile of the pooled sample.
    Pooled,
}

impl QuantileMode {
    pub const ALL: [QuantileMode; 3] = [QuantileMode::Adjusted, QuantileMode::PerSample, QuantileMode::Pooled];

    pub fn as_str(self) -> &'static str {
        match self {
            QuantileMode::Adjusted => "adjusted",
            QuantileMode::PerSample => "per-sample",
            QuantileMode::Pooled => "pooled",
        }
    }
}

impl std::fmt::Display for QuantileMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for QuantileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown quantile mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSamples {
    x: Sample,
    y: Sample,
}

impl TwoSamples {
    pub fn new(x: Sample, y: Sample) -> Result<Self> {
        if x.len() < 2 || y.len() < 2 {
            return Err(Error::JackknifeUndefined {
                n1: x.len(),
                n2: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Sample {
        &self.x
    }

    pub fn y(&self) -> &Sample {
        &self.y
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }
}

/// Truncated observations `x_i I(x_i <= psi_x)` and `y_j I(y_j <= psi_y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPair {
    pub x_trunc: Vec<f64>,
    pub y_trunc: Vec<f64>,
    pub psi_x: f64,
    pub psi_y: f64,
    pub t: f64,
}

impl TruncatedPair {
    pub fn sizes(&self) -> (usize, usize) {
        (self.x_trunc.len(), self.y_trunc.len())
    }
}

#[inline]
pub fn kernel(x_val: f64, y_val: f64, psi_x: f64, psi_y: f64) -> f64 {
    truncated(x_val, psi_x) - truncated(y_val, psi_y)
}

#[inline]
fn truncated(v: f64, psi: f64) -> f64 {
    if v <= psi {
        v
    } else {
        0.0
    }
}

pub fn truncate(s: &TwoSamples, t: f64, mode: QuantileMode) -> Result<TruncatedPair> {
    check_t(t)?;
    let (psi_x, psi_y) = match mode {
        QuantileMode::Adjusted | QuantileMode::PerSample => {
            (empirical_quantile(&s.x, t)?, empirical_quantile(&s.y, t)?)
        }
        QuantileMode::Pooled => {
            let psi = empirical_quantile(&s.x.pooled(&s.y), t)?;
            (psi, psi)
        }
    };
    truncate_at(s, t, psi_x, psi_y)
}

/// Truncation at caller-supplied thresholds (e.g. population quantiles).
pub fn truncate_at(s: &TwoSamples, t: f64, psi_x: f64, psi_y: f64) -> Result<TruncatedPair> {
    check_t(t)?;
    Ok(TruncatedPair {
        x_trunc: s.x.values().iter().map(|&v| truncated(v, psi_x)).collect(),
        y_trunc: s.y.values().iter().map(|&v| truncated(v, psi_y)).collect(),
        psi_x,
        psi_y,
        t,
    })
}

fn mean(v: &[f64]) -> f64 {
    ordered_sum(v) / v.len() as f64
}

/// `(1/(n1 n2)) sum_i sum_j h(X_i, Y_j)`, i.e. the difference of truncated means.
pub fn u_statistic(tp: &TruncatedPair) -> f64 {
    mean(&tp.x_trunc) - mean(&tp.y_trunc)
}

/// Jackknife pseudo-values `V_k = n U - (n-1) U^{-k}` for `k = 1..n1+n2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoValueSet {
    pub values: Vec<f64>,
    pub u_stat: f64,
    pub n1: usize,
    pub n2: usize,
    pub t: f64,
}

impl PseudoValueSet {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

pub fn pseudo_values(tp: &TruncatedPair) -> Result<PseudoValueSet> {
    let (n1, n2) = tp.sizes();
    if n1 < 2 || n2 < 2 {
        return Err(Error::JackknifeUndefined { n1, n2 });
    }
    let sx = ordered_sum(&tp.x_trunc);
    let sy = ordered_sum(&tp.y_trunc);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let (mx, my) = (sx / n1f, sy / n2f);
    let u = mx - my;
    let nu = n * u;

    // (S - v)/(m-1) written as m_bar - (v - m_bar)/(m-1)
    let mut values = Vec::with_capacity(n1 + n2);
    values.extend(tp.x_trunc.iter().map(|&xk| {
        let u_minus = (mx - (xk - mx) / (n1f - 1.0)) - my;
        nu - (n - 1.0) * u_minus
    }));
    values.extend(tp.y_trunc.iter().map(|&yk| {
        let u_minus = mx - (my - (yk - my) / (n2f - 1.0));
        nu - (n - 1.0) * u_minus
    }));

    Ok(PseudoValueSet {
        values,
        u_stat: u,
        n1,
        n2,
        t: tp.t,
    })
}

/// Adds the linearization term of the estimated thresholds to `pv`.
///
/// Each `V_k` from group X gains `-(n-1)/(n1-1) psi_x (I(x_k <= psi_x) - p_x)`
/// with `p_x` the fraction of X at or below `psi_x` (and symmetrically, with
/// the opposite sign, for Y). The terms sum to zero within each group, so
/// the pseudo-value mean is unchanged.
pub fn quantile_correction(s: &TwoSamples, tp: &TruncatedPair, pv: &mut PseudoValueSet) {
    let n = pv.n() as f64;
    let shift = |vals: &[f64], psi: f64, sign: f64, out: &mut [f64]| {
        let m = vals.len() as f64;
        let below = vals.iter().filter(|&&v| v <= psi).count() as f64;
        let p = below / m;
        let scale = sign * (n - 1.0) / (m - 1.0) * psi;
        for (o, &v) in out.iter_mut().zip(vals) {
            let ind = if v <= psi { 1.0 } else { 0.0 };
            *o -= scale * (ind - p);
        }
    };
    let (xs, ys) = pv.values.split_at_mut(pv.n1);
    shift(s.x.values(), tp.psi_x, 1.0, xs);
    shift(s.y.values(), tp.psi_y, -1.0, ys);
}

/// Truncation, pseudo-values and (for [`QuantileMode::Adjusted`]) the
/// threshold correction in one step.
pub fn pseudo_values_for(s: &TwoSamples, t: f64, mode: QuantileMode) -> Result<PseudoValueSet> {
    let tp = truncate(s, t, mode)?;
    let mut pv = pseudo_values(&tp)?;
    if mode == QuantileMode::Adjusted {
        quantile_correction(s, &tp, &mut pv);
    }
    Ok(pv)
}

/// Expected pseudo-value `E V_k` when the kernel mean is `theta`.
///
/// `k` is 1-based over the merged sample. Zero whenever `theta == 0`.
pub fn expected_pseudo_value(theta: f64, n1: usize, n2: usize, k: usize) -> f64 {
    let n = (n1 + n2) as f64;
    let factor = if k <= n1 {
        (n2 as f64 - 1.0) / n1 as f64
    } else {
        (n1 as f64 - 1.0) / n2 as f64
    };
    n * theta / (n - 2.0) * factor
}
