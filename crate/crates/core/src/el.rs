//! Empirical likelihood for a zero mean of jackknife pseudo-values.
//!
//! For constraint values `g_1..g_m` the profile log-likelihood ratio is
//! `2 sum log(1 + lambda g_k)` where `lambda` solves the dual equation
//!
//! ```text
//! (1/m) sum g_k / (1 + lambda g_k) = 0,   1 + lambda g_k > 0 for all k.
//! ```
//!
//! The left side is strictly decreasing on the open interval
//! `(-1/max g, -1/min g)`, which is nonempty exactly when zero lies inside
//! the convex hull of the `g_k`. [`solve_lambda`] runs Newton's method
//! inside a shrinking bracket and falls back to bisection whenever a
//! Newton step would leave it.
//!
//! JEL uses the pseudo-values directly. AJEL appends the point
//! `-a_n * mean(g)` with `a_n = max(1, ln(n)/2)`, which always puts zero in
//! the hull.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::curves::Sample;
use crate::error::{check_t, Error, Result};
use crate::jackknife::{pseudo_values_for, PseudoValueSet, QuantileMode, TwoSamples};

/// Bound on `|(1/m) sum g_k/(1 + lambda g_k)|` after rescaling `g` by `max |g_k|`.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

/// Upper 5% point of χ²₁.
pub const CHI2_1_CRIT_05: f64 = 3.841_458_820_694_128_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "JEL")]
    Jel,
    #[serde(rename = "AJEL")]
    Ajel,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Jel, Method::Ajel];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Jel => "JEL",
            Method::Ajel => "AJEL",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jel" => Ok(Method::Jel),
            "ajel" => Ok(Method::Ajel),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Solution of the empirical likelihood dual problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ElSolution {
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub log_lr: f64,
    pub converged: bool,
    /// False when zero is not interior to the convex hull of `g`.
    pub hull_ok: bool,
    /// True when every `g_k` is zero.
    pub degenerate: bool,
    pub iterations: usize,
    /// Dual residual on the rescaled problem.
    pub residual: f64,
}

impl ElSolution {
    fn hull_failure() -> Self {
        Self {
            lambda: f64::NAN,
            weights: Vec::new(),
            log_lr: f64::INFINITY,
            converged: false,
            hull_ok: false,
            degenerate: false,
            iterations: 0,
            residual: f64::NAN,
        }
    }

    fn at_zero(m: usize, degenerate: bool) -> Self {
        Self {
            lambda: 0.0,
            weights: vec![1.0 / m as f64; m],
            log_lr: 0.0,
            converged: true,
            hull_ok: true,
            degenerate,
            iterations: 0,
            residual: 0.0,
        }
    }
}

/// Mean of `h/(1 + mu h)` and its derivative in `mu`.
fn dual(h: &[f64], mu: f64) -> (f64, f64) {
    let (mut f, mut df) = (0.0, 0.0);
    for &v in h {
        let r = v / (1.0 + mu * v);
        f += r;
        df -= r * r;
    }
    let m = h.len() as f64;
    (f / m, df / m)
}

pub fn solve_lambda(g: &[f64]) -> Result<ElSolution> {
    if g.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let m = g.len();
    let scale = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(ElSolution::at_zero(m, true));
    }
    let h: Vec<f64> = g.iter().map(|v| v / scale).collect();
    // sums run over the sorted copy: permutation invariant
    let mut hs = h.clone();
    hs.sort_by(f64::total_cmp);
    let (min, max) = (hs[0], hs[m - 1]);
    if !(min < 0.0 && max > 0.0) {
        return Ok(ElSolution::hull_failure());
    }

    let (pole_lo, pole_hi) = (-1.0 / max, -1.0 / min);
    let eps = 1e-12 * (pole_hi - pole_lo);
    let (mut lo, mut hi) = (pole_lo + eps, pole_hi - eps);
    let mut mu = 0.0;
    let (mut f, mut df) = dual(&hs, mu);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && f.abs() > 1e-15 {
        iterations += 1;
        if f > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let newton = mu - f / df;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == mu {
            break;
        }
        mu = next;
        (f, df) = dual(&hs, mu);
    }

    let weights = h.iter().map(|&v| 1.0 / (m as f64 * (1.0 + mu * v))).collect();
    let log_lr = 2.0 * hs.iter().map(|&v| (mu * v).ln_1p()).sum::<f64>();
    Ok(ElSolution {
        lambda: mu / scale,
        weights,
        log_lr: log_lr.max(0.0),
        converged: f.abs() < RESIDUAL_TOL,
        hull_ok: true,
        degenerate: false,
        iterations,
        residual: f,
    })
}

/// Size of the AJEL pseudo-observation multiplier, `max(1, ln(n)/2)`.
pub fn adjustment_level(n: usize) -> f64 {
    ((n as f64).ln() / 2.0).max(1.0)
}

/// Log-likelihood-ratio statistic with the solver flags that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElStatistic {
    pub value: f64,
    pub hull_ok: bool,
    pub degenerate: bool,
    pub converged: bool,
}

impl From<&ElSolution> for ElStatistic {
    fn from(s: &ElSolution) -> Self {
        Self {
            value: s.log_lr,
            hull_ok: s.hull_ok,
            degenerate: s.degenerate,
            // a hull failure is a definite answer, not a numerical one
            converged: s.converged || !s.hull_ok,
        }
    }
}

/// JEL statistic under `theta = 0`; `+inf` when the hull condition fails.
pub fn jel_statistic(pv: &PseudoValueSet) -> Result<ElStatistic> {
    Ok((&solve_lambda(&pv.values)?).into())
}

/// AJEL statistic under `theta = 0`.
pub fn ajel_statistic(pv: &PseudoValueSet) -> Result<ElStatistic> {
    let g_bar = pv.mean();
    if g_bar == 0.0 {
        let degenerate = pv.values.iter().all(|&v| v == 0.0);
        return Ok(ElStatistic {
            value: 0.0,
            hull_ok: true,
            degenerate,
            converged: true,
        });
    }
    let mut g = Vec::with_capacity(pv.values.len() + 1);
    g.extend_from_slice(&pv.values);
    g.push(-adjustment_level(pv.values.len()) * g_bar);
    Ok((&solve_lambda(&g)?).into())
}

pub fn statistic(pv: &PseudoValueSet, method: Method) -> Result<ElStatistic> {
    match method {
        Method::Jel => jel_statistic(pv),
        Method::Ajel => ajel_statistic(pv),
    }
}

/// Upper tail of χ²₁, `Q(1/2, x/2) = erfc(sqrt(x/2))`.
pub fn chi2_1_p_value(statistic: f64) -> Result<f64> {
    if statistic.is_nan() || statistic < 0.0 {
        return Err(Error::NegativeStatistic(statistic));
    }
    if statistic.is_infinite() {
        return Ok(0.0);
    }
    if statistic == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma_ur(0.5, statistic / 2.0).clamp(0.0, 1.0))
}

/// Outcome of one test at one ordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub t: f64,
    #[serde(with = "extended_f64")]
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub hull_ok: bool,
    pub degenerate: bool,
    pub converged: bool,
    pub n1: usize,
    pub n2: usize,
    pub u_stat: f64,
    /// `t` is 0 or 1, where the χ²₁ limit is not established.
    pub outside_asymptotic: bool,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Test decision from precomputed pseudo-values.
pub fn test_pseudo_values(pv: &PseudoValueSet, method: Method, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let stat = statistic(pv, method)?;
    let p_value = chi2_1_p_value(stat.value)?;
    Ok(TestResult {
        method,
        t: pv.t,
        statistic: stat.value,
        p_value,
        reject: p_value < alpha,
        alpha,
        hull_ok: stat.hull_ok,
        degenerate: stat.degenerate,
        converged: stat.converged,
        n1: pv.n1,
        n2: pv.n2,
        u_stat: pv.u_stat,
        outside_asymptotic: pv.t == 0.0 || pv.t == 1.0,
    })
}

/// Truncate, form pseudo-values, profile the likelihood and decide.
pub fn run_test(s: &TwoSamples, t: f64, method: Method, alpha: f64, mode: QuantileMode) -> Result<TestResult> {
    check_t(t)?;
    check_alpha(alpha)?;
    let pv = pseudo_values_for(s, t, mode)?;
    test_pseudo_values(&pv, method, alpha)
}

/// Convenience wrapper over raw observation vectors.
pub fn run_test_on(
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
    method: Method,
    alpha: f64,
    mode: QuantileMode,
) -> Result<TestResult> {
    let s = TwoSamples::new(Sample::new(x)?, Sample::new(y)?)?;
    run_test(&s, t, method, alpha, mode)
}

/// JSON numbers cannot carry infinities; those are written as the strings
/// `"inf"` / `"-inf"`.
pub mod extended_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}
