//! Chi-square, exponential and half-normal families: seeded samplers,
//! population quantiles and closed-form generalized Lorenz curves.
//!
//! Closed forms of `eta(t) = int_0^{psi_t} x dF(x)`:
//!
//! * exponential with mean `mu`: `mu (t + (1 - t) ln(1 - t))`
//! * half-normal with scale `sigma`: `sigma sqrt(2/pi) (1 - exp(-q^2/2))`,
//!   `q = Phi^{-1}((1 + t)/2)`
//! * chi-square with `k` degrees of freedom: `k F_{k+2}(F_k^{-1}(t))`,
//!   from `x f_k(x) = k f_{k+2}(x)`

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf_inv;
use statrs::function::gamma::gamma_lr;

use crate::curves::Sample;
use crate::error::{check_t, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ChiSquare,
    Exponential,
    HalfNormal,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::ChiSquare => "chi-square",
            Family::Exponential => "exponential",
            Family::HalfNormal => "half-normal",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "chi-square" | "chisquare" | "chi-squared" | "chisq" | "chi2" => Ok(Family::ChiSquare),
            "exponential" | "exp" => Ok(Family::Exponential),
            "half-normal" | "halfnormal" | "hn" => Ok(Family::HalfNormal),
            other => Err(Error::InvalidDistribution(format!("unknown family {other:?}"))),
        }
    }
}

/// How the number after `exponential:` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpParam {
    #[default]
    Mean,
    Rate,
}

/// A distribution family with its single positive parameter: degrees of
/// freedom (chi-square), mean (exponential) or scale `sigma` (half-normal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistSpec {
    pub family: Family,
    pub param: f64,
}

impl DistSpec {
    pub fn new(family: Family, param: f64) -> Result<Self> {
        if !(param > 0.0 && param.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "{} parameter must be positive and finite, got {param}",
                family.as_str()
            )));
        }
        Ok(Self { family, param })
    }

    pub fn chi_square(df: f64) -> Result<Self> {
        Self::new(Family::ChiSquare, df)
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::new(Family::Exponential, mean)
    }

    pub fn exponential_rate(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential, 1.0 / rate)
    }

    pub fn half_normal(sigma: f64) -> Result<Self> {
        Self::new(Family::HalfNormal, sigma)
    }

    /// Parses `family:param`, reading an exponential parameter per `exp`.
    pub fn parse_with(s: &str, exp: ExpParam) -> Result<Self> {
        let (family, param) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidDistribution(format!("expected FAMILY:PARAM, got {s:?}")))?;
        let family: Family = family.parse()?;
        let param: f64 = param
            .trim()
            .parse()
            .map_err(|_| Error::InvalidDistribution(format!("bad parameter in {s:?}")))?;
        match (family, exp) {
            (Family::Exponential, ExpParam::Rate) => {
                if param.is_nan() || param <= 0.0 {
                    return Err(Error::InvalidDistribution(format!("bad rate in {s:?}")));
                }
                Self::exponential_rate(param)
            }
            _ => Self::new(family, param),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::ChiSquare => self.param,
            Family::Exponential => self.param,
            Family::HalfNormal => self.param * std::f64::consts::FRAC_2_PI.sqrt(),
        }
    }

    /// Population quantile `F^{-1}(t)`; `+inf` at `t = 1`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(match self.family {
            Family::ChiSquare => 2.0 * gamma_lower_inverse(self.param / 2.0, t),
            Family::Exponential => {
                if t == 1.0 {
                    f64::INFINITY
                } else {
                    -self.param * (-t).ln_1p()
                }
            }
            Family::HalfNormal => self.param * std::f64::consts::SQRT_2 * erf_inv(t),
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self.family {
            Family::ChiSquare => {
                let d = Gamma::new(self.param / 2.0, 2.0).expect("validated parameter");
                d.sample_iter(rng).take(n).collect()
            }
            Family::Exponential => {
                let d = Exp::new(1.0 / self.param).expect("validated parameter");
                d.sample_iter(rng).take(n).collect()
            }
            Family::HalfNormal => {
                let d = Normal::new(0.0, self.param).expect("validated parameter");
                d.sample_iter(rng).take(n).map(f64::abs).collect()
            }
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family.as_str(), self.param)
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, ExpParam::Mean)
    }
}

/// `x` with `P(a, x) = p`, by bisection on the regularized lower gamma.
fn gamma_lower_inverse(a: f64, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut hi = a.max(1.0);
    while gamma_lr(a, hi) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if gamma_lr(a, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Closed-form generalized Lorenz ordinate of the population.
pub fn analytic_gl(spec: &DistSpec, t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(spec.mean());
    }
    Ok(match spec.family {
        Family::Exponential => spec.param * (t + (1.0 - t) * (-t).ln_1p()),
        Family::HalfNormal => {
            let q = std::f64::consts::SQRT_2 * erf_inv(t);
            spec.mean() * -(-0.5 * q * q).exp_m1()
        }
        Family::ChiSquare => {
            let k = spec.param;
            let psi = 2.0 * gamma_lower_inverse(k / 2.0, t);
            k * gamma_lr(k / 2.0 + 1.0, psi / 2.0)
        }
    })
}

/// Identifies an independent, reproducible random stream: the same
/// `(seed, stream_id)` always yields the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

pub fn sample(spec: &DistSpec, n: usize, stream: SeededStream) -> Result<Sample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Sample::new(spec.draw(n, &mut stream.rng()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let e: DistSpec = "exponential:4".parse().unwrap();
        assert_eq!(e, DistSpec::exponential(4.0).unwrap());
        let r = DistSpec::parse_with("exp:4", ExpParam::Rate).unwrap();
        assert_eq!(r.param, 0.25);
        assert_eq!("chisq:5.5".parse::<DistSpec>().unwrap().family, Family::ChiSquare);
        assert_eq!("HN:1.5".parse::<DistSpec>().unwrap().family, Family::HalfNormal);
        assert!("exponential:-1".parse::<DistSpec>().is_err());
        assert!("pareto:2".parse::<DistSpec>().is_err());
        assert!("exponential".parse::<DistSpec>().is_err());
        let shown = DistSpec::chi_square(5.5).unwrap().to_string();
        assert_eq!(shown, "chi-square:5.5");
        assert_eq!(shown.parse::<DistSpec>().unwrap(), DistSpec::chi_square(5.5).unwrap());
    }

    #[test]
    fn exponential_half_median() {
        let e1 = DistSpec::exponential(1.0).unwrap();
        let expected = 0.5 + 0.5 * 0.5f64.ln();
        assert!((analytic_gl(&e1, 0.5).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.153_426).abs() < 1e-6);
    }

    #[test]
    fn endpoints() {
        for spec in [
            DistSpec::chi_square(4.0).unwrap(),
            DistSpec::exponential(2.0).unwrap(),
            DistSpec::half_normal(1.5).unwrap(),
        ] {
            assert_eq!(analytic_gl(&spec, 0.0).unwrap(), 0.0);
            assert_eq!(analytic_gl(&spec, 1.0).unwrap(), spec.mean());
            // approaching 1 from below
            assert!((analytic_gl(&spec, 1.0 - 1e-12).unwrap() - spec.mean()).abs() < 1e-6);
            assert_eq!(spec.quantile(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn quantiles_invert_known_cdfs() {
        let chi = DistSpec::chi_square(2.0).unwrap();
        // chi-square with 2 df is exponential with mean 2
        for t in [1e-8f64, 0.1, 0.5, 0.9, 1.0 - 1e-8] {
            let exact = -2.0 * (-t).ln_1p();
            assert!((chi.quantile(t).unwrap() - exact).abs() < 1e-9 * exact.max(1.0));
        }
        let hn = DistSpec::half_normal(1.0).unwrap();
        // P(|Z| <= 1.959963984540054) = 0.95
        assert!((hn.quantile(0.95).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn gl_is_monotone_and_convex() {
        for spec in [
            DistSpec::chi_square(5.5).unwrap(),
            DistSpec::exponential(4.0).unwrap(),
            DistSpec::half_normal(1.0).unwrap(),
        ] {
            let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
            let eta: Vec<f64> = grid.iter().map(|&t| analytic_gl(&spec, t).unwrap()).collect();
            for w in eta.windows(2) {
                assert!(w[1] >= w[0]);
            }
            for w in eta.windows(3) {
                assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12, "{spec}");
            }
        }
    }

    #[test]
    fn larger_exponential_mean_dominates() {
        let (e4, e2) = (DistSpec::exponential(4.0).unwrap(), DistSpec::exponential(2.0).unwrap());
        let mut last = 0.0;
        for i in 1..=100 {
            let t = i as f64 / 100.0;
            let d = analytic_gl(&e4, t).unwrap() - analytic_gl(&e2, t).unwrap();
            assert!(d > 0.0);
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let spec = DistSpec::half_normal(1.0).unwrap();
        let a = sample(&spec, 50, SeededStream::new(9, 3)).unwrap();
        let b = sample(&spec, 50, SeededStream::new(9, 3)).unwrap();
        let c = sample(&spec, 50, SeededStream::new(9, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample(&spec, 0, SeededStream::new(9, 3)).is_err());
    }

    #[test]
    fn sample_means() {
        let stream = SeededStream::new(2024, 0);
        let n = 100_000;
        let e = sample(&DistSpec::exponential(4.0).unwrap(), n, stream).unwrap();
        assert!((e.mean() - 4.0).abs() < 0.1);
        let c = sample(&DistSpec::chi_square(4.0).unwrap(), n, stream).unwrap();
        assert!((c.mean() - 4.0).abs() < 0.1);
        let h = sample(&DistSpec::half_normal(1.0).unwrap(), n, stream).unwrap();
        assert!((h.mean() - 0.797_885).abs() < 0.01);
        assert!(h.values().iter().all(|&v| v >= 0.0));
    }
}
