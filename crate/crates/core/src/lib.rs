//! Two-sample tests for equality of generalized Lorenz curves based on
//! jackknife empirical likelihood (JEL) and its adjusted variant (AJEL).
//!
//! The pipeline for one ordinate `t` is:
//!
//! 1. [`jackknife::truncate`] each sample at its empirical `t`-quantile,
//! 2. build the jackknife pseudo-values of the two-sample U-statistic
//!    ([`jackknife::pseudo_values`]); in the default
//!    [`QuantileMode::Adjusted`] they also absorb the sampling error of the
//!    estimated thresholds ([`jackknife::quantile_correction`]),
//! 3. profile the empirical likelihood of the pseudo-values under a zero
//!    mean constraint ([`el::jel_statistic`], [`el::ajel_statistic`]),
//! 4. calibrate against χ²₁ ([`el::chi2_1_p_value`]).
//!
//! [`el::run_test`] chains these steps. [`montecarlo`] replicates the test
//! over synthetic samples drawn from [`distributions`].

pub mod curves;
pub mod distributions;
pub mod el;
pub mod error;
pub mod ingest;
pub mod jackknife;
pub mod montecarlo;

pub use curves::{Sample, TGrid};
pub use el::{Method, TestResult};
pub use error::{Error, Result};
pub use jackknife::{PseudoValueSet, QuantileMode, TwoSamples};
