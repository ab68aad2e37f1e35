//! Replicated Type I error / power simulations.
//!
//! Replication `r` draws `x` (size `n1`) and then `y` (size `n2`) from the
//! stream `(seed, r)`, so every replication is reproducible on its own and
//! the table does not depend on how replications are spread over threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{Sample, TGrid};
use crate::distributions::{DistSpec, SeededStream};
use crate::el::{check_alpha, chi2_1_p_value, statistic, Method};
use crate::error::{Error, Result};
use crate::jackknife::{pseudo_values, pseudo_values_for, truncate_at, QuantileMode, TwoSamples};

pub const DEFAULT_REPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimQuantileMode {
    #[default]
    Adjusted,
    PerSample,
    Pooled,
    /// Truncate at the generating distributions' population quantiles.
    TrueQuantile,
}

impl FromStr for SimQuantileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjusted" => Ok(Self::Adjusted),
            "per-sample" => Ok(Self::PerSample),
            "pooled" => Ok(Self::Pooled),
            "true-quantile" => Ok(Self::TrueQuantile),
            other => Err(Error::InvalidConfig(format!("unknown quantile mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dist_x: DistSpec,
    pub dist_y: DistSpec,
    pub n1: usize,
    pub n2: usize,
    pub t_grid: TGrid,
    pub reps: usize,
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub quantile_mode: SimQuantileMode,
}

impl SimConfig {
    /// Both methods at the decile grid, `alpha = 0.05`, adjusted per-sample quantiles.
    pub fn new(dist_x: DistSpec, dist_y: DistSpec, n1: usize, n2: usize, reps: usize, seed: u64) -> Self {
        Self {
            dist_x,
            dist_y,
            n1,
            n2,
            t_grid: TGrid::deciles(),
            reps,
            alpha: 0.05,
            methods: Method::ALL.to_vec(),
            seed,
            quantile_mode: SimQuantileMode::Adjusted,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::JackknifeUndefined {
                n1: self.n1,
                n2: self.n2,
            });
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        check_alpha(self.alpha)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub method: Method,
    pub t: f64,
    pub n1: usize,
    pub n2: usize,
    pub rate: f64,
    pub se: f64,
    pub hull_fail_rate: f64,
    pub rejections: usize,
    pub hull_failures: usize,
    /// Replications whose solver did not converge or errored.
    pub failures: usize,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTable {
    pub configs: Vec<SimConfig>,
    pub rows: Vec<SimRow>,
}

impl SimTable {
    pub fn row(&self, method: Method, t: f64, n1: usize, n2: usize) -> Option<&SimRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.t == t && r.n1 == n1 && r.n2 == n2)
    }

    pub const CSV_HEADER: &'static str = "method,t,n1,n2,rate,se,hull_fail_rate";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method, r.t, r.n1, r.n2, r.rate, r.se, r.hull_fail_rate
            )?;
        }
        Ok(())
    }
}

pub fn standard_error(rate: f64, reps: usize) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    reject: bool,
    hull_fail: bool,
    failed: bool,
}

fn replicate(cfg: &SimConfig, r: usize) -> Vec<Outcome> {
    let cells = cfg.t_grid.len() * cfg.methods.len();
    let mut rng = SeededStream::new(cfg.seed, r as u64).rng();
    let x = cfg.dist_x.draw(cfg.n1, &mut rng);
    let y = cfg.dist_y.draw(cfg.n2, &mut rng);
    let samples = match Sample::new(x)
        .and_then(|x| Sample::new(y).map(|y| (x, y)))
        .and_then(|(x, y)| TwoSamples::new(x, y))
    {
        Ok(s) => s,
        Err(_) => {
            return vec![
                Outcome {
                    failed: true,
                    ..Outcome::default()
                };
                cells
            ]
        }
    };

    let mut out = Vec::with_capacity(cells);
    for &t in cfg.t_grid.points() {
        let pv = match cfg.quantile_mode {
            SimQuantileMode::Adjusted => pseudo_values_for(&samples, t, QuantileMode::Adjusted),
            SimQuantileMode::PerSample => pseudo_values_for(&samples, t, QuantileMode::PerSample),
            SimQuantileMode::Pooled => pseudo_values_for(&samples, t, QuantileMode::Pooled),
            SimQuantileMode::TrueQuantile => cfg
                .dist_x
                .quantile(t)
                .and_then(|qx| cfg.dist_y.quantile(t).map(|qy| (qx, qy)))
                .and_then(|(qx, qy)| truncate_at(&samples, t, qx, qy))
                .and_then(|tp| pseudo_values(&tp)),
        };
        for &method in &cfg.methods {
            let outcome = pv
                .as_ref()
                .ok()
                .and_then(|pv| statistic(pv, method).ok())
                .and_then(|s| chi2_1_p_value(s.value).ok().map(|p| (s, p)));
            out.push(match outcome {
                Some((s, p)) => Outcome {
                    reject: p < cfg.alpha,
                    hull_fail: !s.hull_ok,
                    failed: !s.converged,
                },
                None => Outcome {
                    failed: true,
                    ..Outcome::default()
                },
            });
        }
    }
    out
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

fn simulate_rows(cfg: &SimConfig) -> Vec<SimRow> {
    let outcomes: Vec<Vec<Outcome>> = (0..cfg.reps).into_par_iter().map(|r| replicate(cfg, r)).collect();

    let mut rows = Vec::new();
    for (ti, &t) in cfg.t_grid.points().iter().enumerate() {
        for (mi, &method) in cfg.methods.iter().enumerate() {
            let cell = ti * cfg.methods.len() + mi;
            let (mut rejections, mut hull_failures, mut failures) = (0, 0, 0);
            for o in outcomes.iter().map(|rep| rep[cell]) {
                rejections += o.reject as usize;
                hull_failures += o.hull_fail as usize;
                failures += o.failed as usize;
            }
            let rate = rejections as f64 / cfg.reps as f64;
            rows.push(SimRow {
                method,
                t,
                n1: cfg.n1,
                n2: cfg.n2,
                rate,
                se: standard_error(rate, cfg.reps),
                hull_fail_rate: hull_failures as f64 / cfg.reps as f64,
                rejections,
                hull_failures,
                failures,
                reps: cfg.reps,
            });
        }
    }
    rows
}

/// Runs every replication of `cfg` on `workers` threads (0 = one per core).
pub fn run_simulation(cfg: &SimConfig, workers: usize) -> Result<SimTable> {
    run_many(std::slice::from_ref(cfg), workers)
}

/// Runs several configurations and concatenates their rows in order.
pub fn run_many(configs: &[SimConfig], workers: usize) -> Result<SimTable> {
    for cfg in configs {
        cfg.validate()?;
    }
    let pool = thread_pool(workers)?;
    let rows = pool.install(|| configs.iter().flat_map(simulate_rows).collect());
    Ok(SimTable {
        configs: configs.to_vec(),
        rows,
    })
}

/// The six simulation designs: three null tables and three power tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DesignTable {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl DesignTable {
    pub const ALL: [DesignTable; 6] = [Self::T1, Self::T2, Self::T3, Self::T4, Self::T5, Self::T6];
    pub const SIZES: [(usize, usize); 4] = [(20, 30), (40, 50), (75, 75), (100, 100)];

    pub fn distributions(self) -> (DistSpec, DistSpec) {
        let chi = |k| DistSpec::chi_square(k).unwrap();
        let exp = |m| DistSpec::exponential(m).unwrap();
        let hn = |s| DistSpec::half_normal(s).unwrap();
        match self {
            Self::T1 => (chi(4.0), chi(4.0)),
            Self::T2 => (exp(4.0), exp(4.0)),
            Self::T3 => (hn(1.0), hn(1.0)),
            Self::T4 => (chi(4.0), chi(5.5)),
            Self::T5 => (exp(4.0), exp(2.0)),
            Self::T6 => (hn(1.0), hn(1.5)),
        }
    }

    pub fn is_null(self) -> bool {
        matches!(self, Self::T1 | Self::T2 | Self::T3)
    }

    pub fn configs(self, reps: usize, seed: u64) -> Vec<SimConfig> {
        let (dx, dy) = self.distributions();
        Self::SIZES
            .iter()
            .map(|&(n1, n2)| SimConfig::new(dx, dy, n1, n2, reps, seed))
            .collect()
    }
}

impl fmt::Display for DesignTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for DesignTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown table {s:?}; expected T1..T6")))
    }
}

pub fn table_suite(table: DesignTable, reps: usize, seed: u64, workers: usize) -> Result<SimTable> {
    run_many(&table.configs(reps, seed), workers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(reps: usize) -> SimConfig {
        let e = DistSpec::exponential(1.0).unwrap();
        let mut cfg = SimConfig::new(e, e, 15, 20, reps, 11);
        cfg.t_grid = TGrid::new(vec![0.3, 0.7]).unwrap();
        cfg
    }

    #[test]
    fn standard_error_values() {
        assert!((standard_error(0.027, 1000) - 0.005_125_7).abs() < 1e-6);
        assert_eq!(standard_error(0.0, 37), 0.0);
        assert_eq!(standard_error(0.5, 100), 0.05);
    }

    #[test]
    fn single_replication() {
        let table = run_simulation(&small(1), 1).unwrap();
        for r in &table.rows {
            assert!(r.rate == 0.0 || r.rate == 1.0);
            assert_eq!(r.se, 0.0);
        }
    }

    #[test]
    fn rows_are_consistent() {
        let table = run_simulation(&small(40), 2).unwrap();
        assert_eq!(table.rows.len(), 4);
        for r in &table.rows {
            assert!((0.0..=1.0).contains(&r.rate));
            assert_eq!(r.se, standard_error(r.rate, 40));
            assert_eq!(r.rate, r.rejections as f64 / 40.0);
            assert!(r.hull_failures <= r.rejections);
        }
    }

    #[test]
    fn independent_of_worker_count() {
        let cfg = small(30);
        let a = run_simulation(&cfg, 1).unwrap();
        let b = run_simulation(&cfg, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation() {
        let mut cfg = small(0);
        assert!(run_simulation(&cfg, 1).is_err());
        cfg.reps = 5;
        cfg.n1 = 1;
        assert!(run_simulation(&cfg, 1).is_err());
        cfg.n1 = 5;
        cfg.alpha = 0.0;
        assert!(run_simulation(&cfg, 1).is_err());
    }

    #[test]
    fn table_shapes() {
        let t = table_suite(DesignTable::T4, 3, 1, 0).unwrap();
        assert_eq!(t.rows.len(), 4 * 9 * 2);
        assert_eq!(t.configs.len(), 4);
        assert_eq!("t5".parse::<DesignTable>().unwrap(), DesignTable::T5);
        assert!("T7".parse::<DesignTable>().is_err());
        assert!(DesignTable::T2.is_null() && !DesignTable::T5.is_null());
    }

    #[test]
    fn true_quantile_mode_runs() {
        let mut cfg = small(20);
        cfg.quantile_mode = SimQuantileMode::TrueQuantile;
        let t = run_simulation(&cfg, 1).unwrap();
        assert!(t.rows.iter().all(|r| r.failures == 0));
    }

    #[test]
    fn csv_layout() {
        let t = run_simulation(&small(5), 1).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SimTable::CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("JEL,0.3,15,20,"));
    }
}
