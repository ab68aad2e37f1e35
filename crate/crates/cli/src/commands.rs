use serde::{Deserialize, Serialize};
use serde_json::json;

use lorenz_jel::curves::curve_table;
use lorenz_jel::distributions::{analytic_gl, DistSpec, SeededStream};
use lorenz_jel::el::{run_test, TestResult};
use lorenz_jel::ingest::{load_sample, subsample, IngestSpec, Loaded};
use lorenz_jel::montecarlo::{run_many, SimConfig, SimRow, SimTable};
use lorenz_jel::{Sample, TGrid, TwoSamples};

use crate::args::{CurveArgs, ReadArgs, SimulateArgs, TList, TestArgs};
use crate::output::{emit, Provenance, Tabular};
use crate::CliError;

fn grid(list: &TList) -> Result<TGrid, CliError> {
    TGrid::new(list.0.clone()).map_err(|e| CliError::Usage(e.to_string()))
}

fn ingest_spec(path: &std::path::Path, read: &ReadArgs) -> IngestSpec {
    let mut spec = IngestSpec::new(path);
    spec.column = read.column.as_str().into();
    spec.delimiter = read.delimiter as u8;
    spec.has_header = !read.no_header;
    spec.min_value = read.min_value;
    spec.log_transform = read.log_transform;
    spec
}

fn load(path: &std::path::Path, read: &ReadArgs) -> Result<Loaded, CliError> {
    let loaded = load_sample(&ingest_spec(path, read))?;
    if loaded.dropped() > 0 {
        eprintln!(
            "lorenz-jel: warning: {}: dropped {} of {} rows ({} non-numeric, {} below --min-value)",
            path.display(),
            loaded.dropped(),
            loaded.total_rows,
            loaded.non_numeric,
            loaded.below_min
        );
    }
    Ok(loaded)
}

fn input_echo(path: &std::path::Path, loaded: &Loaded, used: usize) -> serde_json::Value {
    json!({
        "path": path.display().to_string(),
        "total_rows": loaded.total_rows,
        "non_numeric": loaded.non_numeric,
        "below_min": loaded.below_min,
        "used": used,
    })
}

fn read_echo(read: &ReadArgs) -> serde_json::Value {
    json!({
        "column": read.column,
        "delimiter": read.delimiter.to_string(),
        "has_header": !read.no_header,
        "min_value": read.min_value,
        "log_transform": read.log_transform,
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Rows of `test` output, one per `(t, method)`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestRows(pub Vec<TestResult>);

impl Tabular for TestRows {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "method",
            "t",
            "statistic",
            "p_value",
            "reject",
            "alpha",
            "n1",
            "n2",
            "u_stat",
            "hull_ok",
            "degenerate",
            "converged",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|r| {
                vec![
                    r.method.to_string(),
                    fmt_f64(r.t),
                    fmt_f64(r.statistic),
                    fmt_f64(r.p_value),
                    r.reject.to_string(),
                    fmt_f64(r.alpha),
                    r.n1.to_string(),
                    r.n2.to_string(),
                    fmt_f64(r.u_stat),
                    r.hull_ok.to_string(),
                    r.degenerate.to_string(),
                    r.converged.to_string(),
                ]
            })
            .collect()
    }
}

pub fn test(a: TestArgs) -> Result<(), CliError> {
    let lx = load(&a.x, &a.read)?;
    let ly = load(&a.y, &a.read)?;
    let pick = |s: &Sample, stream: u64| -> Result<Sample, CliError> {
        Ok(match a.subsample {
            Some(n) => subsample(s, n, SeededStream::new(a.seed, stream))?,
            None => s.clone(),
        })
    };
    let samples = TwoSamples::new(pick(&lx.sample, 0)?, pick(&ly.sample, 1)?)?;
    let (n1, n2) = samples.sizes();

    let mut results = Vec::new();
    for &t in &a.t.0 {
        for method in a.method.methods() {
            results.push(run_test(&samples, t, method, a.alpha, a.quantile_mode)?);
        }
    }

    let provenance = Provenance::new(
        "test",
        a.seed,
        json!({
            "x": input_echo(&a.x, &lx, n1),
            "y": input_echo(&a.y, &ly, n2),
            "read": read_echo(&a.read),
            "t": a.t.0,
            "methods": a.method.methods(),
            "alpha": a.alpha,
            "quantile_mode": a.quantile_mode,
            "subsample": a.subsample,
        }),
    );
    emit(a.format, &provenance, &TestRows(results), a.output.as_deref())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: f64,
    pub lorenz: f64,
    pub gl: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analytic_gl: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveRows(pub Vec<CurveRow>);

impl Tabular for CurveRows {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["t", "lorenz", "gl"];
        if self.0.first().is_some_and(|r| r.analytic_gl.is_some()) {
            h.push("analytic_gl");
        }
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|r| {
                let mut row = vec![fmt_f64(r.t), fmt_f64(r.lorenz), fmt_f64(r.gl)];
                row.extend(r.analytic_gl.map(fmt_f64));
                row
            })
            .collect()
    }
}

pub fn curve(a: CurveArgs) -> Result<(), CliError> {
    let analytic = a
        .analytic
        .as_deref()
        .map(|s| DistSpec::parse_with(s, a.exp_param.into()))
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let g = grid(&a.grid)?;
    let loaded = load(&a.input, &a.read)?;
    let rows = curve_table(&loaded.sample, &g)?
        .into_iter()
        .map(|p| {
            Ok(CurveRow {
                t: p.t,
                lorenz: p.lorenz,
                gl: p.gl,
                analytic_gl: analytic.as_ref().map(|d| analytic_gl(d, p.t)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>, lorenz_jel::Error>>()?;

    let provenance = Provenance::new(
        "curve",
        0,
        json!({
            "input": input_echo(&a.input, &loaded, loaded.sample.len()),
            "read": read_echo(&a.read),
            "grid": g,
            "analytic": analytic.map(|d| d.to_string()),
        }),
    );
    emit(a.format, &provenance, &CurveRows(rows), a.output.as_deref())
}

impl Tabular for SimTable {
    fn header(&self) -> Vec<&'static str> {
        SimTable::CSV_HEADER.split(',').collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r: &SimRow| {
                vec![
                    r.method.to_string(),
                    fmt_f64(r.t),
                    r.n1.to_string(),
                    r.n2.to_string(),
                    fmt_f64(r.rate),
                    fmt_f64(r.se),
                    fmt_f64(r.hull_fail_rate),
                ]
            })
            .collect()
    }
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let reps = usize::try_from(a.reps).map_err(|_| CliError::Usage("--reps is too large".into()))?;
    let t_grid = grid(&a.t)?;
    let parse = |s: &str| DistSpec::parse_with(s, a.exp_param.into()).map_err(|e| CliError::Usage(e.to_string()));

    let mut configs = match (a.table, &a.dist_x, &a.dist_y, a.n1, a.n2) {
        (Some(table), ..) => table.configs(reps, a.seed),
        (None, Some(dx), Some(dy), Some(n1), Some(n2)) => {
            vec![SimConfig::new(parse(dx)?, parse(dy)?, n1, n2, reps, a.seed)]
        }
        _ => {
            return Err(CliError::Usage(
                "give --table or all of --dist-x, --dist-y, --n1, --n2".into(),
            ))
        }
    };
    for cfg in &mut configs {
        cfg.t_grid = t_grid.clone();
        cfg.alpha = a.alpha;
        cfg.methods = a.methods.methods();
        cfg.quantile_mode = a.quantile_mode;
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let table = run_many(&configs, a.workers)?;
    let provenance = Provenance::new(
        "simulate",
        a.seed,
        json!({
            "table": a.table.map(|t| t.to_string()),
            "designs": configs.iter().map(|c| json!({
                "dist_x": c.dist_x.to_string(),
                "dist_y": c.dist_y.to_string(),
                "n1": c.n1,
                "n2": c.n2,
            })).collect::<Vec<_>>(),
            "t": t_grid,
            "reps": reps,
            "alpha": a.alpha,
            "methods": a.methods.methods(),
            "quantile_mode": a.quantile_mode,
        }),
    );
    emit(a.format, &provenance, &table, a.output.as_deref())
}
