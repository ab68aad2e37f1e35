use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use lorenz_jel::distributions::ExpParam;
use lorenz_jel::el::Method;
use lorenz_jel::montecarlo::{DesignTable, SimQuantileMode};
use lorenz_jel::QuantileMode;

#[derive(Debug, Parser)]
#[command(
    name = "lorenz-jel",
    version,
    about = "Jackknife empirical likelihood tests for generalized Lorenz curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test H0: eta_X(t) = eta_Y(t) at each t for two data files.
    Test(TestArgs),
    /// Tabulate empirical Lorenz and generalized Lorenz ordinates.
    Curve(CurveArgs),
    /// Monte Carlo rejection rates for a design table or an explicit pair.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Jel,
    Ajel,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Jel => vec![Method::Jel],
            MethodChoice::Ajel => vec![Method::Ajel],
            MethodChoice::Both => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpParamArg {
    Mean,
    Rate,
}

impl From<ExpParamArg> for ExpParam {
    fn from(e: ExpParamArg) -> Self {
        match e {
            ExpParamArg::Mean => ExpParam::Mean,
            ExpParamArg::Rate => ExpParam::Rate,
        }
    }
}

/// Options describing how a column is read from a delimited file.
#[derive(Debug, Clone, Args)]
pub struct ReadArgs {
    /// Column name, or 0-based index.
    #[arg(long, default_value = "0")]
    pub column: String,
    #[arg(long, default_value_t = ',', value_parser = parse_delimiter)]
    pub delimiter: char,
    /// Treat the first row as data.
    #[arg(long)]
    pub no_header: bool,
    /// Discard rows below this value (applied before --log-transform).
    #[arg(long, allow_hyphen_values = true)]
    pub min_value: Option<f64>,
    /// Natural-log transform retained values.
    #[arg(long)]
    pub log_transform: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    /// Comma-separated t values in [0,1].
    #[arg(long = "t", value_name = "LIST", value_parser = parse_t_list, default_value = "0,0.2,0.4,0.6,0.8,1")]
    pub t: TList,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, default_value = "adjusted", value_parser = parse_quantile_mode)]
    pub quantile_mode: QuantileMode,
    /// Draw N observations without replacement from each file first.
    #[arg(long, value_name = "N")]
    pub subsample: Option<usize>,
    #[arg(long, env = "LORENZ_JEL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// An integer N for the grid 1/N, 2/N, ..., 1, or a comma-separated list.
    #[arg(long, value_name = "N|LIST", default_value = "10", value_parser = parse_grid)]
    pub grid: TList,
    /// Overlay the closed-form curve of FAMILY:PARAM.
    #[arg(long, value_name = "FAMILY:PARAM")]
    pub analytic: Option<String>,
    #[arg(long, value_enum, default_value_t = ExpParamArg::Mean)]
    pub exp_param: ExpParamArg,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("design").required(true).args(["table", "dist_x"])))]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_table, conflicts_with_all = ["dist_x", "dist_y", "n1", "n2"])]
    pub table: Option<DesignTable>,
    #[arg(long, value_name = "FAMILY:PARAM", requires_all = ["dist_y", "n1", "n2"])]
    pub dist_x: Option<String>,
    #[arg(long, value_name = "FAMILY:PARAM", requires = "dist_x")]
    pub dist_y: Option<String>,
    #[arg(long, requires = "dist_x")]
    pub n1: Option<usize>,
    #[arg(long, requires = "dist_x")]
    pub n2: Option<usize>,
    /// Comma-separated t values in [0,1].
    #[arg(long = "t", value_name = "LIST", value_parser = parse_t_list, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub t: TList,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, env = "LORENZ_JEL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Worker threads; 0 uses all available cores. Never affects results.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub methods: MethodChoice,
    #[arg(long, default_value = "adjusted", value_parser = parse_sim_quantile_mode)]
    pub quantile_mode: SimQuantileMode,
    #[arg(long, value_enum, default_value_t = ExpParamArg::Mean)]
    pub exp_param: ExpParamArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// A validated, strictly increasing list of t values.
#[derive(Debug, Clone, PartialEq)]
pub struct TList(pub Vec<f64>);

fn parse_t(s: &str) -> Result<f64, String> {
    let t: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(0.0..=1.0).contains(&t) {
        return Err(format!("t must lie in [0,1], got {t}"));
    }
    Ok(t)
}

pub fn parse_t_list(s: &str) -> Result<TList, String> {
    let ts = s.split(',').map(parse_t).collect::<Result<Vec<_>, _>>()?;
    if ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err("t values must be strictly increasing".into());
    }
    Ok(TList(ts))
}

/// A bare integer `N >= 1` selects the uniform grid, anything else is a list.
pub fn parse_grid(s: &str) -> Result<TList, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("grid size must be at least 1".into()),
        Ok(n) if !s.contains('.') => Ok(TList((1..=n).map(|i| i as f64 / n as f64).collect())),
        _ => parse_t_list(s),
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        _ => Err(format!("alpha must lie in (0,1), got {s:?}")),
    }
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "\\t" | "tab" => Ok('\t'),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii() => Ok(c),
                _ => Err(format!("delimiter must be a single ASCII character, got {s:?}")),
            }
        }
    }
}

fn parse_table(s: &str) -> Result<DesignTable, String> {
    s.parse().map_err(|e: lorenz_jel::Error| e.to_string())
}

fn parse_quantile_mode(s: &str) -> Result<QuantileMode, String> {
    s.parse().map_err(|e: lorenz_jel::Error| e.to_string())
}

fn parse_sim_quantile_mode(s: &str) -> Result<SimQuantileMode, String> {
    s.parse().map_err(|e: lorenz_jel::Error| e.to_string())
}
