use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::CliError;

pub const TOOL: &str = "lorenz-jel";

/// Everything needed to regenerate a result: tool version, subcommand,
/// seed and the effective configuration.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64, config: Value) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub provenance: &'a Provenance,
    pub results: &'a T,
}

/// A payload that can be rendered as CSV rows or an aligned text table.
pub trait Tabular {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn emit<T: Serialize + Tabular>(
    format: Format,
    provenance: &Provenance,
    payload: &T,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let mut out = open_sink(path)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut out,
                &Envelope {
                    provenance,
                    results: payload,
                },
            )?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# {}", serde_json::to_string(provenance)?)?;
            writeln!(out, "{}", payload.header().join(","))?;
            for row in payload.rows() {
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Format::Plain => write_plain(&mut out, provenance, payload)?,
    }
    out.flush()?;
    Ok(())
}

fn write_plain<T: Tabular>(out: &mut dyn Write, provenance: &Provenance, payload: &T) -> io::Result<()> {
    writeln!(
        out,
        "{} {} {} (seed {})",
        provenance.tool, provenance.version, provenance.command, provenance.seed
    )?;
    let header = payload.header();
    let rows = payload.rows();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.clone()))?;
    for row in &rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
