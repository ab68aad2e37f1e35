//! Loading one numeric column from a delimited text file.

use std::fs::File;
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::curves::Sample;
use crate::distributions::SeededStream;
use crate::error::{Error, Result};

/// Column selector: header name or 0-based index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl From<&str> for ColumnRef {
    /// Plain integers select by position, anything else by header name.
    fn from(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSpec {
    pub path: PathBuf,
    pub column: ColumnRef,
    pub delimiter: u8,
    pub has_header: bool,
    /// Rows below this value are discarded (before any log transform).
    pub min_value: Option<f64>,
    pub log_transform: bool,
}

impl IngestSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            column: ColumnRef::Index(0),
            delimiter: b',',
            has_header: true,
            min_value: None,
            log_transform: false,
        }
    }
}

/// The retained sample plus row accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub sample: Sample,
    pub total_rows: usize,
    pub non_numeric: usize,
    pub below_min: usize,
}

impl Loaded {
    pub fn dropped(&self) -> usize {
        self.non_numeric + self.below_min
    }
}

fn parse_value(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load_sample(spec: &IngestSpec) -> Result<Loaded> {
    let file = File::open(&spec.path).map_err(|source| Error::Io {
        path: spec.path.clone(),
        source,
    })?;
    load_from_reader(file, spec, &spec.path)
}

pub(crate) fn load_from_reader<R: std::io::Read>(reader: R, spec: &IngestSpec, origin: &Path) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let idx = match &spec.column {
        ColumnRef::Index(i) => *i,
        ColumnRef::Name(name) => {
            if !spec.has_header {
                return Err(Error::MissingColumn(format!("{name:?} (file read without header)")));
            }
            rdr.headers()?
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(format!("{name:?}")))?
        }
    };

    let (mut total_rows, mut non_numeric, mut below_min) = (0, 0, 0);
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        total_rows += 1;
        let Some(v) = record.get(idx).and_then(parse_value) else {
            non_numeric += 1;
            continue;
        };
        if spec.min_value.is_some_and(|m| v < m) {
            below_min += 1;
            continue;
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::NoRows(origin.to_path_buf()));
    }
    if spec.log_transform {
        let bad = values.iter().filter(|&&v| v <= 0.0).count();
        if bad > 0 {
            return Err(Error::NonPositiveForLog(bad));
        }
        values.iter_mut().for_each(|v| *v = v.ln());
    }
    Ok(Loaded {
        sample: Sample::new(values)?,
        total_rows,
        non_numeric,
        below_min,
    })
}

/// Simple random sample without replacement, reproducible from `stream`.
pub fn subsample(s: &Sample, n: usize, stream: SeededStream) -> Result<Sample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if n > s.len() {
        return Err(Error::SubsampleTooLarge {
            requested: n,
            available: s.len(),
        });
    }
    let picked = index::sample(&mut stream.rng(), s.len(), n);
    Sample::new(picked.iter().map(|i| s.values()[i]).collect())
}
