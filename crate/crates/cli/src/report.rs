use std::fmt;
use std::io::Write;

pub const HEADER: [&str; 7] = [
    "experiment",
    "dataset_id",
    "deployment",
    "key_method",
    "metric",
    "value",
    "rep",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Count(u64),
    Real(f64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Count(v) => v.fmt(f),
            Value::Real(v) => v.fmt(f),
        }
    }
}

/// One CSV row. Metrics whose name starts with `wall_ns` are timings; every
/// other metric is reproducible bit-for-bit under fixed flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub dataset_id: String,
    pub deployment: String,
    pub key_method: String,
    pub metric: String,
    pub value: Value,
    /// Repetition index for timings, request index for per-request rows,
    /// zero for aggregates.
    pub rep: usize,
}

impl ResultRow {
    pub fn is_timing(&self) -> bool {
        self.metric.starts_with("wall_ns")
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record([
            row.experiment,
            &row.dataset_id,
            &row.deployment,
            &row.key_method,
            &row.metric,
            &row.value.to_string(),
            &row.rep.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation; zero for fewer than two samples.
pub fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values);
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn median(values: &mut [u64]) -> u64 {
    if values.is_empty() {
        return 0;
    }
    values.sort_unstable();
    values[values.len() / 2]
}
