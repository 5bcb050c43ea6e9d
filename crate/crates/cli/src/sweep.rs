//! Parameter sweeps: one run per value, executed in parallel, and a summary
//! reduced in value order.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::config::{ConfigError, Document};
use crate::run::{self, CliError, Overrides, Trace};

pub const SUMMARY_COLUMNS: &str = "value,peak_concurrence,min_concurrence,amplitude,frequency";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub peak: f64,
    pub min: f64,
    /// `peak - min`.
    pub amplitude: f64,
    /// Dominant angular frequency of the concurrence oscillation.
    pub frequency: f64,
}

impl SummaryRow {
    pub fn new(value: f64, times: &[f64], concurrence: &[f64]) -> Self {
        let peak = concurrence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = concurrence.iter().copied().fold(f64::INFINITY, f64::min);
        SummaryRow {
            value,
            peak,
            min,
            amplitude: peak - min,
            frequency: dominant_frequency(times, concurrence),
        }
    }
}

/// `π × (sign changes of C - mean C) / duration`. Samples equal to the mean
/// are skipped when counting.
pub fn dominant_frequency(times: &[f64], values: &[f64]) -> f64 {
    let (Some(first), Some(last)) = (times.first(), times.last()) else {
        return 0.0;
    };
    let duration = last - first;
    if duration <= 0.0 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut crossings = 0usize;
    let mut previous = 0.0f64;
    for v in values {
        let d = v - mean;
        if d == 0.0 {
            continue;
        }
        if previous != 0.0 && d.signum() != previous.signum() {
            crossings += 1;
        }
        previous = d;
    }
    std::f64::consts::PI * crossings as f64 / duration
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: String,
    /// Runs sorted by swept value.
    pub points: Vec<(f64, Trace)>,
    pub summary: Vec<SummaryRow>,
}

impl SweepResult {
    pub fn write_summary<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# sweep over {}", self.parameter)?;
        writeln!(out, "{SUMMARY_COLUMNS}")?;
        for r in &self.summary {
            writeln!(out, "{},{},{},{},{}", r.value, r.peak, r.min, r.amplitude, r.frequency)?;
        }
        Ok(())
    }
}

/// Run every point of the document's sweep block on the current rayon pool.
pub fn execute(doc: &Document, overrides: Overrides) -> Result<SweepResult, CliError> {
    let spec = doc
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("config has no [sweep] section".into()))?;
    let mut values: Vec<f64> = spec.values.iter().map(|v| v.0).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let points = values
        .par_iter()
        .map(|&v| {
            let point = doc.with_value(&spec.parameter, v)?;
            let mut trace = run::execute(&point, overrides)?;
            trace.header.push(format!("# sweep {} = {v}", spec.parameter));
            Ok((v, trace))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let summary = points
        .iter()
        .map(|(v, t)| SummaryRow::new(*v, &t.times(), &t.concurrence()))
        .collect();
    Ok(SweepResult {
        parameter: spec.parameter.clone(),
        points,
        summary,
    })
}
