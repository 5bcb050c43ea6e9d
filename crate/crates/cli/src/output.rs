//! Writing traces and sweep summaries to disk.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::Document;
use crate::run::{self, CliError, Overrides, Trace};
use crate::sweep::{self, SweepResult};

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("creating {}", path.display()), e))
}

fn finish(path: &Path, result: std::io::Result<()>) -> Result<(), CliError> {
    result.map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<(), CliError> {
    let mut out = create(path)?;
    let result = trace.write_csv(&mut out).and_then(|_| out.flush());
    finish(path, result)
}

/// Writes `{stem}_{value}.csv` per point and `{stem}_summary.csv`.
pub fn write_sweep(dir: &Path, stem: &str, result: &SweepResult) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for (value, trace) in &result.points {
        let path = dir.join(format!("{stem}_{value}.csv"));
        write_trace(&path, trace)?;
        paths.push(path);
    }
    let path = dir.join(format!("{stem}_summary.csv"));
    let mut out = create(&path)?;
    let written = result.write_summary(&mut out).and_then(|_| out.flush());
    finish(&path, written)?;
    paths.push(path);
    Ok(paths)
}

/// The stem used for a document's outputs.
pub fn stem<'a>(doc: &'a Document, fallback: &'a str) -> &'a str {
    doc.config.output.as_deref().unwrap_or(fallback)
}

/// Run a document as a single trace, or as a sweep when it has a sweep
/// block and `allow_sweep` is set. Returns the written files.
pub fn process(
    doc: &Document,
    fallback_stem: &str,
    dir: &Path,
    overrides: Overrides,
    allow_sweep: bool,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let stem = stem(doc, fallback_stem);
    if allow_sweep && doc.config.sweep.is_some() {
        let result = sweep::execute(doc, overrides)?;
        write_sweep(dir, stem, &result)
    } else {
        let trace = run::execute(doc, overrides)?;
        let path = dir.join(format!("{stem}.csv"));
        write_trace(&path, &trace)?;
        Ok(vec![path])
    }
}
