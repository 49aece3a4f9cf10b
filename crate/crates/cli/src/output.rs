//! Deterministic CSV and JSON writers.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Shortest round-trip decimal, switching to exponent form for tiny or huge
/// magnitudes.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if !(1e-3..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e))?;
        writer.write_record(header).map_err(|e| CliError::io(&path, e))?;
        Ok(Self { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| CliError::io(&self.path, e))
    }

    pub fn floats(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.row(values.iter().map(|&v| fmt_float(v)))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Schema(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::fmt_float;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(2.0 / 3.0), "0.6666666666666666");
        assert_eq!(fmt_float(1.5e-4), "1.5e-4");
        assert_eq!(fmt_float(-2e-7), "-2e-7");
        assert_eq!(fmt_float(0.001), "0.001");
        assert_eq!(fmt_float(33.0), "33");
    }
}
