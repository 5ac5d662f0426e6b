//! Deterministic CSV emission: fixed column order, 17-significant-digit
//! floats, LF line endings. Identical data ⇒ identical bytes.

use std::path::Path;

use crate::error::Result;

/// Canonical float rendering (17 significant digits).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// An in-memory CSV assembled row by row, written in one atomic pass.
pub struct Csv {
    name: String,
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(name: &str, header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self {
            name: name.to_string(),
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns, "csv row width");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    /// Write to `dir` and hand back the file name for the manifest.
    pub fn write(self, dir: &Path) -> Result<String> {
        std::fs::write(dir.join(&self.name), self.buf.as_bytes())?;
        Ok(self.name)
    }
}
