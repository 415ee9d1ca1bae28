//! CSV output: fixed headers, '.' decimal separator, 17 significant digits
//! for reals (round-trip exact for doubles), one metadata comment line, and
//! write-then-rename so partial files are never left behind.

use std::io::Write;
use std::path::Path;

use crate::errors::{CliError, CliResult};

/// Format a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    /// Start a document with the standard metadata comment line.
    pub fn new(command: &str, seed: u64) -> Self {
        let version = env!("CARGO_PKG_VERSION");
        CsvDoc {
            lines: vec![format!("# urq {command} seed={seed} version={version}")],
        }
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.lines.push(columns.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    /// Write the whole document to `path` atomically: the bytes go to a
    /// sibling temporary file which is renamed over the target only after a
    /// successful flush.
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let file_name = path
            .file_name()
            .ok_or_else(|| CliError::Usage(format!("output path {path:?} has no file name")))?;
        let mut tmp = path.to_path_buf();
        tmp.set_file_name(format!(
            ".{}.{}.tmp",
            file_name.to_string_lossy(),
            std::process::id()
        ));
        let body = self.lines.join("\n") + "\n";
        let result = (|| -> std::io::Result<()> {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
            std::fs::rename(&tmp, path)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = std::fs::remove_file(&tmp);
        }
        result.map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -7.25e-19, 0.0] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "round trip failed for {s}");
        }
    }

    #[test]
    fn failed_write_leaves_nothing() {
        let mut doc = CsvDoc::new("bounds", 0);
        doc.header(&["a"]);
        let missing_dir = std::env::temp_dir()
            .join(format!("urq-nonexistent-{}", std::process::id()))
            .join("out.csv");
        assert!(doc.write(&missing_dir).is_err());
        assert!(!missing_dir.exists());
    }
}
