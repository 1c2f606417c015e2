use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::args::Format;
use crate::suites::Outcome;

/// Writes `dir/stem.{json,csv}` through a temp file and rename.
pub fn write_report(dir: &Path, stem: &str, format: Format, outcome: &Outcome) -> std::io::Result<PathBuf> {
    let (ext, bytes) = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).map_err(std::io::Error::other)?;
            s.push('\n');
            ("json", s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &outcome.rows {
                w.serialize(row).map_err(std::io::Error::other)?;
            }
            ("csv", w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
        }
    };
    let path = dir.join(format!("{stem}.{ext}"));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(&bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}
