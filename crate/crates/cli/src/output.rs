//! CSV output written atomically: a temp file in the target directory is
//! renamed over the destination once complete.

use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Lossless float formatting (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    let dest = dir.join(name);
    tmp.persist(&dest).map_err(|e| CliError::Io(e.error))?;
    Ok(dest)
}

/// Reads a two-column `t,u` CSV with a header row.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let (mut ts, mut us) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 2 {
            return Err(bad(format!("row {} has {} columns, expected 2", i + 1, rec.len())));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("row {}: {e}", i + 1)));
        ts.push(parse(&rec[0])?);
        us.push(parse(&rec[1])?);
    }
    Ok((ts, us))
}
