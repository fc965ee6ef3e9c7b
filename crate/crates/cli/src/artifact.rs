//! CSV layout and artifact writing. All files are written sequentially by
//! the main thread after any parallel work has finished; no file is ever
//! written to concurrently.

use std::fs;
use std::path::{Path, PathBuf};

use crate::report::{Row, VERSION};

/// Fixed column order; every row carries the seed and version that made it.
pub const CSV_HEADER: &str = "control,k,m,mean,stderr,n,seed,version";

/// One CSV line. Floats use the shortest representation that parses back
/// to the same value, so identical runs produce identical bytes.
pub fn csv_line(r: &Row) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.control, r.k, r.m, r.mean, r.stderr, r.n, r.seed, VERSION
    )
}

pub fn csv_document(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_line(r));
        out.push('\n');
    }
    out
}

/// Failure of a run after configuration parsing: either the configuration
/// is unusable or the filesystem rejected an artifact.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Io { path: PathBuf, err: String },
}

/// Creates `dir` if needed and writes `name` under it, reporting the path
/// on stderr so stdout stays machine-readable.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Io { path: dir.to_path_buf(), err: e.to_string() })?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Failure::Io { path: path.clone(), err: e.to_string() })?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_is_stable() {
        let r = Row { control: 0.5, k: 4, m: 3, mean: 0.25, stderr: 0.0125, n: 1000, seed: 42 };
        assert_eq!(csv_line(&r), format!("0.5,4,3,0.25,0.0125,1000,42,{VERSION}"));
        let doc = csv_document(&[r]);
        let mut lines = doc.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some(csv_line(&r).as_str()));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn csv_floats_round_trip() {
        let r = Row {
            control: 0.5617647058823529,
            k: 8,
            m: 7,
            mean: 0.123456789012345,
            stderr: 3.2e-4,
            n: 1,
            seed: u64::MAX,
        };
        let line = csv_line(&r);
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[0].parse::<f64>().unwrap(), r.control);
        assert_eq!(fields[3].parse::<f64>().unwrap(), r.mean);
        assert_eq!(fields[4].parse::<f64>().unwrap(), r.stderr);
        assert_eq!(fields[6].parse::<u64>().unwrap(), r.seed);
    }
}
