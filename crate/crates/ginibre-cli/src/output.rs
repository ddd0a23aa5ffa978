//! CSV emission, run manifests and exit status.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    CheckFailed = 1,
    Usage = 2,
    Exhausted = 3,
}

impl Status {
    /// Worst of two statuses, with exhaustion dominating plain failures.
    pub fn merge(self, other: Status) -> Status {
        self.max(other)
    }

    pub fn of_error(e: &ginibre::Error) -> Status {
        match e {
            ginibre::Error::EscalationExhausted { .. } => Status::Exhausted,
            _ => Status::CheckFailed,
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Builds a CSV document row by row.
pub struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Table { w }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let bytes = self.w.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("CSV fields are UTF-8")
    }
}

#[derive(Debug, Serialize)]
pub struct ContourSettings {
    pub nodes_start: usize,
    pub nodes_cap: usize,
    pub k: i32,
}

impl Default for ContourSettings {
    fn default() -> Self {
        ContourSettings { nodes_start: ginibre::contours::NODES_START, nodes_cap: ginibre::contours::NODES_CAP, k: 0 }
    }
}

/// Provenance for one invocation. Kept out of the primary output so that
/// reruns produce byte-identical files.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub grid: serde_json::Value,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub precision: String,
    pub contour: ContourSettings,
    pub version: String,
    pub wall_time_seconds: f64,
    pub exit_code: i32,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes the primary output to `out` (or stdout) and the manifest next to it
/// (or to stderr).
pub fn emit(out: Option<&Path>, body: &str, manifest: &RunManifest) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    match out {
        Some(path) => {
            std::fs::write(path, body)?;
            std::fs::write(manifest_path(path), json + "\n")
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes())?;
            so.flush()?;
            writeln!(std::io::stderr().lock(), "{json}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn status_merge_prefers_exhaustion() {
        assert_eq!(Status::Ok.merge(Status::CheckFailed), Status::CheckFailed);
        assert_eq!(Status::Exhausted.merge(Status::CheckFailed), Status::Exhausted);
    }

    #[test]
    fn table_quotes_messages() {
        let mut t = Table::new(&["a", "b"]);
        t.row(["1", "x, y"]);
        assert_eq!(t.finish(), "a,b\n1,\"x, y\"\n");
    }
}
