//! Line-delimited metrics records and the JSON run summary.
//!
//! One record per line, space-separated `key=value` fields in fixed order:
//!
//! ```text
//! run=inpaint-WNTV-0 cycle=3 channel=0 psnr=24.518337 iterations=17 residual=8.734120e-5 wall_s=2.314
//! ```
//!
//! `psnr` is `inf` for an exact reconstruction and `na` without ground truth;
//! `residual` is `na` for the quadratic solvers. For `ssl` runs `channel` is
//! the class of the one-vs-all problem. Only `wall_s` varies between
//! identical runs.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord<'a> {
    pub run_id: &'a str,
    pub cycle: usize,
    pub channel: usize,
    pub psnr: Option<f64>,
    pub iterations: usize,
    pub residual: Option<f64>,
    pub wall_seconds: f64,
}

/// Formats a PSNR value, writing `inf` for the infinite sentinel.
pub fn format_psnr(p: f64) -> String {
    if p == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{p:.6}")
    }
}

impl MetricsRecord<'_> {
    pub fn to_line(&self) -> String {
        let mut s = format!("run={} cycle={} channel={} psnr=", self.run_id, self.cycle, self.channel);
        match self.psnr {
            Some(p) => s.push_str(&format_psnr(p)),
            None => s.push_str("na"),
        }
        let _ = write!(s, " iterations={} residual=", self.iterations);
        match self.residual {
            Some(r) => {
                let _ = write!(s, "{r:.6e}");
            }
            None => s.push_str("na"),
        }
        let _ = write!(s, " wall_s={:.3}", self.wall_seconds);
        s
    }
}

/// Appends records to a file, or discards them when no path is configured.
#[derive(Debug)]
pub struct MetricsLog {
    sink: Option<(PathBuf, BufWriter<File>)>,
}

impl MetricsLog {
    pub fn create(path: Option<&Path>) -> Result<Self> {
        let sink = match path {
            Some(p) => Some((p.to_path_buf(), BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?))),
            None => None,
        };
        Ok(Self { sink })
    }

    pub fn write(&mut self, record: &MetricsRecord<'_>) -> Result<()> {
        if let Some((path, w)) = &mut self.sink {
            writeln!(w, "{}", record.to_line()).map_err(|e| Error::io(path.as_path(), e))?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        if let Some((path, mut w)) = self.sink {
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// A PSNR for JSON output: a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psnr(pub f64);

impl Serialize for Psnr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        }
    }
}

/// Machine-readable outcome of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub run_id: String,
    pub command: String,
    pub solver: String,
    pub seed: u64,
    pub lambda: f64,
    pub mu: Option<f64>,
    /// Final PSNR against ground truth (image commands).
    pub psnr: Option<Psnr>,
    pub cycle_psnr: Vec<Psnr>,
    /// Percentage of all points classified correctly (ssl).
    pub accuracy: Option<f64>,
    /// Same, over the unlabeled points only.
    pub accuracy_unlabeled: Option<f64>,
    pub labeled: usize,
    pub points: usize,
    pub max_bregman_iterations: usize,
    pub max_final_residual: Option<f64>,
    pub output: Option<PathBuf>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}
