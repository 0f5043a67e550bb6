//! Run configuration: a TOML file with one section per module, overridden by
//! command-line flags.
//!
//! | key                     | default                          | range        |
//! |-------------------------|----------------------------------|--------------|
//! | `run.command`           | required                         | ssl, inpaint, colorize |
//! | `run.solver`            | `WNTV`                           | GL, WNLL, NTV, WNTV |
//! | `run.seed`              | 0                                | any u64      |
//! | `run.id`                | `<command>-<solver>-<seed>`      | non-empty    |
//! | `graph.k`               | 20 (ssl), 50 (images)            | >= r_sigma   |
//! | `graph.r_sigma`         | 10 (ssl), 20 (images)            | >= 1         |
//! | `solver.lambda`         | 1.0                              | > 0          |
//! | `solver.mu`             | `|V| / |S|`                      | > 0          |
//! | `solver.bregman_iters`  | 50                               | >= 1         |
//! | `solver.bregman_tol`    | 1e-4                             | > 0          |
//! | `solver.cg_tol`         | 1e-6                             | > 0          |
//! | `solver.cg_iters`       | 1000                             | >= 1         |
//! | `patch.size`            | 11                               | odd, >= 1    |
//! | `patch.semi_local`      | true                             |              |
//! | `inpaint.outer_iters`   | 10                               | >= 1         |
//! | `sample.rate`           | unset                            | (0, 1]       |
//! | `ssl.labels`            | unset                            | >= 1         |
//! | `ssl.per_class`         | unset                            | >= 1         |
//! | `ssl.stratified`        | true                             |              |
//! | `io.*`                  | unset                            | paths        |

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wntv_core::solver::{CgOptions, SolverKind, SolverOptions};
use wntv_core::{GraphParams, PatchConfig};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Ssl,
    Inpaint,
    Colorize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ssl => "ssl",
            Command::Inpaint => "inpaint",
            Command::Colorize => "colorize",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ssl" => Ok(Command::Ssl),
            "inpaint" => Ok(Command::Inpaint),
            "colorize" => Ok(Command::Colorize),
            _ => Err(Error::Config(format!("unknown command {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub command: Option<Command>,
    pub solver: Option<String>,
    pub seed: u64,
    pub id: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSection {
    pub k: Option<usize>,
    pub r_sigma: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub lambda: f64,
    pub mu: Option<f64>,
    pub bregman_iters: usize,
    pub bregman_tol: f64,
    pub cg_tol: f64,
    pub cg_iters: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            lambda: d.lambda,
            mu: d.mu,
            bregman_iters: d.max_bregman_iters,
            bregman_tol: d.bregman_tol,
            cg_tol: d.cg.tol,
            cg_iters: d.cg.max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatchSection {
    pub size: usize,
    pub semi_local: bool,
}

impl Default for PatchSection {
    fn default() -> Self {
        Self { size: 11, semi_local: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InpaintSection {
    pub outer_iters: usize,
}

impl Default for InpaintSection {
    fn default() -> Self {
        Self { outer_iters: 10 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    /// Fraction of pixels kept when no mask file is given.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SslSection {
    pub labels: Option<usize>,
    pub per_class: Option<usize>,
    pub stratified: bool,
}

impl Default for SslSection {
    fn default() -> Self {
        Self { labels: None, per_class: None, stratified: true }
    }
}

/// File locations.
///
/// * ssl: `input` is the IDX image file, `truth` the IDX label file, `output`
///   receives one predicted class per line.
/// * inpaint: `input` is the damaged image, `mask` its observed pixels (or
///   `sample.rate` draws one); `truth` is used for PSNR, and defaults to
///   `input` when the mask is drawn.
/// * colorize: `input` is the grayscale image, `color` holds the color
///   samples (defaults to `truth`), `mask` selects them (or `sample.rate`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoSection {
    pub input: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub color: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub graph: GraphSection,
    pub solver: SolverSection,
    pub patch: PatchSection,
    pub inpaint: InpaintSection,
    pub sample: SampleSection,
    pub ssl: SslSection,
    pub io: IoSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn command(&self) -> Result<Command> {
        self.run.command.ok_or_else(|| Error::Config("run.command is required".into()))
    }

    pub fn solver_kind(&self) -> Result<SolverKind> {
        match &self.run.solver {
            None => Ok(SolverKind::Wntv),
            Some(s) => s.parse().map_err(|_| Error::Config(format!("unknown solver {s:?}"))),
        }
    }

    pub fn run_id(&self) -> Result<String> {
        Ok(match &self.run.id {
            Some(id) => id.clone(),
            None => format!("{}-{}-{}", self.command()?.name(), self.solver_kind()?, self.run.seed),
        })
    }

    pub fn graph_params(&self) -> Result<GraphParams> {
        let base = match self.command()? {
            Command::Ssl => GraphParams::POINT_CLOUD,
            Command::Inpaint | Command::Colorize => GraphParams::PATCHES,
        };
        Ok(GraphParams {
            k_sparsify: self.graph.k.unwrap_or(base.k_sparsify),
            r_sigma: self.graph.r_sigma.unwrap_or(base.r_sigma),
        })
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            lambda: s.lambda,
            mu: s.mu,
            max_bregman_iters: s.bregman_iters,
            bregman_tol: s.bregman_tol,
            cg: CgOptions { tol: s.cg_tol, max_iters: s.cg_iters },
        }
    }

    pub fn patch_config(&self) -> PatchConfig {
        let size = self.patch.size;
        if self.patch.semi_local {
            PatchConfig { s1: size, s2: size, ..PatchConfig::default() }
        } else {
            PatchConfig::plain(size, size)
        }
    }

    /// Checks every field and path, returning all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let command = match self.command() {
            Ok(c) => Some(c),
            Err(e) => {
                problems.push(e.to_string());
                None
            }
        };
        if let Err(e) = self.solver_kind() {
            problems.push(e.to_string());
        }
        if matches!(&self.run.id, Some(id) if id.trim().is_empty() || id.contains(char::is_whitespace)) {
            problems.push("run.id must be non-empty and contain no whitespace".into());
        }
        if let Some(command) = command {
            let g = self.graph_params().expect("command checked");
            if g.r_sigma == 0 || g.k_sparsify < g.r_sigma {
                problems.push(format!("graph needs 1 <= r_sigma <= k, got k={} r_sigma={}", g.k_sparsify, g.r_sigma));
            }
            self.validate_io(command, &mut problems);
        }
        let s = &self.solver;
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(s.lambda) {
            problems.push(format!("solver.lambda must be positive, got {}", s.lambda));
        }
        if matches!(s.mu, Some(mu) if !positive(mu)) {
            problems.push("solver.mu must be positive".into());
        }
        if s.bregman_iters == 0 || s.cg_iters == 0 {
            problems.push("iteration caps must be at least 1".into());
        }
        if !positive(s.bregman_tol) || !positive(s.cg_tol) {
            problems.push("tolerances must be positive".into());
        }
        if self.patch.size == 0 || self.patch.size % 2 == 0 {
            problems.push(format!("patch.size must be odd, got {}", self.patch.size));
        }
        if self.inpaint.outer_iters == 0 {
            problems.push("inpaint.outer_iters must be at least 1".into());
        }
        if matches!(self.sample.rate, Some(r) if !(r > 0.0 && r <= 1.0)) {
            problems.push("sample.rate must lie in (0, 1]".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    fn validate_io(&self, command: Command, problems: &mut Vec<String>) {
        let io = &self.io;
        let need = |problems: &mut Vec<String>, name: &str, p: Option<&PathBuf>| match p {
            None => problems.push(format!("io.{name} is required for {}", command.name())),
            Some(p) if !p.is_file() => problems.push(format!("io.{name}: {} does not exist", p.display())),
            Some(_) => {}
        };
        need(problems, "input", io.input.as_ref());
        match command {
            Command::Ssl => {
                need(problems, "truth", io.truth.as_ref());
                match (self.ssl.labels, self.ssl.per_class) {
                    (Some(_), Some(_)) => problems.push("set only one of ssl.labels and ssl.per_class".into()),
                    (None, None) => problems.push("ssl needs ssl.labels or ssl.per_class".into()),
                    (Some(0), _) | (_, Some(0)) => problems.push("label budget must be at least 1".into()),
                    _ => {}
                }
            }
            Command::Inpaint | Command::Colorize => {
                if io.mask.is_some() && self.sample.rate.is_some() {
                    problems.push("set only one of io.mask and sample.rate".into());
                }
                if io.mask.is_some() {
                    need(problems, "mask", io.mask.as_ref());
                } else if self.sample.rate.is_none() && command == Command::Colorize {
                    problems.push("colorize needs io.mask or sample.rate".into());
                }
                if io.truth.is_some() {
                    need(problems, "truth", io.truth.as_ref());
                }
                if command == Command::Colorize {
                    if io.color.is_some() {
                        need(problems, "color", io.color.as_ref());
                    } else if io.truth.is_none() {
                        problems.push("colorize needs io.color or io.truth".into());
                    }
                }
            }
        }
        for (name, p) in [("output", &io.output), ("metrics", &io.metrics), ("summary", &io.summary)] {
            if let Some(dir) = p.as_ref().and_then(|p| p.parent()) {
                if !dir.as_os_str().is_empty() && !dir.is_dir() {
                    problems.push(format!("io.{name}: directory {} does not exist", dir.display()));
                }
            }
        }
    }
}
