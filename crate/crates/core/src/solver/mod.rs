//! The four interpolation solvers and their building blocks.

mod cg;
mod edge;
mod labels;
mod laplace;
pub(crate) mod system;
mod wntv;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use cg::{cg_solve, pcg_solve, CgOptions, CgOutcome};
pub use edge::EdgeField;
pub use labels::LabelConstraint;
pub use laplace::{solve_gl, solve_wnll};
pub use wntv::{
    d_subproblem, nonlocal_gradient, q_update, shrink, shrink_in_place, solve_ntv, solve_wntv, u_subproblem,
    wntv_energy, SplitBregmanState, RESIDUAL_EPS,
};

use crate::error::{Error, Result};
use crate::graph::SparseWeightGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Graph Laplacian.
    Gl,
    /// Weighted nonlocal Laplacian.
    Wnll,
    /// Nonlocal total variation.
    Ntv,
    /// Weighted nonlocal total variation.
    Wntv,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Gl, SolverKind::Wnll, SolverKind::Ntv, SolverKind::Wntv];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Gl => "GL",
            SolverKind::Wnll => "WNLL",
            SolverKind::Ntv => "NTV",
            SolverKind::Wntv => "WNTV",
        }
    }

    pub fn is_total_variation(self) -> bool {
        matches!(self, SolverKind::Ntv | SolverKind::Wntv)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown solver {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bregman penalty; the shrinkage threshold is `1 / lambda`.
    pub lambda: f64,
    /// Label weight; `None` means `|V| / |S|`.
    pub mu: Option<f64>,
    pub max_bregman_iters: usize,
    /// Stop once `|D - D_NG u| / |D_NG u|` falls below this.
    pub bregman_tol: f64,
    pub cg: CgOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { lambda: 1.0, mu: None, max_bregman_iters: 50, bregman_tol: 1e-4, cg: CgOptions::default() }
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: Vec<f64>,
    /// Bregman iterations performed; 0 for the quadratic solvers.
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

impl Solution {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Runs the selected solver.
pub fn solve(
    kind: SolverKind,
    graph: &SparseWeightGraph,
    labels: &LabelConstraint,
    opts: &SolverOptions,
) -> Result<Solution> {
    let quadratic = |u| Solution { u, iterations: 0, residual_history: Vec::new() };
    match kind {
        SolverKind::Gl => solve_gl(graph, labels, opts.cg).map(quadratic),
        SolverKind::Wnll => {
            solve_wnll(graph, labels, opts.mu.unwrap_or_else(|| labels.default_mu()), opts.cg).map(quadratic)
        }
        SolverKind::Ntv | SolverKind::Wntv => {
            let opts = if kind == SolverKind::Ntv { SolverOptions { mu: Some(1.0), ..*opts } } else { *opts };
            solve_wntv(graph, labels, &opts).map(|(u, st)| Solution {
                u,
                iterations: st.iteration,
                residual_history: st.residual_history,
            })
        }
    }
}
