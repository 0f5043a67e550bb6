//! Label-pinned symmetric systems on the unlabeled unknowns.
//!
//! All three quadratic problems (GL, WNLL and the split Bregman u-step) lead
//! to stationarity equations of the form
//!
//! ```text
//! sum_y a(z, y) (u(z) - u(y)) = s(z),    z not in S,
//! a(z, y) = w(z, y) + h(y) w(y, z),      h(y) = 1 off S, h(y) = h_S on S,
//! ```
//!
//! with `u = g` on `S`. `h_S` is 1 for GL, `mu` for WNLL and `mu^2` for the
//! u-step. Labeled neighbors move to the right-hand side, leaving a symmetric
//! diagonally dominant operator on the free unknowns.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::cg::{pcg_solve, CgOptions, CgOutcome};
use super::labels::LabelConstraint;
use crate::error::{Error, Result};
use crate::graph::SparseWeightGraph;

const NOT_FREE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct PinnedSystem {
    free: Vec<usize>,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    coupling: Vec<f64>,
    diag: Vec<f64>,
    inv_diag: Vec<f64>,
    /// `sum_{y in S} a(z, y) g(y)` per free unknown.
    label_rhs: Vec<f64>,
}

impl PinnedSystem {
    pub(crate) fn assemble(graph: &SparseWeightGraph, labels: &LabelConstraint, labeled_scale: f64) -> Result<Self> {
        let n = graph.len();
        if labels.point_count() != n {
            return Err(Error::ShapeMismatch { expected: n, actual: labels.point_count() });
        }
        check_reachability(graph, labels)?;

        let mut slot = alloc::vec![NOT_FREE; n];
        let free: Vec<usize> = (0..n).filter(|&x| !labels.is_labeled(x)).collect();
        for (s, &x) in free.iter().enumerate() {
            slot[x] = s;
        }
        let g = labels.dense_values();
        let mut offsets = Vec::with_capacity(free.len() + 1);
        let mut cols = Vec::new();
        let mut coupling = Vec::new();
        let mut diag = Vec::with_capacity(free.len());
        let mut label_rhs = Vec::with_capacity(free.len());
        offsets.push(0);
        for &z in &free {
            let mut d = 0.0;
            let mut b = 0.0;
            for e in graph.union_neighbors(z) {
                let y = e.neighbor;
                if labels.is_labeled(y) {
                    let a = e.forward + labeled_scale * e.backward;
                    d += a;
                    b += a * g[y];
                } else {
                    let a = e.forward + e.backward;
                    d += a;
                    cols.push(slot[y]);
                    coupling.push(a);
                }
            }
            offsets.push(cols.len());
            diag.push(d);
            label_rhs.push(b);
        }
        let inv_diag = diag.iter().map(|d| 1.0 / d).collect();
        Ok(Self { free, offsets, cols, coupling, diag, inv_diag, label_rhs })
    }

    #[inline]
    pub(crate) fn free(&self) -> &[usize] {
        &self.free
    }

    pub(crate) fn label_rhs(&self) -> &[f64] {
        &self.label_rhs
    }

    pub(crate) fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.offsets[i]..self.offsets[i + 1];
            let off: f64 = self.cols[range.clone()].iter().zip(&self.coupling[range]).map(|(&c, a)| a * v[c]).sum();
            *o = self.diag[i] * v[i] - off;
        }
    }

    pub(crate) fn solve(&self, rhs: &[f64], x0: Option<&[f64]>, opts: CgOptions) -> Result<CgOutcome> {
        pcg_solve(|v, o| self.apply(v, o), Some(&self.inv_diag), rhs, x0, opts)
    }

    /// Full-length vector: `g` on `S`, `free_values` elsewhere.
    pub(crate) fn scatter(&self, labels: &LabelConstraint, free_values: &[f64]) -> Vec<f64> {
        let mut u = labels.dense_values().to_vec();
        for (&x, &v) in self.free.iter().zip(free_values) {
            u[x] = v;
        }
        u
    }

    pub(crate) fn gather(&self, u: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&x| u[x]).collect()
    }
}

/// Every unlabeled point must reach a labeled one through the union pattern.
fn check_reachability(graph: &SparseWeightGraph, labels: &LabelConstraint) -> Result<()> {
    let n = graph.len();
    let mut seen = alloc::vec![false; n];
    let mut queue: VecDeque<usize> = labels.indices().iter().copied().collect();
    for &x in labels.indices() {
        seen[x] = true;
    }
    while let Some(x) = queue.pop_front() {
        for e in graph.union_neighbors(x) {
            if !seen[e.neighbor] {
                seen[e.neighbor] = true;
                queue.push_back(e.neighbor);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(point) => Err(Error::UnlabeledComponent { point }),
        None => Ok(()),
    }
}
