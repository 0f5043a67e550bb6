//! Quadratic interpolation: graph Laplacian and weighted nonlocal Laplacian.

use alloc::vec::Vec;

use super::cg::CgOptions;
use super::labels::LabelConstraint;
use super::system::PinnedSystem;
use crate::error::{Error, Result};
use crate::graph::SparseWeightGraph;

/// Minimizes `sum_{x,y} w(x,y) (u(x) - u(y))^2` with `u = g` on the labeled set.
pub fn solve_gl(graph: &SparseWeightGraph, labels: &LabelConstraint, cg: CgOptions) -> Result<Vec<f64>> {
    solve_pinned(graph, labels, 1.0, cg)
}

/// Weighted nonlocal Laplacian: the GL energy with every labeled row scaled by
/// `mu`,
///
/// ```text
/// sum_{x not in S} sum_y w(x,y) (u(x)-u(y))^2 + mu sum_{x in S} sum_y w(x,y) (u(x)-u(y))^2.
/// ```
pub fn solve_wnll(graph: &SparseWeightGraph, labels: &LabelConstraint, mu: f64, cg: CgOptions) -> Result<Vec<f64>> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("mu must be positive, got {mu}")));
    }
    solve_pinned(graph, labels, mu, cg)
}

fn solve_pinned(graph: &SparseWeightGraph, labels: &LabelConstraint, scale: f64, cg: CgOptions) -> Result<Vec<f64>> {
    if labels.point_count() != graph.len() {
        return Err(Error::ShapeMismatch { expected: graph.len(), actual: labels.point_count() });
    }
    if labels.is_complete() {
        return Ok(labels.dense_values().to_vec());
    }
    let system = PinnedSystem::assemble(graph, labels, scale)?;
    let out = system.solve(system.label_rhs(), None, cg)?;
    Ok(system.scatter(labels, &out.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn path3() -> SparseWeightGraph {
        SparseWeightGraph::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0), (2, 1.0)], vec![(1, 1.0)]], vec![]).unwrap()
    }

    #[test]
    fn path_midpoint() {
        let l = LabelConstraint::new(3, [(0, 0.0), (2, 1.0)]).unwrap();
        let u = solve_gl(&path3(), &l, CgOptions { tol: 1e-12, max_iters: 10 }).unwrap();
        assert_eq!(u[0], 0.0);
        assert_eq!(u[2], 1.0);
        assert!((u[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn all_labeled_returns_g() {
        let l = LabelConstraint::new(3, [(0, 3.0), (1, -1.0), (2, 2.0)]).unwrap();
        assert_eq!(solve_gl(&path3(), &l, CgOptions::default()).unwrap(), vec![3.0, -1.0, 2.0]);
        assert_eq!(solve_wnll(&path3(), &l, 7.0, CgOptions::default()).unwrap(), vec![3.0, -1.0, 2.0]);
    }

    #[test]
    fn wnll_rejects_bad_mu() {
        let l = LabelConstraint::new(3, [(0, 0.0)]).unwrap();
        assert!(solve_wnll(&path3(), &l, 0.0, CgOptions::default()).is_err());
    }
}
