//! Weighted nonlocal total variation by split Bregman iteration.
//!
//! The energy is
//!
//! ```text
//! E(u) = sum_x c(x) ( sum_y w(x,y) (u(x) - u(y))^2 )^{1/2},   c(x) = mu on S, 1 off S,
//! ```
//!
//! minimized subject to `u = g` on `S`. The weight `c(x)` is folded into the
//! gradient operator `D_NG u(x,y) = c(x) sqrt(w(x,y)) (u(x) - u(y))`, so
//! `E(u) = sum_x |D_NG u(x, .)|` and the shrinkage threshold is the same
//! `1 / lambda` on every row. With `mu = 1` this is plain nonlocal TV.
//!
//! One iteration:
//! 1. `u <- argmin |D - D_NG u - Q|^2` with `u = g` on `S` (a pinned SPD
//!    system, solved by CG);
//! 2. `D(x, .) <- shrink(D_NG u(x, .) + Q(x, .), 1 / lambda)` row by row;
//! 3. `Q <- Q + D_NG u - D`.

use alloc::format;
use alloc::vec::Vec;

use super::cg::CgOptions;
use super::edge::EdgeField;
use super::labels::LabelConstraint;
use super::system::PinnedSystem;
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::graph::SparseWeightGraph;

/// Guards the denominator of the relative Bregman residual.
pub const RESIDUAL_EPS: f64 = 1e-12;

/// Iterates of the split Bregman scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBregmanState {
    pub u: Vec<f64>,
    pub d: EdgeField,
    pub q: EdgeField,
    pub iteration: usize,
    /// `|D - D_NG u| / max(|D_NG u|, eps)` after each iteration.
    pub residual_history: Vec<f64>,
}

#[inline]
fn row_scale(labels: &LabelConstraint, x: usize, mu: f64) -> f64 {
    if labels.is_labeled(x) {
        mu
    } else {
        1.0
    }
}

fn check_vector(graph: &SparseWeightGraph, u: &[f64]) -> Result<()> {
    if u.len() == graph.len() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected: graph.len(), actual: u.len() })
    }
}

/// `D_NG u` on every stored edge; rows of labeled points carry the factor `mu`.
pub fn nonlocal_gradient(graph: &SparseWeightGraph, u: &[f64], labels: &LabelConstraint, mu: f64) -> Result<EdgeField> {
    check_vector(graph, u)?;
    let mut out = Vec::with_capacity(graph.edge_count());
    for x in 0..graph.len() {
        let c = row_scale(labels, x, mu);
        for (&y, &w) in graph.targets(x).iter().zip(graph.weights(x)) {
            out.push(c * libm::sqrt(w) * (u[x] - u[y]));
        }
    }
    EdgeField::from_vec(graph, out)
}

/// Soft shrinkage `z / |z| * max(|z| - gamma, 0)`, with `shrink(0, gamma) = 0`.
pub fn shrink(z: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = z.to_vec();
    shrink_in_place(&mut out, gamma);
    out
}

pub fn shrink_in_place(z: &mut [f64], gamma: f64) {
    let norm = libm::sqrt(z.iter().map(|v| v * v).sum());
    if norm == 0.0 {
        z.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let factor = (norm - gamma).max(0.0) / norm;
    z.iter_mut().for_each(|v| *v *= factor);
}

/// The `D` step: row-wise shrinkage of `D_NG u + Q` with threshold `1 / lambda`.
pub fn d_subproblem(
    graph: &SparseWeightGraph,
    u: &[f64],
    q: &EdgeField,
    labels: &LabelConstraint,
    mu: f64,
    lambda: f64,
) -> Result<EdgeField> {
    q.check_aligned(graph)?;
    let mut d = nonlocal_gradient(graph, u, labels, mu)?;
    shrink_rows(graph, &mut d, q, lambda);
    Ok(d)
}

/// `z <- shrink(z + q, 1/lambda)` row by row.
fn shrink_rows(graph: &SparseWeightGraph, z: &mut EdgeField, q: &EdgeField, lambda: f64) {
    let gamma = 1.0 / lambda;
    let zs = z.as_mut_slice();
    zs.iter_mut().zip(q.as_slice()).for_each(|(z, q)| *z += q);
    for x in 0..graph.len() {
        shrink_in_place(&mut zs[graph.edge_range(x)], gamma);
    }
}

/// Bregman update `Q + D_NG u - D`.
pub fn q_update(q: &EdgeField, dng_u: &EdgeField, d: &EdgeField) -> Result<EdgeField> {
    if q.len() != dng_u.len() || q.len() != d.len() {
        return Err(Error::ShapeMismatch {
            expected: q.len(),
            actual: if q.len() != d.len() { d.len() } else { dng_u.len() },
        });
    }
    Ok(EdgeField(q.as_slice().iter().zip(dng_u.as_slice()).zip(d.as_slice()).map(|((q, g), d)| q + g - d).collect()))
}

/// The weighted nonlocal TV energy of `u`.
pub fn wntv_energy(graph: &SparseWeightGraph, u: &[f64], labels: &LabelConstraint, mu: f64) -> f64 {
    let mut total = 0.0;
    for x in 0..graph.len() {
        let row: f64 =
            graph.targets(x).iter().zip(graph.weights(x)).map(|(&y, &w)| w * (u[x] - u[y]) * (u[x] - u[y])).sum();
        total += row_scale(labels, x, mu) * libm::sqrt(row);
    }
    total
}

/// Right-hand side of the u-step on the free unknowns:
/// `sum_y sqrt(w(z,y)) B(z,y) - c(y) sqrt(w(y,z)) B(y,z)` with `B = D - Q`,
/// plus the labeled-neighbor terms of the system.
fn u_step_rhs(
    graph: &SparseWeightGraph,
    system: &PinnedSystem,
    labels: &LabelConstraint,
    sqrt_w: &[f64],
    d: &EdgeField,
    q: &EdgeField,
    mu: f64,
) -> Vec<f64> {
    let b = |e: usize| d[e] - q[e];
    system
        .free()
        .iter()
        .zip(system.label_rhs())
        .map(|(&z, &base)| {
            let mut s = base;
            for e in graph.union_neighbors(z) {
                if let Some(f) = e.forward_edge {
                    s += sqrt_w[f] * b(f);
                }
                if let Some(r) = e.backward_edge {
                    s -= row_scale(labels, e.neighbor, mu) * sqrt_w[r] * b(r);
                }
            }
            s
        })
        .collect()
}

/// The u step: minimizes `|D - D_NG u - Q|^2` over `u` with `u = g` on `S`.
pub fn u_subproblem(
    graph: &SparseWeightGraph,
    labels: &LabelConstraint,
    d: &EdgeField,
    q: &EdgeField,
    mu: f64,
    cg: CgOptions,
) -> Result<Vec<f64>> {
    d.check_aligned(graph)?;
    q.check_aligned(graph)?;
    if labels.point_count() != graph.len() {
        return Err(Error::ShapeMismatch { expected: graph.len(), actual: labels.point_count() });
    }
    if labels.is_complete() {
        return Ok(labels.dense_values().to_vec());
    }
    let system = PinnedSystem::assemble(graph, labels, mu * mu)?;
    let sqrt_w: Vec<f64> = graph.edge_weights().iter().map(|&w| libm::sqrt(w)).collect();
    let rhs = u_step_rhs(graph, &system, labels, &sqrt_w, d, q, mu);
    let out = system.solve(&rhs, None, cg)?;
    Ok(system.scatter(labels, &out.x))
}

pub(crate) fn validate(opts: &SolverOptions, mu: f64) -> Result<()> {
    let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
    if !(opts.lambda > 0.0 && opts.lambda.is_finite()) {
        return bad("lambda", opts.lambda);
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return bad("mu", mu);
    }
    if !(opts.bregman_tol > 0.0 && opts.bregman_tol < 1.0) {
        return bad("bregman_tol", opts.bregman_tol);
    }
    if !(opts.cg.tol > 0.0 && opts.cg.tol < 1.0) {
        return bad("cg_tol", opts.cg.tol);
    }
    if opts.max_bregman_iters == 0 || opts.cg.max_iters == 0 {
        return Err(Error::InvalidParameter("iteration caps must be positive".into()));
    }
    Ok(())
}

/// Solves the weighted nonlocal TV interpolation problem.
///
/// Starts from `u = g` on `S` and 0 elsewhere with `D = Q = 0`, and stops when
/// the relative residual drops below `opts.bregman_tol` or after
/// `opts.max_bregman_iters` iterations. `mu` defaults to `|V| / |S|`.
pub fn solve_wntv(
    graph: &SparseWeightGraph,
    labels: &LabelConstraint,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SplitBregmanState)> {
    let mu = opts.mu.unwrap_or_else(|| labels.default_mu());
    validate(opts, mu)?;
    if labels.point_count() != graph.len() {
        return Err(Error::ShapeMismatch { expected: graph.len(), actual: labels.point_count() });
    }
    let mut state = SplitBregmanState {
        u: labels.dense_values().to_vec(),
        d: EdgeField::zeros(graph),
        q: EdgeField::zeros(graph),
        iteration: 0,
        residual_history: Vec::new(),
    };
    if labels.is_complete() {
        return Ok((state.u.clone(), state));
    }

    let system = PinnedSystem::assemble(graph, labels, mu * mu)?;
    let sqrt_w: Vec<f64> = graph.edge_weights().iter().map(|&w| libm::sqrt(w)).collect();
    let mut free_u = system.gather(&state.u);

    for k in 1..=opts.max_bregman_iters {
        let rhs = u_step_rhs(graph, &system, labels, &sqrt_w, &state.d, &state.q, mu);
        let out = system.solve(&rhs, Some(&free_u), opts.cg)?;
        free_u = out.x;
        state.u = system.scatter(labels, &free_u);

        let dng_u = nonlocal_gradient(graph, &state.u, labels, mu)?;
        let mut d = dng_u.clone();
        shrink_rows(graph, &mut d, &state.q, opts.lambda);
        state.q = q_update(&state.q, &dng_u, &d)?;
        let residual = d.distance(&dng_u) / dng_u.norm().max(RESIDUAL_EPS);
        state.d = d;
        state.iteration = k;
        state.residual_history.push(residual);

        if !wntv_energy(graph, &state.u, labels, mu).is_finite() || !residual.is_finite() {
            return Err(Error::Diverged { iteration: k });
        }
        if residual < opts.bregman_tol {
            break;
        }
    }
    Ok((state.u.clone(), state))
}

/// Unweighted nonlocal TV: [`solve_wntv`] with `mu = 1`.
pub fn solve_ntv(graph: &SparseWeightGraph, labels: &LabelConstraint, opts: &SolverOptions) -> Result<Vec<f64>> {
    let opts = SolverOptions { mu: Some(1.0), ..*opts };
    solve_wntv(graph, labels, &opts).map(|(u, _)| u)
}
