//! Self-tuning Gaussian weight graphs.
//!
//! Each point `x` gets a bandwidth `sigma(x)` equal to the distance to its
//! `r_sigma`-th nearest neighbor, and directed edges to its `k_sparsify`
//! nearest neighbors weighted by `exp(-|x - y|^2 / sigma(x)^2)`. The graph is
//! directed because `sigma` is per point; solvers that need both directions
//! read the symmetrized pattern through [`SparseWeightGraph::union_neighbors`].

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::knn::knn_search;

/// kNN sparsification and bandwidth parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphParams {
    pub k_sparsify: usize,
    pub r_sigma: usize,
}

impl GraphParams {
    /// 20 neighbors, sigma from the 10th: the digit-classification recipe.
    pub const POINT_CLOUD: Self = Self { k_sparsify: 20, r_sigma: 10 };
    /// 50 neighbors, sigma from the 20th: the image-patch recipe.
    pub const PATCHES: Self = Self { k_sparsify: 50, r_sigma: 20 };
}

/// One entry of the symmetrized adjacency of a point `x`.
///
/// `forward` is `w(x, y)` and `backward` is `w(y, x)`; a direction that is
/// not stored has weight 0 and no edge id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionEdge {
    pub neighbor: usize,
    pub forward: f64,
    pub backward: f64,
    pub forward_edge: Option<usize>,
    pub backward_edge: Option<usize>,
}

/// Directed sparse weight graph in row-compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeightGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    sigma: Vec<f64>,
    union_offsets: Vec<usize>,
    union: Vec<UnionEdge>,
}

impl SparseWeightGraph {
    /// Builds a graph from explicit out-edge rows `(target, weight)`.
    ///
    /// Weights must lie in `(0, 1]`; self loops and repeated targets within a
    /// row are rejected. `sigma` may be empty, in which case every bandwidth
    /// is recorded as 1.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, sigma: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no points".into()));
        }
        let sigma = if sigma.is_empty() { alloc::vec![1.0; n] } else { sigma };
        if sigma.len() != n {
            return Err(Error::ShapeMismatch { expected: n, actual: sigma.len() });
        }
        if let Some(x) = sigma.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::DegenerateBandwidth { point: x });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (x, row) in rows.iter().enumerate() {
            for (pos, &(y, w)) in row.iter().enumerate() {
                if y >= n {
                    return Err(Error::InvalidGraph(format!("edge {x}->{y} out of range")));
                }
                if y == x {
                    return Err(Error::InvalidGraph(format!("self loop at {x}")));
                }
                if !(w > 0.0 && w <= 1.0) {
                    return Err(Error::InvalidGraph(format!("weight {w} on edge {x}->{y} not in (0, 1]")));
                }
                if row[..pos].iter().any(|&(z, _)| z == y) {
                    return Err(Error::InvalidGraph(format!("duplicate edge {x}->{y}")));
                }
                targets.push(y);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let (union_offsets, union) = symmetrize(n, &offsets, &targets, &weights);
        Ok(Self { offsets, targets, weights, sigma, union_offsets, union })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Number of stored directed edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Range of edge ids leaving `x`.
    #[inline]
    pub fn edge_range(&self, x: usize) -> Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    #[inline]
    pub fn targets(&self, x: usize) -> &[usize] {
        &self.targets[self.edge_range(x)]
    }

    #[inline]
    pub fn weights(&self, x: usize) -> &[f64] {
        &self.weights[self.edge_range(x)]
    }

    pub fn edge_targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// The union-pattern row of `x`, sorted by neighbor index.
    #[inline]
    pub fn union_neighbors(&self, x: usize) -> &[UnionEdge] {
        &self.union[self.union_offsets[x]..self.union_offsets[x + 1]]
    }

    /// Weight of the stored edge `x -> y`, or 0.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.targets(x).iter().position(|&t| t == y).map_or(0.0, |p| self.weights(x)[p])
    }
}

fn symmetrize(n: usize, offsets: &[usize], targets: &[usize], weights: &[f64]) -> (Vec<usize>, Vec<UnionEdge>) {
    let mut rows: Vec<Vec<UnionEdge>> = alloc::vec![Vec::new(); n];
    for x in 0..n {
        for e in offsets[x]..offsets[x + 1] {
            let y = targets[e];
            rows[x].push(UnionEdge {
                neighbor: y,
                forward: weights[e],
                backward: 0.0,
                forward_edge: Some(e),
                backward_edge: None,
            });
            rows[y].push(UnionEdge {
                neighbor: x,
                forward: 0.0,
                backward: weights[e],
                forward_edge: None,
                backward_edge: Some(e),
            });
        }
    }
    let mut union_offsets = Vec::with_capacity(n + 1);
    let mut union = Vec::new();
    union_offsets.push(0);
    for mut row in rows {
        row.sort_by_key(|u| (u.neighbor, u.forward_edge.is_none()));
        let mut merged: Vec<UnionEdge> = Vec::with_capacity(row.len());
        for entry in row {
            match merged.last_mut() {
                Some(last) if last.neighbor == entry.neighbor => {
                    if entry.forward_edge.is_some() {
                        last.forward = entry.forward;
                        last.forward_edge = entry.forward_edge;
                    }
                    if entry.backward_edge.is_some() {
                        last.backward = entry.backward;
                        last.backward_edge = entry.backward_edge;
                    }
                }
                _ => merged.push(entry),
            }
        }
        union.extend(merged);
        union_offsets.push(union.len());
    }
    (union_offsets, union)
}

/// Builds the sparse Gaussian kNN graph of `cloud`.
///
/// Requires `1 <= r_sigma <= k_sparsify <= n - 1`. A point whose `r_sigma`-th
/// neighbor is at distance 0 has no usable bandwidth and is reported as
/// [`Error::DegenerateBandwidth`]. Edges whose weight underflows to 0 are not
/// stored.
pub fn build_weight_graph(cloud: &PointCloud, params: GraphParams) -> Result<SparseWeightGraph> {
    let GraphParams { k_sparsify, r_sigma } = params;
    if r_sigma == 0 || r_sigma > k_sparsify {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= r_sigma <= k_sparsify, got r_sigma = {r_sigma}, k_sparsify = {k_sparsify}"
        )));
    }
    let knn = knn_search(cloud, k_sparsify)?;
    let n = cloud.len();
    let mut sigma = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for x in 0..n {
        let nbrs = knn.neighbors(x);
        let s = nbrs[r_sigma - 1].distance;
        if s <= 0.0 {
            return Err(Error::DegenerateBandwidth { point: x });
        }
        let s2 = s * s;
        let row: Vec<(usize, f64)> = nbrs
            .iter()
            .map(|nb| (nb.index, libm::exp(-(nb.distance * nb.distance) / s2)))
            .filter(|&(_, w)| w > 0.0)
            .collect();
        sigma.push(s);
        rows.push(row);
    }
    SparseWeightGraph::from_rows(rows, sigma)
}
