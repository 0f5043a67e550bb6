//! Variational interpolation on weighted point-cloud graphs.
//!
//! Given a point cloud and values on a labeled subset, the solvers in
//! [`solver`] extend those values to every point by minimizing one of four
//! graph energies:
//!
//! * graph Laplacian (GL), the plain Dirichlet energy;
//! * weighted nonlocal Laplacian (WNLL), GL with labeled rows up-weighted;
//! * nonlocal total variation (NTV), the sum of per-point gradient norms;
//! * weighted nonlocal total variation (WNTV), NTV with labeled rows
//!   up-weighted by `|V|/|S|`, solved by split Bregman iteration.
//!
//! The graph is a self-tuning Gaussian kNN graph ([`graph`]). On top of the
//! solvers sit patch-space image inpainting and colorization ([`pipeline`])
//! and a semi-supervised classification harness ([`ssl`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! logging live in the `wntv` companion crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cloud;
pub mod error;
pub mod graph;
pub mod knn;
pub mod metrics;
pub mod patch;
pub mod pipeline;
pub mod solver;
pub mod ssl;

pub use cloud::PointCloud;
pub use error::{Error, Result};
pub use graph::{build_weight_graph, GraphParams, SparseWeightGraph, UnionEdge};
pub use knn::{knn_search, Neighbor, NeighborLists};
pub use metrics::psnr;
pub use patch::{ImageBuffer, PatchConfig, PatchSet};
pub use solver::{
    solve, CgOptions, EdgeField, LabelConstraint, Solution, SolverKind, SolverOptions, SplitBregmanState,
};
