//! Semi-supervised classification by one-vs-all interpolation.
//!
//! For each class `i` an indicator is interpolated from the labeled set
//! (1 on points labeled `i`, 0 on the other labeled points); every unlabeled
//! point takes the class whose indicator is largest.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::graph::{build_weight_graph, GraphParams, SparseWeightGraph};
use crate::solver::{solve, LabelConstraint, SolverKind, SolverOptions};

/// A point cloud with ground-truth classes `0..classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub cloud: PointCloud,
    pub truth: Vec<usize>,
    pub classes: usize,
}

impl LabeledDataset {
    /// The class count is `max(truth) + 1`.
    pub fn new(cloud: PointCloud, truth: Vec<usize>) -> Result<Self> {
        let classes = truth.iter().max().map_or(0, |m| m + 1);
        Self::with_classes(cloud, truth, classes)
    }

    pub fn with_classes(cloud: PointCloud, truth: Vec<usize>, classes: usize) -> Result<Self> {
        if truth.len() != cloud.len() {
            return Err(Error::ShapeMismatch { expected: cloud.len(), actual: truth.len() });
        }
        if let Some(&bad) = truth.iter().find(|&&c| c >= classes) {
            return Err(Error::InvalidLabels(format!("class {bad} out of range for {classes} classes")));
        }
        Ok(Self { cloud, truth, classes })
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    /// Restriction to the given points, in the given order.
    pub fn subset(&self, points: &[usize]) -> Result<Self> {
        let dim = self.cloud.dim();
        let mut data = Vec::with_capacity(points.len() * dim);
        for &p in points {
            data.extend_from_slice(self.cloud.point(p));
        }
        let truth = points.iter().map(|&p| self.truth[p]).collect();
        Self::with_classes(PointCloud::new(data, dim)?, truth, self.classes)
    }

    fn members(&self) -> Vec<Vec<usize>> {
        let mut members = alloc::vec![Vec::new(); self.classes];
        for (i, &c) in self.truth.iter().enumerate() {
            members[c].push(i);
        }
        members
    }
}

/// Draws `count` labeled points uniformly without replacement.
///
/// With `stratified`, one point of every non-empty class is drawn first and
/// the rest uniformly from the remainder, so each class gets at least one
/// label; this needs `count` at least the number of non-empty classes.
/// Returns sorted indices.
pub fn sample_label_set(dataset: &LabeledDataset, count: usize, rng_seed: u64, stratified: bool) -> Result<Vec<usize>> {
    let n = dataset.len();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!("label count {count} not in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen = Vec::with_capacity(count);
    if stratified {
        let members = dataset.members();
        let present = members.iter().filter(|m| !m.is_empty()).count();
        if count < present {
            return Err(Error::InvalidParameter(format!(
                "stratified sampling needs at least {present} labels, got {count}"
            )));
        }
        for m in members.iter().filter(|m| !m.is_empty()) {
            chosen.push(m[rng.random_range(0..m.len())]);
        }
    }
    let mut taken = alloc::vec![false; n];
    chosen.iter().for_each(|&i| taken[i] = true);
    let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
    for j in index::sample(&mut rng, rest.len(), count - chosen.len()) {
        chosen.push(rest[j]);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Draws exactly `per_class` labeled points from every class.
pub fn sample_per_class(dataset: &LabeledDataset, per_class: usize, rng_seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen = Vec::with_capacity(per_class * dataset.classes);
    for (c, m) in dataset.members().iter().enumerate() {
        if m.len() < per_class {
            return Err(Error::InvalidParameter(format!("class {c} has only {} points", m.len())));
        }
        chosen.extend(index::sample(&mut rng, m.len(), per_class).into_iter().map(|j| m[j]));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SslOptions {
    pub solver: SolverKind,
    pub solver_options: SolverOptions,
    pub graph: GraphParams,
}

impl Default for SslOptions {
    fn default() -> Self {
        Self { solver: SolverKind::Wntv, solver_options: SolverOptions::default(), graph: GraphParams::POINT_CLOUD }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SslOutcome {
    pub predictions: Vec<usize>,
    /// One interpolated indicator per class.
    pub interpolants: Vec<Vec<f64>>,
    /// Bregman iterations per class; 0 for the quadratic solvers.
    pub bregman_iterations: Vec<usize>,
    /// Relative Bregman residual after each iteration, per class.
    pub residual_histories: Vec<Vec<f64>>,
}

/// Builds the weight graph of `dataset` and classifies it.
pub fn run_ssl(dataset: &LabeledDataset, labeled: &[usize], opts: &SslOptions) -> Result<SslOutcome> {
    let graph = build_weight_graph(&dataset.cloud, opts.graph)?;
    run_ssl_on_graph(&graph, &dataset.truth, dataset.classes, labeled, opts.solver, &opts.solver_options)
}

/// Classifies on a prebuilt graph. `truth` is only read at `labeled`.
pub fn run_ssl_on_graph(
    graph: &SparseWeightGraph,
    truth: &[usize],
    classes: usize,
    labeled: &[usize],
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<SslOutcome> {
    let n = graph.len();
    if truth.len() != n {
        return Err(Error::ShapeMismatch { expected: n, actual: truth.len() });
    }
    if labeled.is_empty() {
        return Err(Error::InvalidLabels("no labeled points".into()));
    }
    if let Some(&i) = labeled.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidLabels(format!("labeled index {i} out of range")));
    }
    if let Some(&i) = labeled.iter().find(|&&i| truth[i] >= classes) {
        return Err(Error::InvalidLabels(format!("point {i} has class {} of {classes}", truth[i])));
    }
    // (interpolant, (Bregman iterations, residual history)) per class.
    type ClassResult = (Vec<f64>, (usize, Vec<f64>));
    let run = |class: usize| -> Result<ClassResult> {
        let labels = LabelConstraint::new(n, labeled.iter().map(|&i| (i, if truth[i] == class { 1.0 } else { 0.0 })))?;
        let s = solve(solver, graph, &labels, opts)?;
        Ok((s.u, (s.iterations, s.residual_history)))
    };
    #[cfg(feature = "parallel")]
    let results: Result<Vec<_>> = {
        use rayon::prelude::*;
        (0..classes).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<_>> = (0..classes).map(run).collect();

    let (interpolants, traces): (Vec<_>, Vec<_>) = results?.into_iter().unzip();
    let (bregman_iterations, residual_histories) = traces.into_iter().unzip();
    let mut predictions = argmax_classes(&interpolants, n);
    for &i in labeled {
        predictions[i] = truth[i];
    }
    Ok(SslOutcome { predictions, interpolants, bregman_iterations, residual_histories })
}

/// Per point, the class with the largest interpolant; ties go to the
/// smallest class index.
pub fn argmax_classes(interpolants: &[Vec<f64>], n: usize) -> Vec<usize> {
    (0..n)
        .map(|x| {
            let mut best = 0;
            for (c, u) in interpolants.iter().enumerate().skip(1) {
                if u[x] > interpolants[best][x] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Percentage of points (excluding `exclude`) where `pred` matches `truth`.
pub fn accuracy(pred: &[usize], truth: &[usize], exclude: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch { expected: truth.len(), actual: pred.len() });
    }
    let mut skip = alloc::vec![false; truth.len()];
    for &i in exclude {
        if i < skip.len() {
            skip[i] = true;
        }
    }
    let (mut correct, mut total) = (0usize, 0usize);
    for i in (0..truth.len()).filter(|&i| !skip[i]) {
        total += 1;
        correct += usize::from(pred[i] == truth[i]);
    }
    if total == 0 {
        return Err(Error::InvalidParameter("no points to evaluate".into()));
    }
    Ok(100.0 * correct as f64 / total as f64)
}
