//! Random instances and dense reference solvers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wntv_core::{build_weight_graph, EdgeField, GraphParams, LabelConstraint, PointCloud, SparseWeightGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Gaussian kNN graph on `n` points in the plane.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, k: usize) -> SparseWeightGraph {
    let data: Vec<f64> = (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect();
    let cloud = PointCloud::new(data, 2).unwrap();
    let r = rng.random_range(1..=k);
    build_weight_graph(&cloud, GraphParams { k_sparsify: k, r_sigma: r }).unwrap()
}

/// Connected components of the symmetrized pattern, by label-free flood fill.
pub fn components(g: &SparseWeightGraph) -> Vec<usize> {
    let n = g.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = next;
        while let Some(x) = stack.pop() {
            for e in g.union_neighbors(x) {
                if comp[e.neighbor] == usize::MAX {
                    comp[e.neighbor] = next;
                    stack.push(e.neighbor);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Random labels with at least one labeled point per component and at least
/// one unlabeled point overall.
pub fn random_labels(rng: &mut ChaCha8Rng, g: &SparseWeightGraph, frac: f64) -> LabelConstraint {
    let n = g.len();
    let comp = components(g);
    let mut labeled = vec![false; n];
    for c in 0..=*comp.iter().max().unwrap() {
        let members: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
        labeled[members[rng.random_range(0..members.len())]] = true;
    }
    for l in labeled.iter_mut() {
        if rng.random_bool(frac) {
            *l = true;
        }
    }
    if labeled.iter().all(|&l| l) {
        let free = (0..n).find(|&i| comp.iter().filter(|&&c| c == comp[i]).count() > 1).unwrap_or(0);
        labeled[free] = false;
    }
    LabelConstraint::new(n, (0..n).filter(|&i| labeled[i]).map(|i| (i, rng.random_range(-2.0..2.0)))).unwrap()
}

pub fn random_field(rng: &mut ChaCha8Rng, g: &SparseWeightGraph) -> EdgeField {
    EdgeField::from_vec(g, (0..g.edge_count()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// Dense edge-difference matrix: row `e = (x -> y)` holds `s(x) sqrt(w)` at
/// column `x` and `-s(x) sqrt(w)` at column `y`.
pub fn difference_matrix(g: &SparseWeightGraph, row_scale: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(g.edge_count(), g.len());
    for x in 0..g.len() {
        for (e, (&y, &w)) in g.edge_range(x).zip(g.targets(x).iter().zip(g.weights(x))) {
            let v = row_scale(x) * w.sqrt();
            m[(e, x)] += v;
            m[(e, y)] -= v;
        }
    }
    m
}

/// Minimizes `|target - M u|^2` over `u` with `u = g` on the labeled set,
/// by an SVD least-squares solve on the free columns (the normal equations
/// lose pivots when some weights are tiny).
pub fn pinned_least_squares(m: &DMatrix<f64>, target: &DVector<f64>, labels: &LabelConstraint) -> Vec<f64> {
    let n = m.ncols();
    let free: Vec<usize> = (0..n).filter(|&i| !labels.is_labeled(i)).collect();
    let mut fixed = DVector::zeros(n);
    for (&i, &v) in labels.indices().iter().zip(labels.values()) {
        fixed[i] = v;
    }
    let rhs_full = target - m * &fixed;
    let mf = DMatrix::from_fn(m.nrows(), free.len(), |r, c| m[(r, free[c])]);
    let sol = mf.svd(true, true).solve(&rhs_full, 0.0).expect("SVD solve");
    let mut u: Vec<f64> = fixed.iter().copied().collect();
    for (c, &i) in free.iter().enumerate() {
        u[i] = sol[c];
    }
    u
}

/// Condition number of `M` restricted to the unlabeled columns.
pub fn free_condition(m: &DMatrix<f64>, labels: &LabelConstraint) -> f64 {
    let free: Vec<usize> = (0..m.ncols()).filter(|&i| !labels.is_labeled(i)).collect();
    let mf = DMatrix::from_fn(m.nrows(), free.len(), |r, c| m[(r, free[c])]);
    let sv = mf.singular_values();
    sv.max() / sv.min()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

/// Weighted TV energy evaluated directly from the definition.
pub fn tv_energy(g: &SparseWeightGraph, u: &[f64], labels: &LabelConstraint, mu: f64) -> f64 {
    (0..g.len())
        .map(|x| {
            let s: f64 = g.targets(x).iter().zip(g.weights(x)).map(|(&y, &w)| w * (u[x] - u[y]).powi(2)).sum();
            let c = if labels.is_labeled(x) { mu } else { 1.0 };
            c * s.sqrt()
        })
        .sum()
}

/// Projected subgradient descent on the weighted TV energy with `u = g` on
/// the labeled set. Returns the best energy seen.
pub fn subgradient_tv(g: &SparseWeightGraph, labels: &LabelConstraint, mu: f64, iters: usize) -> f64 {
    let n = g.len();
    let m = difference_matrix(g, |_| 1.0);
    let mut u = pinned_least_squares(&m, &DVector::zeros(m.nrows()), labels);
    let mut best = tv_energy(g, &u, labels, mu);
    let mut grad = vec![0.0; n];
    let step0 = 0.1;
    for k in 1..=iters {
        grad.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..n {
            let s: f64 = g.targets(x).iter().zip(g.weights(x)).map(|(&y, &w)| w * (u[x] - u[y]).powi(2)).sum();
            if s == 0.0 {
                continue;
            }
            let c = if labels.is_labeled(x) { mu } else { 1.0 } / s.sqrt();
            for (&y, &w) in g.targets(x).iter().zip(g.weights(x)) {
                let t = c * w * (u[x] - u[y]);
                grad[x] += t;
                grad[y] -= t;
            }
        }
        for &i in labels.indices() {
            grad[i] = 0.0;
        }
        let gn = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn == 0.0 {
            break;
        }
        let step = step0 / (k as f64).sqrt() / gn;
        u.iter_mut().zip(&grad).for_each(|(u, g)| *u -= step * g);
        best = best.min(tv_energy(g, &u, labels, mu));
    }
    best
}
