//! Solvers checked against dense reference computations.

mod common;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use wntv_core::solver::{
    d_subproblem, nonlocal_gradient, shrink, solve_gl, solve_ntv, solve_wnll, solve_wntv, u_subproblem, wntv_energy,
};
use wntv_core::{solve, CgOptions, EdgeField, LabelConstraint, SolverKind, SolverOptions};

const TIGHT: CgOptions = CgOptions { tol: 1e-12, max_iters: 5000 };

#[test]
fn u_subproblem_matches_dense_least_squares() {
    let mut r = rng(11);
    for case in 0..50 {
        let n = r.random_range(6..=30);
        let k = r.random_range(2..=5);
        let g = random_graph(&mut r, n, k);
        let labels = random_labels(&mut r, &g, 0.25);
        let d = random_field(&mut r, &g);
        let q = random_field(&mut r, &g);
        let mu = [1.0, 3.0, labels.default_mu()][case % 3];

        let u = u_subproblem(&g, &labels, &d, &q, mu, TIGHT).unwrap();
        let m = difference_matrix(&g, |x| if labels.is_labeled(x) { mu } else { 1.0 });
        let target = DVector::from_iterator(g.edge_count(), d.as_slice().iter().zip(q.as_slice()).map(|(d, q)| d - q));
        let expect = pinned_least_squares(&m, &target, &labels);
        assert!(rel_err(&u, &expect) <= 1e-7, "case {case}: {}", rel_err(&u, &expect));
        for (&i, &v) in labels.indices().iter().zip(labels.values()) {
            assert_eq!(u[i], v);
        }
    }
}

#[test]
fn gl_and_wnll_match_dense_quadratic_minimizers() {
    let mut r = rng(12);
    for _ in 0..20 {
        let g = random_graph(&mut r, 30, 5);
        let labels = random_labels(&mut r, &g, 0.2);
        let zero = DVector::zeros(g.edge_count());

        let gl = solve_gl(&g, &labels, TIGHT).unwrap();
        let expect = pinned_least_squares(&difference_matrix(&g, |_| 1.0), &zero, &labels);
        assert!(rel_err(&gl, &expect) <= 1e-8);

        let mu = 5.0;
        let wnll = solve_wnll(&g, &labels, mu, TIGHT).unwrap();
        // mu on a squared row is sqrt(mu) on the difference operator.
        let m = difference_matrix(&g, |x| if labels.is_labeled(x) { mu.sqrt() } else { 1.0 });
        let expect = pinned_least_squares(&m, &zero, &labels);
        assert!(rel_err(&wnll, &expect) <= 1e-8);
    }
}

#[test]
fn three_point_path() {
    let g =
        wntv_core::SparseWeightGraph::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0), (2, 1.0)], vec![(1, 1.0)]], vec![])
            .unwrap();
    let labels = LabelConstraint::new(3, [(0, 0.0), (2, 1.0)]).unwrap();
    for kind in SolverKind::ALL {
        let u = solve(kind, &g, &labels, &SolverOptions { cg: TIGHT, ..Default::default() }).unwrap().u;
        assert_eq!((u[0], u[2]), (0.0, 1.0));
        if !kind.is_total_variation() {
            assert!((u[1] - 0.5).abs() < 1e-12, "{kind}: {}", u[1]);
        }
    }
}

#[test]
fn zero_split_variables_reduce_u_step_to_gl() {
    let mut r = rng(13);
    for _ in 0..10 {
        let g = random_graph(&mut r, 25, 4);
        let labels = random_labels(&mut r, &g, 0.2);
        let zero = EdgeField::zeros(&g);
        let u = u_subproblem(&g, &labels, &zero, &zero, 1.0, TIGHT).unwrap();
        let gl = solve_gl(&g, &labels, TIGHT).unwrap();
        assert!(rel_err(&u, &gl) < 1e-10);
    }
}

#[test]
fn solver_reductions() {
    let mut r = rng(14);
    for _ in 0..20 {
        let g = random_graph(&mut r, 25, 5);
        let labels = random_labels(&mut r, &g, 0.15);
        let a = solve_wnll(&g, &labels, 1.0, TIGHT).unwrap();
        let b = solve_gl(&g, &labels, TIGHT).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10));

        let opts = SolverOptions { mu: Some(1.0), cg: TIGHT, ..Default::default() };
        let (w, _) = solve_wntv(&g, &labels, &opts).unwrap();
        let n = solve_ntv(&g, &labels, &SolverOptions { mu: Some(7.0), ..opts }).unwrap();
        assert!(w.iter().zip(&n).all(|(x, y)| (x - y).abs() <= 1e-10));
    }
}

#[test]
fn shift_equivariance() {
    let mut r = rng(15);
    for kind in SolverKind::ALL {
        let g = random_graph(&mut r, 20, 4);
        let labels = random_labels(&mut r, &g, 0.3);
        let opts = SolverOptions { cg: TIGHT, max_bregman_iters: 200, bregman_tol: 1e-9, ..Default::default() };
        let base = solve(kind, &g, &labels, &opts).unwrap().u;
        let c = 3.25;
        let shifted = solve(kind, &g, &labels.shifted(c), &opts).unwrap().u;
        for (a, b) in base.iter().zip(&shifted) {
            assert!((b - a - c).abs() < 1e-7, "{kind}: {a} + {c} vs {b}");
        }
    }
}

#[test]
fn constraints_hold_bitwise() {
    let mut r = rng(16);
    let g = random_graph(&mut r, 30, 5);
    let labels = random_labels(&mut r, &g, 0.2);
    for kind in SolverKind::ALL {
        let u = solve(kind, &g, &labels, &SolverOptions::default()).unwrap().u;
        for (&i, &v) in labels.indices().iter().zip(labels.values()) {
            assert_eq!(u[i].to_bits(), v.to_bits());
        }
    }
}

#[test]
fn energy_is_sum_of_gradient_row_norms() {
    let mut r = rng(17);
    for _ in 0..10 {
        let g = random_graph(&mut r, 20, 4);
        let labels = random_labels(&mut r, &g, 0.3);
        let u: Vec<f64> = (0..20).map(|_| r.random_range(-1.0..1.0)).collect();
        let mu = labels.default_mu();
        let dng = nonlocal_gradient(&g, &u, &labels, mu).unwrap();
        let rows: f64 = (0..20).map(|x| dng.row(&g, x).iter().map(|v| v * v).sum::<f64>().sqrt()).sum();
        let e = wntv_energy(&g, &u, &labels, mu);
        assert!((e - rows).abs() <= 1e-12 * e.max(1.0));
        assert!((e - tv_energy(&g, &u, &labels, mu)).abs() <= 1e-12 * e.max(1.0));
        // Constant functions have no variation.
        assert_eq!(wntv_energy(&g, &[0.7; 20], &labels, mu), 0.0);
    }
}

#[test]
fn d_step_without_threshold_passes_through() {
    let mut r = rng(18);
    let g = random_graph(&mut r, 20, 4);
    let labels = random_labels(&mut r, &g, 0.3);
    let u: Vec<f64> = (0..20).map(|_| r.random_range(-1.0..1.0)).collect();
    let q = random_field(&mut r, &g);
    let mu = labels.default_mu();
    let d = d_subproblem(&g, &u, &q, &labels, mu, 1e12).unwrap();
    let dng = nonlocal_gradient(&g, &u, &labels, mu).unwrap();
    for e in 0..g.edge_count() {
        assert!((d[e] - (dng[e] + q[e])).abs() <= 1e-6);
    }
    let flat = d_subproblem(&g, &[2.0; 20], &EdgeField::zeros(&g), &labels, mu, 1.0).unwrap();
    assert!(flat.as_slice().iter().all(|&v| v == 0.0));
}

#[test]
fn wntv_with_unit_weight_approaches_subgradient_optimum() {
    let mut r = rng(19);
    let mut checked = 0;
    while checked < 4 {
        let n = r.random_range(8..=15);
        let g = random_graph(&mut r, n, 4);
        let labels = random_labels(&mut r, &g, 0.2);
        let oracle = subgradient_tv(&g, &labels, 1.0, 20_000);
        if oracle < 1e-6 {
            continue;
        }
        let opts = SolverOptions {
            mu: Some(1.0),
            max_bregman_iters: 5000,
            bregman_tol: 1e-10,
            cg: TIGHT,
            ..Default::default()
        };
        let (u, _) = solve_wntv(&g, &labels, &opts).unwrap();
        let e = wntv_energy(&g, &u, &labels, 1.0);
        assert!(e <= oracle * (1.0 + 1e-3), "split Bregman {e} vs subgradient {oracle}");
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shrink_norm_and_direction(z in prop::collection::vec(-10.0f64..10.0, 2..=10), gamma in 0.0f64..15.0) {
        let s = shrink(&z, gamma);
        let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((ns - (nz - gamma).max(0.0)).abs() <= 1e-12 * nz.max(1.0));
        for (a, b) in z.iter().zip(&s) {
            prop_assert!(a * b >= 0.0);
        }
        prop_assert_eq!(shrink(&z, 0.0), z);
    }

    #[test]
    fn shrink_minimizes_prox_objective(z0 in -3.0f64..3.0, z1 in -3.0f64..3.0, gamma in 0.0f64..3.0) {
        let f = |d: [f64; 2]| gamma * (d[0] * d[0] + d[1] * d[1]).sqrt() + 0.5 * ((d[0] - z0).powi(2) + (d[1] - z1).powi(2));
        let s = shrink(&[z0, z1], gamma);
        let at = f([s[0], s[1]]);
        // Coarse grid, then a fine grid around the coarse winner.
        let grid = |c: [f64; 2], h: f64, half: i32| {
            let mut best = (f64::INFINITY, c);
            for i in -half..=half {
                for j in -half..=half {
                    let d = [c[0] + i as f64 * h, c[1] + j as f64 * h];
                    let v = f(d);
                    if v < best.0 {
                        best = (v, d);
                    }
                }
            }
            best
        };
        let (_, coarse) = grid([0.0, 0.0], 0.02, 150);
        let (best, _) = grid(coarse, 2e-4, 200);
        prop_assert!(at <= best + 1e-12);
        prop_assert!((best - at).abs() <= 1e-4);
    }
}
