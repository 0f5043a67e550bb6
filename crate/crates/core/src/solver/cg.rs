//! Jacobi-preconditioned conjugate gradient for symmetric positive definite
//! operators given as matrix-free callbacks.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual `|Ax - b| / |b|` at which to stop.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Achieved relative residual of the returned `x`.
    pub residual: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `apply(x) = rhs` by plain conjugate gradient from `x = 0`.
pub fn cg_solve<F>(apply: F, rhs: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    pcg_solve(apply, None, rhs, None, CgOptions { tol, max_iters }).map(|o| o.x)
}

/// Preconditioned conjugate gradient.
///
/// `inv_diag` is the inverse of the operator diagonal (Jacobi); `x0` is an
/// optional starting point. Convergence is declared on the true residual
/// `rhs - apply(x)`, not only the recursively updated one.
pub fn pcg_solve<F>(
    mut apply: F,
    inv_diag: Option<&[f64]>,
    rhs: &[f64],
    x0: Option<&[f64]>,
    opts: CgOptions,
) -> Result<CgOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(CgOutcome { x: alloc::vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let precondition = |r: &[f64], z: &mut [f64]| match inv_diag {
        Some(m) => z.iter_mut().zip(r).zip(m).for_each(|((z, r), m)| *z = r * m),
        None => z.copy_from_slice(r),
    };

    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => return Err(Error::ShapeMismatch { expected: n, actual: x0.len() }),
        None => alloc::vec![0.0; n],
    };
    let mut r = rhs.to_vec();
    let mut ap = alloc::vec![0.0; n];
    if x0.is_some() {
        apply(&x, &mut ap);
        r.iter_mut().zip(&ap).for_each(|(r, a)| *r -= a);
    }
    let mut rel = norm(&r) / bnorm;
    if rel <= opts.tol {
        return Ok(CgOutcome { x, iterations: 0, residual: rel });
    }
    let mut z = alloc::vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for it in 1..=opts.max_iters {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0 && pap.is_finite()) {
            // Operator is not positive definite on the Krylov space.
            return Err(Error::CgNotConverged { iterations: it, residual: rel });
        }
        let alpha = rz / pap;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, a)| *r -= alpha * a);
        rel = norm(&r) / bnorm;
        if rel <= opts.tol {
            apply(&x, &mut ap);
            r.iter_mut().zip(rhs.iter().zip(&ap)).for_each(|(r, (b, a))| *r = b - a);
            rel = norm(&r) / bnorm;
            if rel <= opts.tol {
                return Ok(CgOutcome { x, iterations: it, residual: rel });
            }
            // Recursive residual drifted; restart from the true one.
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    Err(Error::CgNotConverged { iterations: opts.max_iters, residual: rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_in_one_iteration() {
        let rhs = vec![1.0, -2.0, 3.5];
        let out = pcg_solve(|v, o| o.copy_from_slice(v), None, &rhs, None, CgOptions::default()).unwrap();
        assert_eq!(out.x, rhs);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn diagonal_two_by_two() {
        let x = cg_solve(
            |v, o| {
                o[0] = 2.0 * v[0];
                o[1] = 3.0 * v[1];
            },
            &[2.0, 3.0],
            1e-12,
            10,
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let out = pcg_solve(|_, _| panic!("must not apply"), None, &[0.0; 4], None, CgOptions::default()).unwrap();
        assert_eq!(out.x, vec![0.0; 4]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let diag = [1.0, 10.0, 100.0, 1000.0];
        let err =
            cg_solve(|v, o| o.iter_mut().zip(v).zip(&diag).for_each(|((o, v), d)| *o = v * d), &[1.0; 4], 1e-14, 1)
                .unwrap_err();
        match err {
            Error::CgNotConverged { iterations, residual } => {
                assert_eq!(iterations, 1);
                assert!(residual > 1e-14);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn random_spd_matches_dense_solve() {
        let n = 50;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let b = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &b * b.transpose() + nalgebra::DMatrix::<f64>::identity(n, n) * 0.5;
        let rhs = nalgebra::DVector::<f64>::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let expect = a.clone().lu().solve(&rhs).unwrap();
        let inv_diag: Vec<f64> = (0..n).map(|i| 1.0 / a[(i, i)]).collect();
        for pre in [None, Some(inv_diag.as_slice())] {
            let out = pcg_solve(
                |v, o| {
                    let y = &a * nalgebra::DVector::from_column_slice(v);
                    o.copy_from_slice(y.as_slice());
                },
                pre,
                rhs.as_slice(),
                None,
                CgOptions { tol: 1e-10, max_iters: 500 },
            )
            .unwrap();
            let got = nalgebra::DVector::from_vec(out.x);
            assert!((got - &expect).norm() / expect.norm() < 1e-8);
        }
    }

    #[test]
    fn warm_start_at_solution_takes_no_iterations() {
        let out = pcg_solve(
            |v, o| o.iter_mut().zip(v).for_each(|(o, v)| *o = 4.0 * v),
            None,
            &[4.0, 8.0],
            Some(&[1.0, 2.0]),
            CgOptions::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![1.0, 2.0]);
    }
}
