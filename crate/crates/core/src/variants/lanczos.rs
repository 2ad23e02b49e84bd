//! Textbook Lanczos, as a comparison baseline.

use crate::dynamics::{default_tol, start_vector};
use crate::error::{Error, Result};
use crate::matrix::{gershgorin_bounds, CountingOperator, SparseSymMatrix};
use crate::solution::{EigenpairSet, Solution};
use crate::subspace::{jacobi_dense_eigen, DenseMatrix};
use crate::trace::{ConvergenceRecord, Trace};
use crate::vector::{axpy, dot, fix_sign, norm, scale};

/// How Ritz vectors are recovered, which fixes the matvec bill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LanczosMode {
    /// Keep every basis vector and reorthogonalize against all of them.
    /// One matvec per step.
    #[default]
    FullReorth,
    /// Keep only two basis vectors; rerun the identical recurrence to build
    /// the Ritz vectors. Two matvecs per step overall.
    TwoPass,
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DenseMatrix {
    let k = alphas.len();
    let mut t = DenseMatrix::zeros(k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

/// One three-term step: returns `(alpha, beta, next)`; `next` is
/// unnormalized.
fn recurrence(
    op: &CountingOperator<'_>,
    v: &[f64],
    prev: Option<(&[f64], f64)>,
) -> Result<(f64, Vec<f64>)> {
    let mut w = op.apply(v)?;
    let alpha = dot(v, &w);
    axpy(-alpha, v, &mut w);
    if let Some((u, beta)) = prev {
        axpy(-beta, u, &mut w);
    }
    Ok((alpha, w))
}

/// Number of eigenvalues of the tridiagonal matrix below `x`.
fn sturm_count(alphas: &[f64], betas: &[f64], x: f64, tiny: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, a) in alphas.iter().enumerate() {
        let off = if i == 0 { 0.0 } else { betas[i - 1] * betas[i - 1] / d };
        d = a - x - off;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenpair of the tridiagonal matrix, by bisection and inverse
/// iteration. The vector has unit norm.
fn lowest_tridiagonal(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let off = |i: usize| if i < k - 1 { betas[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = off(i) + if i > 0 { betas[i - 1].abs() } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    let size = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * size;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * tiny || mid == lo || mid == hi {
            break;
        }
        if sturm_count(alphas, betas, mid, tiny) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);

    // (T - shift) y = y_prev, solved by elimination without pivoting
    let shift = theta - 10.0 * tiny;
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        let mut diag = vec![0.0; k];
        let mut rhs = y.clone();
        for i in 0..k {
            diag[i] = alphas[i] - shift;
            if i > 0 {
                let l = betas[i - 1] / diag[i - 1];
                diag[i] -= l * betas[i - 1];
                rhs[i] -= l * rhs[i - 1];
            }
            if diag[i].abs() < tiny {
                diag[i] = tiny;
            }
        }
        for i in (0..k).rev() {
            let next = if i + 1 < k { betas[i] * y[i + 1] } else { 0.0 };
            y[i] = (rhs[i] - next) / diag[i];
        }
        let ny = norm(&y);
        scale(1.0 / ny, &mut y);
    }
    (theta, y)
}

/// Runs up to `m` Lanczos steps from `x0` and returns every Ritz pair of the
/// final tridiagonal matrix. Stops early on breakdown, where the Krylov space
/// is invariant and the pairs are exact.
pub fn lanczos_basic(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    m: usize,
    mode: LanczosMode,
    seed: u64,
) -> Result<Solution> {
    if m == 0 {
        return Err(Error::invalid("lanczos needs m >= 1"));
    }
    let n = a.dim();
    let bounds = gershgorin_bounds(a);
    let tol = default_tol(bounds);
    let breakdown = 1e-14 * bounds.lo.abs().max(bounds.hi.abs()).max(1.0);
    let op = CountingOperator::new(a);
    let v0 = start_vector(n, x0, seed)?;

    let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
    let mut prev: Option<Vec<f64>> = None;
    let mut cur = v0.clone();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut trace = Trace::new();
    let mut last_beta = 0.0;

    for j in 0..m.min(n) {
        let prev_pair = prev.as_deref().map(|u| (u, betas[j - 1]));
        let (alpha, mut w) = recurrence(&op, &cur, prev_pair)?;
        alphas.push(alpha);
        if mode == LanczosMode::FullReorth {
            for _pass in 0..2 {
                for b in &basis {
                    let h = dot(b, &w);
                    axpy(-h, b, &mut w);
                }
            }
        }
        let beta = norm(&w);
        last_beta = beta;
        let (theta, y) = lowest_tridiagonal(&alphas, &betas);
        trace.push(ConvergenceRecord {
            step: j,
            m: op.count(),
            lambda: theta,
            mu: (beta * y[y.len() - 1]).powi(2),
            dt: 1.0,
            lambda_tilde: theta,
        });
        if beta < breakdown || j + 1 == m.min(n) {
            break;
        }
        betas.push(beta);
        scale(1.0 / beta, &mut w);
        prev = Some(std::mem::replace(&mut cur, w));
        if mode == LanczosMode::FullReorth {
            basis.push(cur.clone());
        }
    }
    let steps = alphas.len();
    let ritz = jacobi_dense_eigen(&tridiagonal(&alphas, &betas))?;

    // Ritz vectors in the full space.
    let mut vectors = vec![vec![0.0; n]; steps];
    match mode {
        LanczosMode::FullReorth => {
            for (k, vec) in vectors.iter_mut().enumerate() {
                for (j, b) in basis.iter().take(steps).enumerate() {
                    axpy(ritz.vectors[k][j], b, vec);
                }
            }
        }
        LanczosMode::TwoPass => {
            let mut prev: Option<Vec<f64>> = None;
            let mut cur = v0;
            for j in 0..steps {
                for (k, vec) in vectors.iter_mut().enumerate() {
                    axpy(ritz.vectors[k][j], &cur, vec);
                }
                if j + 1 == steps {
                    break;
                }
                let prev_pair = prev.as_deref().map(|u| (u, betas[j - 1]));
                let (_, mut w) = recurrence(&op, &cur, prev_pair)?;
                scale(1.0 / betas[j], &mut w);
                prev = Some(std::mem::replace(&mut cur, w));
            }
        }
    }

    let mut pairs = EigenpairSet::default();
    for (k, mut vec) in vectors.into_iter().enumerate() {
        let nv = norm(&vec);
        if nv > 0.0 {
            scale(1.0 / nv, &mut vec);
        }
        fix_sign(&mut vec);
        let y = &ritz.vectors[k];
        let mu = (last_beta * y[y.len() - 1]).powi(2);
        pairs.push(ritz.values[k], vec, mu, mu <= tol);
    }
    if mode == LanczosMode::TwoPass {
        if let Some(last) = trace.last().copied() {
            trace.push(ConvergenceRecord {
                m: op.count(),
                ..last
            });
        }
    }
    Ok(Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag123() -> SparseSymMatrix {
        SparseSymMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn tridiagonal_lowest_pair() {
        let alphas = [2.0, 2.0, 2.0, 2.0];
        let betas = [-1.0, -1.0, -1.0];
        let (theta, y) = lowest_tridiagonal(&alphas, &betas);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((theta - exact).abs() < 1e-14);
        let t = tridiagonal(&alphas, &betas);
        let ty = t.matvec(&y);
        for (a, b) in ty.iter().zip(&y) {
            assert!((a - theta * b).abs() < 1e-12);
        }
        let (one, y1) = lowest_tridiagonal(&[3.5], &[]);
        assert_eq!((one, y1), (3.5, vec![1.0]));
    }

    #[test]
    fn complete_krylov_space_is_exact() {
        let x0 = [1.0, 1.0, 1.0];
        for mode in [LanczosMode::FullReorth, LanczosMode::TwoPass] {
            let sol = lanczos_basic(&diag123(), Some(&x0), 3, mode, 0).unwrap();
            assert_eq!(sol.pairs.len(), 3);
            for (k, v) in sol.pairs.values.iter().enumerate() {
                assert!((v - (k + 1) as f64).abs() < 1e-12);
                assert!((sol.pairs.vectors[k][k] - 1.0).abs() < 1e-10);
            }
            assert!(sol.pairs.all_converged());
        }
    }

    #[test]
    fn matvec_accounting() {
        let x0 = [1.0, 0.5, 0.25];
        let full = lanczos_basic(&diag123(), Some(&x0), 3, LanczosMode::FullReorth, 0).unwrap();
        let two = lanczos_basic(&diag123(), Some(&x0), 3, LanczosMode::TwoPass, 0).unwrap();
        assert_eq!(full.matvecs, 3);
        assert_eq!(two.matvecs, 5);
        assert_eq!(two.trace.last().unwrap().m, 5);
    }

    #[test]
    fn eigenvector_start_breaks_down() {
        let sol = lanczos_basic(&diag123(), Some(&[0.0, 1.0, 0.0]), 3, LanczosMode::FullReorth, 0)
            .unwrap();
        assert_eq!(sol.steps, 1);
        assert_eq!(sol.pairs.values, vec![2.0]);
        assert!(sol.converged());
    }

    #[test]
    fn one_step_is_rayleigh_quotient() {
        let x0 = [1.0, 2.0, 2.0];
        let sol = lanczos_basic(&diag123(), Some(&x0), 1, LanczosMode::FullReorth, 0).unwrap();
        assert_eq!(sol.pairs.len(), 1);
        assert!((sol.value() - (1.0 + 8.0 + 12.0) / 9.0).abs() < 1e-14);
        assert!((sol.vector()[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!(lanczos_basic(&diag123(), None, 0, LanczosMode::FullReorth, 0).is_err());
    }
}
