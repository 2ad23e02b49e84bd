//! Dense reference eigensolver (nalgebra) shared by the integration tests.
#![allow(dead_code)]

use inflation::SparseSymMatrix;
use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues ascending, with unit eigenvectors in the same order.
pub struct Oracle {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn dense_eigen(rows: &[Vec<f64>]) -> Oracle {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Oracle {
        values: idx.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: idx
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    }
}

pub fn oracle(a: &SparseSymMatrix) -> Oracle {
    dense_eigen(&a.to_dense())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|Mv - ev|` for a dense row-major matrix.
pub fn dense_residual(rows: &[Vec<f64>], v: &[f64], e: f64) -> f64 {
    rows.iter()
        .zip(v)
        .map(|(r, vi)| (dot(r, v) - e * vi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Deterministic symmetric matrix with entries in [-1, 1].
pub fn random_symmetric(n: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random::<f64>() * 2.0 - 1.0;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Diagonal family with `e0 = 0`, `e1 = g`, the rest evenly spaced up to 4.
pub fn gap_family(n: usize, g: f64) -> SparseSymMatrix {
    let mut d = vec![0.0, g];
    let rest = n - 2;
    for k in 1..=rest {
        d.push(g + (4.0 - g) * k as f64 / rest as f64);
    }
    SparseSymMatrix::diagonal(&d).unwrap()
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    inflation::dynamics::fit_slope(xs, ys)
}
