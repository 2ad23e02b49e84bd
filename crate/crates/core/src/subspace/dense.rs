//! Small dense symmetric matrices and a cyclic Jacobi eigensolver for the
//! projected problems.

use crate::error::{Error, Result};
use crate::solution::EigenpairSet;
use crate::vector::{dot, fix_sign};

const MAX_SWEEPS: usize = 100;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: r.len(),
                });
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn off_diagonal_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Pairs come back ascending with sign-normalized unit vectors.
pub fn jacobi_dense_eigen(m: &DenseMatrix) -> Result<EigenpairSet> {
    let n = m.dim();
    let scale = m.frobenius();
    if !scale.is_finite() {
        return Err(Error::NonFinite("dense matrix"));
    }
    if m.max_asymmetry() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::invalid("dense matrix is not symmetric"));
    }
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    // columns of v are the eigenvectors
    let mut v = DenseMatrix::identity(n);
    let target = (1e-15 * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        if a.off_diagonal_sq() <= target {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // skip entries already negligible against both diagonals
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()).max(scale * 1e-300)
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let np = arp - s * (arq + tau * arp);
                        let nq = arq + s * (arp - tau * arq);
                        a[(r, p)] = np;
                        a[(p, r)] = np;
                        a[(r, q)] = nq;
                        a[(q, r)] = nq;
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut pairs = EigenpairSet::default();
    for k in 0..n {
        let mut vec: Vec<f64> = (0..n).map(|r| v[(r, k)]).collect();
        fix_sign(&mut vec);
        let e = a[(k, k)];
        let mv = m.matvec(&vec);
        let res: f64 = mv.iter().zip(&vec).map(|(y, x)| (y - e * x).powi(2)).sum();
        pairs.push(e, vec, res, true);
    }
    pairs.sort();
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let p = jacobi_dense_eigen(&m).unwrap();
        assert!((p.values[0] - 1.0).abs() < 1e-15);
        assert!((p.values[1] - 3.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        // sign convention: largest entry positive, first index on ties
        assert!((p.vectors[0][0] - s).abs() < 1e-15 && (p.vectors[0][1] + s).abs() < 1e-15);
        assert!((p.vectors[1][0] - s).abs() < 1e-15 && (p.vectors[1][1] - s).abs() < 1e-15);
    }

    #[test]
    fn diagonal_input_permutes_basis() {
        let p = jacobi_dense_eigen(&DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(p.vectors[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(p.vectors[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(p.vectors[2], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn random_eight_by_eight_residuals() {
        let mut rng = crate::rng::seeded(11);
        let mut m = DenseMatrix::zeros(8);
        for i in 0..8 {
            for j in 0..=i {
                let v = crate::rng::uniform(&mut rng, -1.0, 1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let p = jacobi_dense_eigen(&m).unwrap();
        for k in 0..8 {
            let mv = m.matvec(&p.vectors[k]);
            let r: f64 = mv
                .iter()
                .zip(&p.vectors[k])
                .map(|(y, x)| (y - p.values[k] * x).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-10, "pair {k} residual {r}");
        }
        p.validate(1e-12).unwrap();
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap();
        assert!(matches!(jacobi_dense_eigen(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn empty_and_single() {
        assert!(jacobi_dense_eigen(&DenseMatrix::zeros(0)).unwrap().is_empty());
        let p = jacobi_dense_eigen(&DenseMatrix::from_diagonal(&[-4.0])).unwrap();
        assert_eq!(p.values, vec![-4.0]);
        assert_eq!(p.vectors[0], vec![1.0]);
    }
}
