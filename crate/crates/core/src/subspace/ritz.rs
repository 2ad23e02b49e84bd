//! Gram-Schmidt and Rayleigh-Ritz projection.

use crate::error::{Error, Result};
use crate::matrix::{gershgorin_bounds, CountingOperator, SparseSymMatrix};
use crate::solution::EigenpairSet;
use crate::vector::{axpy, dot, fix_sign, norm, scale};

use super::dense::{jacobi_dense_eigen, DenseMatrix};

/// Relative norm below which a projected vector counts as dependent.
pub const DEFAULT_DROP_TOL: f64 = 1e-10;

/// Modified Gram-Schmidt with one reorthogonalization pass. Vectors whose
/// norm after projection falls below `drop_tol` times their original norm
/// are dropped.
pub fn orthonormalize(vectors: &[Vec<f64>], drop_tol: f64) -> Result<Vec<Vec<f64>>> {
    let basis = Basis::build(vectors, None, drop_tol)?;
    Ok(basis.q)
}

/// Orthonormal basis, with images when the inputs had them.
pub(crate) struct Basis {
    pub q: Vec<Vec<f64>>,
    /// `A q_j`, when images of the inputs were supplied.
    pub aq: Option<Vec<Vec<f64>>>,
    /// Norm left after projection relative to the input norm, per `q_j`.
    pub shrink: Vec<f64>,
}

impl Basis {
    /// Orthonormalizes `vectors`, applying the same combinations to `images`.
    pub fn build(
        vectors: &[Vec<f64>],
        images: Option<&[Vec<f64>]>,
        drop_tol: f64,
    ) -> Result<Basis> {
        let Some(first) = vectors.first() else {
            return Err(Error::invalid("no vectors to orthonormalize"));
        };
        let n = first.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
        if let Some(im) = images {
            if im.len() != vectors.len() {
                return Err(Error::Dimension {
                    expected: vectors.len(),
                    got: im.len(),
                });
            }
        }
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut aq: Vec<Vec<f64>> = Vec::new();
        let mut shrink = Vec::new();
        for (idx, v) in vectors.iter().enumerate() {
            let original = norm(v);
            if !original.is_finite() {
                return Err(Error::NonFinite("orthonormalize"));
            }
            if original == 0.0 {
                continue;
            }
            let mut w = v.clone();
            let mut aw = images.map(|im| im[idx].clone());
            for _pass in 0..2 {
                for j in 0..q.len() {
                    let h = dot(&q[j], &w);
                    axpy(-h, &q[j], &mut w);
                    if let Some(aw) = aw.as_mut() {
                        axpy(-h, &aq[j], aw);
                    }
                }
            }
            let r = norm(&w);
            if r < drop_tol * original {
                continue;
            }
            scale(1.0 / r, &mut w);
            if let Some(mut aw) = aw {
                scale(1.0 / r, &mut aw);
                aq.push(aw);
            }
            q.push(w);
            shrink.push(r / original);
        }
        if q.is_empty() {
            return Err(Error::EmptySpan);
        }
        Ok(Basis {
            q,
            aq: images.map(|_| aq),
            shrink,
        })
    }
}

/// Ritz pairs of `A` on the span of an orthonormal basis with known images.
/// Each pair also carries its image.
pub(crate) struct RitzPairs {
    pub pairs: EigenpairSet,
    pub images: Vec<Vec<f64>>,
}

pub(crate) fn ritz_on_basis(q: &[Vec<f64>], aq: &[Vec<f64>], tol_mu: f64) -> Result<RitzPairs> {
    let k = q.len();
    let mut h = DenseMatrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            let v = 0.5 * (dot(&q[i], &aq[j]) + dot(&q[j], &aq[i]));
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let small = jacobi_dense_eigen(&h)?;
    let n = q[0].len();
    let mut pairs = EigenpairSet::default();
    let mut images = Vec::with_capacity(k);
    for (theta, y) in small.values.iter().zip(&small.vectors) {
        let mut x = vec![0.0; n];
        let mut ax = vec![0.0; n];
        for j in 0..k {
            axpy(y[j], &q[j], &mut x);
            axpy(y[j], &aq[j], &mut ax);
        }
        // re-normalize against rounding in the combination
        let nx = norm(&x);
        scale(1.0 / nx, &mut x);
        scale(1.0 / nx, &mut ax);
        let mu: f64 = ax.iter().zip(&x).map(|(a, b)| (a - theta * b).powi(2)).sum();
        let before = x.clone();
        fix_sign(&mut x);
        if x != before {
            scale(-1.0, &mut ax);
        }
        pairs.push(*theta, x, mu, mu <= tol_mu);
        images.push(ax);
    }
    Ok(RitzPairs {
        pairs,
        images,
    })
}

/// Rayleigh-Ritz on the span of `vectors`. Takes one product per retained
/// basis vector.
pub fn rayleigh_ritz(a: &SparseSymMatrix, vectors: &[Vec<f64>]) -> Result<EigenpairSet> {
    let op = CountingOperator::new(a);
    rayleigh_ritz_counted(&op, vectors, None)
}

/// Rayleigh-Ritz reusing stored products: `images[i] = A vectors[i]`.
/// Takes no products.
pub fn rayleigh_ritz_with_images(
    a: &SparseSymMatrix,
    vectors: &[Vec<f64>],
    images: &[Vec<f64>],
) -> Result<EigenpairSet> {
    let op = CountingOperator::new(a);
    rayleigh_ritz_counted(&op, vectors, Some(images))
}

pub(crate) fn rayleigh_ritz_counted(
    op: &CountingOperator<'_>,
    vectors: &[Vec<f64>],
    images: Option<&[Vec<f64>]>,
) -> Result<EigenpairSet> {
    let a = op.matrix();
    if let Some(v) = vectors.iter().find(|v| v.len() != a.dim()) {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: v.len(),
        });
    }
    let basis = Basis::build(vectors, images, DEFAULT_DROP_TOL)?;
    let aq = match basis.aq {
        Some(aq) => aq,
        None => basis
            .q
            .iter()
            .map(|q| op.apply(q))
            .collect::<Result<Vec<_>>>()?,
    };
    let tol = crate::dynamics::default_tol(gershgorin_bounds(a));
    Ok(ritz_on_basis(&basis.q, &aq, tol)?.pairs)
}
