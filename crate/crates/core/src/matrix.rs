//! Compressed-sparse-row storage for real symmetric matrices and the
//! primitives every solver consumes: matvec, Rayleigh quotient, the residual
//! measure and Gershgorin spectral bounds.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vector::{dot, is_finite};

/// Rows per rayon task; below this the kernel stays single-threaded.
const PAR_ROWS: usize = 8192;

/// Real symmetric matrix in CSR form with both triangles stored.
#[derive(Debug)]
pub struct SparseSymMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    kernel_calls: AtomicU64,
}

impl Clone for SparseSymMatrix {
    fn clone(&self) -> Self {
        SparseSymMatrix {
            n: self.n,
            row_offsets: self.row_offsets.clone(),
            col_indices: self.col_indices.clone(),
            values: self.values.clone(),
            kernel_calls: AtomicU64::new(0),
        }
    }
}

impl PartialEq for SparseSymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.row_offsets == other.row_offsets
            && self.col_indices == other.col_indices
            && self.values == other.values
    }
}

impl SparseSymMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 {
            return Err(Error::Dimension {
                expected: n + 1,
                got: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() {
            return Err(Error::Dimension {
                expected: col_indices.len(),
                got: values.len(),
            });
        }
        if row_offsets[0] != 0 || row_offsets[n] != values.len() {
            return Err(Error::invalid("row offsets must start at 0 and end at nnz"));
        }
        for i in 0..n {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::invalid(format!("row offsets decrease at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n {
                    return Err(Error::invalid(format!(
                        "column index {c} out of range in row {i}"
                    )));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::invalid(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
        }
        if !is_finite(&values) {
            return Err(Error::NonFinite("matrix values"));
        }
        let m = SparseSymMatrix {
            n,
            row_offsets,
            col_indices,
            values,
            kernel_calls: AtomicU64::new(0),
        };
        m.check_symmetry()?;
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triplets covering the full
    /// pattern. Duplicates are summed; explicit zeros are kept.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
        }
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_offsets[i + 1] += 1;
            col_indices.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::from_csr(n, row_offsets, col_indices, values)
    }

    /// Builds a matrix from one triangle; every off-diagonal entry is mirrored.
    pub fn from_symmetric_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut full = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Self::from_triplets(n, &full)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), &t)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n]).expect("identity is valid")
    }

    /// Builds a matrix from dense rows, skipping exact zeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    fn check_symmetry(&self) -> Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j == i {
                    continue;
                }
                let mirror = self.get(j, i);
                if mirror != Some(v) {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        value: v,
                        mirror: mirror.unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }

    /// Stored value at `(i, j)`, if the entry is structurally present.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|k| self.values[lo + k])
    }

    /// Iterates the stored `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_csr(
            self.n,
            self.row_offsets.clone(),
            self.col_indices.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// Total number of kernel invocations on this matrix since construction.
    pub fn kernel_calls(&self) -> u64 {
        self.kernel_calls.load(Ordering::Relaxed)
    }

    /// `A v`. Counts as one kernel invocation.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(v, &mut out)?;
        Ok(out)
    }

    /// Writes `A v` into `out`. Counts as one kernel invocation.
    ///
    /// Rows are summed in storage order, so the result does not depend on
    /// how rows are split across threads.
    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: v.len(),
            });
        }
        if out.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: out.len(),
            });
        }
        self.kernel_calls.fetch_add(1, Ordering::Relaxed);
        let row_dot = |i: usize| -> f64 {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut s = 0.0;
            for k in lo..hi {
                s += self.values[k] * v[self.col_indices[k]];
            }
            s
        };
        if self.n >= 2 * PAR_ROWS {
            out.par_chunks_mut(PAR_ROWS)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * PAR_ROWS;
                    for (k, o) in chunk.iter_mut().enumerate() {
                        *o = row_dot(base + k);
                    }
                });
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row_dot(i);
            }
        }
        Ok(())
    }
}

/// Borrowed view of a matrix that counts the products taken through it.
///
/// Each solver run owns one of these so concurrent runs on a shared matrix
/// keep separate tallies.
#[derive(Debug)]
pub struct CountingOperator<'a> {
    matrix: &'a SparseSymMatrix,
    count: AtomicU64,
}

impl<'a> CountingOperator<'a> {
    pub fn new(matrix: &'a SparseSymMatrix) -> Self {
        CountingOperator {
            matrix,
            count: AtomicU64::new(0),
        }
    }

    pub fn matrix(&self) -> &'a SparseSymMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let y = self.matrix.matvec(v)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(y)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.matrix.matvec_into(v, out)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Products taken so far.
    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// `A v` as a free function.
pub fn matvec(a: &SparseSymMatrix, v: &[f64]) -> Result<Vec<f64>> {
    a.matvec(v)
}

/// `x·(Ax) / x·x`. Supplying `ax` skips the product.
pub fn rayleigh_quotient(a: &SparseSymMatrix, x: &[f64], ax: Option<&[f64]>) -> Result<f64> {
    let owned;
    let ax = match ax {
        Some(y) => {
            check_len(a.dim(), y.len())?;
            y
        }
        None => {
            owned = a.matvec(x)?;
            &owned
        }
    };
    rayleigh_from_product(x, ax)
}

/// `|(A - lambda) x|^2 / |x|^2`. Supplying `ax` skips the product.
pub fn residual_measure(
    a: &SparseSymMatrix,
    x: &[f64],
    lambda: f64,
    ax: Option<&[f64]>,
) -> Result<f64> {
    let owned;
    let ax = match ax {
        Some(y) => {
            check_len(a.dim(), y.len())?;
            y
        }
        None => {
            owned = a.matvec(x)?;
            &owned
        }
    };
    residual_from_product(x, ax, lambda)
}

pub(crate) fn rayleigh_from_product(x: &[f64], ax: &[f64]) -> Result<f64> {
    let xx = dot(x, x);
    if xx == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot(x, ax) / xx)
}

pub(crate) fn residual_from_product(x: &[f64], ax: &[f64], lambda: f64) -> Result<f64> {
    let xx = dot(x, x);
    if xx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let r2: f64 = x
        .iter()
        .zip(ax)
        .map(|(xi, yi)| {
            let r = yi - lambda * xi;
            r * r
        })
        .sum();
    Ok(r2 / xx)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::Dimension { expected, got })
    } else {
        Ok(())
    }
}

/// Enclosure `[lo, hi]` of the whole spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralBounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::invalid(format!("bad spectral bounds ({lo}, {hi})")));
        }
        Ok(SpectralBounds { lo, hi })
    }

    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Gershgorin disc enclosure: `[min(a_ii - r_i), max(a_ii + r_i)]`.
pub fn gershgorin_bounds(a: &SparseSymMatrix) -> SpectralBounds {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.dim() {
        let mut diag = 0.0;
        let mut radius = 0.0;
        for (j, v) in a.row(i) {
            if j == i {
                diag = v;
            } else {
                radius += v.abs();
            }
        }
        lo = lo.min(diag - radius);
        hi = hi.max(diag + radius);
    }
    if a.dim() == 0 {
        lo = 0.0;
        hi = 0.0;
    }
    SpectralBounds { lo, hi }
}

/// Coordinates and momenta evolved by the inflation map.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl StateVector {
    /// A state at rest: `p = 0`.
    pub fn at_rest(x: Vec<f64>) -> Self {
        let p = vec![0.0; x.len()];
        StateVector { x, p }
    }

    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let s = StateVector { x, p };
        s.validate(s.x.len())?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_len(n, self.x.len())?;
        check_len(n, self.p.len())?;
        if !is_finite(&self.x) || !is_finite(&self.p) {
            return Err(Error::NonFinite("state"));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        is_finite(&self.x) && is_finite(&self.p)
    }

    /// Scales `x` to unit length and `p` by the same factor.
    pub fn normalize(&mut self) -> Result<()> {
        let n = crate::vector::normalize_in_place(&mut self.x)?;
        crate::vector::scale(1.0 / n, &mut self.p);
        Ok(())
    }
}
