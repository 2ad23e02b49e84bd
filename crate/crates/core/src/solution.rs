use crate::error::{Error, Result};
use crate::trace::Trace;
use crate::vector::dot;

/// Eigenpairs sorted by ascending eigenvalue, each with its residual measure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EigenpairSet {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `mu = |(A - e) v|^2` per pair (vectors are unit length).
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
}

impl EigenpairSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn push(&mut self, value: f64, vector: Vec<f64>, residual: f64, converged: bool) {
        self.values.push(value);
        self.vectors.push(vector);
        self.residuals.push(residual);
        self.converged.push(converged);
    }

    pub fn all_converged(&self) -> bool {
        !self.converged.is_empty() && self.converged.iter().all(|&c| c)
    }

    /// Reorders pairs by ascending eigenvalue (stable).
    pub fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        let pick = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let values = pick(&self.values);
        let residuals = pick(&self.residuals);
        let converged = idx.iter().map(|&i| self.converged[i]).collect();
        let vectors = idx.iter().map(|&i| self.vectors[i].clone()).collect();
        *self = EigenpairSet {
            values,
            vectors,
            residuals,
            converged,
        };
    }

    pub fn truncate(&mut self, k: usize) {
        self.values.truncate(k);
        self.vectors.truncate(k);
        self.residuals.truncate(k);
        self.converged.truncate(k);
    }

    /// Largest `|v_a . v_b - delta_ab|` over all pairs.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.len() {
            for b in a..self.len() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(&self.vectors[a], &self.vectors[b]) - target).abs());
            }
        }
        worst
    }

    /// Checks ordering, orthonormality (to `tol`) and residual signs.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("eigenvalues not ascending"));
        }
        if self.residuals.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::invalid("negative or NaN residual"));
        }
        let err = self.orthonormality_error();
        if err > tol {
            return Err(Error::invalid(format!(
                "eigenvectors not orthonormal (error {err:e})"
            )));
        }
        Ok(())
    }
}

/// Result of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub pairs: EigenpairSet,
    pub trace: Trace,
    /// Matrix-vector products taken by the run.
    pub matvecs: u64,
    /// Iterations performed (solver specific: dynamical steps, Lanczos steps...).
    pub steps: usize,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.pairs.all_converged()
    }

    /// Lowest eigenvalue found.
    pub fn value(&self) -> f64 {
        self.pairs.values[0]
    }

    pub fn vector(&self) -> &[f64] {
        &self.pairs.vectors[0]
    }
}
