use crate::dynamics::{default_tol, start_vector};
use crate::error::{Error, Result};
use crate::matrix::{
    gershgorin_bounds, rayleigh_from_product, residual_from_product, CountingOperator,
    SparseSymMatrix,
};
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{ConvergenceRecord, Trace};
use crate::vector::{fix_sign, normalize_in_place};

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderConfig {
    /// Imaginary-time step; `None` uses `1 / (hi - lo)`.
    pub dbeta: Option<f64>,
    pub max_steps: usize,
    /// `None` uses `1e-10 * (hi - lo)^2`.
    pub tol_mu: Option<f64>,
    pub seed: u64,
}

impl Default for FirstOrderConfig {
    fn default() -> Self {
        FirstOrderConfig {
            dbeta: None,
            max_steps: 1_000_000,
            tol_mu: None,
            seed: 0,
        }
    }
}

/// Explicit Euler on `dx/dbeta = -(A - lambda) x` with the Rayleigh quotient
/// as shift and renormalization every step. One matvec per step.
pub fn first_order_descent(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &FirstOrderConfig,
) -> Result<Solution> {
    let bounds = gershgorin_bounds(a);
    let dbeta = match cfg.dbeta {
        Some(b) if b > 0.0 && b.is_finite() => b,
        Some(b) => return Err(Error::invalid(format!("dbeta must be positive, got {b}"))),
        None if bounds.range() > 0.0 => 1.0 / bounds.range(),
        None => 1.0,
    };
    let tol = match cfg.tol_mu {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::invalid(format!("tol_mu must be positive, got {t}"))),
        None => default_tol(bounds),
    };
    let op = CountingOperator::new(a);
    let mut x = start_vector(a.dim(), x0, cfg.seed)?;
    let mut y = vec![0.0; a.dim()];
    let mut trace = Trace::new();
    let mut step = 0;
    let (lambda, mu, converged) = loop {
        op.apply_into(&x, &mut y)?;
        let lambda = rayleigh_from_product(&x, &y)?;
        let mu = residual_from_product(&x, &y, lambda)?;
        trace.push(ConvergenceRecord {
            step,
            m: op.count(),
            lambda,
            mu,
            dt: dbeta,
            lambda_tilde: lambda,
        });
        if mu <= tol {
            break (lambda, mu, true);
        }
        if step >= cfg.max_steps {
            break (lambda, mu, false);
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi -= dbeta * (yi - lambda * *xi);
        }
        step += 1;
        if normalize_in_place(&mut x).is_err() {
            return Err(Error::Overflow { step });
        }
    };
    fix_sign(&mut x);
    let mut pairs = EigenpairSet::default();
    pairs.push(lambda, x, mu, converged);
    Ok(Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps: step,
    })
}
