use crate::dynamics::{default_tol, start_vector};
use crate::error::{Error, Result};
use crate::matrix::{
    gershgorin_bounds, rayleigh_from_product, residual_from_product, CountingOperator,
    SparseSymMatrix,
};
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{ConvergenceRecord, Trace};
use crate::vector::{fix_sign, normalize_in_place};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerMode {
    /// Dominant (largest magnitude) eigenvalue of `A`.
    Largest,
    /// Lowest eigenvalue, as the dominant one of `shift * I - A`.
    #[default]
    SmallestShifted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerConfig {
    pub mode: PowerMode,
    pub max_steps: usize,
    /// `None` uses `1e-10 * (hi - lo)^2`.
    pub tol_mu: Option<f64>,
    /// Shift for `SmallestShifted`; `None` uses the Gershgorin upper bound.
    pub shift: Option<f64>,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            mode: PowerMode::SmallestShifted,
            max_steps: 1_000_000,
            tol_mu: None,
            shift: None,
            seed: 0,
        }
    }
}

/// Power iteration. One matvec per step; the reported value is always the
/// Rayleigh quotient of `A`.
pub fn power_method(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &PowerConfig,
) -> Result<Solution> {
    let bounds = gershgorin_bounds(a);
    let shift = cfg.shift.unwrap_or(bounds.hi);
    if !shift.is_finite() {
        return Err(Error::invalid("shift must be finite"));
    }
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
            dt: 1.0,
            lambda_tilde: match cfg.mode {
                PowerMode::Largest => lambda,
                PowerMode::SmallestShifted => shift,
            },
        });
        if mu <= tol {
            break (lambda, mu, true);
        }
        if step >= cfg.max_steps {
            // equal-magnitude pairs (+e, -e) never settle and end up here
            break (lambda, mu, false);
        }
        match cfg.mode {
            PowerMode::Largest => x.copy_from_slice(&y),
            PowerMode::SmallestShifted => {
                for (xi, yi) in x.iter_mut().zip(&y) {
                    *xi = shift * *xi - yi;
                }
            }
        }
        step += 1;
        if normalize_in_place(&mut x).is_err() {
            return Err(Error::Failed(format!(
                "power iterate vanished at step {step}; the start has no dominant component"
            )));
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
