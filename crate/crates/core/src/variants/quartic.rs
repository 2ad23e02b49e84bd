//! Soft normalization: minimize `V(x) = x.Ax + kappa (|x|^2 - 1)^2` by damped
//! dynamics.
//!
//! Stationary points are the origin and `+-sqrt(1 - e_i / (2 kappa)) v_i`.
//! For `kappa > e0 / 2` all of them except the ground pair are saddles, so a
//! damped trajectory from almost any start ends in one of the two ground
//! wells, and `Ax = 2 kappa (1 - |x|^2) x` there.

use crate::dynamics::{choose_timestep, start_vector};
use crate::error::{Error, Result};
use crate::matrix::{
    gershgorin_bounds, rayleigh_from_product, residual_from_product, CountingOperator,
    SparseSymMatrix, SpectralBounds,
};
use crate::rng;
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{ConvergenceRecord, Trace};
use crate::vector::{axpy, dot, fix_sign, norm, normalize};

const ORIGIN: f64 = 1e-12;
const MAX_KICKS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuarticConfig {
    /// Constraint stiffness; `None` uses the Gershgorin upper bound (or 1
    /// if that is not positive).
    pub kappa: Option<f64>,
    /// `None` picks a stable step from the Hessian bound.
    pub dt: Option<f64>,
    /// Velocity damping; `None` uses `sqrt(hi - lo) / 10`.
    pub damping: Option<f64>,
    pub safety: f64,
    pub max_steps: usize,
    pub tol_grad: f64,
    pub seed: u64,
}

impl Default for QuarticConfig {
    fn default() -> Self {
        QuarticConfig {
            kappa: None,
            dt: None,
            damping: None,
            safety: 0.9,
            max_steps: 1_000_000,
            tol_grad: 1e-10,
            seed: 0,
        }
    }
}

/// `grad V = 2 A x + 4 kappa (|x|^2 - 1) x`. One matvec.
pub fn quartic_gradient(a: &SparseSymMatrix, x: &[f64], kappa: f64) -> Result<Vec<f64>> {
    let y = a.matvec(x)?;
    Ok(gradient_from_product(x, &y, kappa))
}

fn gradient_from_product(x: &[f64], ax: &[f64], kappa: f64) -> Vec<f64> {
    let c = 4.0 * kappa * (dot(x, x) - 1.0);
    x.iter().zip(ax).map(|(xi, yi)| 2.0 * yi + c * xi).collect()
}

/// Largest stable step for the damped descent.
///
/// Bounds the Hessian `2A + 4 kappa (|x|^2 - 1) + 8 kappa x x^T` for
/// `|x|^2` up to 5/3 of the largest well radius `max(1, 1 - lo / (2 kappa))`.
pub fn quartic_timestep(bounds: SpectralBounds, kappa: f64, safety: f64) -> Result<f64> {
    let r2 = 5.0 / 3.0 * (1.0 - bounds.lo / (2.0 * kappa)).max(1.0);
    let h_max = 2.0 * (bounds.lo.abs() + bounds.hi.abs()) + 4.0 * kappa * (3.0 * r2 - 1.0);
    choose_timestep(SpectralBounds::new(0.0, h_max)?, safety)
}

/// Heavy-ball descent on the quartic pseudopotential until
/// `|grad V| <= tol_grad`. Reports the Rayleigh quotient and the normalized
/// final vector.
pub fn quartic_descent(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &QuarticConfig,
) -> Result<Solution> {
    let bounds = gershgorin_bounds(a);
    let kappa = cfg
        .kappa
        .unwrap_or(if bounds.hi > 0.0 { bounds.hi } else { 1.0 });
    if !(kappa > 0.0 && kappa > bounds.hi / 2.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!(
            "kappa = {kappa} must be positive and exceed hi/2 = {}",
            bounds.hi / 2.0
        )));
    }
    if !(cfg.tol_grad > 0.0) {
        return Err(Error::invalid("tol_grad must be positive"));
    }
    let dt = match cfg.dt {
        Some(dt) if dt > 0.0 && dt.is_finite() => dt,
        Some(dt) => return Err(Error::invalid(format!("dt must be positive, got {dt}"))),
        None => quartic_timestep(bounds, kappa, cfg.safety)?,
    };
    let damping = cfg.damping.unwrap_or(bounds.range().sqrt() / 10.0);
    if !(damping >= 0.0) {
        return Err(Error::invalid("damping must be >= 0"));
    }
    let keep = 1.0 - damping * dt;

    let op = CountingOperator::new(a);
    let n = a.dim();
    let mut rng = rng::seeded(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut x = start_vector(n, x0, cfg.seed)?;
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut trace = Trace::new();
    let mut kicks = 0;
    let mut step = 0;
    let converged = loop {
        if norm(&x) < ORIGIN {
            kicks += 1;
            if kicks > MAX_KICKS {
                return Err(Error::Failed("descent keeps stalling at the origin".into()));
            }
            let kick = rng::random_unit_vector(n, &mut rng);
            axpy(1e-3, &kick, &mut x);
        }
        op.apply_into(&x, &mut y)?;
        let g = gradient_from_product(&x, &y, kappa);
        let gnorm = norm(&g);
        let lambda = rayleigh_from_product(&x, &y)?;
        let mu = residual_from_product(&x, &y, lambda)?;
        trace.push(ConvergenceRecord {
            step,
            m: op.count(),
            lambda,
            mu,
            dt,
            lambda_tilde: 2.0 * kappa * (1.0 - dot(&x, &x)),
        });
        if !gnorm.is_finite() {
            return Err(Error::Overflow { step });
        }
        if gnorm <= cfg.tol_grad {
            break true;
        }
        if step >= cfg.max_steps {
            break false;
        }
        for i in 0..n {
            p[i] = keep * p[i] - g[i] * dt;
        }
        axpy(dt, &p, &mut x);
        step += 1;
    };
    let last = *trace.last().expect("at least one record");
    let mut v = normalize(&x)?;
    fix_sign(&mut v);
    let mut pairs = EigenpairSet::default();
    pairs.push(last.lambda, v, last.mu, converged);
    Ok(Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps: step,
    })
}
