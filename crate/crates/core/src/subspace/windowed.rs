//! Window inflation followed by Krylov-subspace diagonalization.
//!
//! Inflating with `lambda_tilde = lambda + w` suppresses every mode above
//! `e0 + w` but leaves the modes inside the window mixed. A short Krylov
//! sequence built from the inflated vector then separates them by
//! Rayleigh-Ritz, which handles near-degenerate ground states that plain
//! inflation would take very long to resolve.

use crate::dynamics::{start_vector, Dynamics, InflationConfig, Schedule};
use crate::error::{Error, Result};
use crate::matrix::{CountingOperator, SparseSymMatrix, StateVector};
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{RitzRecord, Trace};
use crate::vector::{axpy, dot, normalize};

use super::ritz::{ritz_on_basis, Basis, DEFAULT_DROP_TOL};

/// Default cap on the Krylov basis size; storage is `2 * k_max` vectors.
pub const DEFAULT_K_MAX: usize = 32;

/// `mu` counts as plateaued once the minimum over a block of steps fails to
/// drop below this fraction of the previous block's minimum.
const PLATEAU_RATIO: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedConfig {
    pub inflation: InflationConfig,
    /// Number of pairs wanted; also the starting basis size.
    pub k: usize,
    /// Largest basis size tried.
    pub k_max: usize,
}

impl WindowedConfig {
    pub fn new(inflation: InflationConfig, k: usize) -> Self {
        WindowedConfig {
            inflation,
            k,
            k_max: DEFAULT_K_MAX.max(k),
        }
    }
}

/// Detects when `mu` stops decreasing, block by block.
struct Plateau {
    block: usize,
    count: usize,
    current_min: f64,
    previous_min: f64,
    blocks_seen: usize,
}

impl Plateau {
    fn new(block: usize) -> Self {
        Plateau {
            block: block.max(1),
            count: 0,
            current_min: f64::INFINITY,
            previous_min: f64::INFINITY,
            blocks_seen: 0,
        }
    }

    fn observe(&mut self, mu: f64) -> bool {
        self.current_min = self.current_min.min(mu);
        self.count += 1;
        if self.count < self.block {
            return false;
        }
        let stalled = self.blocks_seen >= 2 && self.current_min > PLATEAU_RATIO * self.previous_min;
        self.previous_min = self.current_min;
        self.current_min = f64::INFINITY;
        self.count = 0;
        self.blocks_seen += 1;
        stalled
    }
}

/// Krylov vectors `phi_j` (unit, each orthogonal to its predecessor) and
/// their products, grown one matvec at a time.
struct Krylov {
    phis: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
}

impl Krylov {
    fn new(phi: Vec<f64>) -> Self {
        Krylov {
            phis: vec![phi],
            images: Vec::new(),
        }
    }

    /// Ensures `k` vectors with images are available.
    fn grow_to(&mut self, op: &CountingOperator<'_>, k: usize) -> Result<()> {
        while self.images.len() < k {
            let j = self.images.len();
            if j == self.phis.len() {
                // the previous image produced a zero direction
                return Ok(());
            }
            let y = op.apply(&self.phis[j])?;
            let sigma = dot(&self.phis[j], &y);
            let mut next = y.clone();
            axpy(-sigma, &self.phis[j], &mut next);
            self.images.push(y);
            if let Ok(v) = normalize(&next) {
                self.phis.push(v);
            }
        }
        Ok(())
    }

    fn len(&self) -> usize {
        self.images.len()
    }
}

/// Window inflation plus Rayleigh-Ritz on `{phi, A phi, ..., A^(k-1) phi}`.
///
/// The basis grows from `cfg.k` up to `cfg.k_max` until the lowest `cfg.k`
/// Ritz pairs all reach `tol_mu`, or until the lowest pair's residual stops
/// improving. In that case inflation resumes and the extraction is retried,
/// within `max_steps` dynamical steps overall.
pub fn windowed_solve(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &WindowedConfig,
) -> Result<Solution> {
    if cfg.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if cfg.k_max < cfg.k {
        return Err(Error::invalid("k_max must be at least k"));
    }
    let r = cfg.inflation.resolve(a)?;
    let w = match r.schedule {
        Schedule::Window(w) => w,
        other => {
            return Err(Error::invalid(format!(
                "windowed solve needs a window schedule, got {other:?}"
            )))
        }
    };
    let op = CountingOperator::new(a);
    let x = start_vector(a.dim(), x0, cfg.inflation.seed)?;
    let mut dynamics = Dynamics::new(
        &op,
        StateVector::at_rest(x),
        r.dt,
        w,
        cfg.inflation.integrator,
        cfg.inflation.normalize_every,
        cfg.inflation.adapt,
    )?;
    // one block is about two e-foldings of the window modes over the rest
    let block = (2.0 / (w.sqrt() * r.dt)).ceil() as usize;
    let mut trace = Trace::new();
    let mut best: Option<EigenpairSet> = None;

    loop {
        let mut plateau = Plateau::new(block.max(8));
        loop {
            let rec = dynamics.evaluate()?;
            trace.push(rec);
            if rec.mu <= r.tol_mu
                || dynamics.step >= cfg.inflation.max_steps
                || plateau.observe(rec.mu)
            {
                break;
            }
            dynamics.advance()?;
        }

        let mut krylov = Krylov::new(normalize(&dynamics.eval_x)?);
        let mut round_best: Option<EigenpairSet> = None;
        let mut finished = false;
        for k in cfg.k..=cfg.k_max {
            krylov.grow_to(&op, k)?;
            let basis = Basis::build(
                &krylov.phis[..krylov.len()],
                Some(&krylov.images),
                DEFAULT_DROP_TOL,
            )?;
            let aq = basis.aq.as_ref().expect("images supplied");
            let mut pairs = ritz_on_basis(&basis.q, aq, r.tol_mu)?.pairs;
            trace.ritz.push(RitzRecord {
                step: dynamics.step,
                m: op.count(),
                values: pairs.values.clone(),
            });
            pairs.truncate(cfg.k);
            let lowest = pairs.residuals[0];
            // a breakdown means the span is invariant and cannot grow
            let exhausted = krylov.len() < k;
            let done = (pairs.len() == cfg.k || exhausted) && pairs.all_converged();
            if done {
                round_best = Some(pairs);
                finished = true;
                break;
            }
            let improved = round_best
                .as_ref()
                .is_none_or(|b| lowest < b.residuals[0]);
            if improved {
                round_best = Some(pairs);
            }
            if !improved || exhausted {
                break;
            }
        }
        let round_best = round_best.expect("at least one basis size tried");
        if best
            .as_ref()
            .is_none_or(|b| round_best.residuals[0] <= b.residuals[0] || finished)
        {
            best = Some(round_best);
        }
        if finished || dynamics.step >= cfg.inflation.max_steps {
            break;
        }
        dynamics.advance()?;
    }

    Ok(Solution {
        pairs: best.expect("at least one extraction"),
        trace,
        matvecs: op.count(),
        steps: dynamics.step,
    })
}
