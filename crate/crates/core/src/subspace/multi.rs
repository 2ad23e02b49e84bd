//! Several eigenpairs at once: orthogonality-constrained inflation of a
//! block of vectors, and periodic subspace diagonalization of one
//! trajectory.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::dynamics::{kick_drift, start_vector, Dynamics, InflationConfig};
use crate::error::{Error, Result};
use crate::matrix::{CountingOperator, SparseSymMatrix, StateVector};
use crate::rng;
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{ConvergenceRecord, RitzRecord, Trace};
use crate::vector::{axpy, dot, norm, scale};

use super::ritz::{ritz_on_basis, Basis, DEFAULT_DROP_TOL};

/// Consecutive steps with a reseeded slot before the block is given up on.
const MAX_COLLAPSES: usize = 10;

/// Gram-Schmidt on a block of states. Coordinates are orthonormalized and
/// every momentum receives the same linear combination as its coordinate.
/// Slots that collapse are refilled with fresh random vectors at rest.
/// Returns the number of refilled slots.
fn orthonormalize_states(
    states: &mut [StateVector],
    rng: &mut rng::SeededRng,
    drop_tol: f64,
) -> Result<usize> {
    let mut reseeded = 0;
    for a in 0..states.len() {
        let mut attempts = 0;
        loop {
            let original = norm(&states[a].x);
            let (done, rest) = states.split_at_mut(a);
            let s = &mut rest[0];
            for _pass in 0..2 {
                for prev in done.iter() {
                    let c = dot(&prev.x, &s.x);
                    axpy(-c, &prev.x, &mut s.x);
                    axpy(-c, &prev.p, &mut s.p);
                }
            }
            let r = norm(&s.x);
            if original > 0.0 && r >= drop_tol * original && r.is_finite() {
                scale(1.0 / r, &mut s.x);
                scale(1.0 / r, &mut s.p);
                break;
            }
            attempts += 1;
            if attempts > MAX_COLLAPSES {
                return Err(Error::Failed("block keeps losing rank".into()));
            }
            reseeded += 1;
            *s = StateVector::at_rest(rng::random_unit_vector(s.dim(), rng));
        }
    }
    Ok(reseeded)
}

/// Lowest `k` eigenpairs from `k` vectors evolved together.
///
/// Each vector follows the inflation map with its own border
/// `lambda_alpha + offset`; after every step the block is sorted by Rayleigh
/// quotient and re-orthonormalized, which keeps the vectors on the
/// orthogonality constraint surface. Costs `k` matvecs per step.
pub fn multi_inflation(
    a: &SparseSymMatrix,
    starts: Option<&[Vec<f64>]>,
    k: usize,
    cfg: &InflationConfig,
) -> Result<Solution> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= {n}, got {k}")));
    }
    let r = cfg.resolve(a)?;
    let op = CountingOperator::new(a);
    let mut rng = rng::seeded(cfg.seed);
    let mut states: Vec<StateVector> = match starts {
        Some(xs) => {
            if xs.len() != k {
                return Err(Error::invalid(format!(
                    "expected {k} start vectors, got {}",
                    xs.len()
                )));
            }
            xs.iter()
                .map(|x| start_vector(n, Some(x), 0).map(StateVector::at_rest))
                .collect::<Result<_>>()?
        }
        None => (0..k)
            .map(|_| StateVector::at_rest(rng::random_unit_vector(n, &mut rng)))
            .collect(),
    };
    orthonormalize_states(&mut states, &mut rng, DEFAULT_DROP_TOL)?;

    let mut block: Vec<Dynamics> = states
        .into_iter()
        .map(|s| {
            Dynamics::new(
                &op,
                s,
                r.dt,
                r.schedule.offset(),
                cfg.integrator,
                cfg.normalize_every,
                cfg.adapt,
            )
        })
        .collect::<Result<_>>()?;

    let mut trace = Trace::new();
    let mut collapses = 0;
    let mut converged;
    loop {
        let recs: Vec<ConvergenceRecord> = block
            .par_iter_mut()
            .map(|d| d.evaluate())
            .collect::<Result<_>>()?;
        let worst = recs.iter().map(|r| r.mu).fold(0.0, f64::max);
        trace.push(ConvergenceRecord {
            step: block[0].step,
            m: op.count(),
            lambda: recs[0].lambda,
            mu: worst,
            dt: recs[0].dt,
            lambda_tilde: recs[0].lambda_tilde,
        });
        converged = worst <= r.tol_mu;
        if converged || block[0].step >= cfg.max_steps {
            break;
        }
        block.iter_mut().try_for_each(|d| d.advance())?;

        block.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
        let mut states: Vec<StateVector> = block.iter().map(|d| d.state.clone()).collect();
        if orthonormalize_states(&mut states, &mut rng, DEFAULT_DROP_TOL)? > 0 {
            collapses += 1;
            if collapses > MAX_COLLAPSES {
                return Err(Error::Failed("block keeps losing rank".into()));
            }
        } else {
            collapses = 0;
        }
        for (d, s) in block.iter_mut().zip(states) {
            d.set_state(s);
        }
    }

    // Final Rayleigh-Ritz on the evaluated vectors reuses their products.
    let xs: Vec<Vec<f64>> = block.iter().map(|d| d.eval_x.clone()).collect();
    let ys: Vec<Vec<f64>> = block.iter().map(|d| d.eval_y.clone()).collect();
    let basis = Basis::build(&xs, Some(&ys), DEFAULT_DROP_TOL)?;
    let pairs = ritz_on_basis(&basis.q, basis.aq.as_ref().expect("images"), r.tol_mu)?.pairs;
    Ok(Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps: block[0].step,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicConfig {
    pub inflation: InflationConfig,
    /// Number of most recent iterates kept for each diagonalization.
    pub basis_size: usize,
    /// Dynamical steps between diagonalizations.
    pub period: usize,
    /// Eigenpairs wanted.
    pub want: usize,
}

/// Below this relative norm after orthogonalization a basis vector gets a
/// fresh product instead of the combined one.
const CANCELLATION: f64 = 1e-3;

struct Stored {
    x: Vec<f64>,
    ax: Vec<f64>,
    /// Momentum of the state at the moment `x` was evaluated.
    p: Vec<f64>,
}

/// Evolves one vector and diagonalizes in the span of its latest
/// `basis_size` iterates every `period` steps.
///
/// Ritz vectors come with their products, so advancing one costs no matvec.
/// After a diagonalization the trajectory continues from the least converged
/// of the `want` lowest Ritz vectors, advanced one step. With `want = 1` the
/// step uses the latest momentum weighted by its iterate's overlap with the
/// Ritz vector, so `basis_size
/// = period = 1` reproduces plain inflation. With `want > 1` the restart is
/// at rest and the wanted Ritz vectors join the next diagonalization; their
/// products are then recomputed, costing `want` matvecs per cycle.
pub fn periodic_subspace_solve(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &PeriodicConfig,
) -> Result<Solution> {
    if cfg.want == 0 || cfg.basis_size < cfg.want || cfg.period == 0 {
        return Err(Error::invalid(
            "need basis_size >= want >= 1 and period >= 1",
        ));
    }
    let inf = &cfg.inflation;
    let r = inf.resolve(a)?;
    let op = CountingOperator::new(a);
    let x = start_vector(a.dim(), x0, inf.seed)?;
    let mut dynamics = Dynamics::new(
        &op,
        StateVector::at_rest(x),
        r.dt,
        r.schedule.offset(),
        inf.integrator,
        inf.normalize_every,
        inf.adapt,
    )?;
    let mut trace = Trace::new();
    let mut buffer: VecDeque<Stored> = VecDeque::with_capacity(cfg.basis_size + 1);
    let mut kept: Vec<Stored> = Vec::new();
    let mut since = 0usize;
    let pairs: EigenpairSet;

    loop {
        let rec = dynamics.evaluate()?;
        trace.push(rec);
        if cfg.want == 1 && rec.mu <= r.tol_mu {
            let mut p = EigenpairSet::default();
            p.push(dynamics.lambda, dynamics.current_vector()?, rec.mu, true);
            pairs = p;
            break;
        }
        buffer.push_back(Stored {
            x: dynamics.eval_x.clone(),
            ax: dynamics.eval_y.clone(),
            p: dynamics.state.p.clone(),
        });
        if buffer.len() > cfg.basis_size {
            buffer.pop_front();
        }
        since += 1;
        let at_end = dynamics.step >= inf.max_steps;
        if since < cfg.period && !at_end {
            dynamics.advance()?;
            continue;
        }

        since = 0;
        let parts: Vec<&Stored> = kept.iter().chain(buffer.iter()).collect();
        let xs: Vec<Vec<f64>> = parts.iter().map(|s| s.x.clone()).collect();
        let ys: Vec<Vec<f64>> = parts.iter().map(|s| s.ax.clone()).collect();
        let basis = Basis::build(&xs, Some(&ys), DEFAULT_DROP_TOL)?;
        let mut aq = basis.aq.clone().expect("images");
        for (j, s) in basis.shrink.iter().enumerate() {
            if *s < CANCELLATION {
                aq[j] = op.apply(&basis.q[j])?;
            }
        }
        let ritz = ritz_on_basis(&basis.q, &aq, r.tol_mu)?;
        trace.ritz.push(RitzRecord {
            step: dynamics.step,
            m: op.count(),
            values: ritz.pairs.values.clone(),
        });
        let mut lowest = ritz.pairs.clone();
        lowest.truncate(cfg.want);
        if (lowest.len() == cfg.want && lowest.all_converged()) || at_end {
            pairs = lowest;
            break;
        }

        let wanted: Vec<Stored> = (0..lowest.len())
            .map(|k| -> Result<Stored> {
                let p = if cfg.want == 1 {
                    let last = parts.last().expect("nonempty basis");
                    let mut p = last.p.clone();
                    scale(dot(&ritz.pairs.vectors[k], &last.x), &mut p);
                    p
                } else {
                    vec![0.0; a.dim()]
                };
                let x = ritz.pairs.vectors[k].clone();
                // combined images lose accuracy from cycle to cycle
                let ax = if cfg.want > 1 {
                    op.apply(&x)?
                } else {
                    ritz.images[k].clone()
                };
                Ok(Stored { x, ax, p })
            })
            .collect::<Result<_>>()?;
        let worst = (0..wanted.len())
            .max_by(|&i, &j| lowest.residuals[i].total_cmp(&lowest.residuals[j]))
            .expect("at least one Ritz pair");
        let u = &wanted[worst];
        let mut restart = StateVector::new(u.x.clone(), u.p.clone())?;
        kick_drift(
            &mut restart,
            &u.x,
            &u.ax,
            lowest.values[worst] + dynamics.offset,
            dynamics.dt,
            dynamics.integrator,
        );
        restart.normalize()?;
        dynamics.set_state(restart);
        dynamics.step += 1;
        kept = if cfg.want > 1 { wanted } else { Vec::new() };
        buffer.clear();
    }

    Ok(Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps: dynamics.step,
    })
}
