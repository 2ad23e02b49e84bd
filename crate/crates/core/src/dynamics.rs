//! The inflation iteration.
//!
//! Each step evaluates the force `-(A - lambda_tilde) x` from a single
//! product `A x`, updates momenta and coordinates, and renormalizes. Modes
//! with eigenvalue below the border `lambda_tilde` grow exponentially while
//! the rest oscillate, so the lowest modes take over the state vector.

use crate::error::{Error, Result};
use crate::matrix::{
    gershgorin_bounds, rayleigh_from_product, residual_from_product, CountingOperator,
    SparseSymMatrix, SpectralBounds, StateVector,
};
use crate::rng;
use crate::solution::{EigenpairSet, Solution};
use crate::trace::{ConvergenceRecord, Trace};
use crate::vector::{axpy, dot, fix_sign, normalize};

/// Consecutive rising-`mu` steps that trigger a step-size cut.
pub const RISE_STEPS: usize = 5;
/// Growth of `mu` over a rising streak needed before `dt` is halved.
pub const RISE_FACTOR: f64 = 2.0;
pub const MAX_HALVINGS: usize = 10;
/// Default window, as a fraction of the Gershgorin range.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.05;
/// Default `tol_mu`, as a multiple of the squared Gershgorin range.
pub const DEFAULT_TOL_FRACTION: f64 = 1e-10;

/// How the inflation border `lambda_tilde` follows the Rayleigh quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `lambda + gap`, with `gap` an estimate of `e1 - e0`.
    Gap(f64),
    /// `lambda + w`: keeps every mode in `[e0, e0 + w]`.
    Window(f64),
    /// `lambda` itself.
    Plain,
}

impl Schedule {
    pub fn offset(&self) -> f64 {
        match *self {
            Schedule::Gap(g) => g,
            Schedule::Window(w) => w,
            Schedule::Plain => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Symplectic Euler: kick with the force at `x`, then drift.
    #[default]
    Euler,
    /// Position Verlet: half drift, kick at the midpoint, half drift.
    Verlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InflationConfig {
    /// Time step; `None` picks `safety * 2 / sqrt(hi - lo)`.
    pub dt: Option<f64>,
    pub safety: f64,
    /// `None` uses a window of 5% of the spectral range.
    pub schedule: Option<Schedule>,
    pub integrator: Integrator,
    pub max_steps: usize,
    /// `None` uses `1e-10 * (hi - lo)^2`.
    pub tol_mu: Option<f64>,
    pub normalize_every: usize,
    pub seed: u64,
    pub adapt: bool,
    /// Spectral enclosure; `None` uses Gershgorin discs.
    pub bounds: Option<SpectralBounds>,
}

impl Default for InflationConfig {
    fn default() -> Self {
        InflationConfig {
            dt: None,
            safety: 0.9,
            schedule: None,
            integrator: Integrator::Euler,
            max_steps: 100_000,
            tol_mu: None,
            normalize_every: 1,
            seed: 0,
            adapt: true,
            bounds: None,
        }
    }
}

impl InflationConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::invalid(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.safety > 0.0 && self.safety.is_finite()) {
            return Err(Error::invalid(format!(
                "safety must be positive, got {}",
                self.safety
            )));
        }
        match self.schedule {
            Some(Schedule::Gap(g)) if !(g >= 0.0 && g.is_finite()) => {
                return Err(Error::invalid(format!("gap must be >= 0, got {g}")))
            }
            Some(Schedule::Window(w)) if !(w > 0.0 && w.is_finite()) => {
                return Err(Error::invalid(format!("window must be > 0, got {w}")))
            }
            _ => {}
        }
        if let Some(t) = self.tol_mu {
            if !(t > 0.0) {
                return Err(Error::invalid(format!("tol_mu must be positive, got {t}")));
            }
        }
        if self.normalize_every == 0 {
            return Err(Error::invalid("normalize_every must be >= 1"));
        }
        Ok(())
    }

    /// Fills every automatic parameter from the matrix.
    pub fn resolve(&self, a: &SparseSymMatrix) -> Result<Resolved> {
        self.validate()?;
        let bounds = self.bounds.unwrap_or_else(|| gershgorin_bounds(a));
        let range = bounds.range();
        let dt = match self.dt {
            Some(dt) => dt,
            None => choose_timestep(bounds, self.safety).unwrap_or(self.safety),
        };
        let schedule = self
            .schedule
            .unwrap_or(Schedule::Window(default_window(bounds)));
        let tol_mu = self.tol_mu.unwrap_or_else(|| default_tol(bounds));
        debug_assert!(range >= 0.0);
        Ok(Resolved {
            bounds,
            dt,
            schedule,
            tol_mu,
        })
    }
}

/// Parameters after automatic choices have been made.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub bounds: SpectralBounds,
    pub dt: f64,
    pub schedule: Schedule,
    pub tol_mu: f64,
}

pub(crate) fn default_window(bounds: SpectralBounds) -> f64 {
    let w = DEFAULT_WINDOW_FRACTION * bounds.range();
    if w > 0.0 {
        w
    } else {
        DEFAULT_WINDOW_FRACTION
    }
}

pub(crate) fn default_tol(bounds: SpectralBounds) -> f64 {
    let range = bounds.range();
    if range > 0.0 {
        DEFAULT_TOL_FRACTION * range * range
    } else {
        let scale = bounds.lo.abs().max(bounds.hi.abs()).max(1.0);
        1e-20 * scale * scale
    }
}

/// `safety * 2 / sqrt(hi - lo)`: the largest step keeping every high mode a
/// bounded oscillator, scaled down by `safety`.
pub fn choose_timestep(bounds: SpectralBounds, safety: f64) -> Result<f64> {
    if !(safety > 0.0) {
        return Err(Error::invalid(format!("safety must be positive, got {safety}")));
    }
    let range = bounds.hi - bounds.lo;
    if !(range > 0.0) {
        return Err(Error::DegenerateSpectrum {
            lo: bounds.lo,
            hi: bounds.hi,
        });
    }
    Ok(safety * 2.0 / range.sqrt())
}

/// One step of the map with a fixed border. Costs one matvec.
///
/// Returns the new state and the Rayleigh quotient at the point where the
/// force was evaluated (`x` for Euler, the half-drifted midpoint for Verlet).
pub fn inflation_step(
    a: &SparseSymMatrix,
    s: &StateVector,
    lambda_tilde: f64,
    dt: f64,
    integrator: Integrator,
) -> Result<(StateVector, f64)> {
    s.validate(a.dim())?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt must be non-negative, got {dt}")));
    }
    let mut next = s.clone();
    let eval = match integrator {
        Integrator::Euler => s.x.clone(),
        Integrator::Verlet => {
            let mut xh = s.x.clone();
            axpy(0.5 * dt, &s.p, &mut xh);
            xh
        }
    };
    let y = a.matvec(&eval)?;
    let lambda = rayleigh_from_product(&eval, &y)?;
    kick_drift(&mut next, &eval, &y, lambda_tilde, dt, integrator);
    if !next.is_finite() {
        return Err(Error::Overflow { step: 0 });
    }
    Ok((next, lambda))
}

/// Applies the update given `y = A * eval`.
pub(crate) fn kick_drift(
    s: &mut StateVector,
    eval: &[f64],
    y: &[f64],
    lambda_tilde: f64,
    dt: f64,
    integrator: Integrator,
) {
    for i in 0..s.x.len() {
        let force = lambda_tilde * eval[i] - y[i];
        s.p[i] += force * dt;
    }
    match integrator {
        Integrator::Euler => axpy(dt, &s.p, &mut s.x),
        Integrator::Verlet => {
            s.x.copy_from_slice(eval);
            axpy(0.5 * dt, &s.p, &mut s.x);
        }
    }
}

/// Stepping machine shared by every dynamical solver.
///
/// `evaluate` takes the one product of a step and logs it; `advance` applies
/// the update from that product, renormalizes and adapts the time step.
pub(crate) struct Dynamics<'m, 'o> {
    op: &'o CountingOperator<'m>,
    pub state: StateVector,
    pub dt: f64,
    pub offset: f64,
    pub integrator: Integrator,
    normalize_every: usize,
    adapt: bool,
    pub step: usize,
    prev_good: StateVector,
    prev_mu: f64,
    rising: usize,
    streak_start: f64,
    pub halvings: usize,
    pub eval_x: Vec<f64>,
    pub eval_y: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    evaluated: bool,
}

impl<'m, 'o> Dynamics<'m, 'o> {
    pub fn new(
        op: &'o CountingOperator<'m>,
        mut state: StateVector,
        dt: f64,
        offset: f64,
        integrator: Integrator,
        normalize_every: usize,
        adapt: bool,
    ) -> Result<Self> {
        state.validate(op.dim())?;
        state.normalize()?;
        let n = op.dim();
        Ok(Dynamics {
            op,
            prev_good: state.clone(),
            state,
            dt,
            offset,
            integrator,
            normalize_every,
            adapt,
            step: 0,
            prev_mu: f64::INFINITY,
            rising: 0,
            streak_start: f64::INFINITY,
            halvings: 0,
            eval_x: vec![0.0; n],
            eval_y: vec![0.0; n],
            lambda: f64::NAN,
            mu: f64::NAN,
            evaluated: false,
        })
    }

    /// Replaces the state (e.g. after an external re-orthonormalization).
    pub fn set_state(&mut self, state: StateVector) {
        self.prev_good = state.clone();
        self.state = state;
        self.evaluated = false;
    }

    pub fn lambda_tilde(&self) -> f64 {
        self.lambda + self.offset
    }

    /// Takes this step's product and returns its log record.
    pub fn evaluate(&mut self) -> Result<ConvergenceRecord> {
        self.eval_x.copy_from_slice(&self.state.x);
        if self.integrator == Integrator::Verlet {
            axpy(0.5 * self.dt, &self.state.p, &mut self.eval_x);
        }
        self.op.apply_into(&self.eval_x, &mut self.eval_y)?;
        self.lambda = rayleigh_from_product(&self.eval_x, &self.eval_y)?;
        self.mu = residual_from_product(&self.eval_x, &self.eval_y, self.lambda)?;
        self.evaluated = true;
        Ok(ConvergenceRecord {
            step: self.step,
            m: self.op.count(),
            lambda: self.lambda,
            mu: self.mu,
            dt: self.dt,
            lambda_tilde: self.lambda_tilde(),
        })
    }

    /// Unit vector at the last evaluation point, sign-normalized.
    pub fn current_vector(&self) -> Result<Vec<f64>> {
        let mut v = normalize(&self.eval_x)?;
        fix_sign(&mut v);
        Ok(v)
    }

    fn halve(&mut self) -> bool {
        if !self.adapt || self.halvings >= MAX_HALVINGS {
            return false;
        }
        self.dt *= 0.5;
        self.halvings += 1;
        self.rising = 0;
        self.streak_start = f64::INFINITY;
        true
    }

    /// Advances one step using the last evaluation.
    pub fn advance(&mut self) -> Result<()> {
        debug_assert!(self.evaluated, "advance without evaluate");
        self.evaluated = false;

        if self.adapt {
            if self.mu > self.prev_mu {
                if self.rising == 0 {
                    self.streak_start = self.prev_mu;
                }
                self.rising += 1;
            } else {
                self.rising = 0;
            }
            if self.rising >= RISE_STEPS && self.mu > RISE_FACTOR * self.streak_start {
                self.halve();
            }
        }
        self.prev_mu = self.mu;

        let lambda_tilde = self.lambda_tilde();
        let mut next = self.state.clone();
        kick_drift(
            &mut next,
            &self.eval_x,
            &self.eval_y,
            lambda_tilde,
            self.dt,
            self.integrator,
        );
        self.step += 1;
        let mut ok = next.is_finite();
        if ok && self.step.is_multiple_of(self.normalize_every) {
            ok = next.normalize().is_ok() && next.is_finite();
        }
        if !ok {
            if self.halve() {
                self.state = self.prev_good.clone();
                self.prev_mu = f64::INFINITY;
                return Ok(());
            }
            return Err(Error::Overflow { step: self.step });
        }
        self.state = next;
        self.prev_good = self.state.clone();
        Ok(())
    }
}

/// Seeded random unit start, or the normalized `x0`.
pub(crate) fn start_vector(n: usize, x0: Option<&[f64]>, seed: u64) -> Result<Vec<f64>> {
    match x0 {
        Some(x) => {
            if x.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: x.len(),
                });
            }
            normalize(x)
        }
        None => Ok(rng::random_unit_vector(n, &mut rng::seeded(seed))),
    }
}

/// Finds the lowest eigenpair by inflation from `x0` (seeded random if
/// absent) at rest.
pub fn run_inflation(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    cfg: &InflationConfig,
) -> Result<Solution> {
    let x = start_vector(a.dim(), x0, cfg.seed)?;
    run_inflation_from(a, StateVector::at_rest(x), cfg).map(|(s, _)| s)
}

/// Like [`run_inflation`] but starts from a full state and also returns the
/// final one, so a run can be continued with different settings.
pub fn run_inflation_from(
    a: &SparseSymMatrix,
    state: StateVector,
    cfg: &InflationConfig,
) -> Result<(Solution, StateVector)> {
    let r = cfg.resolve(a)?;
    let op = CountingOperator::new(a);
    let mut dynamics = Dynamics::new(
        &op,
        state,
        r.dt,
        r.schedule.offset(),
        cfg.integrator,
        cfg.normalize_every,
        cfg.adapt,
    )?;
    let mut trace = Trace::new();
    let mut converged = false;
    loop {
        let rec = dynamics.evaluate()?;
        trace.push(rec);
        if rec.mu <= r.tol_mu {
            converged = true;
            break;
        }
        if dynamics.step >= cfg.max_steps {
            break;
        }
        dynamics.advance()?;
    }
    let mut pairs = EigenpairSet::default();
    pairs.push(
        dynamics.lambda,
        dynamics.current_vector()?,
        dynamics.mu,
        converged,
    );
    let solution = Solution {
        pairs,
        trace,
        matvecs: op.count(),
        steps: dynamics.step,
    };
    Ok((solution, dynamics.state))
}

/// Outcome of a gap scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GapScan {
    pub best: f64,
    /// `(candidate, fitted d ln(mu)/dt)`; NaN marks a diverged probe.
    pub slopes: Vec<(f64, f64)>,
    /// Matvecs spent on the burn-in and every probe.
    pub matvecs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapScanConfig {
    pub probe_steps: usize,
    /// Steps run before scanning; `None` uses `probe_steps`.
    pub burn_in_steps: Option<usize>,
    /// Gap estimate used during burn-in; `None` uses the median candidate.
    pub initial_guess: Option<f64>,
    pub dt: Option<f64>,
    pub safety: f64,
    pub seed: u64,
}

impl Default for GapScanConfig {
    fn default() -> Self {
        GapScanConfig {
            probe_steps: 40,
            burn_in_steps: None,
            initial_guess: None,
            dt: None,
            safety: 0.9,
            seed: 0,
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Picks the gap estimate whose schedule drives `mu` down fastest.
///
/// A common burned-in state is probed once per candidate; the slope of
/// `ln mu` against continuous time is fitted, and the most negative slope
/// wins (ties go to the earlier candidate). With the right gap the slope
/// approaches `-2 * gap`.
pub fn estimate_gap_scan(
    a: &SparseSymMatrix,
    x0: Option<&[f64]>,
    candidates: &[f64],
    cfg: &GapScanConfig,
) -> Result<GapScan> {
    if candidates.is_empty() {
        return Err(Error::invalid("no gap candidates"));
    }
    if let Some(c) = candidates.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
        return Err(Error::invalid(format!("gap candidate {c} must be >= 0")));
    }
    if cfg.probe_steps < 2 {
        return Err(Error::invalid("probe_steps must be at least 2"));
    }
    let bounds = gershgorin_bounds(a);
    let dt = match cfg.dt {
        Some(dt) if dt > 0.0 => dt,
        Some(dt) => return Err(Error::invalid(format!("dt must be positive, got {dt}"))),
        None => choose_timestep(bounds, cfg.safety).unwrap_or(cfg.safety),
    };
    let guess = cfg.initial_guess.unwrap_or_else(|| {
        let mut c = candidates.to_vec();
        c.sort_by(f64::total_cmp);
        c[c.len() / 2]
    });
    let op = CountingOperator::new(a);
    let x = start_vector(a.dim(), x0, cfg.seed)?;
    let mut burn = Dynamics::new(
        &op,
        StateVector::at_rest(x),
        dt,
        guess,
        Integrator::Euler,
        1,
        true,
    )?;
    for _ in 0..cfg.burn_in_steps.unwrap_or(cfg.probe_steps) {
        burn.evaluate()?;
        burn.advance()?;
    }
    let start = burn.state.clone();
    let dt = burn.dt;
    // rounding floor
    let floor = 1e-26 * (bounds.lo.abs().max(bounds.hi.abs()).max(f64::MIN_POSITIVE)).powi(2);

    let mut slopes = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, f64)> = None;
    for &cand in candidates {
        let mut probe = Dynamics::new(&op, start.clone(), dt, cand, Integrator::Euler, 1, false)?;
        let mut ts = Vec::with_capacity(cfg.probe_steps);
        let mut ls = Vec::with_capacity(cfg.probe_steps);
        let mut diverged = false;
        for k in 0..cfg.probe_steps {
            let rec = probe.evaluate()?;
            if !rec.mu.is_finite() {
                diverged = true;
                break;
            }
            if rec.mu <= floor {
                break;
            }
            ts.push(k as f64 * dt);
            ls.push(rec.mu.ln());
            if probe.advance().is_err() {
                diverged = true;
                break;
            }
        }
        let slope = if diverged || ts.len() < 2 {
            f64::NAN
        } else {
            fit_slope(&ts, &ls)
        };
        let slope = if slope.is_finite() && slope < 0.0 {
            slope
        } else {
            f64::NAN
        };
        slopes.push((cand, slope));
        if slope.is_finite() && best.is_none_or(|(_, s)| slope < s) {
            best = Some((cand, slope));
        }
    }
    match best {
        Some((cand, _)) => Ok(GapScan {
            best: cand,
            slopes,
            matvecs: op.count(),
        }),
        None => Err(Error::ScanFailed),
    }
}

/// Coefficients of a state in an eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeProjection {
    pub xi: Vec<f64>,
    pub pi: Vec<f64>,
}

/// Projects `(x, p)` onto an orthonormal basis: `xi_i = x.v_i`, `pi_i = p.v_i`.
pub fn project_normal_modes(s: &StateVector, basis: &[Vec<f64>]) -> Result<NormalModeProjection> {
    let n = s.dim();
    if basis.len() != n {
        return Err(Error::invalid(format!(
            "basis has {} vectors, state dimension is {n}",
            basis.len()
        )));
    }
    for (i, v) in basis.iter().enumerate() {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
        for (j, w) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (dot(v, w) - target).abs() > 1e-10 {
                return Err(Error::invalid("basis is not orthonormal"));
            }
        }
    }
    Ok(NormalModeProjection {
        xi: basis.iter().map(|v| dot(&s.x, v)).collect(),
        pi: basis.iter().map(|v| dot(&s.p, v)).collect(),
    })
}

impl NormalModeProjection {
    /// Rebuilds `(x, p)` from the coefficients.
    pub fn reconstruct(&self, basis: &[Vec<f64>]) -> StateVector {
        let n = basis.first().map_or(0, |v| v.len());
        let mut x = vec![0.0; n];
        let mut p = vec![0.0; n];
        for (k, v) in basis.iter().enumerate() {
            axpy(self.xi[k], v, &mut x);
            axpy(self.pi[k], v, &mut p);
        }
        StateVector { x, p }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SparseSymMatrix {
        SparseSymMatrix::diagonal(d).unwrap()
    }

    #[test]
    fn timestep_formula() {
        let b = SpectralBounds::new(0.0, 4.0).unwrap();
        assert!((choose_timestep(b, 0.9).unwrap() - 0.9).abs() < 1e-15);
        let b = SpectralBounds::new(1.0, 2.0).unwrap();
        assert_eq!(choose_timestep(b, 1.0).unwrap(), 2.0);
        let b = SpectralBounds::new(1.0, 1.0).unwrap();
        assert!(matches!(choose_timestep(b, 0.9), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn eigenvector_is_fixed() {
        let a = diag(&[1.0, 2.0]);
        let s = StateVector::at_rest(vec![1.0, 0.0]);
        for integrator in [Integrator::Euler, Integrator::Verlet] {
            let (next, lambda) = inflation_step(&a, &s, 1.0, 0.7, integrator).unwrap();
            assert_eq!(next, s);
            assert_eq!(lambda, 1.0);
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let a = diag(&[1.0, 2.0, 5.0]);
        let s = StateVector::new(vec![0.3, -0.2, 0.9], vec![0.1, 0.0, -0.4]).unwrap();
        let (next, _) = inflation_step(&a, &s, 1.3, 0.0, Integrator::Euler).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn euler_hand_step() {
        let a = diag(&[1.0, 2.0]);
        let h = 0.5f64.sqrt();
        let s = StateVector::at_rest(vec![h, h]);
        let (next, lambda) = inflation_step(&a, &s, 1.5, 1.0, Integrator::Euler).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-5;
        assert!(close(next.p[0], 0.35355) && close(next.p[1], -0.35355));
        assert!(close(next.x[0], 1.06066) && close(next.x[1], 0.35355));
        assert!((lambda - 1.5).abs() < 1e-15);
    }

    #[test]
    fn one_matvec_per_step() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let before = a.kernel_calls();
        inflation_step(&a, &StateVector::at_rest(vec![1.0, 1.0, 1.0]), 1.0, 0.1, Integrator::Verlet)
            .unwrap();
        assert_eq!(a.kernel_calls() - before, 1);
    }

    #[test]
    fn diag_gap_schedule() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let cfg = InflationConfig {
            schedule: Some(Schedule::Gap(1.0)),
            seed: 11,
            ..Default::default()
        };
        let sol = run_inflation(&a, None, &cfg).unwrap();
        assert!(sol.converged());
        assert!((sol.value() - 1.0).abs() < 1e-8);
        assert!(sol.pairs.residuals[0] < 1e-10);
        assert!((sol.vector()[0] - 1.0).abs() < 1e-6);
        assert_eq!(sol.matvecs, sol.trace.len() as u64);
    }

    #[test]
    fn identity_converges_immediately() {
        let a = SparseSymMatrix::identity(5);
        let sol = run_inflation(&a, Some(&[1.0, 2.0, 3.0, 4.0, 5.0]), &Default::default()).unwrap();
        assert!(sol.converged());
        assert_eq!(sol.steps, 0);
        assert!((sol.value() - 1.0).abs() < 1e-15);
        assert_eq!(sol.pairs.residuals[0], 0.0);
    }

    #[test]
    fn max_steps_flags_non_convergence() {
        let a = diag(&[0.0, 1e-3, 1.0, 2.0]);
        let cfg = InflationConfig {
            max_steps: 3,
            ..Default::default()
        };
        let sol = run_inflation(&a, None, &cfg).unwrap();
        assert!(!sol.converged());
        assert_eq!(sol.steps, 3);
        assert_eq!(sol.trace.len(), 4);
    }

    #[test]
    fn overflow_without_adapt_fails() {
        let a = diag(&[0.0, 1.0, 100.0]);
        let cfg = InflationConfig {
            dt: Some(1.0),
            adapt: false,
            normalize_every: 1_000_000,
            max_steps: 10_000,
            schedule: Some(Schedule::Plain),
            ..Default::default()
        };
        let err = run_inflation(&a, Some(&[1.0, 1.0, 1.0]), &cfg).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_config() {
        let a = diag(&[1.0, 2.0]);
        for cfg in [
            InflationConfig { dt: Some(-1.0), ..Default::default() },
            InflationConfig { safety: 0.0, ..Default::default() },
            InflationConfig { schedule: Some(Schedule::Window(0.0)), ..Default::default() },
            InflationConfig { tol_mu: Some(0.0), ..Default::default() },
            InflationConfig { normalize_every: 0, ..Default::default() },
        ] {
            assert!(run_inflation(&a, None, &cfg).is_err());
        }
        assert!(run_inflation(&a, Some(&[0.0, 0.0]), &Default::default()).is_err());
        assert!(run_inflation(&a, Some(&[1.0]), &Default::default()).is_err());
    }

    #[test]
    fn gap_scan_examples() {
        let a = diag(&[0.0, 1.0, 10.0]);
        let cfg = GapScanConfig::default();
        assert_eq!(estimate_gap_scan(&a, None, &[0.5, 1.0, 2.0], &cfg).unwrap().best, 1.0);
        assert_eq!(estimate_gap_scan(&a, None, &[0.0], &cfg).unwrap().best, 0.0);
        let tie = estimate_gap_scan(&a, None, &[1.0, 1.0], &cfg).unwrap();
        assert_eq!(tie.best, 1.0);
        assert_eq!(tie.slopes[0].1, tie.slopes[1].1);
        assert!(estimate_gap_scan(&a, None, &[], &cfg).is_err());
        assert!(estimate_gap_scan(&a, None, &[-1.0], &cfg).is_err());
    }

    #[test]
    fn normal_modes() {
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let s = StateVector::at_rest(basis[0].clone());
        let p = project_normal_modes(&s, &basis).unwrap();
        assert_eq!(p.xi, vec![1.0, 0.0, 0.0]);
        assert_eq!(p.pi, vec![0.0; 3]);
        let s = StateVector::new(vec![0.0; 3], basis[1].clone()).unwrap();
        let p = project_normal_modes(&s, &basis).unwrap();
        assert_eq!(p.xi, vec![0.0; 3]);
        assert_eq!(p.pi, vec![0.0, 1.0, 0.0]);
        assert_eq!(p.reconstruct(&basis), s);
        let skew = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(project_normal_modes(&s, &skew).is_err());
    }
}
