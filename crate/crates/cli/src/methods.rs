//! Maps command-line options onto solver configurations.

use clap::{Args, ValueEnum};
use inflation::dynamics::Schedule;
use inflation::{
    first_order_descent, lanczos_basic, multi_inflation, periodic_subspace_solve, power_method,
    quartic_descent, run_inflation, windowed_solve, FirstOrderConfig, InflationConfig, Integrator,
    LanczosMode, PeriodicConfig, PowerConfig, PowerMode, QuarticConfig, Result, Solution,
    SparseSymMatrix, WindowedConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Inflation,
    Windowed,
    Multi,
    Periodic,
    FirstOrder,
    Power,
    Lanczos,
    Quartic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Inflation => "inflation",
            Method::Windowed => "windowed",
            Method::Multi => "multi",
            Method::Periodic => "periodic",
            Method::FirstOrder => "first-order",
            Method::Power => "power",
            Method::Lanczos => "lanczos",
            Method::Quartic => "quartic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    Euler,
    Verlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LanczosModeArg {
    Full,
    TwoPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowerModeArg {
    Smallest,
    Largest,
}

/// Solver options shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct SolverOptions {
    /// Time step [default: safety * 2 / sqrt(hi - lo)]
    #[arg(long)]
    pub dt: Option<f64>,

    /// Fraction of the stability limit used for the automatic time step
    #[arg(long, default_value_t = 0.9)]
    pub safety: f64,

    /// Gap schedule: border at lambda + GAP
    #[arg(long, conflicts_with_all = ["window", "plain"])]
    pub gap: Option<f64>,

    /// Window schedule: border at lambda + WINDOW [default: 5% of the spectral range]
    #[arg(long, conflicts_with = "plain")]
    pub window: Option<f64>,

    /// Border at lambda itself
    #[arg(long)]
    pub plain: bool,

    #[arg(long, value_enum, default_value_t = IntegratorArg::Euler)]
    pub integrator: IntegratorArg,

    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,

    /// Convergence threshold on mu [default: 1e-10 * (hi - lo)^2]
    #[arg(long)]
    pub tol_mu: Option<f64>,

    #[arg(long, default_value_t = 1)]
    pub normalize_every: usize,

    /// Keep the time step fixed even when the state blows up
    #[arg(long)]
    pub no_adapt: bool,

    /// Eigenpairs wanted (windowed, multi, periodic; lanczos reports this many)
    #[arg(long, short = 'k', default_value_t = 1)]
    pub pairs: usize,

    /// Largest Krylov basis tried by the windowed solve
    #[arg(long)]
    pub k_max: Option<usize>,

    /// Iterates kept per diagonalization (periodic)
    #[arg(long, default_value_t = 6)]
    pub basis_size: usize,

    /// Steps between diagonalizations (periodic)
    #[arg(long, default_value_t = 6)]
    pub period: usize,

    /// Krylov dimension [default: min(n, 300)]
    #[arg(long)]
    pub lanczos_steps: Option<usize>,

    #[arg(long, value_enum, default_value_t = LanczosModeArg::Full)]
    pub lanczos_mode: LanczosModeArg,

    /// Imaginary-time step for first-order descent [default: 1 / (hi - lo)]
    #[arg(long)]
    pub dbeta: Option<f64>,

    #[arg(long, value_enum, default_value_t = PowerModeArg::Smallest)]
    pub power_mode: PowerModeArg,

    /// Shift for the smallest-eigenvalue power method [default: Gershgorin upper bound]
    #[arg(long)]
    pub shift: Option<f64>,

    /// Quartic constraint stiffness [default: Gershgorin upper bound]
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Quartic velocity damping [default: sqrt(hi - lo) / 10]
    #[arg(long)]
    pub damping: Option<f64>,

    /// Quartic gradient-norm threshold
    #[arg(long, default_value_t = 1e-10)]
    pub tol_grad: f64,
}

impl SolverOptions {
    pub fn inflation(&self, seed: u64) -> InflationConfig {
        let schedule = if self.plain {
            Some(Schedule::Plain)
        } else if let Some(g) = self.gap {
            Some(Schedule::Gap(g))
        } else {
            self.window.map(Schedule::Window)
        };
        InflationConfig {
            dt: self.dt,
            safety: self.safety,
            schedule,
            integrator: match self.integrator {
                IntegratorArg::Euler => Integrator::Euler,
                IntegratorArg::Verlet => Integrator::Verlet,
            },
            max_steps: self.max_steps,
            tol_mu: self.tol_mu,
            normalize_every: self.normalize_every,
            seed,
            adapt: !self.no_adapt,
            bounds: None,
        }
    }

    /// Runs `method` from `x0`, or from the seeded random vector.
    pub fn run(
        &self,
        method: Method,
        a: &SparseSymMatrix,
        x0: Option<&[f64]>,
        seed: u64,
    ) -> Result<Solution> {
        let inf = self.inflation(seed);
        match method {
            Method::Inflation => run_inflation(a, x0, &inf),
            Method::Windowed => {
                let mut cfg = WindowedConfig::new(inf, self.pairs);
                if let Some(k) = self.k_max {
                    cfg.k_max = k;
                }
                windowed_solve(a, x0, &cfg)
            }
            Method::Multi => {
                let starts = x0.map(|x| block_starts(x, self.pairs, seed));
                multi_inflation(a, starts.as_deref(), self.pairs, &inf)
            }
            Method::Periodic => periodic_subspace_solve(
                a,
                x0,
                &PeriodicConfig {
                    inflation: inf,
                    basis_size: self.basis_size,
                    period: self.period,
                    want: self.pairs,
                },
            ),
            Method::FirstOrder => first_order_descent(
                a,
                x0,
                &FirstOrderConfig {
                    dbeta: self.dbeta,
                    max_steps: self.max_steps,
                    tol_mu: self.tol_mu,
                    seed,
                },
            ),
            Method::Power => power_method(
                a,
                x0,
                &PowerConfig {
                    mode: match self.power_mode {
                        PowerModeArg::Smallest => PowerMode::SmallestShifted,
                        PowerModeArg::Largest => PowerMode::Largest,
                    },
                    max_steps: self.max_steps,
                    tol_mu: self.tol_mu,
                    shift: self.shift,
                    seed,
                },
            ),
            Method::Lanczos => {
                let m = self.lanczos_steps.unwrap_or(a.dim().min(300));
                let mode = match self.lanczos_mode {
                    LanczosModeArg::Full => LanczosMode::FullReorth,
                    LanczosModeArg::TwoPass => LanczosMode::TwoPass,
                };
                let mut sol = lanczos_basic(a, x0, m, mode, seed)?;
                sol.pairs.truncate(self.pairs);
                Ok(sol)
            }
            Method::Quartic => quartic_descent(
                a,
                x0,
                &QuarticConfig {
                    kappa: self.kappa,
                    dt: self.dt,
                    damping: self.damping,
                    safety: self.safety,
                    max_steps: self.max_steps,
                    tol_grad: self.tol_grad,
                    seed,
                },
            ),
        }
    }
}

/// `x0` followed by `k - 1` seeded random vectors.
fn block_starts(x0: &[f64], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = inflation::rng::seeded(seed.wrapping_add(1));
    let mut out = vec![x0.to_vec()];
    while out.len() < k {
        out.push(inflation::rng::random_unit_vector(x0.len(), &mut rng));
    }
    out
}
