//! Extremal eigenpairs of sparse symmetric matrices by inflationary
//! dynamics.
//!
//! The state vector is evolved under `x'' = -(A - lambda_tilde) x` with a
//! border `lambda_tilde` placed just above the running Rayleigh quotient.
//! Modes below the border grow exponentially, so the ground state takes over
//! after a number of steps that scales with the inverse square root of the
//! spectral gap. Every solver reports its cost as a count of matrix-vector
//! products.
//!
//! ```
//! use inflation::{generate, run_inflation, GeneratorSpec, InflationConfig};
//!
//! let a = generate(&GeneratorSpec::Laplacian1d { n: 50 }).unwrap();
//! let cfg = InflationConfig {
//!     tol_mu: Some(1e-16),
//!     ..Default::default()
//! };
//! let sol = run_inflation(&a, None, &cfg).unwrap();
//! let exact = 2.0 - 2.0 * (std::f64::consts::PI / 51.0).cos();
//! assert!(sol.converged());
//! assert!((sol.value() - exact).abs() < 1e-8);
//! ```

pub mod dynamics;
pub mod error;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod solution;
pub mod subspace;
pub mod trace;
pub mod variants;
pub mod vector;

pub use dynamics::{
    choose_timestep, estimate_gap_scan, inflation_step, project_normal_modes, run_inflation,
    run_inflation_from, GapScan, GapScanConfig, InflationConfig, Integrator, NormalModeProjection,
    Schedule,
};
pub use error::{Error, Result};
pub use io::{
    generate, read_matrix_market, read_trace, write_matrix_market, write_trace, GeneratorSpec,
};
pub use matrix::{
    gershgorin_bounds, matvec, rayleigh_quotient, residual_measure, CountingOperator,
    SparseSymMatrix, SpectralBounds, StateVector,
};
pub use solution::{EigenpairSet, Solution};
pub use subspace::{
    jacobi_dense_eigen, multi_inflation, orthonormalize, periodic_subspace_solve, rayleigh_ritz,
    windowed_solve, DenseMatrix, PeriodicConfig, WindowedConfig,
};
pub use trace::{ConvergenceRecord, RitzRecord, Trace};
pub use variants::{
    first_order_descent, lanczos_basic, power_method, quartic_descent, FirstOrderConfig,
    LanczosMode, PowerConfig, PowerMode, QuarticConfig,
};
