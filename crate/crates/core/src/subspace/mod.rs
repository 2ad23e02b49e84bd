//! Dense eigensolving, Rayleigh-Ritz projection, and the subspace-based
//! solvers built on inflation.

mod dense;
mod multi;
mod ritz;
mod windowed;

pub use dense::{jacobi_dense_eigen, DenseMatrix};
pub use multi::{multi_inflation, periodic_subspace_solve, PeriodicConfig};
pub use ritz::{orthonormalize, rayleigh_ritz, rayleigh_ritz_with_images, DEFAULT_DROP_TOL};
pub use windowed::{windowed_solve, WindowedConfig, DEFAULT_K_MAX};
