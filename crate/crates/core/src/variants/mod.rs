//! Baseline eigensolvers used for matvec-count comparisons, and the quartic
//! soft-constraint variant.

mod first_order;
mod lanczos;
mod power;
mod quartic;

pub use first_order::{first_order_descent, FirstOrderConfig};
pub use lanczos::{lanczos_basic, LanczosMode};
pub use power::{power_method, PowerConfig, PowerMode};
pub use quartic::{quartic_descent, quartic_gradient, quartic_timestep, QuarticConfig};
