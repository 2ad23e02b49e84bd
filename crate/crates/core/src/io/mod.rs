//! Matrix Market files, test-matrix generators, and CSV traces.

mod generate;
mod mtx;
mod trace_csv;

pub use generate::{generate, GeneratorSpec};
pub use mtx::{read_matrix_market, write_matrix_market};
pub use trace_csv::{read_trace, write_trace, TRACE_HEADER};

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
