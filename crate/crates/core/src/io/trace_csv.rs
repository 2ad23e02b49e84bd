use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::trace::{ConvergenceRecord, Trace};

use super::fmt_f64;

pub const TRACE_HEADER: &str = "step,m,lambda,mu,dt,lambda_tilde";

/// Writes one line per record after the header. Floats carry 17
/// significant digits, so reading back is bit-exact.
pub fn write_trace(trace: &Trace, mut out: impl Write) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.step,
            r.m,
            fmt_f64(r.lambda),
            fmt_f64(r.mu),
            fmt_f64(r.dt),
            fmt_f64(r.lambda_tilde)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace(source: impl BufRead) -> Result<Trace> {
    let mut lines = source.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != TRACE_HEADER {
        return Err(Error::parse(1, format!("expected header '{TRACE_HEADER}'")));
    }
    let mut trace = Trace::new();
    let mut last_m = 0;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        if cols.len() != 6 {
            return Err(Error::parse(lineno, format!("expected 6 columns, got {}", cols.len())));
        }
        let f = |k: usize| -> Result<f64> {
            cols[k]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad number '{}'", cols[k])))
        };
        let step = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad step '{}'", cols[0])))?;
        let m: u64 = cols[1]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad matvec count '{}'", cols[1])))?;
        if m < last_m {
            return Err(Error::parse(lineno, "matvec count decreased"));
        }
        last_m = m;
        trace.push(ConvergenceRecord {
            step,
            m,
            lambda: f(2)?,
            mu: f(3)?,
            dt: f(4)?,
            lambda_tilde: f(5)?,
        });
    }
    Ok(trace)
}
