//! Per-step convergence history.

/// One logged iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub step: usize,
    /// Matrix-vector products taken so far, including this step's.
    pub m: u64,
    pub lambda: f64,
    pub mu: f64,
    pub dt: f64,
    pub lambda_tilde: f64,
}

/// Ritz values produced by one subspace diagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzRecord {
    pub step: usize,
    pub m: u64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<ConvergenceRecord>,
    pub ritz: Vec<RitzRecord>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: ConvergenceRecord) {
        debug_assert!(self.records.last().is_none_or(|l| l.m <= r.m));
        self.records.push(r);
    }

    pub fn last(&self) -> Option<&ConvergenceRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// First record whose `mu` is at or below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<&ConvergenceRecord> {
        self.records.iter().find(|r| r.mu <= threshold)
    }

    /// Matvec count at which `mu` first reached `threshold`.
    pub fn matvecs_to(&self, threshold: f64) -> Option<u64> {
        self.first_below(threshold).map(|r| r.m)
    }
}
