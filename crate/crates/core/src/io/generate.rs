//! Seeded test-matrix families.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; uniform
//! draws use the 53-bit `[0, 1)` conversion of `rand`. Draws are consumed
//! in row-major order over the upper triangle, so a spec always yields the
//! same matrix.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SparseSymMatrix;
use crate::rng::{seeded, uniform, SeededRng};

use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Path-graph Laplacian: diagonal 2, off-diagonal -1.
    Laplacian1d { n: usize },
    /// Each upper entry present with probability `density`, values in
    /// `[-1, 1]`, full diagonal.
    RandomSparse { n: usize, density: f64, seed: u64 },
    /// Diagonal uniform in `[0, spread]`, about four off-diagonals per row
    /// scaled by `coupling`.
    DiagDominant {
        n: usize,
        spread: f64,
        coupling: f64,
        seed: u64,
    },
    /// Diagonal `0, gap, 1, 2, ..., n-2` with weak couplings of size
    /// `gap / 10`.
    NearDegenerate { n: usize, gap: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn dim(&self) -> usize {
        match *self {
            GeneratorSpec::Laplacian1d { n }
            | GeneratorSpec::RandomSparse { n, .. }
            | GeneratorSpec::DiagDominant { n, .. }
            | GeneratorSpec::NearDegenerate { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::invalid(format!("generator needs n >= 2, got {n}")));
        }
        match *self {
            GeneratorSpec::Laplacian1d { .. } => Ok(()),
            GeneratorSpec::RandomSparse { density, .. } => {
                if density > 0.0 && density <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("density must lie in (0, 1], got {density}")))
                }
            }
            GeneratorSpec::DiagDominant {
                spread, coupling, ..
            } => {
                if spread >= 0.0 && spread.is_finite() && coupling.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("spread must be >= 0 and coupling finite"))
                }
            }
            GeneratorSpec::NearDegenerate { gap, .. } => {
                if gap > 0.0 && gap.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("gap must be positive, got {gap}")))
                }
            }
        }
    }
}

fn bernoulli(rng: &mut SeededRng, p: f64) -> bool {
    p >= 1.0 || rng.random::<f64>() < p
}

/// Builds the matrix described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<SparseSymMatrix> {
    spec.validate()?;
    let n = spec.dim();
    let mut t: Vec<(usize, usize, f64)> = Vec::new();
    match *spec {
        GeneratorSpec::Laplacian1d { .. } => {
            for i in 0..n {
                t.push((i, i, 2.0));
                if i + 1 < n {
                    t.push((i, i + 1, -1.0));
                }
            }
        }
        GeneratorSpec::RandomSparse { density, seed, .. } => {
            let mut rng = seeded(seed);
            for i in 0..n {
                t.push((i, i, uniform(&mut rng, -1.0, 1.0)));
                for j in i + 1..n {
                    if bernoulli(&mut rng, density) {
                        t.push((i, j, uniform(&mut rng, -1.0, 1.0)));
                    }
                }
            }
        }
        GeneratorSpec::DiagDominant {
            spread,
            coupling,
            seed,
            ..
        } => {
            let mut rng = seeded(seed);
            let p = (4.0 / n as f64).min(1.0);
            for i in 0..n {
                t.push((i, i, uniform(&mut rng, 0.0, spread)));
                for j in i + 1..n {
                    if bernoulli(&mut rng, p) {
                        t.push((i, j, coupling * uniform(&mut rng, -1.0, 1.0)));
                    }
                }
            }
        }
        GeneratorSpec::NearDegenerate { gap, seed, .. } => {
            let mut rng = seeded(seed);
            let p = (3.0 / n as f64).min(1.0);
            let c = gap / 10.0;
            for i in 0..n {
                let d = match i {
                    0 => 0.0,
                    1 => gap,
                    _ => (i - 1) as f64,
                };
                t.push((i, i, d));
                for j in i + 1..n {
                    if j == i + 1 || bernoulli(&mut rng, p) {
                        t.push((i, j, c * uniform(&mut rng, -1.0, 1.0)));
                    }
                }
            }
        }
    }
    SparseSymMatrix::from_symmetric_triplets(n, &t)
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Laplacian1d { n } => write!(f, "laplacian1d:{n}"),
            GeneratorSpec::RandomSparse { n, density, seed } => {
                write!(f, "random_sparse:{n}:{density}:{seed}")
            }
            GeneratorSpec::DiagDominant {
                n,
                spread,
                coupling,
                seed,
            } => write!(f, "diag_dominant:{n}:{spread}:{coupling}:{seed}"),
            GeneratorSpec::NearDegenerate { n, gap, seed } => {
                write!(f, "near_degenerate:{n}:{gap}:{seed}")
            }
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `kind:param:...`, e.g. `random_sparse:200:0.05:7`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let kind = parts[0].to_ascii_lowercase().replace('-', "_");
        let args = &parts[1..];
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "generator '{kind}' takes {k} parameters, got {}",
                    args.len()
                )))
            }
        };
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
            s.parse()
                .map_err(|_| Error::invalid(format!("bad {what} '{s}'")))
        }
        let spec = match kind.as_str() {
            "laplacian1d" => {
                want(1)?;
                GeneratorSpec::Laplacian1d {
                    n: num(args[0], "n")?,
                }
            }
            "random_sparse" => {
                want(3)?;
                GeneratorSpec::RandomSparse {
                    n: num(args[0], "n")?,
                    density: num(args[1], "density")?,
                    seed: num(args[2], "seed")?,
                }
            }
            "diag_dominant" => {
                want(4)?;
                GeneratorSpec::DiagDominant {
                    n: num(args[0], "n")?,
                    spread: num(args[1], "spread")?,
                    coupling: num(args[2], "coupling")?,
                    seed: num(args[3], "seed")?,
                }
            }
            "near_degenerate" => {
                want(3)?;
                GeneratorSpec::NearDegenerate {
                    n: num(args[0], "n")?,
                    gap: num(args[1], "gap")?,
                    seed: num(args[2], "seed")?,
                }
            }
            _ => return Err(Error::invalid(format!("unknown generator '{}'", parts[0]))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{jacobi_dense_eigen, DenseMatrix};

    fn eig(a: &SparseSymMatrix) -> Vec<f64> {
        jacobi_dense_eigen(&DenseMatrix::from_rows(&a.to_dense()).unwrap())
            .unwrap()
            .values
    }

    #[test]
    fn laplacian_spectrum() {
        let a = generate(&"laplacian1d:3".parse().unwrap()).unwrap();
        let e = eig(&a);
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (x, y) in e.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(generate(&GeneratorSpec::Laplacian1d { n: 5 }).unwrap().nnz(), 13);
    }

    #[test]
    fn deterministic() {
        let s: GeneratorSpec = "random_sparse:50:0.1:7".parse().unwrap();
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other: GeneratorSpec = "random_sparse:50:0.1:8".parse().unwrap();
        assert_ne!(generate(&s).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn near_degenerate_gap() {
        let a = generate(&"near_degenerate:10:1e-6:3".parse().unwrap()).unwrap();
        let e = eig(&a);
        let g = e[1] - e[0];
        assert!((0.5e-6..=1.5e-6).contains(&g), "gap {g}");
    }

    #[test]
    fn parse_errors() {
        for s in [
            "laplacian1d",
            "laplacian1d:1",
            "random_sparse:10:0:1",
            "random_sparse:10:1.5:1",
            "near_degenerate:10:0:1",
            "near_degenerate:10:-1:1",
            "bogus:3",
            "diag_dominant:10:1:0.1",
        ] {
            assert!(s.parse::<GeneratorSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn display_roundtrip() {
        for s in ["laplacian1d:7", "random_sparse:20:0.25:3", "diag_dominant:30:10:0.1:4", "near_degenerate:12:0.001:9"] {
            let g: GeneratorSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
    }
}
