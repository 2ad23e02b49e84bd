//! Dense vector helpers shared by the solvers.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn is_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Returns `v / |v|`.
pub fn normalize(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    normalize_in_place(&mut out)?;
    Ok(out)
}

/// Scales `v` to unit length and returns the norm it had.
pub fn normalize_in_place(v: &mut [f64]) -> Result<f64> {
    if !is_finite(v) {
        return Err(Error::NonFinite("normalize"));
    }
    let n = norm(v);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !n.is_finite() {
        // Entries are finite but the sum of squares overflowed.
        let m = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        scale(1.0 / m, v);
        let n2 = norm(v);
        scale(1.0 / n2, v);
        return Ok(m * n2);
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    Ok(n)
}

/// Flips the sign of `v` so that its largest-magnitude entry is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        // strict comparison keeps the first index on ties
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        scale(-1.0, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[3.0, 4.0]).unwrap(), vec![0.6, 0.8]);
        assert_eq!(normalize(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(normalize(&[-2.0, 0.0]).unwrap(), vec![-1.0, 0.0]);
    }

    #[test]
    fn normalize_rejects_zero_and_nan() {
        assert!(matches!(normalize(&[0.0, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(
            normalize(&[1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            normalize(&[f64::INFINITY, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn normalize_survives_huge_entries() {
        let v = normalize(&[1e300, 1e300]).unwrap();
        assert!((norm(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.2];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.2]);
    }
}
