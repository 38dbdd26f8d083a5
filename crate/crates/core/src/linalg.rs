//! Small eigenvalue routines for the grid operators.
//!
//! The discrete generators built by [`crate::theory`] are symmetric after a
//! diagonal similarity transform. One-dimensional ones are tridiagonal and
//! are handled exactly by Sturm-sequence bisection; two-dimensional ones are
//! sparse and go through Lanczos with full reorthogonalisation.

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x` (Sturm count).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> Result<f64> {
    let n = diag.len();
    if k >= n || off.len() + 1 != n {
        return Err(Error::invalid("tridiagonal", "index out of range or shape mismatch"));
    }
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue of a symmetric operator on the orthogonal complement of
/// the unit vector `null`, by Lanczos with full reorthogonalisation.
///
/// Returns the Ritz value once its residual falls below `tol` times the
/// largest Ritz value seen so far.
pub fn lanczos_smallest_in_complement(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    null: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if null.len() != n || n < 2 {
        return Err(Error::invalid("lanczos", "operator needs dimension ≥ 2 matching the null vector"));
    }
    let project = |v: &mut [f64]| {
        let c: f64 = v.iter().zip(null).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(null).for_each(|(a, b)| *a -= c * b);
    };
    // Deterministic start with energy in every mode.
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_75).fract()).collect();
    project(&mut q);
    normalize(&mut q).ok_or_else(|| Error::Numerical("degenerate Lanczos start".into()))?;

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let limit = max_iter.min(n - 1);
    let mut last = f64::NAN;
    for j in 0..limit {
        apply(&basis[j], &mut w);
        let a: f64 = w.iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            project(&mut w);
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();

        if j % 5 == 4 || j + 1 == limit || b < 1e-14 {
            let (theta, last_comp, top) = smallest_ritz(&alpha, &beta)?;
            last = theta;
            if b * last_comp.abs() <= tol * top.abs().max(1.0) || b < 1e-14 {
                return Ok(theta);
            }
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    if last.is_finite() {
        Ok(last)
    } else {
        Err(Error::Numerical("Lanczos did not converge".into()))
    }
}

/// Smallest eigenvalue of the Lanczos tridiagonal, the last component of its
/// normalised eigenvector and the largest eigenvalue.
fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> Result<(f64, f64, f64)> {
    let m = alpha.len();
    let off = &beta[..m - 1];
    let theta = tridiagonal_eigenvalue(alpha, off, 0)?;
    let top = tridiagonal_eigenvalue(alpha, off, m - 1)?;
    // Eigenvector by forward recurrence of (T − θ)v = 0, v₀ = 1.
    let mut v = vec![0.0; m];
    v[0] = 1.0;
    if m > 1 {
        for i in 0..m - 1 {
            let prev = if i > 0 { off[i - 1] * v[i - 1] } else { 0.0 };
            v[i + 1] = if off[i].abs() > 0.0 { -((alpha[i] - theta) * v[i] + prev) / off[i] } else { 0.0 };
            if !v[i + 1].is_finite() {
                return Ok((theta, 1.0, top));
            }
        }
    }
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((theta, v[m - 1] / nrm, top))
}

fn normalize(v: &mut [f64]) -> Option<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
        Some(n)
    } else {
        None
    }
}
