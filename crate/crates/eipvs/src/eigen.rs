//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Plane rotations annihilate one off-diagonal element at a time; sweeping
//! the whole upper triangle repeatedly drives the off-diagonal mass to zero
//! quadratically. Eigenvectors are not accumulated (only the spectrum is
//! needed for definiteness checks).

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric matrix, unsorted.
///
/// Converges when the off-diagonal Frobenius norm falls below
/// `1e-12 * max(1, ||A||_F)`; the relative form keeps the contract
/// meaningful for matrices of any scale.
pub fn jacobi_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidParams("eigendecomposition needs a square matrix".into()));
    }
    let defect = m.max_symmetry_defect();
    let scale = m.frobenius_norm();
    if defect > 1e-9 * scale.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "matrix is not symmetric (defect {defect})"
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    // symmetrize exactly so rotations stay consistent
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let tol = 1e-12 * scale.max(1.0);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // smaller root for a stable rotation angle
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    if off_diagonal_norm(&a) > tol {
        return Err(Error::Internal("jacobi sweeps did not converge".into()));
    }
    Ok((0..n).map(|i| a.get(i, i)).collect())
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = a.get(i, j);
                s += v * v;
            }
        }
    }
    s.sqrt()
}
