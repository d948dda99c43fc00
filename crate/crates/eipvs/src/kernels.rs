//! Kernels derived from the elastic inner product, Gram matrices, and an
//! empirical positive-semidefiniteness check.
//!
//! The inner product itself is a positive definite kernel; so are its
//! powers, its exponential, the gaussian of the induced distance and
//! `exp(-rate * distance^p)` for `0 < p <= 2`. Definiteness is verified
//! empirically through the spectrum of sampled Gram matrices.

use std::io::Write;

use rayon::prelude::*;

use crate::eigen::jacobi_eigenvalues;
use crate::elastic::{eip, eip_distance, ElasticParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::series::TimeSeries;

/// A kernel on time series.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `exp(-d_eip(A,B)^2 / (2 sigma^2))`
    GaussianEip { params: ElasticParams, sigma: f64 },
    /// Same form with the plain Euclidean distance on aligned series.
    GaussianEuclid { sigma: f64 },
    /// `<A,B>_eip ^ degree`
    PolynomialEip { params: ElasticParams, degree: u32 },
    /// `exp(<A,B>_eip)`
    ExpEip { params: ElasticParams },
    /// `exp(-rate * d_eip(A,B)^exponent)`, `0 < exponent <= 2`
    ExpNegDistance { params: ElasticParams, rate: f64, exponent: f64 },
}

impl KernelSpec {
    fn check(&self) -> Result<()> {
        match self {
            KernelSpec::GaussianEip { sigma, .. } | KernelSpec::GaussianEuclid { sigma } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::InvalidParams("sigma must be positive".into()));
                }
            }
            KernelSpec::PolynomialEip { .. } | KernelSpec::ExpEip { .. } => {}
            KernelSpec::ExpNegDistance { rate, exponent, .. } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(Error::InvalidParams("rate must be positive".into()));
                }
                if !exponent.is_finite() || *exponent <= 0.0 || *exponent > 2.0 {
                    return Err(Error::InvalidParams("exponent must satisfy 0 < p <= 2".into()));
                }
            }
        }
        Ok(())
    }
}

/// Evaluates a kernel on a pair of series. Exactly symmetric in its
/// arguments.
pub fn kernel_eval(spec: &KernelSpec, a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    spec.check()?;
    match spec {
        KernelSpec::GaussianEip { params, sigma } => {
            let d = eip_distance(a, b, params)?;
            Ok((-d * d / (2.0 * sigma * sigma)).exp())
        }
        KernelSpec::GaussianEuclid { sigma } => {
            let d = crate::eval::euclidean_distance(a, b)?;
            Ok((-d * d / (2.0 * sigma * sigma)).exp())
        }
        KernelSpec::PolynomialEip { params, degree } => {
            Ok(eip(a, b, params)?.powi(*degree as i32))
        }
        KernelSpec::ExpEip { params } => Ok(eip(a, b, params)?.exp()),
        KernelSpec::ExpNegDistance { params, rate, exponent } => {
            let d = eip_distance(a, b, params)?;
            Ok((-rate * d.powf(*exponent)).exp())
        }
    }
}

/// Pairwise kernel matrix over a set of items. Each unordered pair is
/// evaluated once (in parallel over the upper triangle) and mirrored, so the
/// result is exactly symmetric.
pub fn gram_matrix(spec: &KernelSpec, items: &[TimeSeries]) -> Result<Matrix> {
    spec.check()?;
    let m = items.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let values: Result<Vec<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| kernel_eval(spec, &items[i], &items[j]))
        .collect();
    let values = values?;
    let mut gram = Matrix::zeros(m, m);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        gram.set(i, j, v);
        gram.set(j, i, v);
    }
    Ok(gram)
}

/// Result of an empirical definiteness check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub is_psd: bool,
}

/// Checks positive semidefiniteness through the full symmetric spectrum:
/// PSD iff `lambda_min >= -tol * max(1, lambda_max)`.
pub fn check_psd(matrix: &Matrix, tol: f64) -> Result<PsdReport> {
    let eig = jacobi_eigenvalues(matrix)?;
    if eig.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let min_eigenvalue = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(PsdReport {
        min_eigenvalue,
        max_eigenvalue,
        is_psd: min_eigenvalue >= -tol * max_eigenvalue.max(1.0),
    })
}

/// Writes a Gram matrix as CSV with a header row of item ids.
pub fn write_gram_csv<W: Write>(w: &mut W, ids: &[String], gram: &Matrix) -> Result<()> {
    if ids.len() != gram.rows() {
        return Err(Error::DimensionMismatch { left: gram.rows(), right: ids.len() });
    }
    writeln!(w, "{}", ids.join(","))?;
    for i in 0..gram.rows() {
        let row: Vec<String> = gram.row(i).iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes a Gram matrix in the precomputed-kernel text layout consumed by
/// external SVM tools: `label 0:serial 1:k(x,x1) 2:k(x,x2) ...`.
pub fn write_gram_libsvm<W: Write>(w: &mut W, labels: &[String], gram: &Matrix) -> Result<()> {
    if labels.len() != gram.rows() {
        return Err(Error::DimensionMismatch { left: gram.rows(), right: labels.len() });
    }
    for i in 0..gram.rows() {
        write!(w, "{} 0:{}", labels[i], i + 1)?;
        for (j, v) in gram.row(i).iter().enumerate() {
            write!(w, " {}:{}", j + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}
