//! Gram-Schmidt orthogonalization inside the elastic inner-product space,
//! plus the two reference families used to study it: a spike basis of
//! increasing lengths and a discrete sine-cosine basis.
//!
//! Orthogonalizing against an elastic inner product deforms the family in a
//! characteristic way: with the spike basis, every spike after the first is
//! replaced by a negative spike followed by a positive one; the sine-cosine
//! family, orthogonal in the Euclidean sense, loses its orthogonality as
//! soon as the stiffness is finite.

use crate::elastic::{eip, eip_norm, ElasticParams};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Relative residual below which a family member is declared dependent.
const DEPENDENCE_THRESHOLD: f64 = 1e-10;

/// Modified Gram-Schmidt over the series algebra: projections use the
/// elastic inner product, combinations use series addition and scaling, and
/// normalization uses the induced norm. Returns an orthonormal family
/// spanning the input.
pub fn gram_schmidt(family: &[TimeSeries], params: &ElasticParams) -> Result<Vec<TimeSeries>> {
    let mut basis: Vec<TimeSeries> = Vec::with_capacity(family.len());
    for (index, member) in family.iter().enumerate() {
        let input_norm = eip_norm(member, params)?;
        let mut residual = member.clone();
        for e in &basis {
            let coefficient = eip(&residual, e, params)?;
            residual = residual.oplus(&e.scale(-coefficient))?;
        }
        let norm = eip_norm(&residual, params)?;
        if norm <= DEPENDENCE_THRESHOLD * input_norm {
            return Err(Error::DependentFamily { index });
        }
        basis.push(residual.scale(1.0 / norm));
    }
    Ok(basis)
}

/// Family of `count` series of increasing lengths on the uniform grid
/// `0, s, 2s, ..., 1` with `s = 1/(count-1)`: the k-th member has `k`
/// samples, all equal to `epsilon` except the last one which is 1.
///
/// `epsilon` stands in for the forbidden zero value; the default choice
/// `2^-52` survives multiplication by kernel weights, unlike a subnormal.
pub fn make_spike_basis(count: usize, epsilon: f64) -> Result<Vec<TimeSeries>> {
    if count == 0 {
        return Err(Error::InvalidParams("count must be at least 1".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParams("epsilon must be positive and finite".into()));
    }
    let step = if count == 1 { 0.0 } else { 1.0 / (count as f64 - 1.0) };
    (1..=count)
        .map(|k| {
            let values: Vec<f64> =
                (0..k).map(|i| if i + 1 == k { 1.0 } else { epsilon }).collect();
            let times: Vec<f64> = (0..k).map(|i| i as f64 * step).collect();
            TimeSeries::univariate_at(values, times)
        })
        .collect()
}

/// Discrete sine-cosine family: for each wavenumber `k = 1..=pairs`, the two
/// series `sin(2 pi k i / length)` and `cos(2 pi k i / length)` sampled at
/// `i = 0..length-1`, with timestamps uniform on `[0, 1]`. Exact zeros are
/// replaced by `epsilon`.
pub fn make_sincos_basis(pairs: usize, length: usize, epsilon: f64) -> Result<Vec<TimeSeries>> {
    if pairs == 0 {
        return Err(Error::InvalidParams("pairs must be at least 1".into()));
    }
    if length < 2 {
        return Err(Error::InvalidParams("length must be at least 2".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParams("epsilon must be positive and finite".into()));
    }
    let times: Vec<f64> = (0..length).map(|i| i as f64 / (length as f64 - 1.0)).collect();
    let mut family = Vec::with_capacity(2 * pairs);
    for k in 1..=pairs {
        for wave in 0..2 {
            let values: Vec<f64> = (0..length)
                .map(|i| {
                    let phase = 2.0 * std::f64::consts::PI * k as f64 * i as f64 / length as f64;
                    let v = if wave == 0 { phase.sin() } else { phase.cos() };
                    if v == 0.0 {
                        epsilon
                    } else {
                        v
                    }
                })
                .collect();
            family.push(TimeSeries::univariate_at(values, times.clone())?);
        }
    }
    Ok(family)
}
