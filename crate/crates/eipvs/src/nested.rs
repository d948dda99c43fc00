//! One level of elastic nesting: series whose sample values are themselves
//! time series, with the inner elastic inner product playing the role of the
//! spatial product of the outer recursion.
//!
//! The outer structure keeps the same algebra: addition merges timestamps
//! and adds co-occurring inner series with the series-level addition,
//! discarding samples whose inner sum collapses to the empty series.

use crate::elastic::{elastic_dp, eip_flat, ElasticParams, SpatialProduct, TimeWeight};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// A series of `(inner series, timestamp)` samples. Inner series must be
/// nonempty (the empty inner series is the zero value, excluded from the
/// space) and share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedSeries {
    samples: Vec<(TimeSeries, f64)>,
    inner_dim: usize,
}

impl NestedSeries {
    pub fn new(samples: Vec<(TimeSeries, f64)>) -> Result<Self> {
        let inner_dim = samples.first().map(|(s, _)| s.dim()).unwrap_or(1);
        for (i, (s, t)) in samples.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::ZeroValue { index: i });
            }
            if s.dim() != inner_dim {
                return Err(Error::DimensionMismatch { left: inner_dim, right: s.dim() });
            }
            if !t.is_finite() {
                return Err(Error::NonFiniteValue { index: i });
            }
            if i > 0 && !(samples[i].1 > samples[i - 1].1) {
                return Err(Error::NonMonotoneTimestamps { index: i });
            }
        }
        Ok(Self { samples, inner_dim })
    }

    pub fn empty() -> Self {
        Self { samples: Vec::new(), inner_dim: 1 }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn inner(&self, i: usize) -> &TimeSeries {
        &self.samples[i].0
    }

    pub fn timestamp(&self, i: usize) -> f64 {
        self.samples[i].1
    }

    pub fn scale(&self, lambda: f64) -> NestedSeries {
        if lambda == 0.0 {
            return NestedSeries::empty();
        }
        let samples = self
            .samples
            .iter()
            .filter_map(|(s, t)| {
                let scaled = s.scale(lambda);
                if scaled.is_empty() {
                    None
                } else {
                    Some((scaled, *t))
                }
            })
            .collect();
        NestedSeries { samples, inner_dim: self.inner_dim }
    }

    pub fn oplus(&self, other: &NestedSeries) -> Result<NestedSeries> {
        if !self.is_empty() && !other.is_empty() && self.inner_dim != other.inner_dim {
            return Err(Error::DimensionMismatch { left: self.inner_dim, right: other.inner_dim });
        }
        let mut samples = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let (ta, tb) = (self.samples[i].1, other.samples[j].1);
            if ta < tb {
                samples.push(self.samples[i].clone());
                i += 1;
            } else if ta > tb {
                samples.push(other.samples[j].clone());
                j += 1;
            } else {
                let sum = self.samples[i].0.oplus(&other.samples[j].0)?;
                if !sum.is_empty() {
                    samples.push((sum, ta));
                }
                i += 1;
                j += 1;
            }
        }
        samples.extend_from_slice(&self.samples[i..]);
        samples.extend_from_slice(&other.samples[j..]);
        let inner_dim = if self.is_empty() { other.inner_dim } else { self.inner_dim };
        Ok(NestedSeries { samples, inner_dim })
    }
}

/// Elastic inner product on nested series. `params.spatial` must carry the
/// inner parameters; the inner level must itself be Euclidean-spatial (one
/// nesting level).
pub fn eip_nested(a: &NestedSeries, b: &NestedSeries, params: &ElasticParams) -> Result<f64> {
    if !params.is_eip_mode() {
        return Err(Error::InvalidParams(
            "inner-product mode requires alpha=1, beta=-1, xi=0".into(),
        ));
    }
    let inner = match &params.spatial {
        SpatialProduct::NestedEip(inner) => inner.as_ref(),
        SpatialProduct::Euclidean => {
            return Err(Error::InvalidParams(
                "nested series require a nested spatial product".into(),
            ))
        }
    };
    if !inner.is_eip_mode() {
        return Err(Error::InvalidParams("inner parameters must be in eip mode".into()));
    }
    if !matches!(inner.spatial, SpatialProduct::Euclidean) {
        return Err(Error::InvalidParams("nesting is capped at one level".into()));
    }
    if !a.is_empty() && !b.is_empty() && a.inner_dim != b.inner_dim {
        return Err(Error::DimensionMismatch { left: a.inner_dim, right: b.inner_dim });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    // swap so the rolling rows span the shorter side; evaluation is symmetric
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let ta: Vec<f64> = (0..a.len()).map(|i| a.timestamp(i)).collect();
    let tb: Vec<f64> = (0..b.len()).map(|j| b.timestamp(j)).collect();
    let weight = TimeWeight::new(params.time_kernel, params.nu, &ta, &tb);
    Ok(elastic_dp(a.len(), b.len(), 1.0, -1.0, 0.0, true, |i, j| {
        eip_flat(a.inner(i), b.inner(j), inner) * weight.g(i, j)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> ElasticParams {
        let mut p = ElasticParams::eip(0.1);
        p.spatial = SpatialProduct::NestedEip(Box::new(ElasticParams::eip(0.5)));
        p
    }

    fn random_inner(rng: &mut ChaCha8Rng) -> TimeSeries {
        let len = rng.random_range(1..=4);
        let values: Vec<f64> = (0..len)
            .map(|_| {
                let v: f64 = rng.random_range(-2.0..2.0);
                if v == 0.0 {
                    1.0
                } else {
                    v
                }
            })
            .collect();
        TimeSeries::univariate(values).unwrap()
    }

    fn random_nested(rng: &mut ChaCha8Rng) -> NestedSeries {
        let len = rng.random_range(1..=5);
        let samples = (0..len)
            .map(|k| (random_inner(rng), k as f64 + 1.0))
            .collect();
        NestedSeries::new(samples).unwrap()
    }

    #[test]
    fn empty_gives_zero() {
        let a = random_nested(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(eip_nested(&a, &NestedSeries::empty(), &params()).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = random_nested(&mut rng);
            let b = random_nested(&mut rng);
            let ab = eip_nested(&a, &b, &params()).unwrap();
            let ba = eip_nested(&b, &a, &params()).unwrap();
            assert_eq!(ab.to_bits(), ba.to_bits());
        }
    }

    #[test]
    fn positive_definite_and_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_nested(&mut rng);
            let aa = eip_nested(&a, &a, &params()).unwrap();
            assert!(aa > 0.0);
            let lam: f64 = rng.random_range(0.25..3.0);
            let lhs = eip_nested(&a.scale(lam), &a, &params()).unwrap();
            assert_relative_eq!(lhs, lam * aa, max_relative = 1e-10);
        }
    }

    #[test]
    fn additive_over_oplus() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = random_nested(&mut rng);
            let b = random_nested(&mut rng);
            let c = random_nested(&mut rng);
            let lhs = eip_nested(&a.oplus(&b).unwrap(), &c, &params()).unwrap();
            let rhs = eip_nested(&a, &c, &params()).unwrap() + eip_nested(&b, &c, &params()).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn cauchy_schwarz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_nested(&mut rng);
            let b = random_nested(&mut rng);
            let ab = eip_nested(&a, &b, &params()).unwrap();
            let aa = eip_nested(&a, &a, &params()).unwrap();
            let bb = eip_nested(&b, &b, &params()).unwrap();
            assert!(ab * ab <= aa * bb * (1.0 + 1e-12));
        }
    }

    #[test]
    fn depth_cap_enforced() {
        let mut inner = ElasticParams::eip(0.5);
        inner.spatial = SpatialProduct::NestedEip(Box::new(ElasticParams::eip(1.0)));
        let mut p = ElasticParams::eip(0.1);
        p.spatial = SpatialProduct::NestedEip(Box::new(inner));
        let a = random_nested(&mut ChaCha8Rng::seed_from_u64(6));
        assert!(matches!(eip_nested(&a, &a, &p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn inner_cancellation_discards_sample() {
        let s = TimeSeries::univariate(vec![1.0, 2.0]).unwrap();
        let a = NestedSeries::new(vec![(s.clone(), 0.0)]).unwrap();
        let b = NestedSeries::new(vec![(s.scale(-1.0), 0.0)]).unwrap();
        assert!(a.oplus(&b).unwrap().is_empty());
    }
}
