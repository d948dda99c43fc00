//! Time-series domain types and the vector-space algebra on them.
//!
//! A [`TimeSeries`] is an ordered list of samples `(value, timestamp)` with
//! strictly increasing timestamps and no all-zero value vector. The empty
//! series plays the role of the additive identity. Two operations make the
//! set of such series a vector space: [`TimeSeries::scale`] (elementwise
//! scalar multiplication) and [`TimeSeries::oplus`] (timestamp-merging
//! addition that discards exact-zero sums).

use crate::error::{Error, Result};

/// One observation of a series: a `d`-dimensional value at a timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<'a> {
    pub value: &'a [f64],
    pub timestamp: f64,
}

/// Membership classification produced by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Strictly increasing timestamps and no all-zero values.
    UStar,
    /// Valid series but contains all-zero values.
    UOnly,
    /// Not a valid series (timestamps not strictly increasing, or
    /// non-finite data, or length mismatch).
    Invalid,
}

/// Diagnostic report for raw series data.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub membership: Membership,
    /// Indices of samples whose value vector is all zeros.
    pub zero_value_indices: Vec<usize>,
    /// Indices `i > 0` where `t(i) <= t(i-1)`.
    pub nonmonotone_indices: Vec<usize>,
    /// Indices of samples containing NaN or infinite entries.
    pub nonfinite_indices: Vec<usize>,
}

/// A finite discrete time series with strictly increasing timestamps and no
/// all-zero sample value. Values are stored sample-major: sample `i` occupies
/// `values[i*dim .. (i+1)*dim]`.
///
/// The empty series (`len() == 0`) is a valid member and acts as the
/// additive identity of [`TimeSeries::oplus`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    timestamps: Vec<f64>,
    dim: usize,
}

fn is_zero_value(v: &[f64]) -> bool {
    v.iter().all(|x| *x == 0.0)
}

/// Classifies raw series data without constructing a [`TimeSeries`].
///
/// Zero values put the series outside the inner-product space but keep it a
/// valid series; non-monotone timestamps or non-finite entries make it
/// invalid.
pub fn validate(values: &[f64], timestamps: &[f64], dim: usize) -> MembershipReport {
    let mut report = MembershipReport {
        membership: Membership::UStar,
        zero_value_indices: Vec::new(),
        nonmonotone_indices: Vec::new(),
        nonfinite_indices: Vec::new(),
    };
    if dim == 0 || values.len() != timestamps.len() * dim {
        report.membership = Membership::Invalid;
        return report;
    }
    for (i, chunk) in values.chunks_exact(dim).enumerate() {
        if chunk.iter().any(|x| !x.is_finite()) || !timestamps[i].is_finite() {
            report.nonfinite_indices.push(i);
        }
        if is_zero_value(chunk) {
            report.zero_value_indices.push(i);
        }
    }
    for i in 1..timestamps.len() {
        if !(timestamps[i] > timestamps[i - 1]) {
            report.nonmonotone_indices.push(i);
        }
    }
    report.membership = if !report.nonmonotone_indices.is_empty() || !report.nonfinite_indices.is_empty() {
        Membership::Invalid
    } else if !report.zero_value_indices.is_empty() {
        Membership::UOnly
    } else {
        Membership::UStar
    };
    report
}

impl TimeSeries {
    /// Builds a series from sample-major values and timestamps, enforcing
    /// strict monotonicity, finiteness and the no-zero-value constraint.
    pub fn new(values: Vec<f64>, timestamps: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        if values.len() != timestamps.len() * dim {
            return Err(Error::InvalidParams(format!(
                "expected {} values for {} samples of dimension {}, got {}",
                timestamps.len() * dim,
                timestamps.len(),
                dim,
                values.len()
            )));
        }
        let report = validate(&values, &timestamps, dim);
        if let Some(&i) = report.nonfinite_indices.first() {
            return Err(Error::NonFiniteValue { index: i });
        }
        if let Some(&i) = report.nonmonotone_indices.first() {
            return Err(Error::NonMonotoneTimestamps { index: i });
        }
        if let Some(&i) = report.zero_value_indices.first() {
            return Err(Error::ZeroValue { index: i });
        }
        Ok(Self { values, timestamps, dim })
    }

    /// The empty series of dimension `dim`.
    pub fn empty(dim: usize) -> Self {
        Self { values: Vec::new(), timestamps: Vec::new(), dim: dim.max(1) }
    }

    /// One-dimensional series with timestamps `1, 2, ..., n`.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        let timestamps: Vec<f64> = (1..=values.len()).map(|i| i as f64).collect();
        Self::new(values, timestamps, 1)
    }

    /// One-dimensional series with explicit timestamps.
    pub fn univariate_at(values: Vec<f64>, timestamps: Vec<f64>) -> Result<Self> {
        Self::new(values, timestamps, 1)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value vector of sample `i`.
    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn timestamp(&self, i: usize) -> f64 {
        self.timestamps[i]
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    /// Sample-major value storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample(&self, i: usize) -> Sample<'_> {
        Sample { value: self.value(i), timestamp: self.timestamps[i] }
    }

    pub fn samples(&self) -> impl Iterator<Item = Sample<'_>> + '_ {
        (0..self.len()).map(|i| self.sample(i))
    }

    /// Scalar multiplication. `scale(0, A)` collapses to the empty series:
    /// zero values are excluded from the space, mirroring the discard rule
    /// of [`TimeSeries::oplus`]. Products that underflow to exact zero are
    /// discarded for the same reason.
    pub fn scale(&self, lambda: f64) -> TimeSeries {
        if lambda == 0.0 {
            return TimeSeries::empty(self.dim);
        }
        let mut values = Vec::with_capacity(self.values.len());
        let mut timestamps = Vec::with_capacity(self.timestamps.len());
        for i in 0..self.len() {
            let scaled: Vec<f64> = self.value(i).iter().map(|x| lambda * x).collect();
            if !is_zero_value(&scaled) {
                values.extend_from_slice(&scaled);
                timestamps.push(self.timestamps[i]);
            }
        }
        TimeSeries { values, timestamps, dim: self.dim }
    }

    /// Timestamp-merging addition. Samples at distinct timestamps are copied
    /// in order; samples at equal timestamps have their values summed, and an
    /// exact-zero sum is discarded so the result stays inside the space.
    ///
    /// Timestamp equality is exact; callers needing fuzzy co-occurrence must
    /// pre-snap timestamps to a grid.
    pub fn oplus(&self, other: &TimeSeries) -> Result<TimeSeries> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        let mut timestamps = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let (ta, tb) = (self.timestamps[i], other.timestamps[j]);
            if ta < tb {
                values.extend_from_slice(self.value(i));
                timestamps.push(ta);
                i += 1;
            } else if ta > tb {
                values.extend_from_slice(other.value(j));
                timestamps.push(tb);
                j += 1;
            } else {
                let sum: Vec<f64> = self
                    .value(i)
                    .iter()
                    .zip(other.value(j))
                    .map(|(x, y)| x + y)
                    .collect();
                if !is_zero_value(&sum) {
                    values.extend_from_slice(&sum);
                    timestamps.push(ta);
                }
                i += 1;
                j += 1;
            }
        }
        while i < self.len() {
            values.extend_from_slice(self.value(i));
            timestamps.push(self.timestamps[i]);
            i += 1;
        }
        while j < other.len() {
            values.extend_from_slice(other.value(j));
            timestamps.push(other.timestamps[j]);
            j += 1;
        }
        Ok(TimeSeries { values, timestamps, dim: self.dim })
    }

    /// Embeds the series on a grid of `n` timestamps as a vector of length
    /// `n * dim`, coordinate-major: coordinate `c` occupies positions
    /// `c*n .. (c+1)*n`, with the series' values at their grid positions and
    /// zeros at timestamps the series does not cover.
    ///
    /// Every timestamp of the series must appear on the grid (exact match);
    /// off-grid timestamps are rejected rather than snapped.
    pub fn embed_on_grid(&self, grid: &[f64]) -> Result<Vec<f64>> {
        if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid);
        }
        let n = grid.len();
        let mut out = vec![0.0; n * self.dim];
        for i in 0..self.len() {
            let t = self.timestamps[i];
            let pos = grid
                .binary_search_by(|g| g.partial_cmp(&t).unwrap())
                .map_err(|_| Error::OffGridTimestamp { timestamp: t })?;
            for c in 0..self.dim {
                out[c * n + pos] = self.value(i)[c];
            }
        }
        Ok(out)
    }

    /// Maps timestamps affinely onto `[0, 1]`. A single-sample series maps
    /// to timestamp 0.
    pub fn normalize_timestamps(&self) -> TimeSeries {
        if self.len() <= 1 {
            let timestamps = if self.is_empty() { Vec::new() } else { vec![0.0] };
            return TimeSeries { values: self.values.clone(), timestamps, dim: self.dim };
        }
        let t0 = self.timestamps[0];
        let span = self.timestamps[self.len() - 1] - t0;
        let timestamps = self.timestamps.iter().map(|t| (t - t0) / span).collect();
        TimeSeries { values: self.values.clone(), timestamps, dim: self.dim }
    }
}

/// Train/test split tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Split {
    Train,
    Test,
}

/// A named collection of labeled items (series or symbol sequences).
#[derive(Debug, Clone)]
pub struct LabeledDataset<T> {
    pub name: String,
    pub split: Split,
    entries: Vec<(T, String)>,
}

impl<T> LabeledDataset<T> {
    pub fn new(name: impl Into<String>, split: Split, entries: Vec<(T, String)>) -> Self {
        Self { name: name.into(), split, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn item(&self, i: usize) -> &T {
        &self.entries[i].0
    }

    pub fn label(&self, i: usize) -> &str {
        &self.entries[i].1
    }

    pub fn entries(&self) -> &[(T, String)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(T, String)> {
        self.entries.iter()
    }

    /// Distinct labels in first-appearance order.
    pub fn label_set(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for (_, l) in &self.entries {
            if !labels.iter().any(|x| x == l) {
                labels.push(l.clone());
            }
        }
        labels
    }
}

impl LabeledDataset<TimeSeries> {
    /// Validates that all entries share one dimension and returns it
    /// (empty dataset reports an error).
    pub fn shared_dim(&self) -> Result<usize> {
        let first = self.entries.first().ok_or(Error::EmptyDataset)?;
        let d = first.0.dim();
        for (s, _) in &self.entries {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { left: d, right: s.dim() });
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(values: &[f64]) -> TimeSeries {
        TimeSeries::univariate(values.to_vec()).unwrap()
    }

    fn at(values: &[f64], times: &[f64]) -> TimeSeries {
        TimeSeries::univariate_at(values.to_vec(), times.to_vec()).unwrap()
    }

    #[test]
    fn validate_u_star() {
        let r = validate(&[1.0, 2.0], &[0.0, 0.5], 1);
        assert_eq!(r.membership, Membership::UStar);
        assert!(r.zero_value_indices.is_empty());
    }

    #[test]
    fn validate_u_only_zero_value() {
        let r = validate(&[0.0, 2.0], &[0.0, 0.5], 1);
        assert_eq!(r.membership, Membership::UOnly);
        assert_eq!(r.zero_value_indices, vec![0]);
    }

    #[test]
    fn validate_invalid_nonmonotone() {
        let r = validate(&[1.0, 2.0], &[0.5, 0.5], 1);
        assert_eq!(r.membership, Membership::Invalid);
        assert_eq!(r.nonmonotone_indices, vec![1]);
    }

    #[test]
    fn validate_multivariate_zero_needs_all_coordinates() {
        // d=2, first sample (0, 1) is not a zero value
        let r = validate(&[0.0, 1.0, 0.0, 0.0], &[0.0, 1.0], 2);
        assert_eq!(r.membership, Membership::UOnly);
        assert_eq!(r.zero_value_indices, vec![1]);
    }

    #[test]
    fn new_rejects_nan() {
        assert!(matches!(
            TimeSeries::new(vec![f64::NAN], vec![0.0], 1),
            Err(Error::NonFiniteValue { index: 0 })
        ));
    }

    #[test]
    fn scale_identity_and_elementwise() {
        let a = at(&[3.0], &[0.5]);
        assert_eq!(a.scale(1.0), a);
        let b = a.scale(2.0);
        assert_eq!(b.value(0), &[6.0]);
        assert_eq!(b.timestamp(0), 0.5);
    }

    #[test]
    fn scale_zero_gives_empty() {
        let a = at(&[3.0], &[0.5]);
        assert!(a.scale(0.0).is_empty());
    }

    #[test]
    fn scale_discards_underflowed_values() {
        let a = at(&[1e-300, 1.0], &[0.0, 1.0]);
        let b = a.scale(1e-300); // 1e-600 underflows to 0
        assert_eq!(b.len(), 1);
        assert_eq!(b.timestamp(0), 1.0);
    }

    #[test]
    fn oplus_cancellation_is_suppressed() {
        // (1,1)(1,2) + (-1,1)(1,2) = (2,2)
        let a = at(&[1.0, 1.0], &[1.0, 2.0]);
        let b = at(&[-1.0, 1.0], &[1.0, 2.0]);
        let c = a.oplus(&b).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.value(0), &[2.0]);
        assert_eq!(c.timestamp(0), 2.0);
    }

    #[test]
    fn oplus_additive_inverse_yields_empty() {
        let a = at(&[1.0, -2.5, 3.0], &[0.0, 0.7, 1.9]);
        let c = a.oplus(&a.scale(-1.0)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn oplus_disjoint_timestamps_merge_in_order() {
        let a = at(&[1.0], &[0.1]);
        let b = at(&[2.0], &[0.5]);
        let c = a.oplus(&b).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c.value(0)[0], c.timestamp(0)), (1.0, 0.1));
        assert_eq!((c.value(1)[0], c.timestamp(1)), (2.0, 0.5));
    }

    #[test]
    fn oplus_identity() {
        let a = at(&[1.0, 2.0], &[0.0, 1.0]);
        let c = a.oplus(&TimeSeries::empty(1)).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn oplus_dimension_mismatch() {
        let a = at(&[1.0], &[0.0]);
        let b = TimeSeries::new(vec![1.0, 2.0], vec![0.0], 2).unwrap();
        assert!(matches!(a.oplus(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn embed_zero_fill() {
        let a = at(&[5.0], &[2.0]);
        assert_eq!(a.embed_on_grid(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0, 5.0, 0.0]);
    }

    #[test]
    fn embed_full_coverage_is_verbatim() {
        let a = at(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(a.embed_on_grid(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn embed_empty_series_is_zero_vector() {
        let a = TimeSeries::empty(1);
        assert_eq!(a.embed_on_grid(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn embed_off_grid_rejected() {
        let a = at(&[5.0], &[2.5]);
        assert!(matches!(
            a.embed_on_grid(&[1.0, 2.0, 3.0]),
            Err(Error::OffGridTimestamp { .. })
        ));
    }

    #[test]
    fn embed_multivariate_coordinate_major() {
        let a = TimeSeries::new(vec![1.0, 10.0, 2.0, 20.0], vec![1.0, 3.0], 2).unwrap();
        let v = a.embed_on_grid(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 2.0, 10.0, 0.0, 20.0]);
    }

    #[test]
    fn normalize_timestamps_unit_interval() {
        let a = at(&[1.0, 2.0, 3.0], &[10.0, 20.0, 40.0]);
        let b = a.normalize_timestamps();
        assert_eq!(b.timestamps(), &[0.0, 1.0 / 3.0, 1.0]);
    }

    #[test]
    fn dataset_shared_dim() {
        let d = LabeledDataset::new(
            "toy",
            Split::Train,
            vec![(u(&[1.0]), "a".into()), (u(&[2.0, 3.0]), "b".into())],
        );
        assert_eq!(d.shared_dim().unwrap(), 1);
        assert_eq!(d.label_set(), vec!["a".to_string(), "b".to_string()]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        // Integer-valued samples on a small shared timestamp grid: sums are
        // exact in f64, so the algebra laws hold with exact equality,
        // including discard cascades.
        fn int_series() -> impl Strategy<Value = TimeSeries> {
            prop::collection::vec((-4i32..=4, 0u8..12), 0..8).prop_map(|pairs| {
                let mut seen = std::collections::BTreeMap::new();
                for (v, t) in pairs {
                    if v != 0 {
                        seen.entry(t).or_insert(v);
                    }
                }
                let (values, times): (Vec<f64>, Vec<f64>) = seen
                    .into_iter()
                    .map(|(t, v)| (v as f64, t as f64))
                    .unzip();
                TimeSeries::new(values, times, 1).unwrap()
            })
        }

        proptest! {
            #[test]
            fn oplus_commutative(a in int_series(), b in int_series()) {
                prop_assert_eq!(a.oplus(&b).unwrap(), b.oplus(&a).unwrap());
            }

            #[test]
            fn oplus_associative(a in int_series(), b in int_series(), c in int_series()) {
                let left = a.oplus(&b).unwrap().oplus(&c).unwrap();
                let right = a.oplus(&b.oplus(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn oplus_inverse(a in int_series()) {
                prop_assert!(a.oplus(&a.scale(-1.0)).unwrap().is_empty());
            }

            #[test]
            fn scale_composes(a in int_series(), l in -3i32..=3, m in -3i32..=3) {
                prop_assume!(l != 0 && m != 0);
                let (l, m) = (l as f64, m as f64);
                prop_assert_eq!(a.scale(m).scale(l), a.scale(l * m));
            }

            #[test]
            fn oplus_matches_elementwise_on_shared_grid(
                vals_a in prop::collection::vec(1i32..=9, 1..8),
                vals_b in prop::collection::vec(1i32..=9, 1..8)
            ) {
                // identical uniform grid, strictly positive values: no
                // cancellation, oplus is plain vector addition
                let n = vals_a.len().min(vals_b.len());
                let a = TimeSeries::univariate(vals_a[..n].iter().map(|&v| v as f64).collect()).unwrap();
                let b = TimeSeries::univariate(vals_b[..n].iter().map(|&v| v as f64).collect()).unwrap();
                let c = a.oplus(&b).unwrap();
                prop_assert_eq!(c.len(), n);
                for i in 0..n {
                    prop_assert_eq!(c.value(i)[0], (vals_a[i] + vals_b[i]) as f64);
                }
            }
        }
    }
}
