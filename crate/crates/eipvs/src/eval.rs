//! Classification and benchmarking harness: nearest-neighbor classification
//! with leave-one-out stiffness selection, Euclidean and DTW baselines, AUC,
//! synthetic data, and wall-clock complexity curves.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::elastic::{eip, eip_flat, ElasticParams};
use crate::error::{Error, Result};
use crate::index::{build_elastic_matrix, Grid};
use crate::matrix::Matrix;
use crate::series::{LabeledDataset, Split, TimeSeries};

/// Distance selector for the classification harness.
#[derive(Debug, Clone)]
pub enum HarnessDistance {
    /// Plain Euclidean distance on aligned equal-length series; the rigid
    /// limit of the elastic distance.
    Euclidean,
    /// Unconstrained dynamic time warping with squared Euclidean local cost.
    Dtw,
    /// Elastic inner-product distance. Batch evaluations switch to the
    /// precomputed matrix form whenever all series share one grid.
    Eip(ElasticParams),
}

impl HarnessDistance {
    pub fn name(&self) -> &'static str {
        match self {
            HarnessDistance::Euclidean => "ed",
            HarnessDistance::Dtw => "dtw",
            HarnessDistance::Eip(_) => "eip",
        }
    }
}

#[inline]
pub(crate) fn euclid_aligned(a: &TimeSeries, b: &TimeSeries) -> f64 {
    let mut total = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        let d = x - y;
        total += d * d;
    }
    total.sqrt()
}

/// `sqrt(sum_i ||a_i - b_i||^2)` over two aligned series of equal length.
pub fn euclidean_distance(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(euclid_aligned(a, b))
}

pub(crate) fn dtw_impl(a: &TimeSeries, b: &TimeSeries) -> f64 {
    let (p, q, d) = (a.len(), b.len(), a.dim());
    let (av, bv) = (a.values(), b.values());
    let mut prev = vec![f64::INFINITY; q + 1];
    let mut curr = vec![f64::INFINITY; q + 1];
    prev[0] = 0.0;
    for i in 1..=p {
        curr[0] = f64::INFINITY;
        let mut left = f64::INFINITY;
        let mut diag = prev[0];
        if d == 1 {
            let ai = av[i - 1];
            for j in 1..=q {
                let up = prev[j];
                let diff = ai - bv[j - 1];
                let cell = diff * diff + up.min(left).min(diag);
                curr[j] = cell;
                left = cell;
                diag = up;
            }
        } else {
            let ai = &av[(i - 1) * d..i * d];
            for j in 1..=q {
                let up = prev[j];
                let mut cost = 0.0;
                for (x, y) in ai.iter().zip(&bv[(j - 1) * d..j * d]) {
                    let diff = x - y;
                    cost += diff * diff;
                }
                let cell = cost + up.min(left).min(diag);
                curr[j] = cell;
                left = cell;
                diag = up;
            }
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[q].sqrt()
}

/// Unconstrained DTW: symmetric step pattern (match, insert, delete) with
/// squared Euclidean local cost; returns the square root of the accumulated
/// cost. Symmetric and nonnegative, but not a metric.
pub fn dtw_distance(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(dtw_impl(a, b))
}

/// True when every series has exactly the same timestamp vector.
fn shared_grid<'a>(series: impl Iterator<Item = &'a TimeSeries>) -> Option<Vec<f64>> {
    let mut grid: Option<&[f64]> = None;
    for s in series {
        match grid {
            None => grid = Some(s.timestamps()),
            Some(g) => {
                if g != s.timestamps() {
                    return None;
                }
            }
        }
    }
    grid.map(|g| g.to_vec())
}

/// Pairwise distances, `xs.len() x ys.len()`. The elastic distance uses the
/// precomputed matrix form when all series share a grid, otherwise the
/// recursive form; rows are computed in parallel.
pub fn distance_matrix(xs: &[TimeSeries], ys: &[TimeSeries], dist: &HarnessDistance) -> Result<Matrix> {
    let rows: Result<Vec<Vec<f64>>> = match dist {
        HarnessDistance::Euclidean => xs
            .par_iter()
            .map(|x| ys.iter().map(|y| euclidean_distance(x, y)).collect())
            .collect(),
        HarnessDistance::Dtw => xs
            .par_iter()
            .map(|x| ys.iter().map(|y| dtw_distance(x, y)).collect())
            .collect(),
        HarnessDistance::Eip(params) => {
            if !params.is_eip_mode() {
                return Err(Error::InvalidParams(
                    "harness distances require inner-product mode".into(),
                ));
            }
            if let Some(grid) = shared_grid(xs.iter().chain(ys.iter())) {
                let dim = xs.iter().chain(ys.iter()).map(|s| s.dim()).next().unwrap_or(1);
                let e = build_elastic_matrix(&grid, params.nu, params.time_kernel)?;
                let embed = |s: &TimeSeries| s.embed_on_grid(&grid);
                let transform = |emb: &Vec<f64>| e.apply_blockwise(emb, dim);
                let xs_emb: Result<Vec<Vec<f64>>> = xs.iter().map(embed).collect();
                let ys_emb: Result<Vec<Vec<f64>>> = ys.iter().map(embed).collect();
                let (xs_emb, ys_emb) = (xs_emb?, ys_emb?);
                let ys_tr: Result<Vec<Vec<f64>>> = ys_emb.iter().map(transform).collect();
                let ys_tr = ys_tr?;
                let xs_self: Result<Vec<f64>> = xs_emb
                    .iter()
                    .map(|emb| Ok(dot(emb, &transform(emb)?)))
                    .collect();
                let xs_self = xs_self?;
                let ys_self: Vec<f64> =
                    ys_emb.iter().zip(&ys_tr).map(|(emb, tr)| dot(emb, tr)).collect();
                Ok(xs_emb
                    .par_iter()
                    .zip(xs_self.par_iter())
                    .map(|(emb, &sx)| {
                        ys_tr
                            .iter()
                            .zip(&ys_self)
                            .map(|(tr, &sy)| (sx + sy - 2.0 * dot(emb, tr)).max(0.0).sqrt())
                            .collect()
                    })
                    .collect())
            } else {
                let xs_self: Result<Vec<f64>> = xs.par_iter().map(|x| eip(x, x, params)).collect();
                let ys_self: Result<Vec<f64>> = ys.par_iter().map(|y| eip(y, y, params)).collect();
                let (xs_self, ys_self) = (xs_self?, ys_self?);
                xs.par_iter()
                    .zip(xs_self.par_iter())
                    .map(|(x, &sx)| {
                        ys.iter()
                            .zip(&ys_self)
                            .map(|(y, &sy)| {
                                let sxy = eip(x, y, params)?;
                                Ok((sx + sy - 2.0 * sxy).max(0.0).sqrt())
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    };
    let rows = rows?;
    let (m, n) = (xs.len(), ys.len());
    let mut out = Matrix::zeros(m, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

fn vote(neighbors: &[(f64, &str)]) -> String {
    let mut tally: Vec<(&str, usize, f64)> = Vec::new(); // label, count, distance sum
    for &(d, label) in neighbors {
        match tally.iter_mut().find(|(l, _, _)| *l == label) {
            Some(entry) => {
                entry.1 += 1;
                entry.2 += d;
            }
            None => tally.push((label, 1, d)),
        }
    }
    tally
        .into_iter()
        .map(|(label, count, dsum)| (label, count, dsum / count as f64))
        .min_by(|a, b| {
            b.1.cmp(&a.1) // most votes first
                .then(a.2.partial_cmp(&b.2).unwrap()) // then smallest mean distance
                .then(a.0.cmp(b.0)) // then label order
        })
        .map(|(label, _, _)| label.to_string())
        .expect("nonempty neighbor list")
}

fn predict_from_row(row: &[f64], train: &LabeledDataset<TimeSeries>, k: usize, skip: Option<usize>) -> String {
    let mut order: Vec<usize> = (0..row.len()).filter(|i| Some(*i) != skip).collect();
    order.sort_by(|&i, &j| row[i].partial_cmp(&row[j]).unwrap().then(i.cmp(&j)));
    let neighbors: Vec<(f64, &str)> =
        order.iter().take(k).map(|&i| (row[i], train.label(i))).collect();
    vote(&neighbors)
}

/// k-nearest-neighbor label prediction. Majority vote; ties break by
/// smallest mean distance, then by label order.
pub fn knn_classify(
    train: &LabeledDataset<TimeSeries>,
    query: &TimeSeries,
    k: usize,
    dist: &HarnessDistance,
) -> Result<String> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let train_items: Vec<TimeSeries> = train.iter().map(|(s, _)| s.clone()).collect();
    let row = distance_matrix(std::slice::from_ref(query), &train_items, dist)?;
    Ok(predict_from_row(row.row(0), train, k, None))
}

/// Leave-one-out 1-NN error rate over a training set.
pub fn loo_error(train: &LabeledDataset<TimeSeries>, dist: &HarnessDistance) -> Result<f64> {
    if train.len() < 2 {
        return Err(Error::InvalidParams("leave-one-out needs at least 2 items".into()));
    }
    let items: Vec<TimeSeries> = train.iter().map(|(s, _)| s.clone()).collect();
    let matrix = distance_matrix(&items, &items, dist)?;
    let mut errors = 0usize;
    for i in 0..train.len() {
        let predicted = predict_from_row(matrix.row(i), train, 1, Some(i));
        if predicted != train.label(i) {
            errors += 1;
        }
    }
    Ok(errors as f64 / train.len() as f64)
}

/// Outcome of stiffness selection.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NuSelection {
    pub nu: f64,
    pub loo_error: f64,
}

/// The stiffness grid used for selection when none is supplied.
pub const DEFAULT_NU_GRID: [f64; 9] = [100.0, 10.0, 1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5, 0.0];

/// Picks the stiffness minimizing leave-one-out 1-NN error on the training
/// set under the elastic distance. Ties go to the larger stiffness (closer
/// to Euclidean matching).
pub fn select_nu(train: &LabeledDataset<TimeSeries>, grid: &[f64]) -> Result<NuSelection> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("stiffness grid is empty".into()));
    }
    let mut best: Option<NuSelection> = None;
    for &nu in grid {
        let err = loo_error(train, &HarnessDistance::Eip(ElasticParams::eip(nu)))?;
        let better = match best {
            None => true,
            Some(b) => err < b.loo_error || (err == b.loo_error && nu > b.nu),
        };
        if better {
            best = Some(NuSelection { nu, loo_error: err });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Row-major confusion counts; `counts[i][j]` is the number of test items
/// with true label `labels[i]` predicted as `labels[j]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

/// Test-set evaluation under k-NN classification.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvalReport {
    pub error_rate: f64,
    pub confusion: ConfusionMatrix,
}

/// Error rate (and confusion matrix) of k-NN classification of `test`
/// against `train`.
pub fn test_error(
    train: &LabeledDataset<TimeSeries>,
    test: &LabeledDataset<TimeSeries>,
    k: usize,
    dist: &HarnessDistance,
) -> Result<EvalReport> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let train_items: Vec<TimeSeries> = train.iter().map(|(s, _)| s.clone()).collect();
    let test_items: Vec<TimeSeries> = test.iter().map(|(s, _)| s.clone()).collect();
    let matrix = distance_matrix(&test_items, &train_items, dist)?;

    let mut labels = train.label_set();
    for l in test.label_set() {
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    let mut counts = vec![vec![0usize; labels.len()]; labels.len()];
    let mut errors = 0usize;
    for i in 0..test.len() {
        let predicted = predict_from_row(matrix.row(i), train, k, None);
        let truth = test.label(i);
        if predicted != truth {
            errors += 1;
        }
        let ti = labels.iter().position(|l| l == truth).unwrap();
        let pi = labels.iter().position(|l| *l == predicted).unwrap();
        counts[ti][pi] += 1;
    }
    Ok(EvalReport {
        error_rate: errors as f64 / test.len() as f64,
        confusion: ConfusionMatrix { labels, counts },
    })
}

/// Area under the ROC curve by the rank statistic (Mann-Whitney), with
/// average ranks on ties. Scores must contain both classes.
pub fn roc_auc(scores: &[(f64, bool)]) -> Result<f64> {
    let positives = scores.iter().filter(|(_, label)| *label).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidParams("AUC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].0.partial_cmp(&scores[j].0).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]].0 == scores[order[i]].0 {
            j += 1;
        }
        // ranks are 1-based; tied block shares the average rank
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if scores[idx].1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (positives * (positives + 1)) as f64 / 2.0;
    Ok(u / (positives as f64 * negatives as f64))
}

/// Cylinder-Bell-Funnel synthetic dataset: three classes separated by the
/// shape of a noisy plateau with randomized onset and duration. Deterministic
/// for a fixed seed.
pub fn cbf_generate(per_class: usize, length: usize, seed: u64) -> Result<LabeledDataset<TimeSeries>> {
    if per_class == 0 || length < 8 {
        return Err(Error::InvalidParams("need per_class >= 1 and length >= 8".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(3 * per_class);
    for class in ["cylinder", "bell", "funnel"] {
        for _ in 0..per_class {
            let onset = rng.random_range(length / 8..=length / 4) as f64;
            let width = rng.random_range(length / 4..=(3 * length) / 4) as f64;
            let offset = (onset + width).min(length as f64);
            let amplitude = 6.0 + rng.sample::<f64, _>(StandardNormal);
            let values: Vec<f64> = (1..=length)
                .map(|t| {
                    let t = t as f64;
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    let plateau = if t >= onset && t <= offset {
                        match class {
                            "cylinder" => amplitude,
                            "bell" => amplitude * (t - onset) / width,
                            _ => amplitude * (offset - t) / width,
                        }
                    } else {
                        0.0
                    };
                    let v = plateau + noise;
                    if v == 0.0 {
                        f64::EPSILON
                    } else {
                        v
                    }
                })
                .collect();
            entries.push((TimeSeries::univariate(values)?, class.to_string()));
        }
    }
    Ok(LabeledDataset::new(format!("cbf-{seed}"), Split::Train, entries))
}

/// Uniform random series on index timestamps, for benchmarks.
pub fn random_series_set(count: usize, length: usize, seed: u64) -> Vec<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let values: Vec<f64> = (0..length)
                .map(|_| {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    if v == 0.0 {
                        0.5
                    } else {
                        v
                    }
                })
                .collect();
            TimeSeries::univariate(values).expect("generated series is valid")
        })
        .collect()
}

/// Distance selector for the timing bench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchDistance {
    Euclidean,
    RecursiveEip { nu: f64 },
    IndexedEip { nu: f64 },
    Dtw,
}

impl BenchDistance {
    pub fn name(&self) -> &'static str {
        match self {
            BenchDistance::Euclidean => "ed",
            BenchDistance::RecursiveEip { .. } => "eip",
            BenchDistance::IndexedEip { .. } => "ieip",
            BenchDistance::Dtw => "dtw",
        }
    }
}

/// One measurement of the timing bench.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TimingRow {
    pub distance: String,
    pub length: usize,
    pub seconds: f64,
}

/// Wall-clock cost of computing the full `count x count` distance matrix
/// (upper triangle, mirrored) over random series of each length: median of
/// `repeats` timed runs after one warm-up, single-threaded.
///
/// Per-item preprocessing that the retrieval protocol performs offline
/// (self-products; the index transform for the indexed distance) is excluded
/// from the timed region.
pub fn timing_bench(
    lengths: &[usize],
    count: usize,
    distances: &[BenchDistance],
    repeats: usize,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    if lengths.is_empty() || count < 2 || repeats == 0 {
        return Err(Error::InvalidParams(
            "need at least one length, two series and one repeat".into(),
        ));
    }
    let mut rows = Vec::new();
    for &length in lengths {
        let data = random_series_set(count, length, seed ^ (length as u64).wrapping_mul(0x9e37));
        let series = &data;
        for &dist in distances {
            let run: Box<dyn Fn() -> f64 + '_> = match dist {
                BenchDistance::Euclidean => Box::new(|| {
                    let mut acc = 0.0;
                    for i in 0..count {
                        for j in (i + 1)..count {
                            acc += euclid_aligned(&series[i], &series[j]);
                        }
                    }
                    acc
                }),
                BenchDistance::Dtw => Box::new(|| {
                    let mut acc = 0.0;
                    for i in 0..count {
                        for j in (i + 1)..count {
                            acc += dtw_impl(&series[i], &series[j]);
                        }
                    }
                    acc
                }),
                BenchDistance::RecursiveEip { nu } => {
                    let params = ElasticParams::eip(nu);
                    let selfs: Vec<f64> = series.iter().map(|s| eip_flat(s, s, &params)).collect();
                    Box::new(move || {
                        let mut acc = 0.0;
                        for i in 0..count {
                            for j in (i + 1)..count {
                                let s = eip_flat(&series[i], &series[j], &params);
                                acc += (selfs[i] + selfs[j] - 2.0 * s).max(0.0).sqrt();
                            }
                        }
                        acc
                    })
                }
                BenchDistance::IndexedEip { nu } => {
                    let entries: Vec<(TimeSeries, String)> =
                        series.iter().map(|s| (s.clone(), "x".to_string())).collect();
                    let ds = LabeledDataset::new("bench", Split::Train, entries);
                    let index = crate::index::ElasticIndex::build(
                        &ds,
                        Grid::Auto,
                        nu,
                        crate::elastic::TimeKernel::Gaussian,
                    )?;
                    let embedded: Result<Vec<Vec<f64>>> =
                        series.iter().map(|s| index.embed(s)).collect();
                    let embedded = embedded?;
                    let selfs: Vec<f64> =
                        index.items().iter().map(|it| it.self_product).collect();
                    let transformed: Vec<Vec<f64>> =
                        index.items().iter().map(|it| it.transformed.clone()).collect();
                    Box::new(move || {
                        let mut acc = 0.0;
                        for i in 0..count {
                            for j in (i + 1)..count {
                                let s = dot(&embedded[i], &transformed[j]);
                                acc += (selfs[i] + selfs[j] - 2.0 * s).max(0.0).sqrt();
                            }
                        }
                        acc
                    })
                }
            };
            std::hint::black_box(run());
            let mut times: Vec<f64> = (0..repeats)
                .map(|_| {
                    let start = Instant::now();
                    std::hint::black_box(run());
                    start.elapsed().as_secs_f64()
                })
                .collect();
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let seconds = if times.len() % 2 == 1 {
                times[times.len() / 2]
            } else {
                0.5 * (times[times.len() / 2 - 1] + times[times.len() / 2])
            };
            rows.push(TimingRow { distance: dist.name().to_string(), length, seconds });
        }
    }
    Ok(rows)
}
