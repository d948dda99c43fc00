//! Elastic-matrix construction and the precomputed index that answers
//! elastic inner-product queries over a corpus in linear time per item.
//!
//! For series embedded on a shared grid of `n` timestamps, the recursive
//! inner product collapses to the bilinear form `[A]^T E [B]` where
//! `E[i][j] = g(t_i, t_j)`. Precomputing `E*b` and `b^T E b` for every
//! corpus item (quadratic, once) reduces each query to one dot product per
//! item.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::elastic::{eip, ElasticParams, TimeKernel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::series::{LabeledDataset, TimeSeries};

const MAGIC: &[u8; 4] = b"EIPX";
const FORMAT_VERSION: u32 = 1;

/// The symmetric matrix of time-kernel values over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticMatrix {
    grid: Vec<f64>,
    nu: f64,
    time_kernel: TimeKernel,
    entries: Matrix,
}

/// Builds `E[i][j] = g(t_i, t_j)` over a strictly ascending grid.
pub fn build_elastic_matrix(grid: &[f64], nu: f64, kernel: TimeKernel) -> Result<ElasticMatrix> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid);
    }
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::InvalidParams("nu must be finite and nonnegative".into()));
    }
    let n = grid.len();
    let mut entries = Matrix::zeros(n, n);
    for i in 0..n {
        entries.set(i, i, kernel.eval(nu, 0.0));
        for j in (i + 1)..n {
            let v = kernel.eval(nu, grid[i] - grid[j]);
            entries.set(i, j, v);
            entries.set(j, i, v);
        }
    }
    Ok(ElasticMatrix { grid: grid.to_vec(), nu, time_kernel: kernel, entries })
}

impl ElasticMatrix {
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn time_kernel(&self) -> TimeKernel {
        self.time_kernel
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Applies `E` blockwise to a coordinate-major embedded vector of
    /// length `n * dim`.
    pub fn apply_blockwise(&self, embedded: &[f64], dim: usize) -> Result<Vec<f64>> {
        let n = self.n();
        if embedded.len() != n * dim {
            return Err(Error::DimensionMismatch { left: n * dim, right: embedded.len() });
        }
        let mut out = Vec::with_capacity(embedded.len());
        for c in 0..dim {
            out.extend(self.entries.matvec(&embedded[c * n..(c + 1) * n])?);
        }
        Ok(out)
    }

    /// The bilinear form `[A]^T E [B]` on two embedded vectors.
    pub fn bilinear(&self, a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
        let eb = self.apply_blockwise(b, dim)?;
        if a.len() != eb.len() {
            return Err(Error::DimensionMismatch { left: eb.len(), right: a.len() });
        }
        Ok(dot(a, &eb))
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// Grid selection for index construction.
#[derive(Debug, Clone)]
pub enum Grid {
    /// Union of all corpus timestamps.
    Auto,
    /// Caller-supplied strictly ascending grid.
    Explicit(Vec<f64>),
}

/// One indexed corpus item.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedItem {
    pub id: String,
    pub label: String,
    /// `E*b` per coordinate, coordinate-major, length `n * dim`.
    pub transformed: Vec<f64>,
    /// `b^T E b`, strictly positive for nonempty items.
    pub self_product: f64,
}

/// A nearest-neighbor answer.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub id: String,
    pub label: String,
    pub distance: f64,
}

/// Precomputed index over a corpus of grid-aligned series.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticIndex {
    matrix: ElasticMatrix,
    dim: usize,
    items: Vec<IndexedItem>,
}

impl ElasticIndex {
    /// Indexes a labeled corpus: embeds every series on the grid and stores
    /// `E*b` and `b^T E b` per item. Item ids are `item{position}`.
    /// Build cost is `O(m * n^2)`; items are processed in parallel.
    pub fn build(
        dataset: &LabeledDataset<TimeSeries>,
        grid: Grid,
        nu: f64,
        kernel: TimeKernel,
    ) -> Result<Self> {
        let dim = if dataset.is_empty() { 1 } else { dataset.shared_dim()? };
        let grid = match grid {
            Grid::Explicit(g) => g,
            Grid::Auto => {
                let mut union: Vec<f64> = dataset
                    .iter()
                    .flat_map(|(s, _)| s.timestamps().iter().copied())
                    .collect();
                if union.is_empty() {
                    return Err(Error::InvalidGrid);
                }
                union.sort_by(|a, b| a.partial_cmp(b).unwrap());
                union.dedup();
                union
            }
        };
        let matrix = build_elastic_matrix(&grid, nu, kernel)?;
        let items: Result<Vec<IndexedItem>> = dataset
            .entries()
            .par_iter()
            .enumerate()
            .map(|(pos, (series, label))| {
                let embedded = series.embed_on_grid(matrix.grid())?;
                let transformed = matrix.apply_blockwise(&embedded, dim)?;
                let self_product = dot(&embedded, &transformed);
                Ok(IndexedItem {
                    id: format!("item{pos}"),
                    label: label.clone(),
                    transformed,
                    self_product,
                })
            })
            .collect();
        Ok(Self { matrix, dim, items: items? })
    }

    pub fn matrix(&self) -> &ElasticMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[IndexedItem] {
        &self.items
    }

    /// Inner-product parameters matching this index.
    pub fn params(&self) -> ElasticParams {
        ElasticParams::eip_with_kernel(self.matrix.nu, self.matrix.time_kernel)
    }

    /// Embeds a query on the index grid (off-grid timestamps are rejected,
    /// not snapped).
    pub fn embed(&self, query: &TimeSeries) -> Result<Vec<f64>> {
        if query.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: query.dim() });
        }
        query.embed_on_grid(self.matrix.grid())
    }

    /// Scores of an embedded query against every item: one dot product per
    /// item, `O(n * dim)` each.
    pub fn scores_for_embedded(&self, embedded: &[f64]) -> Vec<f64> {
        self.items.iter().map(|it| dot(embedded, &it.transformed)).collect()
    }

    /// Elastic inner products of the query against every indexed item.
    pub fn query_scores(&self, query: &TimeSeries) -> Result<Vec<(String, f64)>> {
        let embedded = self.embed(query)?;
        Ok(self
            .items
            .iter()
            .map(|it| (it.id.clone(), dot(&embedded, &it.transformed)))
            .collect())
    }

    /// The `k` nearest items under the induced distance. The query
    /// self-product is evaluated once with the recursive form; item
    /// self-products come from the index. Ties break by ascending id.
    pub fn query_knn(&self, query: &TimeSeries, k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if query.is_empty() {
            return Err(Error::EmptyInput);
        }
        let embedded = self.embed(query)?;
        let params = self.params();
        let self_q = eip(query, query, &params)?;
        let mut scored: Vec<(usize, f64)> = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| {
                let score = dot(&embedded, &it.transformed);
                let sq = (self_q + it.self_product - 2.0 * score).max(0.0);
                (i, sq.sqrt())
            })
            .collect();
        scored.sort_by(|(i, di), (j, dj)| {
            di.partial_cmp(dj)
                .unwrap()
                .then_with(|| self.items[*i].id.cmp(&self.items[*j].id))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(i, distance)| Neighbor {
                id: self.items[i].id.clone(),
                label: self.items[i].label.clone(),
                distance,
            })
            .collect())
    }

    /// Serializes the index. Little-endian throughout: magic, format
    /// version, time-kernel tag, n, dim, nu, grid, item count, then per item
    /// id, label, transformed vector and self-product.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        let kernel_tag: u8 = match self.matrix.time_kernel {
            TimeKernel::Gaussian => 0,
            TimeKernel::Laplace => 1,
        };
        w.write_all(&[kernel_tag])?;
        w.write_all(&(self.matrix.n() as u64).to_le_bytes())?;
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        w.write_all(&self.matrix.nu.to_le_bytes())?;
        for t in self.matrix.grid() {
            w.write_all(&t.to_le_bytes())?;
        }
        w.write_all(&(self.items.len() as u64).to_le_bytes())?;
        for it in &self.items {
            write_string(w, &it.id)?;
            write_string(w, &it.label)?;
            for v in &it.transformed {
                w.write_all(&v.to_le_bytes())?;
            }
            w.write_all(&it.self_product.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadIndexFile("bad magic bytes".into()));
        }
        let version = read_u32(r)?;
        if version != FORMAT_VERSION {
            return Err(Error::BadIndexFile(format!("unsupported format version {version}")));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let kernel = match tag[0] {
            0 => TimeKernel::Gaussian,
            1 => TimeKernel::Laplace,
            t => return Err(Error::BadIndexFile(format!("unknown time-kernel tag {t}"))),
        };
        let n = read_u64(r)? as usize;
        let dim = read_u64(r)? as usize;
        let nu = read_f64(r)?;
        let mut grid = Vec::with_capacity(n);
        for _ in 0..n {
            grid.push(read_f64(r)?);
        }
        let matrix = build_elastic_matrix(&grid, nu, kernel)
            .map_err(|e| Error::BadIndexFile(format!("invalid stored grid: {e}")))?;
        let count = read_u64(r)? as usize;
        let mut items = Vec::with_capacity(count);
        for _ in 0..count {
            let id = read_string(r)?;
            let label = read_string(r)?;
            let mut transformed = Vec::with_capacity(n * dim);
            for _ in 0..n * dim {
                transformed.push(read_f64(r)?);
            }
            let self_product = read_f64(r)?;
            items.push(IndexedItem { id, label, transformed, self_product });
        }
        Ok(Self { matrix, dim, items })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn write_string<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(Error::BadIndexFile(format!("unreasonable string length {len}")));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::BadIndexFile("string is not UTF-8".into()))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
