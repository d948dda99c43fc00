//! Elastic inner product and elastic cosine for symbolic sequences.
//!
//! Tokens sit at positional timestamps (1-based indices by default); the
//! spatial product is a symmetric token weighting: indicator (1 on equal
//! tokens), squared inverse document frequency, or externally supplied word
//! vectors. At stiffness zero the sequence product collapses to the dot
//! product of term-frequency (or tf-idf) vectors; at large stiffness on
//! equal-length sequences it counts positional matches, i.e. the Euclidean
//! one-hot product.

use std::collections::{HashMap, HashSet};

use crate::elastic::{elastic_dp, TimeKernel, TimeWeight};
use crate::error::{Error, Result};

/// A token stream with positional timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    tokens: Vec<String>,
    positions: Vec<f64>,
}

impl SymbolSequence {
    /// Sequence with default positions `1, 2, ..., n`.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        let positions = (1..=tokens.len()).map(|i| i as f64).collect();
        Self::with_positions(tokens, positions)
    }

    pub fn with_positions(tokens: Vec<String>, positions: Vec<f64>) -> Result<Self> {
        if tokens.len() != positions.len() {
            return Err(Error::DimensionMismatch { left: tokens.len(), right: positions.len() });
        }
        if tokens.iter().any(|t| t.is_empty()) {
            return Err(Error::InvalidParams("tokens must be nonempty".into()));
        }
        for i in 1..positions.len() {
            if !(positions[i] > positions[i - 1]) {
                return Err(Error::NonMonotoneTimestamps { index: i });
            }
        }
        Ok(Self { tokens, positions })
    }

    /// Splits on whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split_whitespace().map(str::to_string).collect())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Term-frequency vector over the sequence's own vocabulary.
    pub fn term_frequencies(&self) -> HashMap<&str, usize> {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for t in &self.tokens {
            *tf.entry(t.as_str()).or_insert(0) += 1;
        }
        tf
    }
}

/// Inverse document frequency table.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    map: HashMap<String, f64>,
}

impl IdfTable {
    pub fn get(&self, token: &str) -> Option<f64> {
        self.map.get(token).copied()
    }

    pub fn from_map(map: HashMap<String, f64>) -> Self {
        Self { map }
    }
}

/// `IDF(a) = ln(N / df(a))` over a nonempty corpus.
pub fn compute_idf(corpus: &[SymbolSequence]) -> Result<IdfTable> {
    document_frequencies(corpus).map(|(n, df)| IdfTable {
        map: df.into_iter().map(|(t, d)| (t, (n / d).ln())).collect(),
    })
}

/// Smoothed variant `ln((N+1) / (df+1)) + 1`, never zero.
pub fn compute_idf_smoothed(corpus: &[SymbolSequence]) -> Result<IdfTable> {
    document_frequencies(corpus).map(|(n, df)| IdfTable {
        map: df.into_iter().map(|(t, d)| (t, ((n + 1.0) / (d + 1.0)).ln() + 1.0)).collect(),
    })
}

fn document_frequencies(corpus: &[SymbolSequence]) -> Result<(f64, HashMap<String, f64>)> {
    if corpus.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut df: HashMap<String, f64> = HashMap::new();
    for doc in corpus {
        let vocab: HashSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for t in vocab {
            *df.entry(t.to_string()).or_insert(0.0) += 1.0;
        }
    }
    Ok((corpus.len() as f64, df))
}

/// Symmetric token weighting used as the spatial product of the sequence
/// recursion.
#[derive(Debug, Clone, PartialEq)]
pub enum Weighting {
    /// `delta(a, b) = 1` iff `a == b`, else 0.
    Indicator,
    /// `delta(a, b) = IDF(a)^2` iff `a == b`, else 0.
    Idf(IdfTable),
    /// `delta(a, b) = <v_a, v_b>` with externally supplied vectors.
    Embedded(HashMap<String, Vec<f64>>),
}

impl Weighting {
    fn delta(&self, a: &str, b: &str) -> Result<f64> {
        match self {
            Weighting::Indicator => Ok(if a == b { 1.0 } else { 0.0 }),
            Weighting::Idf(table) => {
                if a != b {
                    return Ok(0.0);
                }
                let idf = table.get(a).ok_or_else(|| Error::OutOfVocabulary { token: a.into() })?;
                Ok(idf * idf)
            }
            Weighting::Embedded(vectors) => {
                let va = vectors.get(a).ok_or_else(|| Error::OutOfVocabulary { token: a.into() })?;
                let vb = vectors.get(b).ok_or_else(|| Error::OutOfVocabulary { token: b.into() })?;
                if va.len() != vb.len() {
                    return Err(Error::DimensionMismatch { left: va.len(), right: vb.len() });
                }
                Ok(va.iter().zip(vb).map(|(x, y)| x * y).sum())
            }
        }
    }

    fn check_coverage(&self, seq: &SymbolSequence) -> Result<()> {
        match self {
            Weighting::Indicator => Ok(()),
            Weighting::Idf(table) => {
                for t in seq.tokens() {
                    if table.get(t).is_none() {
                        return Err(Error::OutOfVocabulary { token: t.clone() });
                    }
                }
                Ok(())
            }
            Weighting::Embedded(vectors) => {
                for t in seq.tokens() {
                    if !vectors.contains_key(t) {
                        return Err(Error::OutOfVocabulary { token: t.clone() });
                    }
                }
                Ok(())
            }
        }
    }
}

/// Removes tokens whose IDF is zero (present in every document): their
/// self-weight vanishes, which would place the sequence outside the space.
/// Returns the filtered sequence and the number of dropped tokens.
pub fn strip_zero_idf(seq: &SymbolSequence, table: &IdfTable) -> (SymbolSequence, usize) {
    let kept: Vec<(String, f64)> = seq
        .tokens
        .iter()
        .zip(&seq.positions)
        .filter(|(t, _)| table.get(t).map(|w| w != 0.0).unwrap_or(true))
        .map(|(t, p)| (t.clone(), *p))
        .collect();
    let dropped = seq.len() - kept.len();
    let (tokens, positions) = kept.into_iter().unzip();
    (SymbolSequence { tokens, positions }, dropped)
}

/// Elastic inner product for symbolic sequences: the inner-product recursion
/// with `g = exp(-nu |pos_i - pos_j|^2)` and the token weighting as spatial
/// product.
pub fn eip_tm(a: &SymbolSequence, b: &SymbolSequence, nu: f64, weighting: &Weighting) -> Result<f64> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::InvalidParams("nu must be finite and nonnegative".into()));
    }
    weighting.check_coverage(a)?;
    weighting.check_coverage(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    // symmetric weighting makes the swap safe; rows span the longer side
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let weight = TimeWeight::new(TimeKernel::Gaussian, nu, &a.positions, &b.positions);
    let mut failure: Option<Error> = None;
    let out = elastic_dp(a.len(), b.len(), 1.0, -1.0, 0.0, true, |i, j| {
        match weighting.delta(&a.tokens[i], &b.tokens[j]) {
            Ok(d) => d * weight.g(i, j),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Elastic cosine similarity in `[0, 1]`.
///
/// Values outside the interval by more than `1e-12` indicate a broken
/// weighting (e.g. signed word vectors) and raise an internal-consistency
/// error; values within that slack are clamped.
pub fn ecos(a: &SymbolSequence, b: &SymbolSequence, nu: f64, weighting: &Weighting) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let saa = eip_tm(a, a, nu, weighting)?;
    let sbb = eip_tm(b, b, nu, weighting)?;
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(Error::ZeroSelfProduct);
    }
    let value = eip_tm(a, b, nu, weighting)? / (saa.sqrt() * sbb.sqrt());
    if !(-1e-12..=1.0 + 1e-12).contains(&value) {
        return Err(Error::Internal(format!("elastic cosine {value} outside [0,1]")));
    }
    Ok(value.clamp(0.0, 1.0))
}
