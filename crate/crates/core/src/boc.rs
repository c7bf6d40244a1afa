//! Bag-of-Concepts encoding of concept sets against a codebook.

use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{FeaturePack, Item};
use crate::sparse::{top_z_in_place, EncodedVectors, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Max,
    Sum,
}

/// How an L2 distance becomes a similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityTransform {
    /// `1 / (1 + d)`, in (0, 1] and decreasing in `d`.
    #[default]
    Reciprocal,
    /// `1 / (1 - d)` as literally written, with non-positive denominators mapped to 0.
    OneMinusDistance,
}

impl SimilarityTransform {
    pub fn apply(self, d: f64) -> f64 {
        match self {
            SimilarityTransform::Reciprocal => 1.0 / (1.0 + d),
            SimilarityTransform::OneMinusDistance => {
                let den = 1.0 - d;
                if den > 0.0 {
                    1.0 / den
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftAssignment {
    pub aggregation: Aggregation,
    /// Similarities kept per concept row; `p` disables row sparsification.
    pub row_keep_z: usize,
    #[serde(default)]
    pub similarity: SimilarityTransform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "assignment", rename_all = "snake_case")]
pub enum Assignment {
    Hard,
    Soft(SoftAssignment),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BocConfig {
    #[serde(flatten)]
    pub assignment: Assignment,
    #[serde(default)]
    pub exclude_stop_words_at_indexing: bool,
}

impl BocConfig {
    pub fn hard() -> Self {
        Self {
            assignment: Assignment::Hard,
            exclude_stop_words_at_indexing: false,
        }
    }

    pub fn soft(aggregation: Aggregation, row_keep_z: usize) -> Self {
        Self {
            assignment: Assignment::Soft(SoftAssignment {
                aggregation,
                row_keep_z,
                similarity: SimilarityTransform::default(),
            }),
            exclude_stop_words_at_indexing: false,
        }
    }
}

/// `n × p` L2 distances between concepts and centroids, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }
}

fn check_dims<C: AsRef<[f32]>>(concepts: &[C], cb: &Codebook) -> Result<()> {
    match concepts.iter().position(|c| c.as_ref().len() != cb.dim) {
        Some(l) => Err(Error::Dimension(format!(
            "concept {l} has {} components, codebook dim is {}",
            concepts[l].as_ref().len(),
            cb.dim
        ))),
        None => Ok(()),
    }
}

fn sq_dist(x: &[f32], c: &[f32]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum()
}

pub fn distance_matrix<C: AsRef<[f32]>>(concepts: &[C], cb: &Codebook) -> Result<DistanceMatrix> {
    check_dims(concepts, cb)?;
    let values = concepts
        .iter()
        .flat_map(|x| cb.centroids.iter().map(move |c| sq_dist(x.as_ref(), c).sqrt()))
        .collect();
    Ok(DistanceMatrix {
        rows: concepts.len(),
        cols: cb.p(),
        values,
    })
}

/// Histogram of nearest-centroid indices (ties to the lowest index).
pub fn hard_assign<C: AsRef<[f32]>>(concepts: &[C], cb: &Codebook) -> Result<SparseVector> {
    check_dims(concepts, cb)?;
    let mut counts = vec![0u32; cb.p()];
    for x in concepts {
        let mut best = (0, f64::INFINITY);
        for (k, c) in cb.centroids.iter().enumerate() {
            let d = sq_dist(x.as_ref(), c);
            if d < best.1 {
                best = (k, d);
            }
        }
        counts[best.0] += 1;
    }
    let entries = counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(k, &n)| (k as u32, n as f64))
        .collect();
    Ok(SparseVector::from_sorted_unchecked(cb.p(), entries))
}

/// Similarity aggregation over the rows of the (row-sparsified) similarity matrix.
pub fn soft_assign<C: AsRef<[f32]>>(concepts: &[C], cb: &Codebook, soft: &SoftAssignment) -> Result<SparseVector> {
    let p = cb.p();
    if soft.row_keep_z == 0 || soft.row_keep_z > p {
        return Err(Error::Config(format!(
            "row_keep_z {} must lie in 1..={p}",
            soft.row_keep_z
        )));
    }
    let dists = distance_matrix(concepts, cb)?;
    let mut acc = vec![0.0f64; p];
    let mut row: Vec<(u32, f64)> = Vec::with_capacity(p);
    for l in 0..dists.rows {
        row.clear();
        row.extend(
            dists
                .row(l)
                .iter()
                .enumerate()
                .map(|(k, &d)| (k as u32, soft.similarity.apply(d))),
        );
        top_z_in_place(&mut row, soft.row_keep_z);
        // Column order keeps floating-point accumulation identical across rows.
        row.sort_unstable_by_key(|&(k, _)| k);
        for &(k, s) in &row {
            let a = &mut acc[k as usize];
            match soft.aggregation {
                Aggregation::Sum => *a += s,
                Aggregation::Max => *a = a.max(s),
            }
        }
    }
    SparseVector::from_dense(&acc)
}

pub fn encode_concepts<C: AsRef<[f32]>>(concepts: &[C], cb: &Codebook, cfg: &BocConfig) -> Result<SparseVector> {
    match &cfg.assignment {
        Assignment::Hard => hard_assign(concepts, cb),
        Assignment::Soft(soft) => soft_assign(concepts, cb, soft),
    }
}

pub fn encode_item(item: &Item, cb: &Codebook, cfg: &BocConfig) -> Result<SparseVector> {
    let concepts: Vec<&[f32]> = item
        .concepts
        .iter()
        .filter(|c| !(cfg.exclude_stop_words_at_indexing && c.is_stop_word))
        .map(|c| c.vector.as_slice())
        .collect();
    encode_concepts(&concepts, cb, cfg)
}

/// Encodes every item of `pack`, preserving order.
pub fn encode_pack(pack: &FeaturePack, cb: &Codebook, cfg: &BocConfig, exec: Exec) -> Result<EncodedVectors> {
    if pack.dim != cb.dim {
        return Err(Error::Dimension(format!(
            "pack dim {} vs codebook dim {}",
            pack.dim, cb.dim
        )));
    }
    let vectors = exec.try_map(&pack.items, |item| {
        encode_item(item, cb, cfg)
            .map(|v| (item.id.clone(), v))
            .map_err(|e| e.for_item(&item.id))
    })?;
    Ok(EncodedVectors { dim: cb.p(), vectors })
}
