//! Global-descriptor transforms: c-relu, deep permutations, scalar quantization and top-z
//! sparsification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::FeaturePack;
use crate::sparse::{self, EncodedVectors, SparseVector};

/// `[max(v, 0), max(-v, 0)]`, doubling the dimensionality.
pub fn crelu(v: &[f32]) -> Result<Vec<f32>> {
    if v.is_empty() {
        return Err(Error::Dimension("c-relu of an empty vector".into()));
    }
    let mut out = vec![0f32; 2 * v.len()];
    let (pos, neg) = out.split_at_mut(v.len());
    for ((&x, p), n) in v.iter().zip(pos).zip(neg) {
        if x > 0.0 {
            *p = x;
        } else if x < 0.0 {
            *n = -x;
        }
    }
    Ok(out)
}

/// Component indices (1-based) in descending order of value, ties by ascending index.
pub fn permutation(v: &[f32]) -> Vec<usize> {
    descending_order(v).into_iter().map(|i| i + 1).collect()
}

fn descending_order(v: &[f32]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    order
}

fn check_non_negative(v: &[f32]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite() || *x < 0.0) {
        Some(i) => Err(Error::Domain(format!("component {i} is {}; apply c-relu first", v[i]))),
        None => Ok(()),
    }
}

fn check_keep_z(keep_z: usize, n: usize) -> Result<()> {
    if keep_z > n {
        return Err(Error::Config(format!("keep_z {keep_z} exceeds dimension {n}")));
    }
    Ok(())
}

/// Deep-permutation encoding of a non-negative vector of length `n`.
///
/// The component at 0-based rank `r` of the descending sort gets weight `n - r`; zero
/// components are not ranked. Only the `keep_z` heaviest weights are kept.
pub fn deep_permutation(v: &[f32], keep_z: usize) -> Result<SparseVector> {
    let n = v.len();
    check_keep_z(keep_z, n)?;
    check_non_negative(v)?;
    let mut entries: Vec<(u32, f64)> = descending_order(v)
        .into_iter()
        .take_while(|&j| v[j] > 0.0)
        .take(keep_z)
        .enumerate()
        .map(|(rank, j)| (j as u32, (n - rank) as f64))
        .collect();
    entries.sort_unstable_by_key(|&(j, _)| j);
    Ok(SparseVector::from_sorted_unchecked(n, entries))
}

/// `floor(scale * v)` computed in f32, zeros dropped, then top-`keep_z`.
pub fn scalar_quantize(v: &[f32], scale: f64, keep_z: usize) -> Result<SparseVector> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!("scale must be positive, got {scale}")));
    }
    let n = v.len();
    check_keep_z(keep_z, n)?;
    check_non_negative(v)?;
    let s = scale as f32;
    let entries: Vec<(u32, f64)> = v
        .iter()
        .enumerate()
        .filter_map(|(j, &x)| {
            let q = (s * x).floor();
            (q > 0.0).then_some((j as u32, q as f64))
        })
        .collect();
    Ok(SparseVector::from_sorted_unchecked(n, entries).sparsify_top_z(keep_z))
}

pub use sparse::{sparse_cosine, sparsify_dense_top_z};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum GlobalMethod {
    DeepPermutation,
    ScalarQuantization { scale: f64 },
}

impl GlobalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GlobalMethod::DeepPermutation => "deep_permutation",
            GlobalMethod::ScalarQuantization { .. } => "scalar_quantization",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformConfig {
    pub method: GlobalMethod,
    pub keep_z: usize,
    pub apply_crelu: bool,
}

impl TransformConfig {
    /// Dimensionality of the transformed vectors for `d`-dimensional inputs.
    pub fn output_dim(&self, d: usize) -> usize {
        if self.apply_crelu {
            2 * d
        } else {
            d
        }
    }

    /// A config keeping a `1 - sparsity` fraction of the output components.
    pub fn with_sparsity(method: GlobalMethod, d: usize, sparsity: f64, apply_crelu: bool) -> Result<Self> {
        let out = if apply_crelu { 2 * d } else { d };
        Ok(Self {
            method,
            keep_z: keep_for_sparsity(out, sparsity)?,
            apply_crelu,
        })
    }
}

/// `round((1 - f) * dim)`, but at least 1 so some signal survives.
pub fn keep_for_sparsity(dim: usize, sparsity: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::Config(format!("sparsity factor {sparsity} outside [0, 1)")));
    }
    let z = ((1.0 - sparsity) * dim as f64).round() as usize;
    Ok(z.clamp(1, dim))
}

pub fn transform_global(v: &[f32], cfg: &TransformConfig) -> Result<SparseVector> {
    let owned;
    let input = if cfg.apply_crelu {
        owned = crelu(v)?;
        &owned[..]
    } else {
        v
    };
    match cfg.method {
        GlobalMethod::DeepPermutation => deep_permutation(input, cfg.keep_z),
        GlobalMethod::ScalarQuantization { scale } => scalar_quantize(input, scale, cfg.keep_z),
    }
}

/// Transforms every item's global vector. Items without one are an error.
pub fn transform_pack(pack: &FeaturePack, cfg: &TransformConfig, exec: Exec) -> Result<EncodedVectors> {
    let vectors = exec.try_map(&pack.items, |item| {
        let global = item
            .global
            .as_deref()
            .ok_or_else(|| Error::Domain("item has no global vector".into()).for_item(&item.id))?;
        let v = transform_global(global, cfg).map_err(|e| e.for_item(&item.id))?;
        Ok((item.id.clone(), v))
    })?;
    Ok(EncodedVectors {
        dim: cfg.output_dim(pack.dim),
        vectors,
    })
}
