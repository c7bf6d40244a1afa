use std::collections::HashMap;

use super::rank_order;
use crate::error::{Error, Result};
use crate::features::FeaturePack;

/// Original dense vectors, scored by exact cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStore {
    dim: usize,
    ids: Vec<String>,
    vectors: Vec<Vec<f32>>,
    norms: Vec<f64>,
    lookup: HashMap<String, usize>,
}

fn norm(v: &[f32]) -> f64 {
    v.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

impl DenseStore {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ids: Vec::new(),
            vectors: Vec::new(),
            norms: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    pub fn insert(&mut self, id: &str, v: Vec<f32>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector `{id}` has {} components, store has {}",
                v.len(),
                self.dim
            )));
        }
        if self.lookup.contains_key(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        self.lookup.insert(id.to_string(), self.ids.len());
        self.ids.push(id.to_string());
        self.norms.push(norm(&v));
        self.vectors.push(v);
        Ok(())
    }

    /// Global vectors of every item; items without one are an error.
    pub fn from_pack(pack: &FeaturePack) -> Result<Self> {
        let mut store = Self::new(pack.dim);
        for item in &pack.items {
            let g = item
                .global
                .as_ref()
                .ok_or_else(|| Error::Domain("item has no global vector".into()).for_item(&item.id))?;
            store.insert(&item.id, g.clone())?;
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.lookup.get(id).map(|&i| self.vectors[i].as_slice())
    }

    fn cosine_at(&self, q: &[f32], qn: f64, i: usize) -> f64 {
        let den = qn * self.norms[i];
        if den == 0.0 {
            0.0
        } else {
            (dot(q, &self.vectors[i]) / den).clamp(-1.0, 1.0)
        }
    }

    /// Exact cosine top-`k` over all items, or over `restrict_to` when given.
    pub fn exact_topk(&self, q: &[f32], k: usize, restrict_to: Option<&[String]>) -> Result<Vec<(String, f64)>> {
        if q.len() != self.dim {
            return Err(Error::Dimension(format!(
                "query has {} components, store has {}",
                q.len(),
                self.dim
            )));
        }
        let qn = norm(q);
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut candidates: Vec<usize> = match restrict_to {
            None => (0..self.ids.len()).collect(),
            Some(ids) => ids
                .iter()
                .map(|id| self.lookup.get(id).copied().ok_or_else(|| Error::UnknownId(id.clone())))
                .collect::<Result<_>>()?,
        };
        candidates.sort_unstable();
        candidates.dedup();
        let mut scored: Vec<(usize, f64)> = candidates.into_iter().map(|i| (i, self.cosine_at(q, qn, i))).collect();
        let cmp = |a: &(usize, f64), b: &(usize, f64)| rank_order((&self.ids[a.0], a.1), (&self.ids[b.0], b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);
        Ok(scored.into_iter().map(|(i, s)| (self.ids[i].clone(), s)).collect())
    }
}
