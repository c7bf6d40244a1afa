use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeaturePack;

#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub vector: Vec<f32>,
    pub word: Option<String>,
    pub is_stop_word: bool,
}

/// A downsampled mix of visual and textual concepts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptPool {
    pub dim: usize,
    pub entries: Vec<PoolEntry>,
    pub includes_stop_words: bool,
    pub contextualized: bool,
}

impl ConceptPool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vectors(&self) -> Vec<&[f32]> {
        self.entries.iter().map(|e| e.vector.as_slice()).collect()
    }
}

/// Pools every concept of `packs`, optionally drops stop words, then samples
/// `min(target_size, |pool|)` of them uniformly without replacement (order preserved).
pub fn build_pool(
    packs: &[&FeaturePack],
    target_size: usize,
    exclude_stop_words: bool,
    seed: u64,
) -> Result<ConceptPool> {
    let first = packs
        .first()
        .ok_or_else(|| Error::Config("no feature packs given".into()))?;
    if target_size == 0 {
        return Err(Error::Config("pool target size must be positive".into()));
    }
    let dim = first.dim;
    if let Some(p) = packs.iter().find(|p| p.dim != dim) {
        return Err(Error::Dimension(format!("pack dims differ: {} vs {}", dim, p.dim)));
    }
    let all: Vec<PoolEntry> = packs
        .iter()
        .flat_map(|p| p.items.iter())
        .flat_map(|it| it.concepts.iter())
        .filter(|c| !(exclude_stop_words && c.is_stop_word))
        .map(|c| PoolEntry {
            vector: c.vector.clone(),
            word: c.word.clone(),
            is_stop_word: c.is_stop_word,
        })
        .collect();
    if all.is_empty() {
        return Err(Error::EmptyPool);
    }
    let entries = if all.len() <= target_size {
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, all.len(), target_size).into_vec();
        picked.sort_unstable();
        let mut slots: Vec<Option<PoolEntry>> = all.into_iter().map(Some).collect();
        picked
            .into_iter()
            .map(|i| slots[i].take().expect("indices are distinct"))
            .collect()
    };
    Ok(ConceptPool {
        dim,
        entries,
        includes_stop_words: !exclude_stop_words,
        contextualized: packs.iter().all(|p| p.contextualized),
    })
}
