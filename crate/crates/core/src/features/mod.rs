//! Feature packs: items carrying an optional global descriptor and a set of concept vectors.

mod format;
mod synth;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{load_feature_pack, read_feature_pack, write_feature_pack, write_feature_pack_to};
pub use synth::{generate_synthetic, SyntheticConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Image,
    Sentence,
}

impl Modality {
    pub(crate) fn to_byte(self) -> u8 {
        match self {
            Modality::Image => 0,
            Modality::Sentence => 1,
        }
    }

    pub(crate) fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Modality::Image),
            1 => Ok(Modality::Sentence),
            other => Err(Error::Format(format!("unknown modality tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Concept {
    pub vector: Vec<f32>,
    pub word: Option<String>,
    pub is_stop_word: bool,
}

impl Concept {
    pub fn new(vector: Vec<f32>) -> Self {
        Self {
            vector,
            word: None,
            is_stop_word: false,
        }
    }

    pub fn with_word(vector: Vec<f32>, word: impl Into<String>, is_stop_word: bool) -> Self {
        Self {
            vector,
            word: Some(word.into()),
            is_stop_word,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub id: String,
    pub global: Option<Vec<f32>>,
    pub concepts: Vec<Concept>,
    /// Ground-truth link from a sentence to its image.
    pub group: Option<String>,
}

impl Item {
    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePack {
    pub modality: Modality,
    pub dim: usize,
    pub items: Vec<Item>,
    /// Metadata only: whether concepts were extracted with cross-element context.
    pub contextualized: bool,
    /// Provenance. Not persisted; loading sets it to the source path.
    pub source: String,
}

impl FeaturePack {
    pub fn new(modality: Modality, dim: usize) -> Self {
        Self {
            modality,
            dim,
            items: Vec::new(),
            contextualized: true,
            source: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn concept_count(&self) -> usize {
        self.items.iter().map(Item::n_concepts).sum()
    }

    /// Checks every pack invariant.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Dimension("pack dimension must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(self.items.len());
        for item in &self.items {
            if item.id.is_empty() {
                return Err(Error::Format("empty item id".into()));
            }
            if !seen.insert(item.id.as_str()) {
                return Err(Error::DuplicateId(item.id.clone()));
            }
            if item.group.as_deref() == Some("") {
                return Err(Error::Format(format!("item `{}` has an empty group", item.id)));
            }
            if let Some(g) = &item.global {
                if g.len() != self.dim {
                    return Err(Error::Dimension(format!(
                        "item `{}` global has {} components, pack dim is {}",
                        item.id,
                        g.len(),
                        self.dim
                    )));
                }
            }
            for (k, c) in item.concepts.iter().enumerate() {
                if c.vector.len() != self.dim {
                    return Err(Error::Dimension(format!(
                        "item `{}` concept {k} has {} components, pack dim is {}",
                        item.id,
                        c.vector.len(),
                        self.dim
                    )));
                }
                if c.word.as_deref() == Some("") {
                    return Err(Error::Format(format!(
                        "item `{}` concept {k} has an empty word",
                        item.id
                    )));
                }
                if c.is_stop_word && c.word.is_none() {
                    return Err(Error::Format(format!(
                        "item `{}` concept {k} is flagged as a stop word but has no word",
                        item.id
                    )));
                }
            }
        }
        Ok(())
    }
}
