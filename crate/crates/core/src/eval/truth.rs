use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::features::{FeaturePack, Modality};

/// Sentence → image links and their inverse.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    image_of: HashMap<String, String>,
    sentences_of: HashMap<String, Vec<String>>,
}

impl GroundTruth {
    /// Links every sentence to its `group` image. Every image needs at least one sentence.
    pub fn from_packs(images: &FeaturePack, sentences: &FeaturePack) -> Result<Self> {
        if images.modality != Modality::Image || sentences.modality != Modality::Sentence {
            return Err(Error::Config("expected an image pack and a sentence pack".into()));
        }
        let image_ids: Vec<&str> = images.items.iter().map(|i| i.id.as_str()).collect();
        let pairs = sentences
            .items
            .iter()
            .map(|s| {
                s.group
                    .as_deref()
                    .map(|g| (s.id.as_str(), g))
                    .ok_or_else(|| Error::Config(format!("sentence `{}` has no group", s.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&image_ids, &pairs)
    }

    pub fn new(image_ids: &[&str], pairs: &[(&str, &str)]) -> Result<Self> {
        let mut sentences_of: HashMap<String, Vec<String>> =
            image_ids.iter().map(|&i| (i.to_string(), Vec::new())).collect();
        let mut image_of = HashMap::with_capacity(pairs.len());
        for &(sentence, image) in pairs {
            let list = sentences_of
                .get_mut(image)
                .ok_or_else(|| Error::UnknownId(image.to_string()))?;
            if image_of.insert(sentence.to_string(), image.to_string()).is_some() {
                return Err(Error::DuplicateId(sentence.to_string()));
            }
            list.push(sentence.to_string());
        }
        if let Some(lonely) = image_ids.iter().find(|&&i| sentences_of[i].is_empty()) {
            return Err(Error::Config(format!("image `{lonely}` has no sentences")));
        }
        Ok(Self { image_of, sentences_of })
    }

    pub fn image_of(&self, sentence: &str) -> Option<&str> {
        self.image_of.get(sentence).map(String::as_str)
    }

    /// Sentences of an image, in pack order.
    pub fn sentences_of(&self, image: &str) -> Option<&[String]> {
        self.sentences_of.get(image).map(Vec::as_slice)
    }

    pub fn image_count(&self) -> usize {
        self.sentences_of.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.image_of.len()
    }
}
