//! Topic-mixture generator for desk-scale cross-modal packs.
//!
//! Every image owns a few latent topics with random weights and an individual offset that
//! makes its concepts distinct from other images on the same topics. Image and caption
//! concepts are noisy copies of the same per-image prototypes; global vectors are noisy
//! copies of the image's weighted prototype mean. Noise is isotropic Gaussian with
//! per-component standard deviation `noise_sigma / sqrt(dim)`, so its expected norm is
//! roughly `noise_sigma` against unit-norm signals.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Concept, FeaturePack, Item, Modality};
use crate::error::{Error, Result};

pub(crate) const STOP_WORDS: &[&str] = &["a", "an", "the", "of", "in", "on", "with", "and", "is", "at"];

fn default_captions() -> usize {
    5
}
fn default_topics_per_image() -> usize {
    3
}
fn default_individuality() -> f64 {
    0.5
}
fn default_stop_word_fraction() -> f64 {
    0.2
}
fn default_words_per_topic() -> usize {
    4
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_images: usize,
    #[serde(default = "default_captions")]
    pub captions_per_image: usize,
    pub dim: usize,
    pub topics: usize,
    pub noise_sigma: f64,
    pub concepts_per_image: [usize; 2],
    pub concepts_per_sentence: [usize; 2],
    pub seed: u64,
    #[serde(default = "default_topics_per_image")]
    pub topics_per_image: usize,
    /// Norm of the per-image offset added to its topic centroids.
    #[serde(default = "default_individuality")]
    pub individuality: f64,
    /// Probability that a caption concept is a stop word.
    #[serde(default = "default_stop_word_fraction")]
    pub stop_word_fraction: f64,
    #[serde(default = "default_words_per_topic")]
    pub words_per_topic: usize,
    #[serde(default = "default_true")]
    pub contextualized: bool,
}

impl SyntheticConfig {
    pub fn new(n_images: usize, dim: usize, topics: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            n_images,
            captions_per_image: default_captions(),
            dim,
            topics,
            noise_sigma,
            concepts_per_image: [4, 8],
            concepts_per_sentence: [6, 12],
            seed,
            topics_per_image: default_topics_per_image(),
            individuality: default_individuality(),
            stop_word_fraction: default_stop_word_fraction(),
            words_per_topic: default_words_per_topic(),
            contextualized: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_images", self.n_images),
            ("dim", self.dim),
            ("topics", self.topics),
            ("captions_per_image", self.captions_per_image),
            ("topics_per_image", self.topics_per_image),
            ("words_per_topic", self.words_per_topic),
        ];
        for (key, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("`{key}` must be positive")));
            }
        }
        for (key, [lo, hi]) in [
            ("concepts_per_image", self.concepts_per_image),
            ("concepts_per_sentence", self.concepts_per_sentence),
        ] {
            if lo > hi {
                return Err(Error::Config(format!("`{key}` has min {lo} > max {hi}")));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("`noise_sigma` must be finite and non-negative".into()));
        }
        if !(self.individuality.is_finite() && self.individuality >= 0.0) {
            return Err(Error::Config("`individuality` must be finite and non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.stop_word_fraction) {
            return Err(Error::Config("`stop_word_fraction` must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

struct Gen {
    rng: ChaCha8Rng,
    dim: usize,
    noise: f64,
}

impl Gen {
    fn gaussian(&mut self) -> Vec<f64> {
        (0..self.dim)
            .map(|_| self.rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    fn unit(&mut self) -> Vec<f64> {
        normalized(self.gaussian())
    }

    /// `normalize(base + noise)` as f32.
    fn noisy(&mut self, base: &[f64]) -> Vec<f32> {
        let scale = self.noise / (self.dim as f64).sqrt();
        let v: Vec<f64> = if scale > 0.0 {
            base.iter()
                .map(|&b| b + scale * self.rng.sample::<f64, _>(StandardNormal))
                .collect()
        } else {
            base.to_vec()
        };
        normalized(v).into_iter().map(|x| x as f32).collect()
    }

    fn weighted_pick(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut x = self.rng.random::<f64>() * total;
        for (i, &w) in weights.iter().enumerate() {
            if x < w {
                return i;
            }
            x -= w;
        }
        weights.len() - 1
    }

    fn count(&mut self, [lo, hi]: [usize; 2]) -> usize {
        self.rng.random_range(lo..=hi)
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

fn topic_word(topic: usize, j: usize) -> String {
    format!("topic{topic}word{j}")
}

/// Generates an (images, sentences) pack pair; deterministic given the config.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(FeaturePack, FeaturePack)> {
    cfg.validate()?;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        dim: cfg.dim,
        noise: cfg.noise_sigma,
    };
    let centroids: Vec<Vec<f64>> = (0..cfg.topics).map(|_| g.unit()).collect();
    let stop_vectors: Vec<Vec<f64>> = STOP_WORDS.iter().map(|_| g.unit()).collect();
    let topics_per_image = cfg.topics_per_image.min(cfg.topics);
    let width = cfg.n_images.saturating_sub(1).to_string().len();

    let source = format!("synthetic(seed={})", cfg.seed);
    let mut images = FeaturePack::new(Modality::Image, cfg.dim);
    let mut sentences = FeaturePack::new(Modality::Sentence, cfg.dim);
    for pack in [&mut images, &mut sentences] {
        pack.contextualized = cfg.contextualized;
        pack.source = source.clone();
    }

    for i in 0..cfg.n_images {
        let topics = index::sample(&mut g.rng, cfg.topics, topics_per_image).into_vec();
        let weights: Vec<f64> = topics.iter().map(|_| g.rng.random_range(0.5..1.5)).collect();
        let offset = g.unit();
        let prototypes: Vec<Vec<f64>> = topics
            .iter()
            .map(|&t| {
                normalized(
                    centroids[t]
                        .iter()
                        .zip(&offset)
                        .map(|(c, o)| c + cfg.individuality * o)
                        .collect(),
                )
            })
            .collect();
        let mut signature = vec![0.0; cfg.dim];
        for (p, w) in prototypes.iter().zip(&weights) {
            signature.iter_mut().zip(p).for_each(|(s, x)| *s += w * x);
        }
        let signature = normalized(signature);

        let image_id = format!("img{i:0width$}");
        let n = g.count(cfg.concepts_per_image);
        let concepts = (0..n)
            .map(|_| {
                let k = g.weighted_pick(&weights);
                Concept::new(g.noisy(&prototypes[k]))
            })
            .collect();
        images.items.push(Item {
            id: image_id.clone(),
            global: Some(g.noisy(&signature)),
            concepts,
            group: None,
        });

        for s in 0..cfg.captions_per_image {
            let n = g.count(cfg.concepts_per_sentence);
            let concepts = (0..n)
                .map(|_| {
                    if g.rng.random::<f64>() < cfg.stop_word_fraction {
                        let w = g.rng.random_range(0..STOP_WORDS.len());
                        Concept::with_word(g.noisy(&stop_vectors[w]), STOP_WORDS[w], true)
                    } else {
                        let k = g.weighted_pick(&weights);
                        let j = g.rng.random_range(0..cfg.words_per_topic);
                        Concept::with_word(g.noisy(&prototypes[k]), topic_word(topics[k], j), false)
                    }
                })
                .collect();
            sentences.items.push(Item {
                id: format!("{image_id}_s{s}"),
                global: Some(g.noisy(&signature)),
                concepts,
                group: Some(image_id.clone()),
            });
        }
    }
    Ok((images, sentences))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let cfg = SyntheticConfig::new(20, 16, 4, 0.3, 7);
        assert_eq!(generate_synthetic(&cfg).unwrap(), generate_synthetic(&cfg).unwrap());
        let other = SyntheticConfig { seed: 8, ..cfg.clone() };
        assert_ne!(
            generate_synthetic(&cfg).unwrap().0,
            generate_synthetic(&other).unwrap().0
        );
    }

    #[test]
    fn shapes_and_groups() {
        let cfg = SyntheticConfig::new(12, 8, 3, 0.2, 1);
        let (img, sen) = generate_synthetic(&cfg).unwrap();
        assert_eq!(img.len(), 12);
        assert_eq!(sen.len(), 60);
        img.validate().unwrap();
        sen.validate().unwrap();
        assert_eq!(sen.items[7].group.as_deref(), Some("img01"));
        for it in &img.items {
            assert!((4..=8).contains(&it.n_concepts()));
            assert!(it.concepts.iter().all(|c| c.word.is_none()));
        }
        for it in &sen.items {
            assert!((6..=12).contains(&it.n_concepts()));
            assert!(it.concepts.iter().all(|c| c.word.is_some()));
        }
    }

    #[test]
    fn zero_noise_sentence_global_equals_image_global() {
        let mut cfg = SyntheticConfig::new(30, 8, 10, 0.0, 3);
        cfg.captions_per_image = 1;
        cfg.topics_per_image = 1;
        let (img, sen) = generate_synthetic(&cfg).unwrap();
        for (i, s) in img.items.iter().zip(&sen.items) {
            assert_eq!(i.global, s.global);
        }
    }

    #[test]
    fn rejects_bad_config() {
        for cfg in [
            SyntheticConfig::new(0, 8, 2, 0.1, 0),
            SyntheticConfig::new(4, 0, 2, 0.1, 0),
            SyntheticConfig::new(4, 8, 0, 0.1, 0),
            SyntheticConfig::new(4, 8, 2, -1.0, 0),
        ] {
            assert!(matches!(generate_synthetic(&cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn json_missing_seed_names_key() {
        let text = r#"{"n_images": 3, "captions_per_image": 5, "dim": 4, "topics": 2,
            "noise_sigma": 0.1, "concepts_per_image": [1, 2], "concepts_per_sentence": [1, 2]}"#;
        match SyntheticConfig::from_json(text) {
            Err(Error::Config(msg)) => assert!(msg.contains("seed"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
