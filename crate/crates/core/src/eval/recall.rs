use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EvalReport, GroundTruth};
use crate::error::{Error, Result};

/// Per-query ranked result ids, in query order.
pub type Rankings = Vec<(String, Vec<String>)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Sentence queries against an image corpus.
    ImageRetrieval,
    /// Image queries against a sentence corpus.
    SentenceRetrieval,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::ImageRetrieval => "image_retrieval",
            Task::SentenceRetrieval => "sentence_retrieval",
        }
    }
}

/// What counts as a hit when an image query retrieves sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitRule {
    #[default]
    AnyCaption,
    FirstCaption,
}

/// Percentage of queries whose ground truth appears within the first K results, for each
/// K in `ks`. Queries with an empty ranking are misses and are counted as unretrievable.
pub fn recall_at_k(
    rankings: &Rankings,
    truth: &GroundTruth,
    task: Task,
    ks: &[usize],
    rule: HitRule,
) -> Result<EvalReport> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Config("ks must be non-empty and positive".into()));
    }
    let mut hits: BTreeMap<usize, usize> = ks.iter().map(|&k| (k, 0)).collect();
    let mut unretrievable = 0;
    for (query, ranked) in rankings {
        let first_hit = match task {
            Task::ImageRetrieval => {
                let target = truth.image_of(query).ok_or_else(|| Error::UnknownId(query.clone()))?;
                ranked.iter().position(|id| id == target)
            }
            Task::SentenceRetrieval => {
                let targets = truth
                    .sentences_of(query)
                    .ok_or_else(|| Error::UnknownId(query.clone()))?;
                match rule {
                    HitRule::AnyCaption => ranked.iter().position(|id| targets.contains(id)),
                    HitRule::FirstCaption => ranked.iter().position(|id| *id == targets[0]),
                }
            }
        };
        if ranked.is_empty() {
            unretrievable += 1;
        }
        if let Some(pos) = first_hit {
            for (&k, h) in hits.iter_mut() {
                if pos < k {
                    *h += 1;
                }
            }
        }
    }
    Ok(EvalReport::from_hits(task, hits, rankings.len(), unretrievable))
}
