use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use super::{Codebook, CodebookMethod};
use crate::error::{Error, Result};
use crate::features::FeaturePack;

/// Reads a one-token-per-line word list; blank lines are skipped.
pub fn read_word_list(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Codebook of the `p` most frequent dictionary words that are not stop words.
///
/// Ties in frequency go to the lexicographically smaller word. Each centroid is the mean
/// of the concept vectors labelled with that word.
pub fn build_word_codebook(
    packs: &[&FeaturePack],
    p: usize,
    dictionary: &HashSet<String>,
    stop_words: &HashSet<String>,
) -> Result<Codebook> {
    let first = packs
        .first()
        .ok_or_else(|| Error::Config("no feature packs given".into()))?;
    if p == 0 {
        return Err(Error::Config("p must be positive".into()));
    }
    let dim = first.dim;
    if let Some(pk) = packs.iter().find(|pk| pk.dim != dim) {
        return Err(Error::Dimension(format!("pack dims differ: {} vs {}", dim, pk.dim)));
    }

    let mut stats: BTreeMap<&str, (usize, Vec<f64>)> = BTreeMap::new();
    for c in packs
        .iter()
        .flat_map(|pk| pk.items.iter())
        .flat_map(|it| it.concepts.iter())
    {
        let Some(word) = c.word.as_deref() else { continue };
        if c.is_stop_word || stop_words.contains(word) || !dictionary.contains(word) {
            continue;
        }
        let (count, sum) = stats.entry(word).or_insert_with(|| (0, vec![0.0; dim]));
        *count += 1;
        sum.iter_mut().zip(&c.vector).for_each(|(s, &x)| *s += x as f64);
    }
    if stats.len() < p {
        return Err(Error::InsufficientData(format!(
            "{} qualifying words, need {p}",
            stats.len()
        )));
    }

    let mut ranked: Vec<(&str, usize, Vec<f64>)> = stats.into_iter().map(|(w, (n, s))| (w, n, s)).collect();
    // BTreeMap order is lexicographic; a stable sort by count keeps it for ties.
    ranked.sort_by_key(|r| std::cmp::Reverse(r.1));
    ranked.truncate(p);

    let (labels, centroids) = ranked
        .into_iter()
        .map(|(w, n, sum)| (w.to_string(), sum.iter().map(|s| (s / n as f64) as f32).collect()))
        .unzip();
    Ok(Codebook {
        dim,
        centroids,
        method: CodebookMethod::WordFrequency,
        labels: Some(labels),
        built_with_stop_words: false,
        built_contextualized: packs.iter().all(|pk| pk.contextualized),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Concept, Item, Modality};

    fn corpus(words: &[(&str, usize, bool)]) -> FeaturePack {
        let mut p = FeaturePack::new(Modality::Sentence, 2);
        let concepts = words
            .iter()
            .flat_map(|&(w, n, stop)| (0..n).map(move |i| Concept::with_word(vec![i as f32, 1.0], w, stop)))
            .collect();
        p.items.push(Item {
            id: "s".into(),
            global: None,
            concepts,
            group: Some("i".into()),
        });
        p
    }

    fn set(words: &[&str]) -> HashSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn filters_then_takes_most_frequent() {
        let pk = corpus(&[("dog", 50, false), ("the", 400, true), ("zxq", 30, false)]);
        let cb = build_word_codebook(&[&pk], 1, &set(&["dog", "the"]), &set(&["the"])).unwrap();
        assert_eq!(cb.labels, Some(vec!["dog".to_string()]));
        assert_eq!(cb.centroids, vec![vec![24.5, 1.0]]);
        assert_eq!(cb.method, CodebookMethod::WordFrequency);
    }

    #[test]
    fn ties_go_lexicographic() {
        let pk = corpus(&[("zebra", 3, false), ("apple", 3, false)]);
        let cb = build_word_codebook(&[&pk], 1, &set(&["zebra", "apple"]), &set(&[])).unwrap();
        assert_eq!(cb.labels.unwrap(), vec!["apple"]);
    }

    #[test]
    fn too_few_words() {
        let pk = corpus(&[("dog", 2, false)]);
        assert!(matches!(
            build_word_codebook(&[&pk], 2, &set(&["dog"]), &set(&[])),
            Err(Error::InsufficientData(_))
        ));
    }
}
