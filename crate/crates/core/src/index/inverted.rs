use std::collections::HashMap;

use super::rank_order;
use crate::error::{Error, Result};
use crate::sparse::{clamp_unit, EncodedVectors, SparseVector};

/// Posting lists over `dim` components. Weights are stored as f32.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    pub(crate) dim: usize,
    pub(crate) postings: Vec<Vec<(u32, f32)>>,
    pub(crate) norms: Vec<f64>,
    pub(crate) ids: Vec<String>,
    pub(crate) lookup: HashMap<String, u32>,
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub postings_scanned: usize,
    pub candidates: usize,
}

impl InvertedIndex {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            postings: vec![Vec::new(); dim],
            norms: Vec::new(),
            ids: Vec::new(),
            lookup: HashMap::new(),
        }
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

    pub fn contains(&self, id: &str) -> bool {
        self.lookup.contains_key(id)
    }

    pub fn norm(&self, id: &str) -> Option<f64> {
        self.lookup.get(id).map(|&o| self.norms[o as usize])
    }

    pub fn posting_list(&self, component: usize) -> &[(u32, f32)] {
        &self.postings[component]
    }

    pub fn insert(&mut self, id: &str, v: &SparseVector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "vector `{id}` has dim {}, index has {}",
                v.dim(),
                self.dim
            )));
        }
        if v.is_empty() {
            return Err(Error::EmptyVector(id.to_string()));
        }
        if self.lookup.contains_key(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        let ord = u32::try_from(self.ids.len()).map_err(|_| Error::Domain("index is full".into()))?;
        let mut sq = 0.0;
        for &(c, w) in v.entries() {
            let w = w as f32;
            sq += (w as f64) * (w as f64);
            self.postings[c as usize].push((ord, w));
        }
        self.norms.push(sq.sqrt());
        self.ids.push(id.to_string());
        self.lookup.insert(id.to_string(), ord);
        Ok(())
    }

    /// Rebuilds an item's vector from the posting lists.
    pub fn reconstruct(&self, id: &str) -> Option<SparseVector> {
        let ord = *self.lookup.get(id)?;
        let entries = self
            .postings
            .iter()
            .enumerate()
            .filter_map(|(c, list)| {
                list.binary_search_by_key(&ord, |p| p.0)
                    .ok()
                    .map(|k| (c as u32, list[k].1 as f64))
            })
            .collect();
        Some(SparseVector::from_sorted_unchecked(self.dim, entries))
    }

    /// Top-`k` `(ordinal, score)` by cosine, touching only the query's posting lists.
    pub(crate) fn query_ordinals(&self, q: &SparseVector, k: usize, stats: &mut QueryStats) -> Result<Vec<(u32, f64)>> {
        if q.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "query dim {} vs index dim {}",
                q.dim(),
                self.dim
            )));
        }
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if q.is_empty() {
            return Ok(Vec::new());
        }
        let mut acc = vec![0.0f64; self.ids.len()];
        let mut seen = vec![false; self.ids.len()];
        let mut touched: Vec<u32> = Vec::new();
        for &(c, qw) in q.entries() {
            let list = &self.postings[c as usize];
            stats.postings_scanned += list.len();
            for &(ord, w) in list {
                let o = ord as usize;
                if !seen[o] {
                    seen[o] = true;
                    touched.push(ord);
                }
                acc[o] += qw * w as f64;
            }
        }
        stats.candidates += touched.len();
        let qn = q.norm();
        let mut scored: Vec<(u32, f64)> = touched
            .into_iter()
            .map(|o| (o, clamp_unit(acc[o as usize] / (qn * self.norms[o as usize]))))
            .collect();
        let cmp =
            |a: &(u32, f64), b: &(u32, f64)| rank_order((&self.ids[a.0 as usize], a.1), (&self.ids[b.0 as usize], b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);
        Ok(scored)
    }

    /// Top-`k` items by cosine; ties by ascending id. An empty query matches nothing.
    pub fn query_topk(&self, q: &SparseVector, k: usize) -> Result<Vec<(String, f64)>> {
        self.query_topk_with_stats(q, k).map(|(hits, _)| hits)
    }

    pub fn query_topk_with_stats(&self, q: &SparseVector, k: usize) -> Result<(Vec<(String, f64)>, QueryStats)> {
        let mut stats = QueryStats::default();
        let hits = self
            .query_ordinals(q, k, &mut stats)?
            .into_iter()
            .map(|(o, s)| (self.ids[o as usize].clone(), s))
            .collect();
        Ok((hits, stats))
    }
}

/// Builds an index; empty vectors and duplicate ids are errors.
pub fn build_index(set: &EncodedVectors) -> Result<InvertedIndex> {
    let mut index = InvertedIndex::new(set.dim);
    for (id, v) in &set.vectors {
        index.insert(id, v)?;
    }
    Ok(index)
}

/// Builds an index, leaving out items whose vector is empty. Returns their ids.
pub fn build_index_skipping_empty(set: &EncodedVectors) -> Result<(InvertedIndex, Vec<String>)> {
    let mut index = InvertedIndex::new(set.dim);
    let mut skipped = Vec::new();
    for (id, v) in &set.vectors {
        if v.is_empty() {
            if index.contains(id) || skipped.contains(id) {
                return Err(Error::DuplicateId(id.clone()));
            }
            skipped.push(id.clone());
        } else {
            index.insert(id, v)?;
        }
    }
    Ok((index, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(e: &[(u32, f64)]) -> SparseVector {
        SparseVector::new(4, e.to_vec()).unwrap()
    }

    fn three() -> EncodedVectors {
        EncodedVectors {
            dim: 4,
            vectors: vec![
                ("a".into(), sv(&[(0, 1.0), (2, 2.0)])),
                ("b".into(), sv(&[(1, 3.0)])),
                ("c".into(), sv(&[(0, 1.0), (1, 1.0), (3, 5.0)])),
            ],
        }
    }

    #[test]
    fn postings_hold_exactly_the_nonzeros() {
        let idx = build_index(&three()).unwrap();
        assert_eq!(idx.posting_list(0), &[(0, 1.0), (2, 1.0)]);
        assert_eq!(idx.posting_list(1), &[(1, 3.0), (2, 1.0)]);
        assert_eq!(idx.posting_list(2), &[(0, 2.0)]);
        assert_eq!(idx.posting_list(3), &[(2, 5.0)]);
        for (id, v) in &three().vectors {
            assert_eq!(idx.reconstruct(id).as_ref(), Some(v));
        }
    }

    #[test]
    fn identity_query_and_disjoint_query() {
        let idx = build_index(&three()).unwrap();
        let hits = idx.query_topk(&sv(&[(0, 1.0), (2, 2.0)]), 3).unwrap();
        assert_eq!(hits[0].0, "a");
        assert!((hits[0].1 - 1.0).abs() < 1e-12);

        let mut idx2 = InvertedIndex::new(6);
        idx2.insert("x", &SparseVector::new(6, vec![(0, 1.0)]).unwrap())
            .unwrap();
        assert!(idx2
            .query_topk(&SparseVector::new(6, vec![(5, 1.0)]).unwrap(), 10)
            .unwrap()
            .is_empty());
        assert!(idx.query_topk(&SparseVector::empty(4), 3).unwrap().is_empty());
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let fwd = build_index(&three()).unwrap();
        let mut rev_set = three();
        rev_set.vectors.reverse();
        let rev = build_index(&rev_set).unwrap();
        for q in [sv(&[(0, 1.0)]), sv(&[(1, 2.0), (3, 1.0)]), sv(&[(0, 1.0), (1, 1.0)])] {
            assert_eq!(fwd.query_topk(&q, 3).unwrap(), rev.query_topk(&q, 3).unwrap());
        }
    }

    #[test]
    fn ties_break_by_id() {
        let set = EncodedVectors {
            dim: 4,
            vectors: vec![("zz".into(), sv(&[(0, 2.0)])), ("aa".into(), sv(&[(0, 1.0)]))],
        };
        let idx = build_index(&set).unwrap();
        let hits = idx.query_topk(&sv(&[(0, 7.0)]), 1).unwrap();
        assert_eq!(hits, vec![("aa".to_string(), 1.0)]);
    }

    #[test]
    fn build_errors() {
        let mut set = three();
        set.vectors.push(("a".into(), sv(&[(3, 1.0)])));
        assert!(matches!(build_index(&set), Err(Error::DuplicateId(id)) if id == "a"));
        let mut set = three();
        set.vectors.push(("e".into(), SparseVector::empty(4)));
        assert!(matches!(build_index(&set), Err(Error::EmptyVector(id)) if id == "e"));
        let (idx, skipped) = build_index_skipping_empty(&set).unwrap();
        assert_eq!(idx.len(), 3);
        assert_eq!(skipped, vec!["e".to_string()]);
        let idx = build_index(&three()).unwrap();
        assert!(matches!(
            idx.query_topk(&SparseVector::empty(5), 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn stats_bound_candidates() {
        let idx = build_index(&three()).unwrap();
        let (_, stats) = idx.query_topk_with_stats(&sv(&[(0, 1.0), (1, 1.0)]), 10).unwrap();
        assert_eq!(stats.postings_scanned, 4);
        assert_eq!(stats.candidates, 3);
    }
}
