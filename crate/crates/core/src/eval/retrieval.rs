use std::collections::HashSet;

use super::Rankings;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::{DenseStore, InvertedIndex};
use crate::sparse::SparseVector;

/// `query_topk` for every query with `k = k_max`.
pub fn run_retrieval(
    index: &InvertedIndex,
    queries: &[(String, SparseVector)],
    k_max: usize,
    exec: Exec,
) -> Result<Rankings> {
    exec.try_map(queries, |(id, q)| {
        let hits = index.query_topk(q, k_max).map_err(|e| e.for_item(id))?;
        Ok((id.clone(), hits.into_iter().map(|h| h.0).collect()))
    })
}

/// Extends each ranking to `k_max` with the items its query never touched.
///
/// Untouched items all score 0 and so follow the touched ones in ascending id order; the
/// result is the head of the exhaustive cosine ranking. A query that touches nothing still
/// gets the all-zero ranking. Only empty queries keep an empty ranking.
pub fn pad_with_ties(index: &InvertedIndex, queries: &[(String, SparseVector)], rankings: &mut Rankings, k_max: usize) {
    let mut sorted: Vec<&str> = index.ids().iter().map(String::as_str).collect();
    sorted.sort_unstable();
    for ((qid, q), (rid, ranked)) in queries.iter().zip(rankings.iter_mut()) {
        debug_assert_eq!(qid, rid);
        if q.is_empty() || ranked.len() >= k_max {
            continue;
        }
        let present: HashSet<String> = ranked.iter().cloned().collect();
        let room = k_max - ranked.len();
        ranked.extend(
            sorted
                .iter()
                .filter(|id| !present.contains(**id))
                .take(room)
                .map(|id| id.to_string()),
        );
    }
}

/// Re-orders the first `r_m * k` approximate results of each query by exact cosine
/// against the original dense vectors.
pub fn rerank(
    approx: &Rankings,
    corpus: &DenseStore,
    queries: &DenseStore,
    r_m: usize,
    k: usize,
    exec: Exec,
) -> Result<Rankings> {
    if r_m < 1 || k < 1 {
        return Err(Error::Config(format!("r_m ({r_m}) and k ({k}) must be at least 1")));
    }
    let depth = r_m.saturating_mul(k);
    exec.try_map(approx, |(qid, ranked)| {
        let q = queries.get(qid).ok_or_else(|| Error::UnknownId(qid.clone()))?;
        let candidates = &ranked[..ranked.len().min(depth)];
        let reordered = corpus.exact_topk(q, candidates.len(), Some(candidates))?;
        Ok((qid.clone(), reordered.into_iter().map(|h| h.0).collect()))
    })
}

/// Mean fraction of shared ids between the top-`k` of paired rankings.
pub fn mean_topk_overlap(a: &Rankings, b: &Rankings, k: usize) -> Result<f64> {
    if a.len() != b.len() || k == 0 {
        return Err(Error::Config("rankings must pair up and k must be positive".into()));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for ((qa, ra), (qb, rb)) in a.iter().zip(b) {
        if qa != qb {
            return Err(Error::Config(format!("query order differs: `{qa}` vs `{qb}`")));
        }
        let head: HashSet<&String> = ra.iter().take(k).collect();
        let shared = rb.iter().take(k).filter(|id| head.contains(id)).count();
        total += shared as f64 / k as f64;
    }
    Ok(total / a.len() as f64)
}
