//! Shared fixtures and a from-scratch reference implementation used as a test oracle.
//!
//! Nothing here calls into the library's encoders or scorers: vectors are handled densely
//! and every ranking is a full sort, so disagreements point at the library.
#![allow(dead_code)]

pub mod frozen;

use std::cmp::Ordering;
use std::path::PathBuf;

use xmodal::features::{generate_synthetic, FeaturePack, SyntheticConfig};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_config(name: &str) -> SyntheticConfig {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    SyntheticConfig::from_json(&text).expect("fixture config valid")
}

/// The frozen 1,000 image / 5,000 sentence fixture.
pub fn fixture() -> (FeaturePack, FeaturePack) {
    generate_synthetic(&fixture_config("synthetic.json")).expect("fixture generates")
}

pub fn small_fixture() -> (FeaturePack, FeaturePack) {
    generate_synthetic(&fixture_config("small.json")).expect("fixture generates")
}

// ---- encoders -------------------------------------------------------------

pub fn crelu(v: &[f32]) -> Vec<f32> {
    let mut out = vec![0.0f32; 2 * v.len()];
    for (j, &x) in v.iter().enumerate() {
        if x > 0.0 {
            out[j] = x;
        } else {
            out[v.len() + j] = -x;
        }
    }
    out
}

/// Rank of every component under "larger first, lower index first", by counting.
fn ranks<T: PartialOrd + Copy>(w: &[T]) -> Vec<usize> {
    (0..w.len())
        .map(|j| (0..w.len()).filter(|&i| w[i] > w[j] || (w[i] == w[j] && i < j)).count())
        .collect()
}

/// Dense deep-permutation weights: `n - rank` for the `z` highest positive components.
pub fn deep_permutation(v: &[f32], z: usize) -> Vec<f64> {
    let n = v.len();
    let r = ranks(v);
    (0..n)
        .map(|j| if v[j] > 0.0 && r[j] < z { (n - r[j]) as f64 } else { 0.0 })
        .collect()
}

/// Dense `floor(scale * v)` keeping the `z` largest positive results.
pub fn scalar_quantize(v: &[f32], scale: f32, z: usize) -> Vec<f64> {
    let q: Vec<f64> = v.iter().map(|&x| (scale * x).floor() as f64).collect();
    let r = ranks(&q);
    (0..q.len())
        .map(|j| if q[j] > 0.0 && r[j] < z { q[j] } else { 0.0 })
        .collect()
}

pub fn keep(dim: usize, f: f64) -> usize {
    (((1.0 - f) * dim as f64).round() as usize).max(1)
}

// ---- scoring --------------------------------------------------------------

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 1.0)
}

pub fn widen(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn signed_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

fn by_score_then_id(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(b.1))
}

pub type Dense = Vec<(String, Vec<f64>)>;
pub type Ranked = Vec<(String, Vec<String>)>;

/// Full sort of the corpus for every query; the first `k` ids are kept.
///
/// With `sparse` set, all-zero corpus items are not indexable and an all-zero query
/// ranks nothing, mirroring how an inverted index behaves.
pub fn rank(queries: &Dense, corpus: &Dense, k: usize, sparse: bool) -> Ranked {
    let live: Vec<&(String, Vec<f64>)> = corpus
        .iter()
        .filter(|(_, v)| !sparse || v.iter().any(|&x| x != 0.0))
        .collect();
    queries
        .iter()
        .map(|(qid, q)| {
            if sparse && q.iter().all(|&x| x == 0.0) {
                return (qid.clone(), Vec::new());
            }
            let score = if sparse { cosine } else { signed_cosine };
            let mut scored: Vec<(f64, &str)> = live.iter().map(|(id, v)| (score(q, v), id.as_str())).collect();
            scored.sort_by(by_score_then_id);
            (
                qid.clone(),
                scored.into_iter().take(k).map(|(_, id)| id.to_string()).collect(),
            )
        })
        .collect()
}

/// Re-orders the first `depth` ids of each ranking by exact signed cosine.
pub fn rerank(approx: &Ranked, queries: &Dense, corpus: &Dense, depth: usize) -> Ranked {
    let corpus_map: std::collections::HashMap<&str, &Vec<f64>> =
        corpus.iter().map(|(id, v)| (id.as_str(), v)).collect();
    approx
        .iter()
        .map(|(qid, ids)| {
            let q = &queries.iter().find(|(i, _)| i == qid).unwrap().1;
            let mut scored: Vec<(f64, &str)> = ids
                .iter()
                .take(depth)
                .map(|id| (signed_cosine(q, corpus_map[id.as_str()]), id.as_str()))
                .collect();
            scored.sort_by(by_score_then_id);
            (qid.clone(), scored.into_iter().map(|(_, id)| id.to_string()).collect())
        })
        .collect()
}

// ---- recall ---------------------------------------------------------------

/// Hit counts at each K. A sentence query hits when its own image is retrieved; an image
/// query hits when any of its captions is.
pub fn count_hits(rankings: &Ranked, sentences: &FeaturePack, image_query: bool, ks: &[usize]) -> Vec<usize> {
    let groups: std::collections::HashMap<&str, &str> = sentences
        .items
        .iter()
        .map(|s| (s.id.as_str(), s.group.as_deref().unwrap()))
        .collect();
    let group_of = |sid: &str| groups.get(sid).map(|g| g.to_string());
    let mut hits = vec![0; ks.len()];
    for (qid, ids) in rankings {
        let pos = if image_query {
            ids.iter()
                .position(|sid| group_of(sid).as_deref() == Some(qid.as_str()))
        } else {
            let target = group_of(qid).unwrap();
            ids.iter().position(|iid| *iid == target)
        };
        if let Some(p) = pos {
            for (h, &k) in hits.iter_mut().zip(ks) {
                if p < k {
                    *h += 1;
                }
            }
        }
    }
    hits
}

pub fn overlap(a: &Ranked, b: &Ranked, k: usize) -> f64 {
    let mut total = 0.0;
    for ((qa, ra), (qb, rb)) in a.iter().zip(b) {
        assert_eq!(qa, qb);
        let shared = ra
            .iter()
            .take(k)
            .filter(|id| rb.iter().take(k).any(|x| x == *id))
            .count();
        total += shared as f64 / k as f64;
    }
    total / a.len() as f64
}

// ---- pack helpers ---------------------------------------------------------

pub fn globals(pack: &FeaturePack) -> Vec<(String, Vec<f32>)> {
    pack.items
        .iter()
        .map(|i| (i.id.clone(), i.global.clone().unwrap()))
        .collect()
}

pub fn encode_with(pack: &FeaturePack, f: impl Fn(&[f32]) -> Vec<f64>) -> Dense {
    globals(pack).into_iter().map(|(id, g)| (id, f(&g))).collect()
}
