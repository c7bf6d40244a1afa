use serde_json::{json, Map, Value};

use super::retrieval::{mean_topk_overlap, pad_with_ties, rerank, run_retrieval};
use super::{recall_at_k, EvalReport, GroundTruth, HitRule, Rankings, Task, DEFAULT_KS};
use crate::boc::{encode_pack, Aggregation, Assignment, BocConfig, SimilarityTransform, SoftAssignment};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::FeaturePack;
use crate::index::{build_index_skipping_empty, DenseStore};
use crate::sparse::EncodedVectors;
use crate::transform::{crelu, keep_for_sparsity, transform_pack, GlobalMethod, TransformConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Global {
        method: GlobalMethod,
        apply_crelu: bool,
    },
    BocHard {
        exclude_stop_words_at_indexing: bool,
    },
    BocSoft {
        aggregation: Aggregation,
        similarity: SimilarityTransform,
        exclude_stop_words_at_indexing: bool,
    },
}

impl MethodSpec {
    pub fn deep_permutation() -> Self {
        MethodSpec::Global {
            method: GlobalMethod::DeepPermutation,
            apply_crelu: true,
        }
    }

    pub fn scalar_quantization(scale: f64) -> Self {
        MethodSpec::Global {
            method: GlobalMethod::ScalarQuantization { scale },
            apply_crelu: true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Global { method, .. } => method.name(),
            MethodSpec::BocHard { .. } => "boc_hard",
            MethodSpec::BocSoft { .. } => "boc_soft",
        }
    }

    fn uses_codebook(&self) -> bool {
        !matches!(self, MethodSpec::Global { .. })
    }
}

/// One image/sentence evaluation setup: a method applied to both packs, evaluated in both
/// retrieval directions.
pub struct Experiment<'a> {
    images: &'a FeaturePack,
    sentences: &'a FeaturePack,
    codebook: Option<&'a Codebook>,
    method: MethodSpec,
    truth: GroundTruth,
    pub ks: Vec<usize>,
    pub hit_rule: HitRule,
    pub exec: Exec,
}

/// Encoded vectors of both packs at one sparsity level.
struct Encoded {
    images: EncodedVectors,
    sentences: EncodedVectors,
    z: usize,
}

impl<'a> Experiment<'a> {
    pub fn new(
        images: &'a FeaturePack,
        sentences: &'a FeaturePack,
        method: MethodSpec,
        codebook: Option<&'a Codebook>,
    ) -> Result<Self> {
        if images.dim != sentences.dim {
            return Err(Error::Dimension(format!(
                "image dim {} vs sentence dim {}",
                images.dim, sentences.dim
            )));
        }
        if method.uses_codebook() {
            let cb = codebook.ok_or_else(|| Error::Config(format!("{} needs a codebook", method.name())))?;
            if cb.dim != images.dim {
                return Err(Error::Dimension(format!(
                    "codebook dim {} vs pack dim {}",
                    cb.dim, images.dim
                )));
            }
        }
        Ok(Self {
            images,
            sentences,
            codebook,
            method,
            truth: GroundTruth::from_packs(images, sentences)?,
            ks: DEFAULT_KS.to_vec(),
            hit_rule: HitRule::default(),
            exec: Exec::default(),
        })
    }

    pub fn with_ks(mut self, ks: &[usize]) -> Self {
        self.ks = ks.to_vec();
        self
    }

    pub fn with_hit_rule(mut self, rule: HitRule) -> Self {
        self.hit_rule = rule;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn method(&self) -> &MethodSpec {
        &self.method
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    fn k_max(&self) -> usize {
        self.ks.iter().copied().max().unwrap_or(1)
    }

    fn sides(&self, task: Task) -> (&'a FeaturePack, &'a FeaturePack) {
        match task {
            Task::ImageRetrieval => (self.images, self.sentences),
            Task::SentenceRetrieval => (self.sentences, self.images),
        }
    }

    /// Encodes one pack; `sparsity` sets `keep_z` (global) or `row_keep_z` (soft BoC).
    pub fn encode(&self, pack: &FeaturePack, sparsity: f64) -> Result<EncodedVectors> {
        self.encode_with_z(pack, sparsity).map(|e| e.0)
    }

    fn encode_with_z(&self, pack: &FeaturePack, sparsity: f64) -> Result<(EncodedVectors, usize)> {
        match self.method {
            MethodSpec::Global { method, apply_crelu } => {
                let cfg = TransformConfig::with_sparsity(method, pack.dim, sparsity, apply_crelu)?;
                Ok((transform_pack(pack, &cfg, self.exec)?, cfg.keep_z))
            }
            MethodSpec::BocHard {
                exclude_stop_words_at_indexing,
            } => {
                if sparsity != 0.0 {
                    return Err(Error::Config("hard assignment has no sparsity control; use 0".into()));
                }
                let cfg = BocConfig {
                    assignment: Assignment::Hard,
                    exclude_stop_words_at_indexing,
                };
                let cb = self.codebook.expect("checked in new");
                Ok((encode_pack(pack, cb, &cfg, self.exec)?, 1))
            }
            MethodSpec::BocSoft {
                aggregation,
                similarity,
                exclude_stop_words_at_indexing,
            } => {
                let cb = self.codebook.expect("checked in new");
                let row_keep_z = keep_for_sparsity(cb.p(), sparsity)?;
                let cfg = BocConfig {
                    assignment: Assignment::Soft(SoftAssignment {
                        aggregation,
                        row_keep_z,
                        similarity,
                    }),
                    exclude_stop_words_at_indexing,
                };
                Ok((encode_pack(pack, cb, &cfg, self.exec)?, row_keep_z))
            }
        }
    }

    fn encode_both(&self, sparsity: f64) -> Result<Encoded> {
        let (images, z) = self.encode_with_z(self.images, sparsity)?;
        let (sentences, _) = self.encode_with_z(self.sentences, sparsity)?;
        Ok(Encoded { images, sentences, z })
    }

    fn params(&self, z: Option<usize>) -> Map<String, Value> {
        let mut p = Map::new();
        match self.method {
            MethodSpec::Global { method, apply_crelu } => {
                if let GlobalMethod::ScalarQuantization { scale } = method {
                    p.insert("scale".into(), json!(scale));
                }
                p.insert("apply_crelu".into(), json!(apply_crelu));
                if let Some(z) = z {
                    p.insert("keep_z".into(), json!(z));
                }
            }
            MethodSpec::BocHard {
                exclude_stop_words_at_indexing,
            } => {
                p.insert(
                    "exclude_stop_words_at_indexing".into(),
                    json!(exclude_stop_words_at_indexing),
                );
            }
            MethodSpec::BocSoft {
                aggregation,
                similarity,
                exclude_stop_words_at_indexing,
            } => {
                p.insert("aggregation".into(), json!(aggregation));
                p.insert("similarity".into(), json!(similarity));
                p.insert(
                    "exclude_stop_words_at_indexing".into(),
                    json!(exclude_stop_words_at_indexing),
                );
                if let Some(z) = z {
                    p.insert("row_keep_z".into(), json!(z));
                }
            }
        }
        if let Some(cb) = self.codebook.filter(|_| self.method.uses_codebook()) {
            p.insert("p".into(), json!(cb.p()));
            p.insert("codebook_method".into(), json!(cb.method));
            p.insert("codebook_with_stop_words".into(), json!(cb.built_with_stop_words));
            p.insert("codebook_contextualized".into(), json!(cb.built_contextualized));
        }
        p.insert("hit_rule".into(), json!(self.hit_rule));
        p
    }

    fn report(&self, rankings: &Rankings, task: Task, method: &str, params: Map<String, Value>) -> Result<EvalReport> {
        let mut rep = recall_at_k(rankings, &self.truth, task, &self.ks, self.hit_rule)?;
        rep.method = method.to_string();
        rep.params = params;
        Ok(rep)
    }

    /// Rankings over the encoded corpus, padded with zero-score ties up to `k_max`.
    /// Also returns how many corpus items encoded to empty vectors.
    fn rankings_from(&self, enc: &Encoded, task: Task, k_max: usize) -> Result<(Rankings, usize)> {
        let (corpus, queries) = match task {
            Task::ImageRetrieval => (&enc.images, &enc.sentences),
            Task::SentenceRetrieval => (&enc.sentences, &enc.images),
        };
        let (index, excluded) = build_index_skipping_empty(corpus)?;
        let mut rankings = run_retrieval(&index, &queries.vectors, k_max, self.exec)?;
        pad_with_ties(&index, &queries.vectors, &mut rankings, k_max);
        Ok((rankings, excluded.len()))
    }

    pub fn approx_rankings(&self, task: Task, sparsity: f64, k_max: usize) -> Result<Rankings> {
        let enc = self.encode_both(sparsity)?;
        Ok(self.rankings_from(&enc, task, k_max)?.0)
    }

    /// Recall@K in both directions at one sparsity level.
    pub fn evaluate(&self, sparsity: f64) -> Result<Vec<EvalReport>> {
        let enc = self.encode_both(sparsity)?;
        [Task::ImageRetrieval, Task::SentenceRetrieval]
            .into_iter()
            .map(|task| {
                let (rankings, excluded) = self.rankings_from(&enc, task, self.k_max())?;
                let mut params = self.params(Some(enc.z));
                params.insert("corpus_excluded".into(), json!(excluded));
                let mut rep = self.report(&rankings, task, self.method.name(), params)?;
                rep.sparsity = Some(sparsity);
                Ok(rep)
            })
            .collect()
    }

    /// Exact cosine rankings over the original global vectors.
    pub fn exact_rankings(&self, task: Task, k_max: usize) -> Result<Rankings> {
        let (corpus, queries) = self.sides(task);
        dense_rankings(
            &DenseStore::from_pack(corpus)?,
            &DenseStore::from_pack(queries)?,
            k_max,
            self.exec,
        )
    }

    pub fn exact_baseline(&self) -> Result<Vec<EvalReport>> {
        [Task::ImageRetrieval, Task::SentenceRetrieval]
            .into_iter()
            .map(|task| {
                let rankings = self.exact_rankings(task, self.k_max())?;
                let mut params = Map::new();
                params.insert("hit_rule".into(), json!(self.hit_rule));
                self.report(&rankings, task, "exact", params)
            })
            .collect()
    }

    /// Recall after re-ranking the first `r_m * k` approximate results with the original
    /// global vectors, for every `r_m` and both directions.
    pub fn rerank_curve(&self, sparsity: f64, r_ms: &[usize], k: usize) -> Result<Vec<EvalReport>> {
        if r_ms.is_empty() {
            return Ok(Vec::new());
        }
        if r_ms.contains(&0) || k == 0 {
            return Err(Error::Config("r_m and k must be at least 1".into()));
        }
        let enc = self.encode_both(sparsity)?;
        let depth = r_ms.iter().max().unwrap().saturating_mul(k);
        let mut out = Vec::new();
        for task in [Task::ImageRetrieval, Task::SentenceRetrieval] {
            let (corpus, queries) = self.sides(task);
            let corpus = DenseStore::from_pack(corpus)?;
            let queries = DenseStore::from_pack(queries)?;
            let (approx, excluded) = self.rankings_from(&enc, task, depth)?;
            for &r_m in r_ms {
                let reranked = rerank(&approx, &corpus, &queries, r_m, k, self.exec)?;
                let mut params = self.params(Some(enc.z));
                params.insert("corpus_excluded".into(), json!(excluded));
                params.insert("rerank_k".into(), json!(k));
                let mut rep = self.report(&reranked, task, self.method.name(), params)?;
                rep.sparsity = Some(sparsity);
                rep.r_m = Some(r_m);
                out.push(rep);
            }
        }
        Ok(out)
    }

    /// Mean top-`k` overlap between the approximate rankings and exact cosine rankings of
    /// the (c-relu'd, when enabled) global vectors, for image then sentence retrieval.
    pub fn ranking_fidelity(&self, sparsity: f64, k: usize) -> Result<[f64; 2]> {
        let MethodSpec::Global { apply_crelu, .. } = self.method else {
            return Err(Error::Config("ranking fidelity applies to global methods".into()));
        };
        let enc = self.encode_both(sparsity)?;
        let mut out = [0.0; 2];
        for (slot, task) in [Task::ImageRetrieval, Task::SentenceRetrieval].into_iter().enumerate() {
            let (corpus, queries) = self.sides(task);
            let reference = dense_rankings(
                &preprocessed_store(corpus, apply_crelu)?,
                &preprocessed_store(queries, apply_crelu)?,
                k,
                self.exec,
            )?;
            let (approx, _) = self.rankings_from(&enc, task, k)?;
            out[slot] = mean_topk_overlap(&approx, &reference, k)?;
        }
        Ok(out)
    }
}

fn preprocessed_store(pack: &FeaturePack, apply_crelu: bool) -> Result<DenseStore> {
    if !apply_crelu {
        return DenseStore::from_pack(pack);
    }
    let mut store = DenseStore::new(2 * pack.dim);
    for item in &pack.items {
        let g = item
            .global
            .as_deref()
            .ok_or_else(|| Error::Domain("item has no global vector".into()).for_item(&item.id))?;
        store.insert(&item.id, crelu(g)?)?;
    }
    Ok(store)
}

fn dense_rankings(corpus: &DenseStore, queries: &DenseStore, k_max: usize, exec: Exec) -> Result<Rankings> {
    exec.try_map(queries.ids(), |qid| {
        let q = queries.get(qid).expect("id from the store");
        let hits = corpus.exact_topk(q, k_max, None)?;
        Ok((qid.clone(), hits.into_iter().map(|h| h.0).collect()))
    })
}

/// One report per (sparsity factor, task), sweeping factors in order.
pub fn sparsity_sweep(experiment: &Experiment<'_>, factors: &[f64]) -> Result<Vec<EvalReport>> {
    let mut out = Vec::with_capacity(2 * factors.len());
    for &f in factors {
        out.extend(experiment.evaluate(f)?);
    }
    Ok(out)
}
