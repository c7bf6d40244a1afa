use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use xmodal::boc::{Aggregation, SimilarityTransform};
use xmodal::eval::{HitRule, MethodSpec};
use xmodal::transform::GlobalMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DeepPermutation,
    ScalarQuantization,
    BocHard,
    BocSoft,
}

fn default_scale() -> f64 {
    1000.0
}
fn default_true() -> bool {
    true
}
fn default_ks() -> Vec<usize> {
    xmodal::eval::DEFAULT_KS.to_vec()
}
fn default_rerank_k() -> usize {
    10
}
fn default_p() -> usize {
    1000
}
fn default_pool_size() -> usize {
    100_000
}
fn default_aggregation() -> Aggregation {
    Aggregation::Sum
}

/// One evaluation run. Every field can be overridden from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub images: PathBuf,
    pub sentences: PathBuf,
    pub method: Method,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_true")]
    pub apply_crelu: bool,
    /// Used when `sparsity_list` is empty.
    #[serde(default)]
    pub sparsity: f64,
    #[serde(default)]
    pub sparsity_list: Vec<f64>,
    /// Re-ranking multipliers; each curve is evaluated at every sparsity level.
    #[serde(default)]
    pub rm_list: Vec<usize>,
    #[serde(default = "default_rerank_k")]
    pub rerank_k: usize,
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub hit_rule: HitRule,
    #[serde(default)]
    pub exact_baseline: bool,

    /// BoC codebook. When absent, one is built with kmeans from both packs.
    #[serde(default)]
    pub codebook: Option<PathBuf>,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default)]
    pub exclude_stop_words_codebook: bool,
    #[serde(default = "default_aggregation")]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub similarity: SimilarityTransform,
    #[serde(default)]
    pub exclude_stop_words_at_indexing: bool,
    #[serde(default)]
    pub seed: u64,

    pub out_json: PathBuf,
    #[serde(default)]
    pub out_csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| xmodal::Error::Config(e.to_string()))
            .with_context(|| format!("parsing {}", path.display()))
    }

    pub fn method_spec(&self) -> MethodSpec {
        match self.method {
            Method::DeepPermutation => MethodSpec::Global {
                method: GlobalMethod::DeepPermutation,
                apply_crelu: self.apply_crelu,
            },
            Method::ScalarQuantization => MethodSpec::Global {
                method: GlobalMethod::ScalarQuantization { scale: self.scale },
                apply_crelu: self.apply_crelu,
            },
            Method::BocHard => MethodSpec::BocHard {
                exclude_stop_words_at_indexing: self.exclude_stop_words_at_indexing,
            },
            Method::BocSoft => MethodSpec::BocSoft {
                aggregation: self.aggregation,
                similarity: self.similarity,
                exclude_stop_words_at_indexing: self.exclude_stop_words_at_indexing,
            },
        }
    }

    pub fn uses_codebook(&self) -> bool {
        matches!(self.method, Method::BocHard | Method::BocSoft)
    }

    /// Sparsity levels to evaluate, in order.
    pub fn levels(&self) -> Vec<f64> {
        if self.sparsity_list.is_empty() {
            vec![self.sparsity]
        } else {
            self.sparsity_list.clone()
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(xmodal::Error::Config(msg).into());
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale: must be positive, got {}", self.scale));
        }
        if let Some(f) = self.levels().into_iter().find(|f| !(0.0..1.0).contains(f)) {
            return bad(format!("sparsity: {f} is outside [0, 1)"));
        }
        if self.method == Method::BocHard && self.levels().iter().any(|&f| f != 0.0) {
            return bad("sparsity: boc_hard has no sparsity control; use 0".into());
        }
        if self.rm_list.contains(&0) || self.rerank_k == 0 {
            bad("rm_list/rerank_k: values must be at least 1".into())
        } else if self.ks.is_empty() || self.ks.contains(&0) {
            bad("ks: must be non-empty and positive".into())
        } else if self.uses_codebook() && self.codebook.is_none() && self.p == 0 {
            bad("p: must be positive".into())
        } else {
            Ok(())
        }
    }
}

/// Parses `0,0.5,0.9`; an empty string is an empty list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow::anyhow!("`{t}`: {e}")))
        .collect()
}

pub fn require_file(path: &Path, what: &str) -> Result<()> {
    if !path.exists() {
        bail!(xmodal::Error::Config(format!(
            "{what} {} does not exist",
            path.display()
        )));
    }
    Ok(())
}
