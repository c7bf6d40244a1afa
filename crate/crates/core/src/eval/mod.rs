//! Recall@K evaluation: retrieval runs, re-ranking and sparsity sweeps.

mod experiment;
mod recall;
mod report;
mod retrieval;
mod truth;

pub use experiment::{sparsity_sweep, Experiment, MethodSpec};
pub use recall::{recall_at_k, HitRule, Rankings, Task};
pub use report::{read_reports_json, write_reports_csv, write_reports_json, EvalReport};
pub use retrieval::{mean_topk_overlap, pad_with_ties, rerank, run_retrieval};
pub use truth::GroundTruth;

/// Recall@K cut-offs used throughout.
pub const DEFAULT_KS: [usize; 3] = [1, 5, 10];
