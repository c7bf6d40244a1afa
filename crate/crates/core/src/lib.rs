//! Sparse, inverted-index friendly encodings of cross-modal deep features.
//!
//! Global image/sentence descriptors are turned into sparse vectors by deep permutations
//! or scalar quantization; sets of region/word concepts are encoded against a shared
//! codebook as a Bag of Concepts. Everything lands in an inverted index scored by cosine,
//! and [`eval`] measures Recall@K under sparsification and exact re-ranking.

pub mod boc;
pub mod codebook;
pub mod error;
pub mod eval;
pub mod exec;
pub mod features;
pub mod index;
pub mod sparse;
pub mod transform;

mod binio;

pub use error::{Error, Result};
pub use exec::Exec;
pub use sparse::{sparse_cosine, SparseVector};
