//! Inverted index with exact cosine scoring, plus the dense exact scorer.

mod dense;
mod inverted;
mod segment;

pub use dense::DenseStore;
pub use inverted::{build_index, build_index_skipping_empty, InvertedIndex, QueryStats};
pub use segment::{load_index, read_index, save_index, write_index};

use std::cmp::Ordering;

/// Descending score, ties by ascending id.
pub(crate) fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}
