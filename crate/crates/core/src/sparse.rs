//! Sparse vectors: the common indexable representation.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, WriteBytesExt};

use crate::binio::*;
use crate::error::{Error, Result};

/// `(component, weight)` pairs sorted by component, all weights strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn new(dim: usize, entries: Vec<(u32, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("sparse vector dimension must be positive".into()));
        }
        let mut prev: Option<u32> = None;
        for &(i, w) in &entries {
            if i as usize >= dim {
                return Err(Error::Dimension(format!("component {i} out of range for dim {dim}")));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::Domain("components must be strictly increasing".into()));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!(
                    "weight {w} at component {i} is not positive and finite"
                )));
            }
            prev = Some(i);
        }
        Ok(Self { dim, entries })
    }

    pub(crate) fn from_sorted_unchecked(dim: usize, entries: Vec<(u32, f64)>) -> Self {
        debug_assert!(Self::new(dim, entries.clone()).is_ok());
        Self { dim, entries }
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// Drops zeros. Negative or non-finite components are a domain error.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Domain(format!("component {i} is {v}")));
            }
            if v > 0.0 {
                entries.push((i as u32, v));
            }
        }
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn get(&self, component: u32) -> f64 {
        self.entries
            .binary_search_by_key(&component, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, w) in &self.entries {
            out[i as usize] = w;
        }
        out
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    /// Keeps the `z` largest weights.
    pub fn sparsify_top_z(&self, z: usize) -> SparseVector {
        if z >= self.entries.len() {
            return self.clone();
        }
        let mut kept = self.entries.clone();
        top_z_in_place(&mut kept, z);
        kept.sort_unstable_by_key(|&(i, _)| i);
        Self::from_sorted_unchecked(self.dim, kept)
    }
}

/// Descending weight, then ascending component.
pub(crate) fn by_weight_desc(a: &(u32, f64), b: &(u32, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Truncates `entries` to its `z` best under [`by_weight_desc`], in unspecified order.
pub(crate) fn top_z_in_place(entries: &mut Vec<(u32, f64)>, z: usize) {
    if z == 0 {
        entries.clear();
    } else if z < entries.len() {
        entries.select_nth_unstable_by(z - 1, by_weight_desc);
        entries.truncate(z);
    }
}

/// Top-z over a dense non-negative vector; zeros are never kept.
pub fn sparsify_dense_top_z(values: &[f64], z: usize) -> Result<SparseVector> {
    Ok(SparseVector::from_dense(values)?.sparsify_top_z(z))
}

/// Cosine of the implied dense vectors; 0 when either side is empty.
pub fn sparse_cosine(a: &SparseVector, b: &SparseVector) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::Dimension(format!("{} vs {}", a.dim, b.dim)));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    Ok(clamp_unit(a.dot(b) / (a.norm() * b.norm())))
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// A named collection of encoded vectors sharing one dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedVectors {
    pub dim: usize,
    pub vectors: Vec<(String, SparseVector)>,
}

impl EncodedVectors {
    pub fn get(&self, id: &str) -> Option<&SparseVector> {
        self.vectors.iter().find(|(i, _)| i == id).map(|(_, v)| v)
    }

    pub fn empty_count(&self) -> usize {
        self.vectors.iter().filter(|(_, v)| v.is_empty()).count()
    }
}

const VECTORS_MAGIC: &[u8; 4] = b"XMSV";
const VECTORS_VERSION: u16 = 1;

/// Encoded vector file: `"XMSV" | version u16 | dim u32 | count u64`, then per vector
/// `id str16 | nnz u32 | nnz x (component u32, weight f32)`. Weights are stored as f32.
pub fn write_vectors(set: &EncodedVectors, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vectors_to(set, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_vectors_to<W: Write>(set: &EncodedVectors, w: &mut W) -> Result<()> {
    w.write_all(VECTORS_MAGIC)?;
    w.write_u16::<LE>(VECTORS_VERSION)?;
    w.write_u32::<LE>(set.dim as u32)?;
    w.write_u64::<LE>(set.vectors.len() as u64)?;
    for (id, v) in &set.vectors {
        if v.dim() != set.dim {
            return Err(Error::Dimension(format!(
                "vector `{id}` has dim {}, set has {}",
                v.dim(),
                set.dim
            )));
        }
        write_str(w, id)?;
        w.write_u32::<LE>(v.nnz() as u32)?;
        for &(i, x) in v.entries() {
            w.write_u32::<LE>(i)?;
            w.write_f32::<LE>(x as f32)?;
        }
    }
    Ok(())
}

pub fn read_vectors(path: impl AsRef<Path>) -> Result<EncodedVectors> {
    read_vectors_from(&mut BufReader::new(File::open(path)?))
}

pub fn read_vectors_from<R: Read>(r: &mut R) -> Result<EncodedVectors> {
    read_magic(r, VECTORS_MAGIC)?;
    read_version(r, VECTORS_VERSION)?;
    let dim = read_u32(r)? as usize;
    let count = read_u64(r)?;
    let mut vectors = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let id = read_str(r)?;
        let nnz = read_u32(r)? as usize;
        let mut entries = Vec::with_capacity(nnz.min(dim));
        for _ in 0..nnz {
            entries.push((read_u32(r)?, read_f32(r)? as f64));
        }
        let v = SparseVector::new(dim, entries).map_err(|e| Error::Format(format!("vector `{id}`: {e}")))?;
        vectors.push((id, v));
    }
    expect_eof(r)?;
    Ok(EncodedVectors { dim, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(dim: usize, e: &[(u32, f64)]) -> SparseVector {
        SparseVector::new(dim, e.to_vec()).unwrap()
    }

    #[test]
    fn top_z_examples() {
        let v = sv(3, &[(0, 5.0), (1, 3.0), (2, 9.0)]);
        assert_eq!(v.sparsify_top_z(2), sv(3, &[(0, 5.0), (2, 9.0)]));
        assert_eq!(v.sparsify_top_z(3), v);
        assert_eq!(v.sparsify_top_z(0), SparseVector::empty(3));
        let tied = sv(3, &[(0, 4.0), (1, 4.0), (2, 4.0)]);
        assert_eq!(tied.sparsify_top_z(1), sv(3, &[(0, 4.0)]));
    }

    #[test]
    fn cosine_examples() {
        let a = sv(4, &[(0, 3.0), (1, 4.0)]);
        assert!((sparse_cosine(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(sparse_cosine(&a, &sv(4, &[(2, 1.0)])).unwrap(), 0.0);
        assert!((sparse_cosine(&a, &sv(4, &[(0, 3.0)])).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(sparse_cosine(&a, &SparseVector::empty(4)).unwrap(), 0.0);
        assert!(matches!(sparse_cosine(&a, &sv(5, &[])), Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(SparseVector::new(3, vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(3, vec![(0, 0.0)]).is_err());
        assert!(SparseVector::new(3, vec![(3, 1.0)]).is_err());
        assert!(SparseVector::from_dense(&[1.0, -0.5]).is_err());
    }

    #[test]
    fn vector_file_roundtrip_and_magic() {
        let set = EncodedVectors {
            dim: 5,
            vectors: vec![
                ("a".into(), sv(5, &[(0, 2.0), (4, 0.25)])),
                ("b".into(), SparseVector::empty(5)),
            ],
        };
        let mut buf = Vec::new();
        write_vectors_to(&set, &mut buf).unwrap();
        assert_eq!(read_vectors_from(&mut buf.as_slice()).unwrap(), set);
        buf[1] = b'?';
        assert!(matches!(read_vectors_from(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    fn arb_dense() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![Just(0.0), 0.0f64..10.0, (0u8..4).prop_map(f64::from)],
            1..40,
        )
    }

    proptest! {
        #[test]
        fn top_z_idempotent_and_bounded(v in arb_dense(), z in 0usize..45) {
            let s = SparseVector::from_dense(&v).unwrap();
            let once = s.sparsify_top_z(z);
            prop_assert!(once.nnz() <= z);
            prop_assert_eq!(once.sparsify_top_z(z), once.clone());
            if z >= s.dim() {
                prop_assert_eq!(once, s);
            }
        }

        #[test]
        fn top_z_keeps_largest(v in arb_dense(), z in 0usize..45) {
            let s = SparseVector::from_dense(&v).unwrap();
            let kept = s.sparsify_top_z(z);
            let min_kept = kept.entries().iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            for &(i, w) in s.entries() {
                if kept.get(i) == 0.0 {
                    prop_assert!(w <= min_kept);
                }
            }
        }
    }
}
