//! Index segment format (`XMIX`, version 1, little-endian).
//!
//! ```text
//! magic "XMIX" | version u16 | dim u32 | items u64 | items x id str16 | items x norm f32
//! then dim posting lists: count u32 | count x (ordinal u32, weight f32)
//! ```
//! Norms are recomputed in f64 from the postings on load and checked against the stored f32.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, WriteBytesExt};

use super::InvertedIndex;
use crate::binio::*;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"XMIX";
const VERSION: u16 = 1;

pub fn save_index(index: &InvertedIndex, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_index(index, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_index<W: Write>(index: &InvertedIndex, w: &mut W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u16::<LE>(VERSION)?;
    w.write_u32::<LE>(index.dim as u32)?;
    w.write_u64::<LE>(index.ids.len() as u64)?;
    for id in &index.ids {
        write_str(w, id)?;
    }
    for &n in &index.norms {
        w.write_f32::<LE>(n as f32)?;
    }
    for list in &index.postings {
        w.write_u32::<LE>(list.len() as u32)?;
        for &(ord, weight) in list {
            w.write_u32::<LE>(ord)?;
            w.write_f32::<LE>(weight)?;
        }
    }
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<InvertedIndex> {
    read_index(&mut BufReader::new(File::open(path)?))
}

pub fn read_index<R: Read>(r: &mut R) -> Result<InvertedIndex> {
    read_magic(r, MAGIC)?;
    read_version(r, VERSION)?;
    let dim = read_u32(r)? as usize;
    let n = usize::try_from(read_u64(r)?).map_err(|_| Error::Format("item count overflows".into()))?;
    let mut ids = Vec::with_capacity(n.min(1 << 20));
    let mut lookup = HashMap::with_capacity(n.min(1 << 20));
    for ord in 0..n {
        let id = read_str(r)?;
        if lookup.insert(id.clone(), ord as u32).is_some() {
            return Err(Error::Format(format!("duplicate id `{id}` in segment")));
        }
        ids.push(id);
    }
    let stored_norms = read_f32s(r, n)?;
    let mut sq = vec![0.0f64; n];
    let mut postings = Vec::with_capacity(dim.min(1 << 24));
    for c in 0..dim {
        let count = read_u32(r)? as usize;
        let mut list = Vec::with_capacity(count.min(n));
        let mut prev: Option<u32> = None;
        for _ in 0..count {
            let ord = read_u32(r)?;
            let weight = read_f32(r)?;
            if ord as usize >= n || prev.is_some_and(|p| p >= ord) {
                return Err(Error::Format(format!("posting list {c} has a bad ordinal {ord}")));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::Format(format!("posting list {c} has weight {weight}")));
            }
            sq[ord as usize] += (weight as f64) * (weight as f64);
            prev = Some(ord);
            list.push((ord, weight));
        }
        postings.push(list);
    }
    expect_eof(r)?;
    let norms: Vec<f64> = sq.into_iter().map(f64::sqrt).collect();
    for (ord, (&stored, &norm)) in stored_norms.iter().zip(&norms).enumerate() {
        if norm == 0.0 || stored != norm as f32 {
            return Err(Error::Format(format!(
                "norm of `{}` is {stored} on disk but {norm} from postings",
                ids[ord]
            )));
        }
    }
    Ok(InvertedIndex {
        dim,
        postings,
        norms,
        ids,
        lookup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::sparse::{EncodedVectors, SparseVector};

    fn index() -> InvertedIndex {
        let set = EncodedVectors {
            dim: 5,
            vectors: vec![
                ("x".into(), SparseVector::new(5, vec![(0, 0.1), (4, 3.0)]).unwrap()),
                ("y".into(), SparseVector::new(5, vec![(1, 7.0), (4, 1.25)]).unwrap()),
            ],
        };
        build_index(&set).unwrap()
    }

    #[test]
    fn roundtrip_is_identity() {
        let idx = index();
        let mut buf = Vec::new();
        write_index(&idx, &mut buf).unwrap();
        let back = read_index(&mut buf.as_slice()).unwrap();
        assert_eq!(back, idx);
        let q = SparseVector::new(5, vec![(1, 0.5), (4, 1.0)]).unwrap();
        assert_eq!(back.query_topk(&q, 2).unwrap(), idx.query_topk(&q, 2).unwrap());
    }

    #[test]
    fn corrupted_magic() {
        let mut buf = Vec::new();
        write_index(&index(), &mut buf).unwrap();
        buf[3] = b'Y';
        assert!(matches!(read_index(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn tampered_norm_is_rejected() {
        let mut buf = Vec::new();
        write_index(&index(), &mut buf).unwrap();
        // header 18 bytes + ids (3 + 3) puts the first norm at offset 24.
        buf[24] ^= 0x40;
        assert!(matches!(read_index(&mut buf.as_slice()), Err(Error::Format(_))));
    }
}
