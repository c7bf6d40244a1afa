//! Concept codebooks shared by both modalities.

mod kmeans;
mod pool;
mod words;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::binio::*;
use crate::error::{Error, Result};

pub use kmeans::{kmeans, kmeans_points, KmeansParams, KmeansRun};
pub use pool::{build_pool, ConceptPool, PoolEntry};
pub use words::{build_word_codebook, read_word_list};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookMethod {
    Kmeans,
    WordFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub dim: usize,
    pub centroids: Vec<Vec<f32>>,
    pub method: CodebookMethod,
    pub labels: Option<Vec<String>>,
    pub built_with_stop_words: bool,
    pub built_contextualized: bool,
}

impl Codebook {
    pub fn p(&self) -> usize {
        self.centroids.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.centroids.is_empty() {
            return Err(Error::InsufficientData("codebook has no centroids".into()));
        }
        for (k, c) in self.centroids.iter().enumerate() {
            if c.len() != self.dim {
                return Err(Error::Dimension(format!(
                    "centroid {k} has {} components, dim is {}",
                    c.len(),
                    self.dim
                )));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("centroid {k} has non-finite components")));
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.p() {
                return Err(Error::Format(format!(
                    "{} labels for {} centroids",
                    labels.len(),
                    self.p()
                )));
            }
            if labels.iter().any(String::is_empty) {
                return Err(Error::Format("empty codebook label".into()));
            }
        }
        Ok(())
    }
}

const MAGIC: &[u8; 4] = b"XMCB";
const VERSION: u16 = 1;
const FLAG_STOP_WORDS: u8 = 1;
const FLAG_CONTEXTUALIZED: u8 = 2;

/// `"XMCB" | version u16 | method u8 | p u32 | dim u32 | flags u8`, then `p` records of
/// `label str16 (len 0 = absent) | dim x f32`.
pub fn write_codebook(cb: &Codebook, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_codebook_to(cb, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_codebook_to<W: Write>(cb: &Codebook, w: &mut W) -> Result<()> {
    cb.validate()?;
    w.write_all(MAGIC)?;
    w.write_u16::<LE>(VERSION)?;
    w.write_u8(match cb.method {
        CodebookMethod::Kmeans => 0,
        CodebookMethod::WordFrequency => 1,
    })?;
    w.write_u32::<LE>(cb.p() as u32)?;
    w.write_u32::<LE>(cb.dim as u32)?;
    let mut flags = 0;
    if cb.built_with_stop_words {
        flags |= FLAG_STOP_WORDS;
    }
    if cb.built_contextualized {
        flags |= FLAG_CONTEXTUALIZED;
    }
    w.write_u8(flags)?;
    for (k, c) in cb.centroids.iter().enumerate() {
        let label = cb.labels.as_ref().map(|l| l[k].as_str());
        write_opt_str(w, label)?;
        write_f32s(w, c)?;
    }
    Ok(())
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    read_codebook(&mut BufReader::new(File::open(path)?))
}

pub fn read_codebook<R: Read>(r: &mut R) -> Result<Codebook> {
    read_magic(r, MAGIC)?;
    read_version(r, VERSION)?;
    let method = match read_u8(r)? {
        0 => CodebookMethod::Kmeans,
        1 => CodebookMethod::WordFrequency,
        m => return Err(Error::Format(format!("unknown codebook method {m}"))),
    };
    let p = read_u32(r)? as usize;
    let dim = read_u32(r)? as usize;
    let flags = read_u8(r)?;
    let mut centroids = Vec::with_capacity(p.min(1 << 20));
    let mut labels = Vec::with_capacity(p.min(1 << 20));
    for _ in 0..p {
        labels.push(read_opt_str(r)?);
        centroids.push(read_f32s(r, dim)?);
    }
    expect_eof(r)?;
    let labels = if labels.iter().all(Option::is_none) {
        None
    } else {
        Some(
            labels
                .into_iter()
                .map(|l| l.ok_or_else(|| Error::Format("codebook labels must be all present or all absent".into())))
                .collect::<Result<Vec<_>>>()?,
        )
    };
    let cb = Codebook {
        dim,
        centroids,
        method,
        labels,
        built_with_stop_words: flags & FLAG_STOP_WORDS != 0,
        built_contextualized: flags & FLAG_CONTEXTUALIZED != 0,
    };
    cb.validate().map_err(|e| Error::Format(e.to_string()))?;
    Ok(cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codebook_file_roundtrip() {
        let cb = Codebook {
            dim: 2,
            centroids: vec![vec![0.0, 1.5], vec![-2.0, 3.0]],
            method: CodebookMethod::WordFrequency,
            labels: Some(vec!["dog".into(), "cat".into()]),
            built_with_stop_words: false,
            built_contextualized: true,
        };
        let mut buf = Vec::new();
        write_codebook_to(&cb, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"XMCB");
        assert_eq!(buf[15], FLAG_CONTEXTUALIZED);
        assert_eq!(read_codebook(&mut buf.as_slice()).unwrap(), cb);

        let unlabeled = Codebook {
            labels: None,
            method: CodebookMethod::Kmeans,
            ..cb
        };
        buf.clear();
        write_codebook_to(&unlabeled, &mut buf).unwrap();
        assert_eq!(read_codebook(&mut buf.as_slice()).unwrap(), unlabeled);
        buf[0] = 0;
        assert!(matches!(read_codebook(&mut buf.as_slice()), Err(Error::Format(_))));
    }
}
