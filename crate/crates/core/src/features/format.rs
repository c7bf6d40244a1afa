//! Binary feature pack format (`XMFP`, version 1, little-endian).
//!
//! ```text
//! magic "XMFP" | version u16 | modality u8 | flags u8 (bit0 contextualized) | dim u32 | items u64
//! per item:    id str16 | group str16 (len 0 = absent) | has_global u8 | [dim x f32]
//!              | n u32 | n x (word str16 | is_stop_word u8 | dim x f32)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, WriteBytesExt};

use super::{Concept, FeaturePack, Item, Modality};
use crate::binio::*;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"XMFP";
const VERSION: u16 = 1;
const FLAG_CONTEXTUALIZED: u8 = 1;

pub fn load_feature_pack(path: impl AsRef<Path>) -> Result<FeaturePack> {
    let path = path.as_ref();
    let mut r = BufReader::new(File::open(path)?);
    let mut pack = read_feature_pack(&mut r)?;
    pack.source = path.display().to_string();
    Ok(pack)
}

pub fn read_feature_pack<R: Read>(r: &mut R) -> Result<FeaturePack> {
    read_magic(r, MAGIC)?;
    read_version(r, VERSION)?;
    let modality = Modality::from_byte(read_u8(r)?)?;
    let flags = read_u8(r)?;
    let dim = read_u32(r)? as usize;
    if dim == 0 {
        return Err(Error::Format("dim must be positive".into()));
    }
    let count = read_u64(r)?;
    let mut items = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let id = read_str(r)?;
        let group = read_opt_str(r)?;
        let global = match read_u8(r)? {
            0 => None,
            1 => Some(read_f32s(r, dim)?),
            b => return Err(Error::Format(format!("has_global must be 0 or 1, got {b}"))),
        };
        let n = read_u32(r)? as usize;
        let mut concepts = Vec::with_capacity(n.min(1 << 16));
        for _ in 0..n {
            let word = read_opt_str(r)?;
            let is_stop_word = match read_u8(r)? {
                0 => false,
                1 => true,
                b => return Err(Error::Format(format!("is_stop_word must be 0 or 1, got {b}"))),
            };
            let vector = read_f32s(r, dim)?;
            concepts.push(Concept {
                vector,
                word,
                is_stop_word,
            });
        }
        items.push(Item {
            id,
            global,
            concepts,
            group,
        });
    }
    expect_eof(r)?;
    let pack = FeaturePack {
        modality,
        dim,
        items,
        contextualized: flags & FLAG_CONTEXTUALIZED != 0,
        source: String::new(),
    };
    pack.validate()?;
    Ok(pack)
}

pub fn write_feature_pack(pack: &FeaturePack, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_feature_pack_to(pack, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_feature_pack_to<W: Write>(pack: &FeaturePack, w: &mut W) -> Result<()> {
    pack.validate()?;
    let dim = u32::try_from(pack.dim).map_err(|_| Error::Dimension("dim exceeds u32".into()))?;
    w.write_all(MAGIC)?;
    w.write_u16::<LE>(VERSION)?;
    w.write_u8(pack.modality.to_byte())?;
    w.write_u8(if pack.contextualized { FLAG_CONTEXTUALIZED } else { 0 })?;
    w.write_u32::<LE>(dim)?;
    w.write_u64::<LE>(pack.items.len() as u64)?;
    for item in &pack.items {
        write_str(w, &item.id)?;
        write_opt_str(w, item.group.as_deref())?;
        match &item.global {
            Some(g) => {
                w.write_u8(1)?;
                write_f32s(w, g)?;
            }
            None => w.write_u8(0)?,
        }
        w.write_u32::<LE>(item.concepts.len() as u32)?;
        for c in &item.concepts {
            write_opt_str(w, c.word.as_deref())?;
            w.write_u8(c.is_stop_word as u8)?;
            write_f32s(w, &c.vector)?;
        }
    }
    Ok(())
}
