//! Little-endian primitives shared by the on-disk formats.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub(crate) fn read_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(truncated)?;
    if &buf != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub(crate) fn read_version<R: Read>(r: &mut R, supported: u16) -> Result<()> {
    let v = read_u16(r)?;
    if v != supported {
        return Err(Error::Format(format!("unsupported version {v}")));
    }
    Ok(())
}

/// Maps an unexpected EOF onto a format error; other I/O errors pass through.
pub(crate) fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format("unexpected end of file".into())
    } else {
        Error::Io(e)
    }
}

pub(crate) fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    r.read_u8().map_err(truncated)
}

pub(crate) fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    r.read_u16::<LE>().map_err(truncated)
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    r.read_u32::<LE>().map_err(truncated)
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    r.read_u64::<LE>().map_err(truncated)
}

pub(crate) fn read_f32<R: Read>(r: &mut R) -> Result<f32> {
    r.read_f32::<LE>().map_err(truncated)
}

pub(crate) fn read_f32s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f32>> {
    let mut out = vec![0f32; n];
    r.read_f32_into::<LE>(&mut out).map_err(truncated)?;
    Ok(out)
}

/// u16 length prefix followed by UTF-8 bytes.
pub(crate) fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u16(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(truncated)?;
    String::from_utf8(buf).map_err(|_| Error::Format("string is not valid UTF-8".into()))
}

/// Like [`read_str`], with length 0 meaning absent.
pub(crate) fn read_opt_str<R: Read>(r: &mut R) -> Result<Option<String>> {
    let s = read_str(r)?;
    Ok(if s.is_empty() { None } else { Some(s) })
}

pub(crate) fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    let len =
        u16::try_from(s.len()).map_err(|_| Error::Format(format!("string longer than 65535 bytes: {s:.32}...")))?;
    w.write_u16::<LE>(len)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn write_opt_str<W: Write>(w: &mut W, s: Option<&str>) -> Result<()> {
    write_str(w, s.unwrap_or(""))
}

pub(crate) fn write_f32s<W: Write>(w: &mut W, xs: &[f32]) -> Result<()> {
    for &x in xs {
        w.write_f32::<LE>(x)?;
    }
    Ok(())
}

/// Errors unless the reader is exhausted.
pub(crate) fn expect_eof<R: Read>(r: &mut R) -> Result<()> {
    let mut b = [0u8; 1];
    match r.read(&mut b)? {
        0 => Ok(()),
        _ => Err(Error::Format("trailing bytes after payload".into())),
    }
}
